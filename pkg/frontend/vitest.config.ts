import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the service e2e suite trains a small checkpoint in beforeAll
    testTimeout: 120_000,
    hookTimeout: 180_000,
  },
});
