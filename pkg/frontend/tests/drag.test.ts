import { describe, expect, it } from "vitest";

import {
  applyAxisLock,
  dot,
  dragTarget,
  intersectRayPlane,
  length,
  normalize,
  sub,
  type Ray,
} from "../src/drag.js";
import type { Vec3 } from "../src/types.js";

const close = (a: Vec3, b: Vec3, tol = 1e-12) => expect(length(sub(a, b))).toBeLessThan(tol);

describe("ray-plane intersection", () => {
  it("hits an axis-aligned plane where expected", () => {
    const ray: Ray = { origin: [0, 0, 5], dir: [0, 0, -1] };
    close(intersectRayPlane(ray, [0, 0, 1], [0, 0, 1])!, [0, 0, 1]);
  });

  it("handles oblique rays", () => {
    const ray: Ray = { origin: [0, 2, 2], dir: normalize([1, -1, -1]) };
    const hit = intersectRayPlane(ray, [5, 0, 0], [0, 0, 1])!;
    expect(hit[2]).toBeCloseTo(0, 12);
    close(hit, [2, 0, 0]);
  });

  it("returns null for a parallel ray", () => {
    const ray: Ray = { origin: [0, 0, 5], dir: [1, 0, 0] };
    expect(intersectRayPlane(ray, [0, 0, 0], [0, 0, 1])).toBeNull();
  });

  it("returns null when the plane is behind the ray", () => {
    const ray: Ray = { origin: [0, 0, 5], dir: [0, 0, 1] };
    expect(intersectRayPlane(ray, [0, 0, 0], [0, 0, 1])).toBeNull();
  });
});

describe("axis locks", () => {
  const start: Vec3 = [1, 2, 3];

  it("no lock passes the position through", () => {
    close(applyAxisLock(start, [4, 5, 6], null), [4, 5, 6]);
  });

  it("x lock keeps y and z at the grab point", () => {
    close(applyAxisLock(start, [4, 5, 6], "x"), [4, 2, 3]);
  });

  it("y and z locks project onto their axes", () => {
    close(applyAxisLock(start, [4, 5, 6], "y"), [1, 5, 3]);
    close(applyAxisLock(start, [4, 5, 6], "z"), [1, 2, 6]);
  });
});

describe("camera-parallel drag target", () => {
  const start: Vec3 = [0.2, 0.1, 0];
  const viewDir: Vec3 = normalize([0, 0, -1]);

  it("stays in the plane through the grab point", () => {
    const ray: Ray = { origin: [0.5, 0.8, 3], dir: normalize([-0.1, -0.2, -1]) };
    const target = dragTarget(ray, start, viewDir, null)!;
    expect(Math.abs(dot(sub(target, start), viewDir))).toBeLessThan(1e-12);
  });

  it("a centered ray reproduces the grab point", () => {
    const ray: Ray = { origin: [0.2, 0.1, 2], dir: [0, 0, -1] };
    close(dragTarget(ray, start, viewDir, null)!, start);
  });

  it("axis lock composes with the plane hit", () => {
    const ray: Ray = { origin: [1, 1, 2], dir: [0, 0, -1] };
    const target = dragTarget(ray, start, viewDir, "x")!;
    close(target, [1, 0.1, 0]);
  });

  it("misses when looking along the plane", () => {
    const ray: Ray = { origin: [0, 0, 5], dir: [1, 0, 0] };
    expect(dragTarget(ray, start, [0, 0, -1], null)).toBeNull();
  });
});
