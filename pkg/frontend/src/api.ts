/** Thin typed client for the deformation service. All shape math happens
 * server-side; this module only moves JSON. */
import type {
  DeformPayload,
  DeformResponse,
  HealthInfo,
  PriorInfo,
  SessionSource,
  SessionView,
  Vec3,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let detail = response.statusText || `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    /* non-JSON error body; keep the status text */
  }
  return new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.requestJson<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<HealthInfo> {
    return this.requestJson<HealthInfo>("/health");
  }

  createSession(source: SessionSource): Promise<SessionView> {
    return this.post<SessionView>("/sessions", source);
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.requestJson<SessionView>(`/sessions/${sessionId}`);
  }

  deform(sessionId: string, payload: DeformPayload): Promise<DeformResponse> {
    return this.post<DeformResponse>(`/sessions/${sessionId}/deform`, payload);
  }

  reset(sessionId: string): Promise<SessionView> {
    return this.post<SessionView>(`/sessions/${sessionId}/reset`, {});
  }

  /** Deformed mesh as OBJ text, exactly as the server formats it. */
  async exportObj(sessionId: string): Promise<string> {
    const response = await this.fetchFn(`${this.base}/sessions/${sessionId}/export`);
    if (!response.ok) throw await errorFrom(response);
    return response.text();
  }

  priorInfo(): Promise<PriorInfo> {
    return this.requestJson<PriorInfo>("/prior");
  }

  priorSample(coefficients: number[]): Promise<{ keypoints: Vec3[] }> {
    return this.post<{ keypoints: Vec3[] }>("/prior/sample", { coefficients });
  }
}
