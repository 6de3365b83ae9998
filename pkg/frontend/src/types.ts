/** Wire types for the deformation service JSON API. */

export type Vec3 = [number, number, number];

export interface MeshPayload {
  vertices: Vec3[];
  faces: number[][];
}

export interface SessionView {
  session_id: string;
  n_keypoints: number;
  mesh: MeshPayload;
  keypoints: Vec3[];
  original_keypoints: Vec3[];
  cage: { vertices: Vec3[]; faces: number[][] };
  synchronized: boolean;
}

export interface DeformResponse {
  session_id: string;
  vertices: Vec3[];
  keypoints: Vec3[];
  synchronized: boolean;
}

export interface HealthInfo {
  status: string;
  n_keypoints: number;
  kernel_backend: string;
  prior_loaded: boolean;
}

export interface PriorInfo {
  available: boolean;
  n_keypoints?: number;
  n_basis?: number;
  component_std?: number[];
  rank_deficient?: boolean;
}

export interface KeypointEdit {
  index: number;
  position: Vec3;
}

/** Exactly one deformation mode per request. */
export type DeformPayload =
  | { keypoints: Vec3[] }
  | { edits: KeypointEdit[]; sync?: boolean }
  | { prior_coefficients: number[] };

export type SessionSource = { builtin: string } | { obj: string };
