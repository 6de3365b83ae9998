/** Camera-parallel drag-plane math, free of any rendering dependency.
 *
 * A grabbed handle moves in the plane through its grab position whose
 * normal faces the camera, so screen motion maps 1:1 to world motion at
 * the handle's depth. Holding an axis key constrains the move to that
 * world axis instead.
 */
import type { Vec3 } from "./types.js";

export interface Ray {
  origin: Vec3;
  dir: Vec3;
}

export type AxisLock = "x" | "y" | "z" | null;

export const sub = (a: Vec3, b: Vec3): Vec3 => [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
export const add = (a: Vec3, b: Vec3): Vec3 => [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
export const scale = (a: Vec3, s: number): Vec3 => [a[0] * s, a[1] * s, a[2] * s];
export const dot = (a: Vec3, b: Vec3): number => a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
export const length = (a: Vec3): number => Math.hypot(a[0], a[1], a[2]);

export function normalize(a: Vec3): Vec3 {
  const n = length(a);
  return n > 0 ? scale(a, 1 / n) : [0, 0, 0];
}

const AXES: Record<"x" | "y" | "z", Vec3> = {
  x: [1, 0, 0],
  y: [0, 1, 0],
  z: [0, 0, 1],
};

/** Intersection point of a ray with a plane, or null when they are
 * parallel or the hit lies behind the ray origin. */
export function intersectRayPlane(ray: Ray, planePoint: Vec3, planeNormal: Vec3): Vec3 | null {
  const denom = dot(ray.dir, planeNormal);
  if (Math.abs(denom) < 1e-12) return null;
  const t = dot(sub(planePoint, ray.origin), planeNormal) / denom;
  if (t < 0) return null;
  return add(ray.origin, scale(ray.dir, t));
}

/** Clamp a proposed position onto the world axis through the grab point. */
export function applyAxisLock(start: Vec3, proposed: Vec3, lock: AxisLock): Vec3 {
  if (lock === null) return proposed;
  const axis = AXES[lock];
  return add(start, scale(axis, dot(sub(proposed, start), axis)));
}

/** Where the pointer ray puts a handle grabbed at `start`: the hit on the
 * camera-parallel plane through `start` (normal = `viewDir`), optionally
 * constrained to one world axis. Null when the ray misses the plane. */
export function dragTarget(ray: Ray, start: Vec3, viewDir: Vec3, lock: AxisLock): Vec3 | null {
  const hit = intersectRayPlane(ray, start, normalize(viewDir));
  if (hit === null) return null;
  return applyAxisLock(start, hit, lock);
}
