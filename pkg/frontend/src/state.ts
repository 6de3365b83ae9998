/** Editor state: the session mirror, the drag/undo lifecycle, and the
 * request discipline. Pure logic — no DOM, no rendering — so every
 * invariant here is unit-testable:
 *
 *  - at most one deform request is in flight; the newest desired payload
 *    replaces any queued one (latest drag wins),
 *  - requests are rate-limited to at most one per MIN_REQUEST_INTERVAL_MS,
 *  - responses carry sequence numbers and stale ones are discarded,
 *  - the undo stack stores the exact payloads that were committed, so
 *    undoing (or replaying) re-sends byte-identical requests,
 *  - a network failure pauses editing until retry() instead of spamming.
 */
import { ApiClient, ApiError } from "./api.js";
import type {
  DeformPayload,
  DeformResponse,
  SessionSource,
  SessionView,
  Vec3,
} from "./types.js";

/** 10 deform requests per second, tops. */
export const MIN_REQUEST_INTERVAL_MS = 100;

export interface EditorEvents {
  /** Vertex buffer replaced (topology never changes within a session). */
  mesh(vertices: Vec3[]): void;
  /** Handle positions changed (drag, response, undo, reset). */
  keypoints(handles: Vec3[], synchronized: boolean): void;
  /** New session opened. */
  session(view: SessionView): void;
  /** User-facing notice; `kind` picks the toast style. */
  status(message: string, kind: "info" | "error"): void;
}

type Clock = () => number;
type Schedule = (fn: () => void, ms: number) => unknown;
type Cancel = (handle: unknown) => void;

const cloneVec3s = (points: Vec3[]): Vec3[] => points.map((p) => [p[0], p[1], p[2]]);

const clonePayload = (payload: DeformPayload): DeformPayload =>
  JSON.parse(JSON.stringify(payload)) as DeformPayload;

/** Serializes deform traffic: one in flight, newest queued payload wins,
 * sends spaced by the rate limit, stale responses dropped by sequence. */
export class DeformScheduler {
  private inflight = false;
  private queued: DeformPayload | null = null;
  private timer: unknown = null;
  private lastSent = Number.NEGATIVE_INFINITY;
  private seq = 0;
  private lastApplied = 0;
  paused = false;

  constructor(
    private readonly send: (payload: DeformPayload) => Promise<DeformResponse>,
    private readonly apply: (response: DeformResponse) => void,
    private readonly onError: (error: unknown) => void,
    private readonly clock: Clock = () => Date.now(),
    private readonly schedule: Schedule = (fn, ms) => setTimeout(fn, ms),
    private readonly cancel: Cancel = (handle) => clearTimeout(handle as number),
  ) {}

  submit(payload: DeformPayload): void {
    this.queued = payload;
    this.pump();
  }

  retry(): void {
    this.paused = false;
    this.pump();
  }

  get idle(): boolean {
    return !this.inflight && this.queued === null && this.timer === null;
  }

  /** Drop anything queued and forget the pause (new session). */
  clear(): void {
    this.queued = null;
    this.paused = false;
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
  }

  private pump(): void {
    if (this.inflight || this.paused || this.queued === null) return;
    const wait = this.lastSent + MIN_REQUEST_INTERVAL_MS - this.clock();
    if (wait > 0) {
      if (this.timer === null) {
        this.timer = this.schedule(() => {
          this.timer = null;
          this.pump();
        }, wait);
      }
      return;
    }
    const payload = this.queued;
    this.queued = null;
    this.inflight = true;
    this.lastSent = this.clock();
    const seq = ++this.seq;
    this.send(payload).then(
      (response) => {
        this.inflight = false;
        if (seq > this.lastApplied) {
          this.lastApplied = seq;
          this.apply(response);
        }
        this.pump();
      },
      (error) => {
        this.inflight = false;
        this.paused = true;
        if (this.queued === null) this.queued = payload; // keep the edit for retry
        this.onError(error);
      },
    );
  }
}

export class EditorStore {
  session: SessionView | null = null;
  handles: Vec3[] = [];
  originalKeypoints: Vec3[] = [];
  meshVertices: Vec3[] = [];
  synchronized = false;
  syncEnabled = false;
  draggingIndex: number | null = null;

  private committedPayload: DeformPayload | null = null;
  private readonly undoStack: DeformPayload[] = [];
  private readonly scheduler: DeformScheduler;

  constructor(
    private readonly api: ApiClient,
    private readonly events: Partial<EditorEvents> = {},
    clock: Clock = () => Date.now(),
    schedule: Schedule = (fn, ms) => setTimeout(fn, ms),
    cancel: Cancel = (handle) => clearTimeout(handle as number),
  ) {
    this.scheduler = new DeformScheduler(
      (payload) => {
        if (this.session === null) return Promise.reject(new Error("no session"));
        return this.api.deform(this.session.session_id, payload);
      },
      (response) => this.applyResponse(response),
      (error) => this.reportError("deform failed", error),
      clock,
      schedule,
      cancel,
    );
  }

  get paused(): boolean {
    return this.scheduler.paused;
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  /** Open a shape; existing state is untouched if the service rejects it. */
  async open(source: SessionSource): Promise<SessionView> {
    const view = await this.api.createSession(source);
    this.session = view;
    this.meshVertices = view.mesh.vertices;
    this.handles = cloneVec3s(view.keypoints);
    this.originalKeypoints = cloneVec3s(view.original_keypoints);
    this.synchronized = view.synchronized;
    this.draggingIndex = null;
    this.committedPayload = { keypoints: cloneVec3s(view.original_keypoints) };
    this.undoStack.length = 0;
    this.scheduler.clear();
    this.events.session?.(view);
    this.events.mesh?.(this.meshVertices);
    this.events.keypoints?.(this.handles, this.synchronized);
    return view;
  }

  setSync(enabled: boolean): void {
    this.syncEnabled = enabled;
  }

  beginDrag(index: number): void {
    if (this.session === null || index < 0 || index >= this.handles.length) return;
    this.draggingIndex = index;
  }

  /** Move a handle during a drag; previews stream through the scheduler. */
  dragTo(index: number, position: Vec3): void {
    if (this.session === null) return;
    this.handles[index] = [position[0], position[1], position[2]];
    this.events.keypoints?.(this.handles, this.synchronized);
    if (!this.scheduler.paused) this.scheduler.submit(this.dragPayload(index));
  }

  /** Release: commit the drag as one undoable step. */
  endDrag(index: number): void {
    if (this.session === null) return;
    this.draggingIndex = null;
    this.commit(this.dragPayload(index));
  }

  /** Preview a payload without touching the undo stack (slider motion). */
  preview(payload: DeformPayload): void {
    if (this.session === null || this.scheduler.paused) return;
    this.scheduler.submit(payload);
  }

  /** Commit a payload as an undoable step and send it. */
  commit(payload: DeformPayload): void {
    if (this.session === null) return;
    if (this.committedPayload !== null) this.undoStack.push(this.committedPayload);
    this.committedPayload = clonePayload(payload);
    this.scheduler.submit(payload);
  }

  /** Re-send the previous committed payload verbatim; with an empty stack,
   * fall back to the session's original keypoints. */
  undo(): void {
    if (this.session === null) return;
    const previous = this.undoStack.pop() ?? { keypoints: cloneVec3s(this.originalKeypoints) };
    this.committedPayload = previous;
    if ("keypoints" in previous) {
      this.handles = cloneVec3s(previous.keypoints);
      this.events.keypoints?.(this.handles, this.synchronized);
    }
    this.scheduler.submit(clonePayload(previous));
  }

  async reset(): Promise<void> {
    if (this.session === null) return;
    try {
      const view = await this.api.reset(this.session.session_id);
      this.session = view;
      this.meshVertices = view.mesh.vertices;
      this.handles = cloneVec3s(view.keypoints);
      this.synchronized = view.synchronized;
      this.committedPayload = { keypoints: cloneVec3s(view.original_keypoints) };
      this.undoStack.length = 0;
      this.scheduler.clear();
      this.events.mesh?.(this.meshVertices);
      this.events.keypoints?.(this.handles, this.synchronized);
    } catch (error) {
      this.reportError("reset failed", error);
    }
  }

  retry(): void {
    this.scheduler.retry();
  }

  /** Resolves once no request is in flight, queued, or scheduled. */
  whenIdle(): Promise<void> {
    return new Promise((resolve) => {
      const tick = () => {
        if (this.scheduler.idle || this.scheduler.paused) resolve();
        else setTimeout(tick, 5);
      };
      tick();
    });
  }

  private dragPayload(index: number): DeformPayload {
    const position = this.handles[index];
    if (this.syncEnabled && position !== undefined) {
      return { edits: [{ index, position: [...position] }], sync: true };
    }
    return { keypoints: cloneVec3s(this.handles) };
  }

  private applyResponse(response: DeformResponse): void {
    if (this.session === null || response.session_id !== this.session.session_id) return;
    this.meshVertices = response.vertices;
    const incoming = cloneVec3s(response.keypoints);
    if (this.draggingIndex !== null) {
      // keep the handle under the cursor; the next response catches up
      const held = this.handles[this.draggingIndex];
      if (held !== undefined) incoming[this.draggingIndex] = held;
    }
    this.handles = incoming;
    this.synchronized = response.synchronized;
    this.events.mesh?.(this.meshVertices);
    this.events.keypoints?.(this.handles, this.synchronized);
  }

  private reportError(prefix: string, error: unknown): void {
    const message =
      error instanceof ApiError
        ? `${prefix}: ${error.message} (HTTP ${error.status})`
        : `${prefix}: ${String(error instanceof Error ? error.message : error)}`;
    this.events.status?.(message, "error");
  }
}
