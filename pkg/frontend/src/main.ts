/** Wires the DOM, the renderer, and the editor store together. */
import { ApiClient, ApiError } from "./api.js";
import { dragTarget, type AxisLock } from "./drag.js";
import { Viewer } from "./scene.js";
import { EditorStore } from "./state.js";
import type { SessionSource, Vec3 } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function toast(message: string, kind: "info" | "error"): void {
  const host = $("toasts");
  const node = document.createElement("div");
  node.className = `toast ${kind}`;
  node.textContent = message;
  if (kind === "error") {
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.onclick = () => {
      store.retry();
      node.remove();
    };
    node.appendChild(retry);
  }
  host.appendChild(node);
  setTimeout(() => node.remove(), kind === "error" ? 10000 : 3500);
}

const api = new ApiClient("");
const viewer = new Viewer($("viewport"));
const store = new EditorStore(api, {
  mesh: (vertices) => viewer.updateVertices(vertices),
  keypoints: (handles) => {
    viewer.setHandles(handles, store.draggingIndex);
    viewer.setArrows(store.originalKeypoints, handles);
    syncBadge();
  },
  session: (view) => {
    viewer.setMesh(view.mesh.vertices, view.mesh.faces);
    viewer.setCage(view.cage.vertices, view.cage.faces);
    viewer.showCage(($("cage-toggle") as HTMLInputElement).checked);
    toast(`session ${view.session_id.slice(0, 8)}: ${view.n_keypoints} handles`, "info");
  },
  status: (message, kind) => toast(message, kind),
});

function syncBadge(): void {
  $("sync-badge").style.visibility = store.synchronized ? "visible" : "hidden";
}

// ---------------------------------------------------------------- open
async function openSource(source: SessionSource): Promise<void> {
  try {
    await store.open(source);
  } catch (error) {
    const message =
      error instanceof ApiError
        ? `open failed: ${error.message} (HTTP ${error.status})`
        : `open failed: ${String(error)}`;
    toast(message, "error");
  }
}

$("open-builtin").onclick = () => {
  const family = ($("builtin-select") as HTMLSelectElement).value;
  void openSource({ builtin: family });
};

($("obj-file") as HTMLInputElement).onchange = async (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  const text = await file.text();
  input.value = "";
  void openSource({ obj: text });
};

// ---------------------------------------------------------------- toolbar
($("cage-toggle") as HTMLInputElement).onchange = (event) => {
  viewer.showCage((event.target as HTMLInputElement).checked);
};

($("sync-toggle") as HTMLInputElement).onchange = (event) => {
  store.setSync((event.target as HTMLInputElement).checked);
};

$("undo-button").onclick = () => store.undo();
$("reset-button").onclick = () => void store.reset();

$("export-button").onclick = async () => {
  if (!store.session) return;
  try {
    const text = await api.exportObj(store.session.session_id);
    const url = URL.createObjectURL(new Blob([text], { type: "text/plain" }));
    const anchor = document.createElement("a");
    anchor.href = url;
    anchor.download = "deformed.obj";
    anchor.click();
    URL.revokeObjectURL(url);
  } catch (error) {
    toast(`export failed: ${String(error)}`, "error");
  }
};

document.addEventListener("keydown", (event) => {
  if ((event.ctrlKey || event.metaKey) && event.key.toLowerCase() === "z") {
    event.preventDefault();
    store.undo();
  }
});

// ---------------------------------------------------------------- dragging
let axisLock: AxisLock = null;
document.addEventListener("keydown", (event) => {
  const key = event.key.toLowerCase();
  if (key === "x" || key === "y" || key === "z") axisLock = key;
});
document.addEventListener("keyup", (event) => {
  const key = event.key.toLowerCase();
  if (key === axisLock) axisLock = null;
});

let dragIndex: number | null = null;
let dragStart: Vec3 | null = null;

viewer.canvas.addEventListener("pointerdown", (event) => {
  const index = viewer.pickHandle(event);
  if (index === null) return;
  dragIndex = index;
  dragStart = [...store.handles[index]!];
  store.beginDrag(index);
  viewer.controls.enabled = false;
  viewer.canvas.setPointerCapture(event.pointerId);
});

viewer.canvas.addEventListener("pointermove", (event) => {
  if (dragIndex === null || dragStart === null) return;
  const target = dragTarget(viewer.screenRay(event), dragStart, viewer.viewDir(), axisLock);
  if (target) store.dragTo(dragIndex, target);
});

viewer.canvas.addEventListener("pointerup", (event) => {
  if (dragIndex === null) return;
  store.endDrag(dragIndex);
  dragIndex = null;
  dragStart = null;
  viewer.controls.enabled = true;
  viewer.canvas.releasePointerCapture(event.pointerId);
});

// ---------------------------------------------------------------- sliders
async function buildSliders(): Promise<void> {
  const panel = $("sliders");
  panel.innerHTML = "";
  let info;
  try {
    info = await api.priorInfo();
  } catch {
    return; // service unreachable; open() will surface the real error
  }
  const syncToggle = $("sync-toggle") as HTMLInputElement;
  if (!info.available || !info.n_basis || !info.component_std) {
    syncToggle.disabled = true;
    $("prior-panel").style.display = "none";
    return;
  }
  syncToggle.disabled = false;
  $("prior-panel").style.display = "";
  const stds = info.component_std;
  const sliders: HTMLInputElement[] = [];
  const coefficients = (): number[] =>
    sliders.map((s, i) => (Number(s.value) / 100) * (stds[i] ?? 0));

  for (let i = 0; i < info.n_basis; i++) {
    const row = document.createElement("label");
    row.className = "slider-row";
    const caption = document.createElement("span");
    caption.textContent = `c${i}`;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "-300"; // ±3σ in percent of one σ
    slider.max = "300";
    slider.value = "0";
    slider.oninput = () => store.preview({ prior_coefficients: coefficients() });
    slider.onchange = () => store.commit({ prior_coefficients: coefficients() });
    sliders.push(slider);
    row.append(caption, slider);
    panel.appendChild(row);
  }
  const zero = document.createElement("button");
  zero.textContent = "zero sliders";
  zero.onclick = () => {
    sliders.forEach((s) => (s.value = "0"));
    store.commit({ prior_coefficients: coefficients() });
  };
  panel.appendChild(zero);
}

void buildSliders();
void openSource({ builtin: "winged" }).catch(() => undefined);
