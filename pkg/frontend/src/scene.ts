/** Rendering: one mesh, an optional cage wireframe, draggable handle
 * spheres, and displacement arrows from each handle's original position.
 * The session's topology never changes, so deform responses only re-upload
 * the vertex buffer. */
import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";

import type { Ray } from "./drag.js";
import type { Vec3 } from "./types.js";

const HANDLE_COLOR = 0x27a0e6;
const HANDLE_SELECTED = 0xffb020;
const ARROW_COLOR = 0xe03131;
const MESH_COLOR = 0x9aa7b8;
const CAGE_COLOR = 0x3fbf6f;

function triangulate(faces: number[][]): number[] {
  const out: number[] = [];
  for (const face of faces) {
    for (let i = 1; i + 1 < face.length; i++) {
      out.push(face[0]!, face[i]!, face[i + 1]!);
    }
  }
  return out;
}

function edgePairs(faces: number[][]): number[] {
  const seen = new Set<string>();
  const out: number[] = [];
  for (const face of faces) {
    for (let i = 0; i < face.length; i++) {
      const a = face[i]!;
      const b = face[(i + 1) % face.length]!;
      const key = a < b ? `${a}:${b}` : `${b}:${a}`;
      if (seen.has(key)) continue;
      seen.add(key);
      out.push(a, b);
    }
  }
  return out;
}

function flatten(points: Vec3[]): Float32Array {
  const array = new Float32Array(points.length * 3);
  points.forEach((p, i) => array.set(p, i * 3));
  return array;
}

export class Viewer {
  private readonly scene = new THREE.Scene();
  private readonly camera: THREE.PerspectiveCamera;
  private readonly renderer: THREE.WebGLRenderer;
  readonly controls: OrbitControls;
  private readonly raycaster = new THREE.Raycaster();

  private mesh: THREE.Mesh | null = null;
  private cage: THREE.LineSegments | null = null;
  private handles: THREE.Mesh[] = [];
  private arrows: THREE.ArrowHelper[] = [];
  private handleRadius = 0.02;

  constructor(private readonly container: HTMLElement) {
    this.camera = new THREE.PerspectiveCamera(45, 1, 0.01, 100);
    this.camera.position.set(1.6, 1.2, 1.6);
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    container.appendChild(this.renderer.domElement);

    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.enableDamping = true;

    this.scene.background = new THREE.Color(0x14181f);
    const key = new THREE.DirectionalLight(0xffffff, 2.2);
    key.position.set(2, 3, 2);
    this.scene.add(key, new THREE.AmbientLight(0xffffff, 0.55));
    this.scene.add(new THREE.GridHelper(2, 10, 0x2a3340, 0x222a36));

    this.resize();
    window.addEventListener("resize", () => this.resize());
    this.renderer.setAnimationLoop(() => {
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    });
  }

  get canvas(): HTMLCanvasElement {
    return this.renderer.domElement;
  }

  private resize(): void {
    const w = this.container.clientWidth || 1;
    const h = this.container.clientHeight || 1;
    this.renderer.setSize(w, h);
    this.camera.aspect = w / h;
    this.camera.updateProjectionMatrix();
  }

  setMesh(vertices: Vec3[], faces: number[][]): void {
    if (this.mesh) {
      this.scene.remove(this.mesh);
      this.mesh.geometry.dispose();
    }
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute("position", new THREE.BufferAttribute(flatten(vertices), 3));
    geometry.setIndex(triangulate(faces));
    geometry.computeVertexNormals();
    const material = new THREE.MeshStandardMaterial({
      color: MESH_COLOR,
      roughness: 0.6,
      metalness: 0.05,
      side: THREE.DoubleSide,
    });
    this.mesh = new THREE.Mesh(geometry, material);
    this.scene.add(this.mesh);

    geometry.computeBoundingSphere();
    this.handleRadius = Math.max(0.012, (geometry.boundingSphere?.radius ?? 1) * 0.035);
  }

  updateVertices(vertices: Vec3[]): void {
    if (!this.mesh) return;
    const attr = this.mesh.geometry.getAttribute("position") as THREE.BufferAttribute;
    (attr.array as Float32Array).set(flatten(vertices));
    attr.needsUpdate = true;
    this.mesh.geometry.computeVertexNormals();
  }

  setCage(vertices: Vec3[], faces: number[][]): void {
    if (this.cage) {
      this.scene.remove(this.cage);
      this.cage.geometry.dispose();
    }
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute("position", new THREE.BufferAttribute(flatten(vertices), 3));
    geometry.setIndex(edgePairs(faces));
    this.cage = new THREE.LineSegments(
      geometry,
      new THREE.LineBasicMaterial({ color: CAGE_COLOR, transparent: true, opacity: 0.5 }),
    );
    this.cage.visible = false;
    this.scene.add(this.cage);
  }

  showCage(visible: boolean): void {
    if (this.cage) this.cage.visible = visible;
  }

  setHandles(positions: Vec3[], selected: number | null): void {
    while (this.handles.length > positions.length) {
      const extra = this.handles.pop()!;
      this.scene.remove(extra);
      extra.geometry.dispose();
    }
    while (this.handles.length < positions.length) {
      const sphere = new THREE.Mesh(
        new THREE.SphereGeometry(1, 20, 16),
        new THREE.MeshStandardMaterial({ color: HANDLE_COLOR, roughness: 0.35 }),
      );
      sphere.userData.handleIndex = this.handles.length;
      this.handles.push(sphere);
      this.scene.add(sphere);
    }
    positions.forEach((p, i) => {
      const sphere = this.handles[i]!;
      sphere.position.set(p[0], p[1], p[2]);
      sphere.scale.setScalar(this.handleRadius);
      (sphere.material as THREE.MeshStandardMaterial).color.setHex(
        i === selected ? HANDLE_SELECTED : HANDLE_COLOR,
      );
    });
  }

  /** Red displacement arrows from original to current keypoint positions. */
  setArrows(from: Vec3[], to: Vec3[]): void {
    for (const arrow of this.arrows) this.scene.remove(arrow);
    this.arrows = [];
    from.forEach((origin, i) => {
      const tip = to[i];
      if (!tip) return;
      const delta = new THREE.Vector3(tip[0] - origin[0], tip[1] - origin[1], tip[2] - origin[2]);
      const len = delta.length();
      if (len < this.handleRadius * 0.5) return;
      const arrow = new THREE.ArrowHelper(
        delta.normalize(),
        new THREE.Vector3(...origin),
        len,
        ARROW_COLOR,
        Math.min(0.04, len * 0.4),
        Math.min(0.02, len * 0.25),
      );
      this.arrows.push(arrow);
      this.scene.add(arrow);
    });
  }

  /** Index of the handle under the pointer, if any. */
  pickHandle(event: PointerEvent): number | null {
    this.raycaster.setFromCamera(this.pointerNdc(event), this.camera);
    const hit = this.raycaster.intersectObjects(this.handles, false)[0];
    return hit ? (hit.object.userData.handleIndex as number) : null;
  }

  /** World-space pointer ray for the drag-plane math. */
  screenRay(event: PointerEvent): Ray {
    this.raycaster.setFromCamera(this.pointerNdc(event), this.camera);
    const { origin, direction } = this.raycaster.ray;
    return { origin: [origin.x, origin.y, origin.z], dir: [direction.x, direction.y, direction.z] };
  }

  /** Camera viewing direction (the drag plane's normal). */
  viewDir(): Vec3 {
    const dir = new THREE.Vector3();
    this.camera.getWorldDirection(dir);
    return [dir.x, dir.y, dir.z];
  }

  private pointerNdc(event: PointerEvent): THREE.Vector2 {
    const rect = this.renderer.domElement.getBoundingClientRect();
    return new THREE.Vector2(
      ((event.clientX - rect.left) / rect.width) * 2 - 1,
      -((event.clientY - rect.top) / rect.height) * 2 + 1,
    );
  }
}
