/** Orbitable 3-D scatter: the in-browser stand-in for the room's volumetric
 * projection view. Plain rotation + perspective, no GL dependency. */

import { clusterColor } from "./colors.js";
import type { SolutionDoc } from "./protocol.js";
import type { Scene, SceneNode } from "./scene.js";

export interface OrbitCamera {
  yaw: number; // radians around the vertical axis
  pitch: number; // radians above the horizontal plane
  distance: number; // camera distance in data units
  fov: number; // perspective strength
}

export function defaultCamera(): OrbitCamera {
  return { yaw: Math.PI / 5, pitch: Math.PI / 8, distance: 6, fov: 3.2 };
}

export function orbit(camera: OrbitCamera, dYaw: number, dPitch: number): OrbitCamera {
  const limit = Math.PI / 2 - 0.05;
  return {
    ...camera,
    yaw: camera.yaw + dYaw,
    pitch: Math.max(-limit, Math.min(limit, camera.pitch + dPitch)),
  };
}

/** Rotate into camera space and perspective-project onto the viewport.
 * Returns screen x/y plus depth for painter's-order sorting. */
export function projectPoint(
  p: [number, number, number],
  camera: OrbitCamera,
  width: number,
  height: number,
): { x: number; y: number; depth: number; scale: number } {
  const cy = Math.cos(camera.yaw);
  const sy = Math.sin(camera.yaw);
  const cp = Math.cos(camera.pitch);
  const sp = Math.sin(camera.pitch);
  // yaw about y, then pitch about x
  const x1 = cy * p[0] + sy * p[2];
  const z1 = -sy * p[0] + cy * p[2];
  const y2 = cp * p[1] - sp * z1;
  const z2 = sp * p[1] + cp * z1;
  const depth = camera.distance + z2;
  const safe = Math.max(depth, 0.05);
  const scale = (camera.fov / safe) * (Math.min(width, height) / 2);
  return {
    x: width / 2 + x1 * scale,
    y: height / 2 - y2 * scale,
    depth,
    scale,
  };
}

function normalizeCoords(coords: number[][]): Array<[number, number, number]> {
  let span = 1e-12;
  const mean = [0, 0, 0];
  for (const c of coords) for (let d = 0; d < 3; d++) mean[d] += (c[d] ?? 0) / coords.length;
  for (const c of coords)
    for (let d = 0; d < 3; d++) span = Math.max(span, Math.abs((c[d] ?? 0) - mean[d]));
  return coords.map(
    (c) =>
      [
        ((c[0] ?? 0) - mean[0]) / span,
        ((c[1] ?? 0) - mean[1]) / span,
        ((c[2] ?? 0) - mean[2]) / span,
      ] as [number, number, number],
  );
}

/** Build the 3-D scatter scene; points are depth-sorted back to front and
 * prolines drawn as projected 3-D axes. */
export function build3dScene(
  solution: SolutionDoc,
  camera: OrbitCamera,
  width = 420,
  height = 360,
): Scene {
  const nodes: SceneNode[] = [];
  const proj = solution.projection;
  if (!proj || proj.dims !== 3) {
    nodes.push({
      kind: "text",
      x: width / 2,
      y: height / 2,
      text: "apply a dims=3 projection for the volumetric view",
      anchor: "middle",
    });
    return { width, height, nodes };
  }
  const pts = normalizeCoords(proj.coords);
  const labels = solution.clustering?.labels ?? null;
  const selected = new Set(solution.selection);

  for (const axis of proj.prolines) {
    if (axis.zero_length) continue;
    const line = normalizeCoordsWith(axis.polyline, proj.coords);
    const points = line.map((p) => {
      const s = projectPoint(p, camera, width, height);
      return [s.x, s.y] as [number, number];
    });
    nodes.push({
      kind: "polyline",
      points,
      stroke: "#99999980",
      width: 1,
      id: `axis3d-${axis.feature}`,
    });
  }

  const projected = pts.map((p, i) => ({ i, s: projectPoint(p, camera, width, height) }));
  projected.sort((a, b) => b.s.depth - a.s.depth); // far first
  for (const { i, s } of projected) {
    const rowId = proj.row_ids[i];
    nodes.push({
      kind: "circle",
      x: s.x,
      y: s.y,
      r: Math.max(1.2, s.scale * 0.02),
      fill: clusterColor(labels ? labels[i] : null),
      stroke: selected.has(rowId) ? "#000000" : undefined,
      id: `pt3d-${rowId}`,
      data: { rowId, depth: s.depth },
    });
  }
  return { width, height, nodes };
}

function normalizeCoordsWith(
  line: number[][],
  reference: number[][],
): Array<[number, number, number]> {
  let span = 1e-12;
  const mean = [0, 0, 0];
  for (const c of reference) for (let d = 0; d < 3; d++) mean[d] += (c[d] ?? 0) / reference.length;
  for (const c of reference)
    for (let d = 0; d < 3; d++) span = Math.max(span, Math.abs((c[d] ?? 0) - mean[d]));
  return line.map(
    (c) =>
      [
        ((c[0] ?? 0) - mean[0]) / span,
        ((c[1] ?? 0) - mean[1]) / span,
        ((c[2] ?? 0) - mean[2]) / span,
      ] as [number, number, number],
  );
}
