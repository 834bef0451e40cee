/** Scene descriptions: view builders emit plain data, the DOM painter and
 * the tests consume it. Coordinates are in pixels, origin top-left. */

export interface RectNode {
  kind: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
  stroke?: string;
  id?: string;
  data?: Record<string, unknown>;
}

export interface CircleNode {
  kind: "circle";
  x: number;
  y: number;
  r: number;
  fill: string;
  stroke?: string;
  id?: string;
  data?: Record<string, unknown>;
}

export interface LineNode {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  stroke: string;
  width?: number;
}

export interface PolylineNode {
  kind: "polyline";
  points: Array<[number, number]>;
  stroke: string;
  width?: number;
  id?: string;
}

export interface TextNode {
  kind: "text";
  x: number;
  y: number;
  text: string;
  fill?: string;
  size?: number;
  anchor?: "start" | "middle" | "end";
}

export type SceneNode = RectNode | CircleNode | LineNode | PolylineNode | TextNode;

export interface Scene {
  width: number;
  height: number;
  nodes: SceneNode[];
}

export function nodesOf<T extends SceneNode["kind"]>(
  scene: Scene,
  kind: T,
): Array<Extract<SceneNode, { kind: T }>> {
  return scene.nodes.filter((n) => n.kind === kind) as Array<
    Extract<SceneNode, { kind: T }>
  >;
}

/** Linear map from a data interval onto a pixel interval. */
export function scaleLinear(
  domainMin: number,
  domainMax: number,
  rangeMin: number,
  rangeMax: number,
): (v: number) => number {
  const span = domainMax - domainMin;
  if (span === 0) {
    const mid = (rangeMin + rangeMax) / 2;
    return () => mid;
  }
  return (v) => rangeMin + ((v - domainMin) / span) * (rangeMax - rangeMin);
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}
