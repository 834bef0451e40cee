/** Color scales: the diverging heatmap ramp and the fixed solution palette
 * (identical to the server's, so frame tints agree across clients). */

export const SOLUTION_PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc949",
  "#b07aa1",
  "#ff9da7",
] as const;

export const HEATMAP_BLUE: [number, number, number] = [59, 76, 192];
export const HEATMAP_NEUTRAL: [number, number, number] = [247, 247, 247];
export const HEATMAP_RED: [number, number, number] = [180, 4, 38];

function lerp(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

function hex(rgb: [number, number, number]): string {
  return (
    "#" + rgb.map((v) => v.toString(16).padStart(2, "0")).join("")
  );
}

/** Diverging blue -> white -> red scale over [0, 1]; input is clamped.
 * 0 is the blue endpoint (very low), 0.5 neutral, 1 the red endpoint. */
export function mapHeatmapColor(normalized: number): string {
  const t = Math.min(1, Math.max(0, normalized));
  if (t <= 0.5) {
    const u = t / 0.5;
    return hex([
      lerp(HEATMAP_BLUE[0], HEATMAP_NEUTRAL[0], u),
      lerp(HEATMAP_BLUE[1], HEATMAP_NEUTRAL[1], u),
      lerp(HEATMAP_BLUE[2], HEATMAP_NEUTRAL[2], u),
    ]);
  }
  const u = (t - 0.5) / 0.5;
  return hex([
    lerp(HEATMAP_NEUTRAL[0], HEATMAP_RED[0], u),
    lerp(HEATMAP_NEUTRAL[1], HEATMAP_RED[1], u),
    lerp(HEATMAP_NEUTRAL[2], HEATMAP_RED[2], u),
  ]);
}

/** Categorical color for a cluster label. */
export function clusterColor(label: number | null | undefined): string {
  if (label === null || label === undefined || label < 0) {
    return "#9aa0a6";
  }
  return SOLUTION_PALETTE[label % SOLUTION_PALETTE.length];
}

export function parseHex(color: string): [number, number, number] {
  const v = color.replace("#", "");
  return [
    parseInt(v.slice(0, 2), 16),
    parseInt(v.slice(2, 4), 16),
    parseInt(v.slice(4, 6), 16),
  ];
}
