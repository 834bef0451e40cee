/** Heatmap color contract on the engine-produced two-blob fixture:
 * the cluster-sorted distance matrix must render as cool diagonal blocks
 * against warm off-diagonal blocks. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { parseHex } from "../src/colors.js";
import type { DistanceMatrixDoc } from "../src/protocol.js";
import { nodesOf } from "../src/scene.js";
import { buildDistanceHeatmapScene } from "../src/views/projection.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixture = JSON.parse(
  readFileSync(join(here, "fixtures", "two_blob_distance.json"), "utf-8"),
) as { distance_matrix: DistanceMatrixDoc; labels: number[]; cluster_sizes: number[] };

function blockRanges(sizes: number[]): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  let start = 0;
  for (const s of sizes) {
    out.push([start, start + s]);
    start += s;
  }
  return out;
}

describe("two-blob distance heatmap", () => {
  const dm = fixture.distance_matrix;
  const ranges = blockRanges(fixture.cluster_sizes);

  it("within-block mean is under 10% of the cross-block mean", () => {
    let withinSum = 0;
    let withinN = 0;
    let crossSum = 0;
    let crossN = 0;
    for (const [r0, r1] of ranges) {
      for (let i = r0; i < r1; i++) {
        for (let j = 0; j < dm.values.length; j++) {
          if (j >= r0 && j < r1) {
            withinSum += dm.values[i][j];
            withinN += 1;
          } else {
            crossSum += dm.values[i][j];
            crossN += 1;
          }
        }
      }
    }
    const withinMean = withinSum / withinN;
    const crossMean = crossSum / crossN;
    expect(withinMean).toBeLessThan(0.1 * crossMean);
  });

  it("order is sorted by (label, row)", () => {
    const labels = fixture.labels;
    const sortedLabels = dm.order.map((pos) => labels[pos]);
    for (let i = 1; i < sortedLabels.length; i++) {
      expect(sortedLabels[i]).toBeGreaterThanOrEqual(sortedLabels[i - 1]);
    }
  });

  it("renders cool diagonal blocks and warm off-diagonal blocks", () => {
    const scene = buildDistanceHeatmapScene(dm, 200);
    const rects = nodesOf(scene, "rect");
    const m = dm.values.length;
    const cellAt = (i: number, j: number) => rects[i * m + j];
    let withinWarmth = 0;
    let crossWarmth = 0;
    let withinN = 0;
    let crossN = 0;
    for (let i = 0; i < m; i++) {
      for (let j = 0; j < m; j++) {
        const [r, , b] = parseHex(cellAt(i, j).fill);
        const warmth = r - b; // positive = red side, negative = blue side
        const sameBlock = ranges.some(([a, z]) => i >= a && i < z && j >= a && j < z);
        if (sameBlock) {
          withinWarmth += warmth;
          withinN += 1;
        } else {
          crossWarmth += warmth;
          crossN += 1;
        }
      }
    }
    expect(withinWarmth / withinN).toBeLessThan(0); // cool inside the blocks
    expect(crossWarmth / crossN).toBeGreaterThan(0); // warm across blocks
  });
});
