/** Paint a scene into an SVG element. Browser-only. */

import type { Scene } from "./scene.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function paintScene(scene: Scene, container: Element): SVGSVGElement {
  const old = container.querySelector("svg");
  if (old) old.remove();
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${scene.width} ${scene.height}`);
  svg.setAttribute("width", "100%");
  for (const node of scene.nodes) {
    let el: Element;
    switch (node.kind) {
      case "rect":
        el = document.createElementNS(SVG_NS, "rect");
        el.setAttribute("x", String(node.x));
        el.setAttribute("y", String(node.y));
        el.setAttribute("width", String(Math.max(node.w, 0)));
        el.setAttribute("height", String(Math.max(node.h, 0)));
        el.setAttribute("fill", node.fill);
        if (node.stroke) el.setAttribute("stroke", node.stroke);
        break;
      case "circle":
        el = document.createElementNS(SVG_NS, "circle");
        el.setAttribute("cx", String(node.x));
        el.setAttribute("cy", String(node.y));
        el.setAttribute("r", String(node.r));
        el.setAttribute("fill", node.fill);
        if (node.stroke) el.setAttribute("stroke", node.stroke);
        break;
      case "line":
        el = document.createElementNS(SVG_NS, "line");
        el.setAttribute("x1", String(node.x1));
        el.setAttribute("y1", String(node.y1));
        el.setAttribute("x2", String(node.x2));
        el.setAttribute("y2", String(node.y2));
        el.setAttribute("stroke", node.stroke);
        el.setAttribute("stroke-width", String(node.width ?? 1));
        break;
      case "polyline":
        el = document.createElementNS(SVG_NS, "polyline");
        el.setAttribute(
          "points",
          node.points.map(([x, y]) => `${x},${y}`).join(" "),
        );
        el.setAttribute("fill", "none");
        el.setAttribute("stroke", node.stroke);
        el.setAttribute("stroke-width", String(node.width ?? 1));
        break;
      default: {
        el = document.createElementNS(SVG_NS, "text");
        el.setAttribute("x", String(node.x));
        el.setAttribute("y", String(node.y));
        el.setAttribute("font-size", String(node.size ?? 10));
        if (node.fill) el.setAttribute("fill", node.fill);
        if (node.anchor) el.setAttribute("text-anchor", node.anchor);
        el.textContent = node.text;
      }
    }
    if ("id" in node && node.id) el.setAttribute("data-id", node.id);
    svg.appendChild(el);
  }
  container.appendChild(svg);
  return svg;
}
