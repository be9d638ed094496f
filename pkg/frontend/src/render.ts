/** SVG rendering of the current subgraph. DOM-only module: everything it
 * draws comes from the view state, which in turn holds service responses
 * verbatim. */

import { layout } from "./force.js";
import { colorFor } from "./palette.js";
import { anchorIds, edgeKey, type ViewState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RenderCallbacks {
  onNodeClick: (id: string) => void;
}

export function renderGraph(
  svg: SVGSVGElement,
  state: ViewState,
  callbacks: RenderCallbacks,
): void {
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  const width = svg.clientWidth || 900;
  const height = svg.clientHeight || 600;

  if (state.nodes.size === 0) {
    const empty = document.createElementNS(SVG_NS, "text");
    empty.setAttribute("x", String(width / 2));
    empty.setAttribute("y", String(height / 2));
    empty.setAttribute("text-anchor", "middle");
    empty.setAttribute("fill", "#888");
    empty.textContent = "No nodes to show: run a query.";
    svg.appendChild(empty);
    return;
  }

  const positions = layout(
    [...state.nodes.keys()],
    [...state.edges.values()].map((e) => ({ source: e.src, target: e.dst })),
    { width, height },
  );
  const anchors = anchorIds(state);

  for (const edge of state.edges.values()) {
    const a = positions.get(edge.src);
    const b = positions.get(edge.dst);
    if (!a || !b) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("stroke", "#bbb");
    line.setAttribute("stroke-width", "1");
    line.dataset["edge"] = edgeKey(edge);
    svg.appendChild(line);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String((a.x + b.x) / 2));
    label.setAttribute("y", String((a.y + b.y) / 2 - 2));
    label.setAttribute("font-size", "8");
    label.setAttribute("fill", "#999");
    label.setAttribute("text-anchor", "middle");
    label.textContent = edge.rel;
    svg.appendChild(label);
  }

  for (const node of state.nodes.values()) {
    const pos = positions.get(node.id);
    if (!pos) continue;
    const group = document.createElementNS(SVG_NS, "g");
    group.dataset["id"] = node.id;
    group.style.cursor = "pointer";
    group.addEventListener("click", () => callbacks.onNodeClick(node.id));

    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(pos.x));
    circle.setAttribute("cy", String(pos.y));
    circle.setAttribute("r", node.node_kind === "Document" ? "14" : "8");
    circle.setAttribute("fill", colorFor(node));
    if (node.id === state.selected) {
      circle.setAttribute("stroke", "#000");
      circle.setAttribute("stroke-width", "3");
    } else if (anchors.has(node.id)) {
      circle.setAttribute("stroke", "#ff1744");
      circle.setAttribute("stroke-width", "2.5");
      circle.setAttribute("stroke-dasharray", "3,2");
    } else {
      circle.setAttribute("stroke", "#555");
      circle.setAttribute("stroke-width", "1");
    }
    group.appendChild(circle);

    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `[${node.node_kind}] ${node.text}`;
    group.appendChild(title);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(pos.x + 10));
    label.setAttribute("y", String(pos.y + 3));
    label.setAttribute("font-size", "9");
    label.setAttribute("fill", "#333");
    label.textContent =
      node.text.length > 24 ? node.text.slice(0, 24) + "…" : node.text;
    group.appendChild(label);

    svg.appendChild(group);
  }
}
