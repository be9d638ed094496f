/** Page wiring: forms, panels, banners and the SVG view. */

import { ApiClient, ApiError } from "./api.js";
import { legendEntries } from "./palette.js";
import {
  applyRetrieval,
  beginGraphRequest,
  beginRetrievalRequest,
  clearBanner,
  graphResponseIsCurrent,
  initialState,
  mergeSubgraph,
  replaceSubgraph,
  selectNode,
  showBanner,
  type ViewState,
} from "./state.js";
import { renderGraph } from "./render.js";
import type { NodeFilterBody, NodeKind } from "./types.js";

const state: ViewState = initialState();
const api = new ApiClient(
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8402",
);

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

const svg = document.querySelector<SVGSVGElement>("#graph")!;
const banner = el<HTMLDivElement>("banner");
const detail = el<HTMLPreElement>("detail");
const anchorsList = el<HTMLOListElement>("anchors");
const contextBox = el<HTMLPreElement>("context");
const summaryBox = el<HTMLSpanElement>("summary");

function repaint(): void {
  banner.textContent = state.banner ?? "";
  banner.style.display = state.banner ? "block" : "none";
  renderGraph(svg, state, { onNodeClick: (id) => void onNodeClick(id) });
  const selected = state.selected ? state.nodes.get(state.selected) : undefined;
  detail.textContent = selected
    ? JSON.stringify(selected, Object.keys(selected).sort(), 2)
    : "click a node";
}

function fail(err: unknown): void {
  const message =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  showBanner(state, message); // non-blocking: view is left as-is
  repaint();
}

async function refreshSummary(): Promise<void> {
  const summary = await api.summary();
  summaryBox.textContent = `${summary.documents} documents, ${summary.nodes} nodes, ${summary.edges} edges`;
}

function filterFromForm(): NodeFilterBody {
  const filter: NodeFilterBody = {};
  const years = el<HTMLInputElement>("filter-years").value.trim();
  if (years) {
    filter.years = years
      .split(",")
      .map((y) => parseInt(y.trim(), 10))
      .filter((y) => !Number.isNaN(y));
  }
  const kinds = el<HTMLInputElement>("filter-kinds").value.trim();
  if (kinds) {
    filter.kinds = kinds.split(",").map((k) => k.trim()) as NodeKind[];
  }
  const contains = el<HTMLInputElement>("filter-contains").value.trim();
  if (contains) filter.text_contains = contains;
  return filter;
}

async function onQuery(): Promise<void> {
  clearBanner(state);
  const token = beginGraphRequest(state);
  state.filter = filterFromForm();
  try {
    const subgraph = await api.query(state.filter);
    if (!graphResponseIsCurrent(state, token)) return; // stale
    replaceSubgraph(state, subgraph);
    repaint();
  } catch (err) {
    fail(err);
  }
}

async function onNodeClick(id: string): Promise<void> {
  clearBanner(state);
  selectNode(state, id);
  const token = beginGraphRequest(state);
  try {
    const ball = await api.neighbors(id, 1);
    if (!graphResponseIsCurrent(state, token)) return;
    mergeSubgraph(state, ball);
    repaint();
  } catch (err) {
    fail(err);
  }
}

async function onRetrieve(): Promise<void> {
  clearBanner(state);
  const query = el<HTMLInputElement>("retrieve-query").value;
  const k = parseInt(el<HTMLInputElement>("retrieve-k").value, 10) || 5;
  const hops = parseInt(el<HTMLInputElement>("retrieve-hops").value, 10) || 2;
  const token = beginRetrievalRequest(state);
  try {
    const result = await api.retrieve(query, k, hops);
    if (!applyRetrieval(state, token, query, k, hops, result.anchors, result.context)) {
      return;
    }
    const graphToken = beginGraphRequest(state);
    if (graphResponseIsCurrent(state, graphToken)) {
      replaceSubgraph(state, result.subgraph);
    }
    anchorsList.replaceChildren(
      ...result.anchors.map((anchor) => {
        const item = document.createElement("li");
        const node = state.nodes.get(anchor.node_id);
        item.textContent = `${anchor.score.toFixed(4)}  [${node?.node_kind ?? "?"}] ${
          node?.text ?? anchor.node_id
        }`;
        return item;
      }),
    );
    contextBox.textContent = result.context;
    repaint();
  } catch (err) {
    fail(err);
  }
}

function buildLegend(): void {
  const box = el<HTMLDivElement>("legend");
  for (const entry of legendEntries()) {
    const row = document.createElement("div");
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = entry.color;
    row.appendChild(swatch);
    row.appendChild(document.createTextNode(" " + entry.label));
    box.appendChild(row);
  }
}

el<HTMLButtonElement>("query-btn").addEventListener("click", () => void onQuery());
el<HTMLButtonElement>("retrieve-btn").addEventListener("click", () => void onRetrieve());

buildLegend();
repaint();
void refreshSummary().catch(fail);
