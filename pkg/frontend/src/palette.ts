/** Node colors.
 *
 * The five named assignments follow the reference legend: cyan for a PDF
 * document, green for an Excel document, red for a PDF page, khaki for
 * headers, ocean blue for paragraphs. The remaining kinds use the fixed
 * fallback palette below (documented here, stable across releases).
 */

import type { NodeRecord } from "./types.js";

export const LEGEND = {
  documentPdf: "#00bcd4", // cyan
  documentExcel: "#4caf50", // green
  page: "#e53935", // red
  header: "#f0e68c", // khaki
  paragraph: "#0077be", // ocean blue
} as const;

export const FALLBACK = {
  documentOther: "#9e9e9e", // grey: email/html documents have no legend color
  sheet: "#8bc34a", // light green, next to its Excel document
  sentence: "#64b5f6", // lighter blue than its paragraph
  table: "#ff9800", // orange
  tableRow: "#ffb74d", // lighter orange
  figure: "#ab47bc", // purple
} as const;

export function colorFor(node: NodeRecord): string {
  switch (node.node_kind) {
    case "Document": {
      const format = node.meta["format"] ?? "";
      if (format.startsWith("pdf")) return LEGEND.documentPdf;
      if (format === "excel") return LEGEND.documentExcel;
      return FALLBACK.documentOther;
    }
    case "Page":
      return LEGEND.page;
    case "Header":
      return LEGEND.header;
    case "Paragraph":
      return LEGEND.paragraph;
    case "Sheet":
      return FALLBACK.sheet;
    case "Sentence":
      return FALLBACK.sentence;
    case "Table":
      return FALLBACK.table;
    case "TableRow":
      return FALLBACK.tableRow;
    case "Figure":
      return FALLBACK.figure;
  }
}

export function legendEntries(): Array<{ label: string; color: string }> {
  return [
    { label: "Document (PDF)", color: LEGEND.documentPdf },
    { label: "Document (Excel)", color: LEGEND.documentExcel },
    { label: "Page", color: LEGEND.page },
    { label: "Header", color: LEGEND.header },
    { label: "Paragraph", color: LEGEND.paragraph },
    { label: "Document (other)", color: FALLBACK.documentOther },
    { label: "Sheet", color: FALLBACK.sheet },
    { label: "Sentence", color: FALLBACK.sentence },
    { label: "Table", color: FALLBACK.table },
    { label: "TableRow", color: FALLBACK.tableRow },
    { label: "Figure", color: FALLBACK.figure },
  ];
}
