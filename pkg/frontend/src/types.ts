/** Wire types mirroring the service's JSONL record objects. */

export type NodeKind =
  | "Document"
  | "Page"
  | "Sheet"
  | "Header"
  | "Paragraph"
  | "Sentence"
  | "Table"
  | "TableRow"
  | "Figure";

export type RelKind =
  | "HasChild"
  | "Before"
  | "After"
  | "HasAttachment"
  | "SameTime"
  | "Focus"
  | "SupportedBy"
  | "Explain";

export interface NodeRecord {
  kind: "node";
  id: string;
  doc: string;
  node_kind: NodeKind;
  text: string;
  meta: Record<string, string>;
  page?: number;
  bbox?: [number, number, number, number];
}

export interface EdgeRecord {
  kind: "edge";
  src: string;
  dst: string;
  rel: RelKind;
  meta: Record<string, string>;
}

export interface Subgraph {
  nodes: NodeRecord[];
  edges: EdgeRecord[];
}

export interface AnchorRecord {
  node_id: string;
  score: number;
}

export interface RetrieveResponse {
  anchors: AnchorRecord[];
  subgraph: Subgraph;
  context: string;
}

export interface GraphSummary {
  nodes: number;
  edges: number;
  documents: number;
}

export interface NodeFilterBody {
  kinds?: NodeKind[];
  text_contains?: string;
  years?: number[];
  doc_ids?: string[];
}

export interface ApiErrorBody {
  code: "BadRequest" | "NotFound" | "Unsupported" | "Internal";
  message: string;
}
