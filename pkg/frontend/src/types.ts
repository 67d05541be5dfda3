// Payload shapes of the schemabuilder HTTP API.

export interface TypologyNode {
  code: string;
  members: string[];
  top_terms: [string, number][];
  children: TypologyNode[];
}

export interface TypologyPayload {
  params: Record<string, unknown>;
  objective_per_node: Record<string, number>;
  warnings: [string, string][];
  root: TypologyNode;
}

export interface SchemaNode {
  id: string;
  label: string;
  kind: "cluster" | "synthesis" | "generalization" | "specialization" | "residual";
  origin_code: string | null;
  extension: string[];
  fundamentum: string | null;
  order_index: number | null;
  term_hint: string[];
  children: SchemaNode[];
}

export interface TypologyResponse {
  revision: number;
  typology: TypologyPayload;
}

export interface OntologyResponse {
  revision: number;
  root: SchemaNode;
  unassigned: string[];
  edit_log_length: number;
  assignments_stale: boolean;
}

export interface EditOp {
  kind: "reduce" | "aggregate" | "generalize" | "specialize" | "rename" | "mark_residual";
  target?: string;
  targets?: string[];
  parent?: string;
  new_label?: string;
  author?: string;
  timestamp?: string;
}

export interface RevisionResponse {
  revision: number;
  created_id: string | null;
}

export interface RuleSpecResponse {
  category: string;
  positives: string[][];
  negatives: string[][];
  compiled: string;
  default_program: string;
  revision: number;
}

export interface ManualRulesResponse {
  text: string;
  revision: number;
}

export interface ClassifyResponse {
  revision: number;
  counts: Record<string, number>;
  total: number;
  warnings: string[];
}

export interface DocumentSnippet {
  doc_id: string;
  snippet: string;
}

export interface CategoryDocumentsResponse {
  id: string;
  label: string;
  doc_ids: string[];
  documents: DocumentSnippet[];
  assignments_stale: boolean;
}

export interface DocumentResponse {
  id: string;
  source: string;
  text: string;
}
