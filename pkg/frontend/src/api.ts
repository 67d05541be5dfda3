import type {
  CategoryDocumentsResponse,
  ClassifyResponse,
  DocumentResponse,
  EditOp,
  ManualRulesResponse,
  OntologyResponse,
  RevisionResponse,
  RuleSpecResponse,
  TypologyResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function fail(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, detail);
}

export class ApiClient {
  constructor(private fetcher: FetchLike, private base = "") {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetcher(`${this.base}${path}`);
    if (!res.ok) return fail(res);
    return res.json() as Promise<T>;
  }

  private async send<T>(method: string, path: string, body: unknown): Promise<T> {
    const res = await this.fetcher(`${this.base}${path}`, {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) return fail(res);
    return res.json() as Promise<T>;
  }

  getTypology(): Promise<TypologyResponse> {
    return this.get("/api/typology");
  }

  getOntology(): Promise<OntologyResponse> {
    return this.get("/api/ontology");
  }

  postEdit(op: EditOp, revision: number): Promise<RevisionResponse> {
    return this.send("POST", "/api/edits", { op, revision });
  }

  undo(revision: number): Promise<RevisionResponse> {
    return this.send("POST", "/api/edits/undo", { revision });
  }

  getRuleSpec(category: string): Promise<RuleSpecResponse> {
    return this.get(`/api/rules/${encodeURIComponent(category)}`);
  }

  putRuleSpec(
    category: string,
    positives: string[][],
    negatives: string[][],
    revision: number,
  ): Promise<RuleSpecResponse> {
    return this.send("PUT", `/api/rules/${encodeURIComponent(category)}`, {
      positives,
      negatives,
      revision,
    });
  }

  getManualRules(): Promise<ManualRulesResponse> {
    return this.get("/api/rules/manual");
  }

  putManualRules(text: string, revision: number): Promise<ManualRulesResponse> {
    return this.send("PUT", "/api/rules/manual", { text, revision });
  }

  classify(revision: number): Promise<ClassifyResponse> {
    return this.send("POST", "/api/classify", { revision });
  }

  getCategoryDocuments(nodeId: string): Promise<CategoryDocumentsResponse> {
    return this.get(`/api/categories/${encodeURIComponent(nodeId)}/documents`);
  }

  getDocument(docId: string): Promise<DocumentResponse> {
    return this.get(`/api/documents/${encodeURIComponent(docId)}`);
  }
}
