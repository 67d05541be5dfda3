import { ApiClient, ApiError } from "./api.js";
import type {
  CategoryDocumentsResponse,
  EditOp,
  OntologyResponse,
  SchemaNode,
  TypologyNode,
} from "./types.js";

export interface RuleDraft {
  positives: string[][];
  negatives: string[][];
  compiled: string;
  defaultProgram: string;
  error: string | null;
}

export interface UiState {
  revision: number;
  ontology: OntologyResponse | null;
  typologyRoot: TypologyNode | null;
  selected: string[];
  banner: string | null;
  notice: string | null;
  activeCategory: string | null;
  ruleDraft: RuleDraft | null;
  manualText: string;
  manualError: string | null;
  counts: Record<string, number> | null;
  classifying: boolean;
  drilldown: CategoryDocumentsResponse | null;
}

export function initialState(): UiState {
  return {
    revision: 0,
    ontology: null,
    typologyRoot: null,
    selected: [],
    banner: null,
    notice: null,
    activeCategory: null,
    ruleDraft: null,
    manualText: "",
    manualError: null,
    counts: null,
    classifying: false,
    drilldown: null,
  };
}

// pure tree helpers -----------------------------------------------------------

export function findNode(root: SchemaNode | null, id: string): SchemaNode | null {
  if (!root) return null;
  if (root.id === id) return root;
  for (const child of root.children) {
    const hit = findNode(child, id);
    if (hit) return hit;
  }
  return null;
}

export function findParent(root: SchemaNode | null, id: string): SchemaNode | null {
  if (!root) return null;
  for (const child of root.children) {
    if (child.id === id) return root;
    const hit = findParent(child, id);
    if (hit) return hit;
  }
  return null;
}

export function findTypologyNode(root: TypologyNode | null, code: string): TypologyNode | null {
  if (!root) return null;
  if (root.code === code) return root;
  for (const child of root.children) {
    if (code === child.code || code.startsWith(child.code + "#")) {
      return findTypologyNode(child, code);
    }
  }
  return null;
}

export function areSiblings(root: SchemaNode | null, ids: string[]): boolean {
  if (!root || ids.length < 2) return false;
  const parents = ids.map((id) => findParent(root, id));
  if (parents.some((parent) => parent === null)) return false;
  return new Set(parents.map((parent) => parent!.id)).size === 1;
}

export function tokenCount(gram: string): number {
  return gram.split(/[^\p{L}\p{N}]+/u).filter((tok) => tok.length > 0).length;
}

// controller -------------------------------------------------------------------

export class AppController {
  state: UiState = initialState();

  constructor(
    private api: ApiClient,
    private onChange: () => void,
  ) {}

  private changed(): void {
    this.onChange();
  }

  // --- loading ---------------------------------------------------------------

  async refresh(): Promise<void> {
    try {
      const [typology, ontology] = await Promise.all([
        this.api.getTypology(),
        this.api.getOntology(),
      ]);
      this.state.typologyRoot = typology.typology.root;
      this.state.ontology = ontology;
      this.state.revision = ontology.revision;
      this.state.banner = null;
    } catch (error) {
      this.state.banner = `service unreachable: ${(error as Error).message}`;
    }
    this.changed();
  }

  private async refetchOntology(): Promise<void> {
    const ontology = await this.api.getOntology();
    this.state.ontology = ontology;
    this.state.revision = ontology.revision;
    this.state.selected = this.state.selected.filter(
      (id) => findNode(ontology.root, id) !== null,
    );
  }

  // --- selection ---------------------------------------------------------------

  select(id: string, additive = false): void {
    if (additive) {
      this.state.selected = this.state.selected.includes(id)
        ? this.state.selected.filter((existing) => existing !== id)
        : [...this.state.selected, id];
    } else {
      this.state.selected = [id];
    }
    this.state.drilldown = null;
    this.changed();
  }

  canMerge(): boolean {
    return areSiblings(this.state.ontology?.root ?? null, this.state.selected);
  }

  canGeneralize(): boolean {
    const ids = this.state.selected;
    if (ids.length === 1) return findParent(this.state.ontology?.root ?? null, ids[0]) !== null;
    return areSiblings(this.state.ontology?.root ?? null, ids);
  }

  // --- edits ---------------------------------------------------------------------

  private async edit(op: EditOp): Promise<void> {
    // a mutation is only ever sent with the revision it was drafted against
    const drafted = this.state.revision;
    try {
      await this.api.postEdit(op, drafted);
      await this.refetchOntology();
      this.state.notice = null;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refetchOntology();
        this.state.notice = "someone else changed the schema; review and retry";
      } else {
        this.state.notice = (error as Error).message;
      }
    }
    this.changed();
  }

  async reduceSelected(): Promise<void> {
    const [target] = this.state.selected;
    if (target) await this.edit({ kind: "reduce", target });
  }

  async mergeSelected(label: string): Promise<void> {
    if (!this.canMerge()) {
      this.state.notice = "select two or more sibling categories to merge";
      this.changed();
      return;
    }
    await this.edit({ kind: "aggregate", targets: [...this.state.selected], new_label: label });
  }

  async generalizeSelected(label: string): Promise<void> {
    if (!this.canGeneralize()) {
      this.state.notice = "select sibling categories to generalize";
      this.changed();
      return;
    }
    await this.edit({ kind: "generalize", targets: [...this.state.selected], new_label: label });
  }

  async specializeSelected(label: string): Promise<void> {
    const [parent] = this.state.selected;
    if (parent) await this.edit({ kind: "specialize", parent, new_label: label });
  }

  async renameSelected(label: string): Promise<void> {
    const [target] = this.state.selected;
    if (target) await this.edit({ kind: "rename", target, new_label: label });
  }

  async markResidualSelected(): Promise<void> {
    const [target] = this.state.selected;
    if (target) await this.edit({ kind: "mark_residual", target });
  }

  async undo(): Promise<void> {
    const drafted = this.state.revision;
    try {
      await this.api.undo(drafted);
      await this.refetchOntology();
      this.state.notice = null;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refetchOntology();
        this.state.notice = "someone else changed the schema; review and retry";
      } else {
        this.state.notice = (error as Error).message;
      }
    }
    this.changed();
  }

  // --- rule editing -----------------------------------------------------------------

  async openRuleEditor(category: string): Promise<void> {
    try {
      const spec = await this.api.getRuleSpec(category);
      this.state.activeCategory = category;
      this.state.ruleDraft = {
        positives: spec.positives,
        negatives: spec.negatives,
        compiled: spec.compiled,
        defaultProgram: spec.default_program,
        error: null,
      };
      const manual = await this.api.getManualRules();
      this.state.manualText = manual.text;
      this.state.manualError = null;
    } catch (error) {
      this.state.notice = (error as Error).message;
    }
    this.changed();
  }

  addClause(kind: "positives" | "negatives", grams: string[]): void {
    const draft = this.state.ruleDraft;
    if (!draft) return;
    const cleaned = grams.map((gram) => gram.trim()).filter((gram) => gram.length > 0);
    if (cleaned.length === 0) return;
    const oversized = cleaned.find((gram) => tokenCount(gram) > 5);
    if (oversized) {
      // mirror of the server-side compile rule, surfaced before submission
      draft.error = `"${oversized}" has more than 5 tokens`;
      this.changed();
      return;
    }
    draft[kind] = [...draft[kind], cleaned];
    draft.error = null;
    this.changed();
  }

  removeClause(kind: "positives" | "negatives", position: number): void {
    const draft = this.state.ruleDraft;
    if (!draft) return;
    draft[kind] = draft[kind].filter((_, index) => index !== position);
    this.changed();
  }

  async saveRuleSpec(): Promise<void> {
    const category = this.state.activeCategory;
    const draft = this.state.ruleDraft;
    if (!category || !draft) return;
    try {
      const saved = await this.api.putRuleSpec(
        category,
        draft.positives,
        draft.negatives,
        this.state.revision,
      );
      // the compiled pane is byte-derived from the server response
      draft.compiled = saved.compiled;
      draft.error = null;
      this.state.revision = saved.revision;
    } catch (error) {
      if (error instanceof ApiError) {
        draft.error = error.detail;
      } else {
        draft.error = (error as Error).message;
      }
    }
    this.changed();
  }

  async saveManualRules(text: string): Promise<void> {
    try {
      const saved = await this.api.putManualRules(text, this.state.revision);
      this.state.manualText = saved.text;
      this.state.manualError = null;
      this.state.revision = saved.revision;
    } catch (error) {
      this.state.manualText = text; // draft preserved alongside the diagnostic
      this.state.manualError =
        error instanceof ApiError ? error.detail : (error as Error).message;
    }
    this.changed();
  }

  // --- classification -------------------------------------------------------------------

  async classify(): Promise<void> {
    this.state.classifying = true;
    this.changed();
    try {
      const result = await this.api.classify(this.state.revision);
      this.state.counts = result.counts;
      this.state.revision = result.revision;
      this.state.notice = null;
    } catch (error) {
      this.state.notice = `classification failed: ${(error as Error).message}`;
    }
    this.state.classifying = false;
    this.changed();
  }

  async openCategoryDocuments(nodeId: string): Promise<void> {
    try {
      this.state.drilldown = await this.api.getCategoryDocuments(nodeId);
    } catch (error) {
      this.state.notice = (error as Error).message;
    }
    this.changed();
  }
}
