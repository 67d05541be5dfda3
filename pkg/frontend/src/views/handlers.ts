// The views stay pure: every gesture goes through this interface. The
// browser entry point wires it to the controller plus window.prompt; tests
// plug in spies.

export interface ViewHandlers {
  select(id: string, additive: boolean): void;
  canMerge(): boolean;
  canGeneralize(): boolean;
  reduce(): void;
  merge(): void;
  generalize(): void;
  specialize(): void;
  rename(): void;
  markResidual(): void;
  undo(): void;
  openRules(category: string): void;
  openDocs(nodeId: string): void;
  addClause(kind: "positives" | "negatives"): void;
  removeClause(kind: "positives" | "negatives", position: number): void;
  saveSpec(): void;
  saveManual(): void;
  classify(): void;
  retry(): void;
}
