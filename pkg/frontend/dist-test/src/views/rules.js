import { h } from "../vdom.js";
function clauseList(kind, clauses, handlers) {
    const title = kind === "positives" ? "positive n-grams" : "negative n-grams";
    return h("div", { class: `clauses clauses-${kind}` }, h("h3", {}, title), h("p", { class: "hint" }, "each row must be fully present; any row suffices"), clauses.length === 0
        ? h("p", { class: "empty" }, "none")
        : h("ul", {}, clauses.map((clause, position) => h("li", { class: "clause" }, h("span", { class: "clause-text" }, clause.join("  AND  ")), h("button", { class: "remove", onclick: () => handlers.removeClause(kind, position) }, "remove")))), h("div", { class: "clause-input" }, h("input", {
        id: `input-${kind}`,
        placeholder: "gram, gram (comma = conjunction)",
    }), h("button", { class: `add-${kind}`, onclick: () => handlers.addClause(kind) }, "add")));
}
export function ruleEditorView(state, handlers) {
    if (!state.activeCategory || !state.ruleDraft) {
        return h("section", { class: "rules" }, h("h2", {}, "rules"), h("p", {}, "pick a category and press “edit rules”"), manualPane(state, handlers));
    }
    const draft = state.ruleDraft;
    const hasClauses = draft.positives.length > 0 || draft.negatives.length > 0;
    return h("section", { class: "rules" }, h("h2", {}, `rules: ${state.activeCategory}`), draft.error ? h("p", { class: "error rule-error" }, draft.error) : null, clauseList("positives", draft.positives, handlers), clauseList("negatives", draft.negatives, handlers), h("button", { class: "save-spec", onclick: () => handlers.saveSpec() }, "save rules"), h("h3", {}, hasClauses ? "compiled program" : "default match rule"), h("pre", { class: "compiled" }, hasClauses
        ? draft.compiled || "(save to compile)"
        : draft.defaultProgram || "(label cannot carry a default match rule)"), manualPane(state, handlers));
}
function manualPane(state, handlers) {
    return h("div", { class: "manual" }, h("h3", {}, "manual rules"), state.manualError ? h("p", { class: "error manual-error" }, state.manualError) : null, h("textarea", { id: "manual-text", rows: "8" }, state.manualText), h("button", { class: "save-manual", onclick: () => handlers.saveManual() }, "save manual rules"));
}
