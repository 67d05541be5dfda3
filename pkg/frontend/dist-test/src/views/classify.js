import { h } from "../vdom.js";
export function classifyView(state, handlers) {
    const counts = state.counts;
    return h("section", { class: "classify" }, h("h2", {}, "classification"), h("button", { class: "run-classify", disabled: state.classifying, onclick: () => handlers.classify() }, state.classifying ? "classifying…" : "run classification"), state.classifying ? h("p", { class: "progress" }, "evaluating rules…") : null, state.ontology?.assignments_stale
        ? h("p", { class: "stale" }, "assignments are stale: rules or schema changed since the last run")
        : null, counts === null
        ? h("p", { class: "empty" }, "not classified yet")
        : countsTable(counts), state.drilldown
        ? h("div", { class: "drilldown" }, h("h3", {}, `documents in ${state.drilldown.label}`), state.drilldown.documents.length === 0
            ? h("p", { class: "empty" }, "no assigned documents")
            : h("ul", {}, state.drilldown.documents.map((doc) => h("li", { class: "doc-row" }, h("span", { class: "doc-id" }, doc.doc_id), h("span", { class: "doc-snippet" }, `…${doc.snippet}…`)))))
        : null);
}
function countsTable(counts) {
    const labels = Object.keys(counts).sort();
    return h("table", { class: "counts" }, h("thead", {}, h("tr", {}, h("th", {}, "category"), h("th", {}, "documents"))), h("tbody", {}, labels.map((label) => h("tr", { class: "count-row", "data-category": label }, h("td", {}, label), h("td", { class: "count-value" }, String(counts[label]))))));
}
