import { h } from "../vdom.js";
import { findTypologyNode } from "../state.js";
function nodeRow(node, state, handlers) {
    const selected = state.selected.includes(node.id);
    const label = node.label || "(unnamed)";
    return h("li", {}, h("div", {
        class: selected ? "node selected" : "node",
        "data-node-id": node.id,
        onclick: (event) => {
            const additive = Boolean(event?.ctrlKey);
            handlers.select(node.id, additive);
        },
    }, h("span", { class: "node-label" }, label), h("span", { class: `badge badge-${node.kind}` }, node.kind), h("span", { class: "node-size" }, `${node.extension.length} docs`)), node.children.length > 0
        ? h("ul", {}, node.children.map((child) => nodeRow(child, state, handlers)))
        : null);
}
export function treeView(state, handlers) {
    if (!state.ontology) {
        return h("section", { class: "tree" }, h("p", {}, "no schema loaded"));
    }
    const canMerge = handlers.canMerge();
    const canGeneralize = handlers.canGeneralize();
    const single = state.selected.length === 1;
    return h("section", { class: "tree" }, h("h2", {}, "schema"), h("div", { class: "toolbar" }, h("button", { class: "act-reduce", disabled: !single, onclick: () => handlers.reduce() }, "delete"), h("button", {
        class: "act-merge",
        disabled: !canMerge,
        title: canMerge ? "merge into a synthesis node" : "select two or more sibling categories",
        onclick: () => handlers.merge(),
    }, "merge"), h("button", {
        class: "act-generalize",
        disabled: !canGeneralize,
        title: canGeneralize ? "insert a parent above the selection" : "select sibling categories",
        onclick: () => handlers.generalize(),
    }, "add parent"), h("button", { class: "act-specialize", disabled: !single, onclick: () => handlers.specialize() }, "add child"), h("button", { class: "act-rename", disabled: !single, onclick: () => handlers.rename() }, "rename"), h("button", { class: "act-residual", disabled: !single, onclick: () => handlers.markResidual() }, "mark residual"), h("button", {
        class: "act-undo",
        disabled: state.ontology.edit_log_length === 0,
        onclick: () => handlers.undo(),
    }, "undo")), h("ul", { class: "root-list" }, [nodeRow(state.ontology.root, state, handlers)]));
}
export function inspectorView(state, handlers) {
    const id = state.selected.length === 1 ? state.selected[0] : null;
    const node = id && state.ontology ? findSchema(state.ontology.root, id) : null;
    if (!node) {
        return h("section", { class: "inspector" }, h("p", {}, "select a category"));
    }
    const origin = node.origin_code
        ? findTypologyNode(state.typologyRoot, node.origin_code)
        : null;
    const chips = (origin?.top_terms ?? []).slice(0, 15);
    return h("section", { class: "inspector" }, h("h2", {}, node.label || "(unnamed)"), h("p", { class: "kind-line" }, h("span", { class: `badge badge-${node.kind}` }, node.kind)), h("p", { class: "extension-size" }, node.extension.length === 0 ? "0 documents" : `${node.extension.length} documents`), chips.length > 0
        ? h("div", { class: "chips" }, chips.map(([term, score]) => h("span", { class: "chip" }, `${term} ${score.toFixed(3)}`)))
        : null, h("div", { class: "inspector-actions" }, h("button", { class: "open-rules", onclick: () => handlers.openRules(node.label) }, "edit rules"), h("button", { class: "open-docs", onclick: () => handlers.openDocs(node.id) }, "assigned documents")));
}
function findSchema(root, id) {
    if (root.id === id)
        return root;
    for (const child of root.children) {
        const hit = findSchema(child, id);
        if (hit)
            return hit;
    }
    return null;
}
export function typologyTermsOf(typologyRoot, code) {
    return findTypologyNode(typologyRoot, code)?.top_terms ?? [];
}
