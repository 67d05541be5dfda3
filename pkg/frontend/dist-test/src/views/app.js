import { h } from "../vdom.js";
import { classifyView } from "./classify.js";
import { ruleEditorView } from "./rules.js";
import { inspectorView, treeView } from "./tree.js";
export function appView(state, handlers) {
    if (state.banner) {
        return h("div", { class: "app" }, h("div", { class: "banner" }, h("p", {}, state.banner), h("button", { class: "retry", onclick: () => handlers.retry() }, "retry")));
    }
    return h("div", { class: "app" }, state.notice ? h("div", { class: "notice" }, state.notice) : null, h("div", { class: "columns" }, treeView(state, handlers), h("div", { class: "middle" }, inspectorView(state, handlers), classifyView(state, handlers)), ruleEditorView(state, handlers)));
}
