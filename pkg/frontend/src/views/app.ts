import { h, VNode } from "../vdom.js";
import type { UiState } from "../state.js";
import type { ViewHandlers } from "./handlers.js";
import { classifyView } from "./classify.js";
import { ruleEditorView } from "./rules.js";
import { inspectorView, treeView } from "./tree.js";

export function appView(state: UiState, handlers: ViewHandlers): VNode {
  if (state.banner) {
    return h(
      "div",
      { class: "app" },
      h(
        "div",
        { class: "banner" },
        h("p", {}, state.banner),
        h("button", { class: "retry", onclick: () => handlers.retry() }, "retry"),
      ),
    );
  }
  return h(
    "div",
    { class: "app" },
    state.notice ? h("div", { class: "notice" }, state.notice) : null,
    h(
      "div",
      { class: "columns" },
      treeView(state, handlers),
      h("div", { class: "middle" }, inspectorView(state, handlers), classifyView(state, handlers)),
      ruleEditorView(state, handlers),
    ),
  );
}
