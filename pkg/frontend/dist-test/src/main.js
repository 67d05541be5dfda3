import { ApiClient } from "./api.js";
import { AppController } from "./state.js";
import { mount } from "./vdom.js";
import { appView } from "./views/app.js";
const api = new ApiClient((input, init) => window.fetch(input, init));
const root = document.getElementById("app");
if (!root) {
    throw new Error("missing #app container");
}
const controller = new AppController(api, render);
function inputValue(id) {
    const el = document.getElementById(id);
    return el ? el.value : "";
}
function askLabel(question) {
    const label = window.prompt(question);
    return label && label.trim() ? label.trim() : null;
}
const handlers = {
    select: (id, additive) => controller.select(id, additive),
    canMerge: () => controller.canMerge(),
    canGeneralize: () => controller.canGeneralize(),
    reduce: () => void controller.reduceSelected(),
    merge: () => {
        const label = askLabel("label for the merged category:");
        if (label)
            void controller.mergeSelected(label);
    },
    generalize: () => {
        const label = askLabel("label for the new parent category:");
        if (label)
            void controller.generalizeSelected(label);
    },
    specialize: () => {
        const label = askLabel("label for the new child category:");
        if (label)
            void controller.specializeSelected(label);
    },
    rename: () => {
        const label = askLabel("new label:");
        if (label)
            void controller.renameSelected(label);
    },
    markResidual: () => void controller.markResidualSelected(),
    undo: () => void controller.undo(),
    openRules: (category) => void controller.openRuleEditor(category),
    openDocs: (nodeId) => void controller.openCategoryDocuments(nodeId),
    addClause: (kind) => {
        const raw = inputValue(`input-${kind}`);
        controller.addClause(kind, raw.split(","));
    },
    removeClause: (kind, position) => controller.removeClause(kind, position),
    saveSpec: () => void controller.saveRuleSpec(),
    saveManual: () => void controller.saveManualRules(inputValue("manual-text")),
    classify: () => void controller.classify(),
    retry: () => void controller.refresh(),
};
function render() {
    const focused = document.activeElement instanceof HTMLElement ? document.activeElement.id : "";
    root.replaceChildren(mount(appView(controller.state, handlers), document));
    if (focused) {
        document.getElementById(focused)?.focus();
    }
}
void controller.refresh();
