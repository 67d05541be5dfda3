// Minimal virtual nodes: views build plain data, tests inspect it directly,
// and the browser entry point mounts it into real DOM.
export function h(tag, attrs = {}, ...children) {
    const flat = [];
    const push = (child) => {
        if (child === null || child === undefined || child === false)
            return;
        if (Array.isArray(child)) {
            child.forEach(push);
        }
        else {
            flat.push(child);
        }
    };
    children.forEach(push);
    const on = {};
    const plain = {};
    for (const [key, value] of Object.entries(attrs)) {
        if (typeof value === "function") {
            on[key.startsWith("on") ? key.slice(2) : key] = value;
        }
        else {
            plain[key] = value;
        }
    }
    return { tag, attrs: plain, on, children: flat };
}
export function mount(node, doc) {
    if (typeof node === "string") {
        return doc.createTextNode(node);
    }
    const el = doc.createElement(node.tag);
    for (const [key, value] of Object.entries(node.attrs)) {
        if (value === false)
            continue;
        if (value === true) {
            el.setAttribute(key, "");
        }
        else {
            el.setAttribute(key, value);
        }
    }
    for (const [event, handler] of Object.entries(node.on)) {
        el.addEventListener(event, handler);
    }
    for (const child of node.children) {
        el.appendChild(mount(child, doc));
    }
    return el;
}
// test helpers ---------------------------------------------------------------
export function findAll(node, predicate) {
    const hits = [];
    const walk = (current) => {
        if (typeof current === "string")
            return;
        if (predicate(current))
            hits.push(current);
        current.children.forEach(walk);
    };
    walk(node);
    return hits;
}
export function textOf(node) {
    if (typeof node === "string")
        return node;
    return node.children.map(textOf).join("");
}
