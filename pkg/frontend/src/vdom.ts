// Minimal virtual nodes: views build plain data, tests inspect it directly,
// and the browser entry point mounts it into real DOM.

export type Handler = (event?: unknown) => void;

export type AttrValue = string | boolean | Handler;

export interface VNode {
  tag: string;
  attrs: Record<string, string | boolean>;
  on: Record<string, Handler>;
  children: (VNode | string)[];
}

type Child = VNode | string | null | undefined | false;

export function h(
  tag: string,
  attrs: Record<string, AttrValue> = {},
  ...children: (Child | Child[])[]
): VNode {
  const flat: (VNode | string)[] = [];
  const push = (child: Child | Child[]) => {
    if (child === null || child === undefined || child === false) return;
    if (Array.isArray(child)) {
      child.forEach(push);
    } else {
      flat.push(child);
    }
  };
  children.forEach(push);
  const on: Record<string, Handler> = {};
  const plain: Record<string, string | boolean> = {};
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      on[key.startsWith("on") ? key.slice(2) : key] = value;
    } else {
      plain[key] = value;
    }
  }
  return { tag, attrs: plain, on, children: flat };
}

export function mount(node: VNode | string, doc: Document): Node {
  if (typeof node === "string") {
    return doc.createTextNode(node);
  }
  const el = doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    if (value === false) continue;
    if (value === true) {
      el.setAttribute(key, "");
    } else {
      el.setAttribute(key, value);
    }
  }
  for (const [event, handler] of Object.entries(node.on)) {
    el.addEventListener(event, handler as EventListener);
  }
  for (const child of node.children) {
    el.appendChild(mount(child, doc));
  }
  return el;
}

// test helpers ---------------------------------------------------------------

export function findAll(node: VNode, predicate: (node: VNode) => boolean): VNode[] {
  const hits: VNode[] = [];
  const walk = (current: VNode | string) => {
    if (typeof current === "string") return;
    if (predicate(current)) hits.push(current);
    current.children.forEach(walk);
  };
  walk(node);
  return hits;
}

export function textOf(node: VNode | string): string {
  if (typeof node === "string") return node;
  return node.children.map(textOf).join("");
}
