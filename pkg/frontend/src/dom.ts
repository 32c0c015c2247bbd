// Tiny DOM/SVG helpers; no framework.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  for (const child of children) node.append(child);
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function svg(tag: string, attrs: Record<string, string> = {}, children: Node[] = []): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  for (const child of children) node.append(child);
  return node;
}

export function clear(node: Element) {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function text(value: string): Text {
  return document.createTextNode(value);
}

/** One shared context menu; repositioned and refilled on each open. */
export function openMenu(x: number, y: number, items: { label: string; action: () => void }[]) {
  closeMenu();
  const menu = el("div", { class: "ctx-menu", id: "ctx-menu" });
  menu.style.left = `${x}px`;
  menu.style.top = `${y}px`;
  for (const item of items) {
    const row = el("div", { class: "ctx-item" }, [item.label]);
    row.addEventListener("click", () => {
      closeMenu();
      item.action();
    });
    menu.append(row);
  }
  document.body.append(menu);
  setTimeout(() => document.addEventListener("click", closeMenu, { once: true }), 0);
}

export function closeMenu() {
  document.getElementById("ctx-menu")?.remove();
}
