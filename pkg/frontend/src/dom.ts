/** Tiny DOM construction helpers; no framework. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

export function errorBanner(code: string, message: string): HTMLElement {
  // server error codes are shown verbatim next to the human-readable text
  return el("div", { class: "banner error", role: "alert", "data-code": code }, [
    el("strong", {}, [code]),
    ` ${message}`,
  ]);
}
