// Minimal hash router: "#/collections/5" → { name: "collection", id: 5 }.

export type Route =
  | { name: "home" }
  | { name: "node"; id: number }
  | { name: "collection"; id: number }
  | { name: "item"; pid: string }
  | { name: "deposit"; id: number }
  | { name: "browse"; criterion: string; key: string | null }
  | { name: "search"; q: string }
  | { name: "stats" }
  | { name: "notFound"; hash: string };

export function parseHash(hash: string): Route {
  const clean = hash.replace(/^#\/?/, "");
  if (clean === "") return { name: "home" };
  const [head, ...rest] = clean.split("/");
  switch (head) {
    case "nodes": {
      const id = Number(rest[0]);
      if (Number.isInteger(id)) return { name: "node", id };
      break;
    }
    case "collections": {
      const id = Number(rest[0]);
      if (!Number.isInteger(id)) break;
      if (rest[1] === "deposit") return { name: "deposit", id };
      if (rest.length === 1) return { name: "collection", id };
      break;
    }
    case "items": {
      if (rest.length >= 1) return { name: "item", pid: decodeURIComponent(rest.join("/")) };
      break;
    }
    case "browse": {
      const criterion = rest[0] ?? "country";
      const key = rest.length > 1 ? decodeURIComponent(rest.slice(1).join("/")) : null;
      return { name: "browse", criterion, key };
    }
    case "search":
      return { name: "search", q: decodeURIComponent(rest.join("/") || "") };
    case "stats":
      return { name: "stats" };
  }
  return { name: "notFound", hash };
}

export function hrefFor(route: Route): string {
  switch (route.name) {
    case "home": return "#/";
    case "node": return `#/nodes/${route.id}`;
    case "collection": return `#/collections/${route.id}`;
    case "deposit": return `#/collections/${route.id}/deposit`;
    case "item": return `#/items/${encodeURIComponent(route.pid).replace(/%2F/gi, "/")}`;
    case "browse":
      return route.key === null
        ? `#/browse/${route.criterion}`
        : `#/browse/${route.criterion}/${encodeURIComponent(route.key)}`;
    case "search": return `#/search/${encodeURIComponent(route.q)}`;
    case "stats": return "#/stats";
    case "notFound": return route.hash;
  }
}
