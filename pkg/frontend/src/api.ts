// Typed client for the repository's documented JSON endpoints. The portal
// talks to the service only through this module.

import type {
  ApiErrorBody,
  CommunityNode,
  Item,
  Node,
  StatsReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly report?: ApiErrorBody["report"],
  ) {
    super(message);
  }
}

type Fetch = typeof fetch;

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: Fetch = fetch,
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  get authenticated(): boolean {
    return this.token !== null;
  }

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const headers = new Headers(init.headers);
    if (this.token) headers.set("Authorization", `Bearer ${this.token}`);
    const response = await this.fetchImpl(this.baseUrl + path, { ...init, headers });
    if (!response.ok) {
      let body: ApiErrorBody | null = null;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body
      }
      throw new ApiError(
        response.status,
        body?.error ?? `HTTP${response.status}`,
        body?.message ?? response.statusText,
        body?.report,
      );
    }
    return (await response.json()) as T;
  }

  communities(): Promise<CommunityNode[]> {
    return this.request<{ communities: CommunityNode[] }>("/api/communities")
      .then((b) => b.communities);
  }

  node(id: number): Promise<Node> {
    return this.request<Node>(`/api/nodes/${id}`);
  }

  collectionItems(id: number): Promise<Item[]> {
    return this.request<{ items: Item[] }>(`/api/collections/${id}/items`)
      .then((b) => b.items);
  }

  item(pid: string): Promise<Item> {
    return this.request<Item>(`/api/items/${pid}`);
  }

  deposit(collectionId: number, manifest: string, files: readonly File[]): Promise<Item> {
    const form = new FormData();
    form.append("manifest", manifest);
    for (const file of files) form.append("files", file, file.name);
    return this.request<Item>(`/api/collections/${collectionId}/items`, {
      method: "POST",
      body: form,
    });
  }

  withdraw(pid: string): Promise<Item> {
    return this.request<Item>(`/api/items/${pid}/withdraw`, { method: "POST" });
  }

  recommend(pid: string, toEmail: string, fromName?: string): Promise<{ queued: string }> {
    return this.request(`/api/items/${pid}/recommend`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ to_email: toEmail, from_name: fromName ?? null }),
    });
  }

  browse(criterion: string, key?: string): Promise<Item[]> {
    const params = new URLSearchParams({ criterion });
    if (key) params.set("key", key);
    return this.request<{ items: Item[] }>(`/api/browse?${params}`)
      .then((b) => b.items);
  }

  search(q: string): Promise<Item[]> {
    const params = new URLSearchParams({ q });
    return this.request<{ items: Item[] }>(`/api/search?${params}`)
      .then((b) => b.items);
  }

  subscribe(collectionId: number, subscribed: boolean): Promise<{ collection: number; subscribed: boolean }> {
    return this.request("/api/subscriptions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ collection: collectionId, subscribed }),
    });
  }

  stats(from?: string, until?: string, k = 10): Promise<StatsReport> {
    const params = new URLSearchParams({ k: String(k) });
    if (from) params.set("from", from);
    if (until) params.set("until", until);
    return this.request<StatsReport>(`/api/stats?${params}`);
  }

  bitstreamUrl(pid: string, seq: number): string {
    return `${this.baseUrl}/api/items/${pid}/bitstreams/${seq}`;
  }

  feedUrl(setSpec: string): string {
    return `${this.baseUrl}/feeds/${setSpec}.rss`;
  }
}
