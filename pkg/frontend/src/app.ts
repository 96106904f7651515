// Entry point: wires the hash router, API client and views to the DOM.

import { ApiClient, ApiError } from "./api.js";
import { getLang, setLang, t } from "./i18n.js";
import { Route, hrefFor, parseHash } from "./router.js";
import type { DataType } from "./schema.js";
import { FileAttrs, FormField, buildManifest, validateRecord } from "./validate.js";
import {
  escapeHtml,
  renderBrowseNav,
  renderCommunityTree,
  renderDepositForm,
  renderItem,
  renderItemList,
  renderStats,
  renderViolations,
} from "./views.js";

const api = new ApiClient("");
const storedToken = sessionStorage.getItem("lagodr-token");
if (storedToken) api.setToken(storedToken);

function root(): HTMLElement {
  return document.getElementById("app") as HTMLElement;
}

function renderError(error: unknown): string {
  if (error instanceof ApiError) {
    return `<p class="error"><strong>${escapeHtml(error.code)}</strong>: ` +
      `${escapeHtml(error.message)}</p>` +
      (error.report
        ? renderViolations(error.report.violations as never)
        : "");
  }
  return `<p class="error">${escapeHtml(String(error))}</p>`;
}

function collectFields(form: HTMLFormElement): FormField[] {
  const fields: FormField[] = [];
  for (const input of Array.from(form.elements)) {
    const el = input as HTMLInputElement;
    if (!el.name || !el.name.includes(".") || !el.value) continue;
    const [schema, element, qualifier] = el.name.split(".");
    fields.push({
      schema: schema as "dc" | "lago",
      element,
      qualifier: qualifier ?? null,
      value: el.value,
    });
  }
  return fields;
}

function fileAttrRows(form: HTMLFormElement): FileAttrs[] {
  const picker = form.querySelector<HTMLInputElement>("#deposit-files");
  const rows = Array.from(form.querySelectorAll<HTMLElement>(".file-attr"));
  const files = Array.from(picker?.files ?? []);
  return files.map((file, i) => {
    const row = rows[i];
    return {
      filename: file.name,
      role: row?.querySelector<HTMLSelectElement>(".role")?.value ?? "data",
      license: row?.querySelector<HTMLSelectElement>(".license")?.value || null,
    };
  });
}

function wireDepositForm(collectionId: number): void {
  const setToken = document.getElementById("set-token");
  if (setToken) {
    setToken.addEventListener("click", () => {
      const token = (document.getElementById("token") as HTMLInputElement).value.trim();
      if (!token) return;
      api.setToken(token);
      sessionStorage.setItem("lagodr-token", token);
      void render();
    });
    return;
  }

  const form = document.getElementById("deposit-form") as HTMLFormElement;
  const picker = form.querySelector<HTMLInputElement>("#deposit-files")!;
  picker.addEventListener("change", () => {
    const holder = form.querySelector<HTMLElement>("#file-attrs")!;
    const template = form.querySelector<HTMLTemplateElement>("#file-attr-row")!;
    holder.innerHTML = "";
    for (const file of Array.from(picker.files ?? [])) {
      const row = template.content.cloneNode(true) as DocumentFragment;
      const label = document.createElement("div");
      label.textContent = file.name;
      label.appendChild(row);
      holder.appendChild(label);
    }
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      const fields = collectFields(form);
      const datatype = (form.elements.namedItem("lago.datatype") as HTMLSelectElement)
        .value as DataType;
      const violations = validateRecord(fields, datatype);
      const box = document.getElementById("violations")!;
      box.innerHTML = renderViolations(violations);
      if (violations.length > 0) return; // blocked client-side
      const attrs = fileAttrRows(form);
      const manifest = buildManifest(fields, attrs);
      try {
        const item = await api.deposit(collectionId, manifest,
                                       Array.from(picker.files ?? []));
        location.hash = hrefFor({ name: "item", pid: item.pid });
      } catch (error) {
        box.innerHTML = renderError(error);
      }
    })();
  });
}

async function renderRoute(route: Route): Promise<string> {
  switch (route.name) {
    case "home":
      return renderCommunityTree(await api.communities());
    case "node": {
      const node = await api.node(route.id);
      const tree = await api.communities();
      const find = (nodes: typeof tree): typeof tree =>
        nodes.flatMap((n) => (n.id === node.id ? [n] : find(n.children ?? [])));
      const subtree = find(tree);
      return `<h2>${escapeHtml(node.name)}</h2>` +
        `<p><a href="${api.feedUrl(node.set_spec)}">${escapeHtml(t("rssFeed"))}</a></p>` +
        renderCommunityTree(subtree.length ? subtree[0].children : []);
    }
    case "collection": {
      const node = await api.node(route.id);
      const items = await api.collectionItems(route.id);
      return `<h2>${escapeHtml(node.name)}</h2>
        <p><a href="${hrefFor({ name: "deposit", id: route.id })}">` +
        `${escapeHtml(t("depositHere"))}</a> ·
        <a href="${api.feedUrl(node.set_spec)}">${escapeHtml(t("rssFeed"))}</a> ·
        <button id="toggle-subscribe" data-collection="${route.id}">` +
        `${escapeHtml(t("subscribe"))}</button></p>` +
        renderItemList(items, t("items"));
    }
    case "item": {
      const item = await api.item(route.pid);
      return renderItem(item, api.authenticated);
    }
    case "deposit": {
      const node = await api.node(route.id);
      return renderDepositForm(route.id, node.datatype ?? "wcd-raw", api.authenticated);
    }
    case "browse": {
      const items = route.key === null
        ? await api.browse(route.criterion)
        : await api.browse(route.criterion, route.key);
      return renderBrowseNav(route.criterion) +
        renderItemList(items, `${t("browse")}: ${route.criterion}` +
          (route.key ? ` = ${route.key}` : ""));
    }
    case "search": {
      const items = route.q ? await api.search(route.q) : [];
      return `
        <form id="search-form"><input id="search-q" value="${escapeHtml(route.q)}">
        <button type="submit">${escapeHtml(t("search"))}</button></form>` +
        renderItemList(items, `${t("search")}: ${route.q}`);
    }
    case "stats":
      return renderStats(await api.stats());
    case "notFound":
      return `<p class="error">404: ${escapeHtml(route.hash)}</p>`;
  }
}

function wireRoute(route: Route): void {
  if (route.name === "deposit") wireDepositForm(route.id);
  if (route.name === "search") {
    document.getElementById("search-form")?.addEventListener("submit", (e) => {
      e.preventDefault();
      const q = (document.getElementById("search-q") as HTMLInputElement).value;
      location.hash = hrefFor({ name: "search", q });
    });
  }
  if (route.name === "collection") {
    document.getElementById("toggle-subscribe")?.addEventListener("click", () => {
      void (async () => {
        try {
          await api.subscribe(route.id, true);
          root().insertAdjacentHTML("beforeend", `<p class="ok">✓</p>`);
        } catch (error) {
          root().insertAdjacentHTML("beforeend", renderError(error));
        }
      })();
    });
  }
  if (route.name === "item") {
    document.getElementById("recommend")?.addEventListener("click", () => {
      const toEmail = prompt("Email:");
      if (!toEmail) return;
      void api.recommend(route.pid, toEmail).catch((error) => {
        root().insertAdjacentHTML("beforeend", renderError(error));
      });
    });
    document.getElementById("withdraw")?.addEventListener("click", () => {
      void api.withdraw(route.pid).then(render).catch((error) => {
        root().insertAdjacentHTML("beforeend", renderError(error));
      });
    });
  }
}

async function render(): Promise<void> {
  const route = parseHash(location.hash);
  try {
    root().innerHTML = await renderRoute(route);
    wireRoute(route);
  } catch (error) {
    root().innerHTML = renderError(error);
  }
}

function wireChrome(): void {
  document.getElementById("lang-toggle")?.addEventListener("click", () => {
    setLang(getLang() === "es" ? "en" : "es");
    void render();
  });
}

window.addEventListener("hashchange", () => void render());
window.addEventListener("DOMContentLoaded", () => {
  wireChrome();
  void render();
});
