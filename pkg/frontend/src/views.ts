// Pure render functions: state in, HTML string out. Event wiring lives in
// app.ts so these stay directly unit-testable.

import { hrefFor } from "./router.js";
import { t } from "./i18n.js";
import { CC_LICENSES, DATA_TYPES, FILE_ROLES } from "./schema.js";
import type { Violation } from "./validate.js";
import type { Bitstream, CommunityNode, Item, StatsReport } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const link = (href: string, label: string) =>
  `<a href="${escapeHtml(href)}">${escapeHtml(label)}</a>`;

export function renderCommunityTree(tree: readonly CommunityNode[]): string {
  if (tree.length === 0) return `<p class="empty">${escapeHtml(t("empty"))}</p>`;
  const renderNode = (node: CommunityNode): string => {
    const target = node.kind === "collection"
      ? hrefFor({ name: "collection", id: node.id })
      : hrefFor({ name: "node", id: node.id });
    const children = node.children?.length
      ? `<ul>${node.children.map(renderNode).join("")}</ul>`
      : "";
    return `<li class="${node.kind}">${link(target, node.name)}` +
      ` <span class="spec">${escapeHtml(node.set_spec)}</span>${children}</li>`;
  };
  return `<h2>${escapeHtml(t("communities"))}</h2><ul class="tree">` +
    tree.map(renderNode).join("") + "</ul>";
}

export function itemTitle(item: Item): string {
  const field = item.record.find((f) => f.schema === "dc" && f.element === "title");
  return field?.value ?? item.pid;
}

export function renderItemList(items: readonly Item[], heading: string): string {
  const rows = items.map((item) =>
    `<li>${link(hrefFor({ name: "item", pid: item.pid }), itemTitle(item))}` +
    ` <span class="spec">${escapeHtml(item.set_spec)}</span>` +
    ` <span class="stamp">${escapeHtml(item.datestamp)}</span></li>`,
  );
  const body = rows.length
    ? `<ul class="items">${rows.join("")}</ul>`
    : `<p class="empty">${escapeHtml(t("empty"))}</p>`;
  return `<h2>${escapeHtml(heading)}</h2>${body}`;
}

function renderBitstreamRow(item: Item, b: Bitstream): string {
  const url = `/api/items/${item.pid}/bitstreams/${b.seq}`;
  return `<tr><td>${link(url, b.filename)}</td><td>${escapeHtml(b.role)}</td>` +
    `<td>${b.size}</td><td>${escapeHtml(b.license ?? "—")}</td>` +
    `<td><code>${escapeHtml(b.sha256.slice(0, 12))}…</code></td></tr>`;
}

export function renderItem(item: Item, subscribedToken: boolean): string {
  const fields = item.record.map((f) => {
    const path = f.qualifier
      ? `${f.schema}.${f.element}.${f.qualifier}`
      : `${f.schema}.${f.element}`;
    const lang = f.lang ? ` <em>@${escapeHtml(f.lang)}</em>` : "";
    return `<tr><td>${escapeHtml(path)}${lang}</td><td>${escapeHtml(f.value)}</td></tr>`;
  });
  const files = item.bitstreams.map((b) => renderBitstreamRow(item, b));
  const withdrawnBanner = item.withdrawn
    ? `<p class="withdrawn">withdrawn</p>`
    : "";
  const actions = item.withdrawn ? "" : `
    <p>
      <button id="recommend">${escapeHtml(t("recommend"))}</button>
      ${subscribedToken ? `<button id="withdraw">${escapeHtml(t("withdraw"))}</button>` : ""}
    </p>`;
  return `
    <h2>${escapeHtml(itemTitle(item))}</h2>
    <p class="pid"><code>${escapeHtml(item.pid)}</code>
      <span class="spec">${escapeHtml(item.set_spec)}</span></p>
    ${withdrawnBanner}
    <h3>${escapeHtml(t("metadata"))}</h3>
    <table class="fields"><tbody>${fields.join("")}</tbody></table>
    <h3>${escapeHtml(t("files"))}</h3>
    <table class="files"><tbody>${files.join("")}</tbody></table>
    ${actions}`;
}

export function renderDepositForm(collectionId: number, datatype: string,
                                  authenticated: boolean): string {
  if (!authenticated) {
    return `<p class="warning">${escapeHtml(t("loginNeeded"))}</p>
      <p><input id="token" type="password" placeholder="${escapeHtml(t("token"))}">
      <button id="set-token">${escapeHtml(t("submit"))}</button></p>`;
  }
  const roleOptions = FILE_ROLES
    .map((r) => `<option value="${r}">${r}</option>`).join("");
  const licenseOptions = ["", ...CC_LICENSES]
    .map((l) => `<option value="${l}">${l || "—"}</option>`).join("");
  const datatypeOptions = DATA_TYPES
    .map((d) => `<option value="${d}"${d === datatype ? " selected" : ""}>${d}</option>`)
    .join("");
  return `
    <h2>${escapeHtml(t("depositHere"))}</h2>
    <form id="deposit-form" data-collection="${collectionId}">
      <label>dc.title <input name="dc.title" required></label>
      <label>dc.description <textarea name="dc.description"></textarea></label>
      <label>dc.creator <input name="dc.creator"></label>
      <label>lago.responsible <input name="lago.responsible"></label>
      <label>lago.contact <input name="lago.contact"></label>
      <label>lago.datatype <select name="lago.datatype">${datatypeOptions}</select></label>
      <label>lago.capture.start <input name="lago.capture.start"
        placeholder="YYYY-MM-DDThh:mm:ssZ"></label>
      <label>lago.capture.end <input name="lago.capture.end"
        placeholder="YYYY-MM-DDThh:mm:ssZ"></label>
      <label>lago.site <input name="lago.site"></label>
      <label>lago.pmt.voltage <input name="lago.pmt.voltage"></label>
      <label>lago.pmt.temperature <input name="lago.pmt.temperature"></label>
      <label>${escapeHtml(t("files"))} <input id="deposit-files" type="file" multiple></label>
      <div id="file-attrs" data-roles='${JSON.stringify(FILE_ROLES)}'
           data-licenses='${JSON.stringify(CC_LICENSES)}'></div>
      <template id="file-attr-row">
        <span class="file-attr">
          <select class="role">${roleOptions}</select>
          <select class="license">${licenseOptions}</select>
        </span>
      </template>
      <div id="violations"></div>
      <button type="submit">${escapeHtml(t("submit"))}</button>
    </form>`;
}

export function renderViolations(violations: readonly Violation[]): string {
  if (violations.length === 0) return "";
  const rows = violations.map(
    (v) => `<li><code>${escapeHtml(v.path)}</code> ` +
      `<strong>${escapeHtml(v.code)}</strong>: ${escapeHtml(v.message)}</li>`,
  );
  return `<ul class="violations">${rows.join("")}</ul>`;
}

export function renderStats(report: StatsReport): string {
  const table = (rows: { pid: string; count: number }[]) =>
    rows.length
      ? `<table><tbody>${rows.map((r) =>
          `<tr><td>${link(hrefFor({ name: "item", pid: r.pid }), r.pid)}</td>` +
          `<td>${r.count}</td></tr>`).join("")}</tbody></table>`
      : `<p class="empty">${escapeHtml(t("empty"))}</p>`;
  return `
    <h2>${escapeHtml(t("stats"))}</h2>
    <p>${escapeHtml(t("visits"))}: ${report.visits} ·
       ${escapeHtml(t("downloads"))}: ${report.downloads}</p>
    <h3>${escapeHtml(t("topDownloaded"))}</h3>${table(report.top_downloaded)}
    <h3>${escapeHtml(t("topViewed"))}</h3>${table(report.top_viewed)}`;
}

export function renderBrowseNav(active: string): string {
  const criteria = ["country", "responsible", "filename", "filetype"];
  return `<nav class="browse-nav">` + criteria.map((c) =>
    `<a href="${hrefFor({ name: "browse", criterion: c, key: null })}"` +
    `${c === active ? ' class="active"' : ""}>${c}</a>`).join(" ") + "</nav>";
}
