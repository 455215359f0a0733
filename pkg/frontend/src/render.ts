/**
 * HTML renderers. Every number shown comes straight from a response
 * field; the console never re-ranks or recomputes engine math.
 */

import type {
  Recommendation,
  RankedRow,
  Role,
  ServiceError,
} from "./types.js";
import { ROLES } from "./types.js";
import type { XiDiff } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const fmt = (value: number | null, digits = 3): string =>
  value === null ? "—" : value.toFixed(digits);

/** XI grouped by the five roles, in selection order within each group. */
export function renderXi(response: Recommendation): string {
  const groups = new Map<Role, string[]>();
  for (const role of ROLES) groups.set(role, []);
  for (const row of response.xi) {
    groups.get(row.role)?.push(row.player);
  }
  const sections: string[] = [];
  for (const role of ROLES) {
    const members = groups.get(role) ?? [];
    if (members.length === 0) continue;
    const items = members
      .map((p) => {
        const locked = response.locked.includes(p) ? " 🔒" : "";
        return `<li class="xi-row" data-player="${escapeHtml(p)}">` +
          `${escapeHtml(p)}${locked}` +
          `<button class="exclude-btn" data-player="${escapeHtml(p)}">exclude</button></li>`;
      })
      .join("");
    sections.push(
      `<section class="role-group" data-role="${escapeHtml(role)}">` +
        `<h3>${escapeHtml(role)} (${members.length})</h3><ul>${items}</ul></section>`,
    );
  }
  return `<div class="xi" data-count="${response.xi.length}">${sections.join("")}</div>`;
}

function orderingRows(rows: RankedRow[]): string {
  return rows
    .map(
      (row) =>
        `<tr data-player="${escapeHtml(row.player)}">` +
        `<td>${escapeHtml(row.player)}</td>` +
        `<td>${fmt(row.delta)}</td>` +
        `<td>${row.edge_count}</td>` +
        `<td>${fmt(row.mean_weight)}</td>` +
        `<td>${fmt(row.career_phi)}</td></tr>`,
    )
    .join("");
}

/** Per-role stability tables (delta = mean edge weight / spread). */
export function renderDeltaTables(response: Recommendation): string {
  const sections: string[] = [];
  for (const role of ROLES) {
    const rows = response.orderings[role] ?? [];
    if (rows.length === 0) continue;
    sections.push(
      `<details class="ordering" data-role="${escapeHtml(role)}" open>` +
        `<summary>${escapeHtml(role)} ordering</summary>` +
        `<table><thead><tr><th>player</th><th>δ</th><th>edges</th>` +
        `<th>mean</th><th>career φ</th></tr></thead>` +
        `<tbody>${orderingRows(rows)}</tbody></table></details>`,
    );
  }
  return `<div class="orderings">${sections.join("")}</div>`;
}

/** The effective thresholds echoed by the server, for reproducibility. */
export function renderConfigEcho(config: Record<string, unknown>): string {
  const rows = Object.keys(config)
    .sort()
    .map(
      (key) =>
        `<tr><td>${escapeHtml(key)}</td>` +
        `<td>${escapeHtml(String(config[key]))}</td></tr>`,
    )
    .join("");
  return `<details class="config-echo"><summary>config echo</summary><table>${rows}</table></details>`;
}

export function renderDiff(diff: XiDiff): string {
  if (diff.entering.length === 0 && diff.leaving.length === 0) {
    return `<p class="diff unchanged">XI unchanged</p>`;
  }
  const entering = diff.entering
    .map((p) => `<span class="in">+${escapeHtml(p)}</span>`)
    .join(" ");
  const leaving = diff.leaving
    .map((p) => `<span class="out">−${escapeHtml(p)}</span>`)
    .join(" ");
  return `<p class="diff">${entering} ${leaving}</p>`;
}

/** Actionable message naming the violated rule or unfillable slot. */
export function renderError(status: number, body: ServiceError): string {
  const label = body.rule ?? body.slot ?? body.error;
  return (
    `<div class="error" data-status="${status}">` +
    `<strong>${escapeHtml(label)}</strong>: ${escapeHtml(body.message)}</div>`
  );
}

export function renderValidation(problems: string[]): string {
  if (problems.length === 0) return "";
  const items = problems.map((p) => `<li>${escapeHtml(p)}</li>`).join("");
  return `<ul class="validation">${items}</ul>`;
}
