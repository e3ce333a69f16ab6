import type { QueueRow, QueueTab, Tallies } from "./api.js";
import { CARD_TEXT, TAB_LABELS } from "./state.js";

export interface QueueCallbacks {
  onTab(tab: QueueTab): void;
  onRow(key: string): void;
  onShowMore(): void;
}

/** Summary cards straight from /api/tallies; no arithmetic happens here. */
export function renderCards(container: HTMLElement, tallies: Tallies, cb: QueueCallbacks): void {
  container.textContent = "";
  for (const card of CARD_TEXT) {
    const el = document.createElement("div");
    el.className = "card";
    el.dataset.testid = `card-${card.tab}`;

    const title = document.createElement("h3");
    title.textContent = card.title;
    const subtitle = document.createElement("p");
    subtitle.textContent = card.subtitle;
    const count = document.createElement("strong");
    count.dataset.testid = `card-${card.tab}-count`;
    count.textContent = String(tallies[card.tab]);
    const review = document.createElement("button");
    review.textContent = "Review";
    review.addEventListener("click", () => cb.onTab(card.tab));

    el.append(title, subtitle, count, review);
    container.append(el);
  }
}

export function renderTabs(
  container: HTMLElement,
  active: QueueTab,
  cb: QueueCallbacks,
): void {
  container.textContent = "";
  for (const tab of Object.keys(TAB_LABELS) as QueueTab[]) {
    const button = document.createElement("button");
    button.dataset.testid = `tab-${tab}`;
    button.textContent = TAB_LABELS[tab];
    button.className = tab === active ? "tab active" : "tab";
    button.addEventListener("click", () => cb.onTab(tab));
    container.append(button);
  }
}

export function renderTable(
  container: HTMLElement,
  rows: QueueRow[],
  selection: string | null,
  cb: QueueCallbacks,
): void {
  container.textContent = "";
  const table = document.createElement("table");
  table.dataset.testid = "queue-table";
  const head = document.createElement("tr");
  for (const column of ["OAI", "Title", "Author", "Status"]) {
    const th = document.createElement("th");
    th.textContent = column;
    head.append(th);
  }
  table.append(head);
  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.dataset.key = row.key;
    tr.dataset.testid = `row-${row.key}`;
    tr.className = row.key === selection ? "row selected" : "row";
    for (const text of [row.oaiId, row.title, row.authorsDisplay, row.statusLabel]) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.append(td);
    }
    tr.addEventListener("click", () => cb.onRow(row.key));
    table.append(tr);
  }
  container.append(table);
  if (rows.length === 0) {
    const empty = document.createElement("p");
    empty.dataset.testid = "empty-queue";
    empty.textContent = "No mentions in this queue.";
    container.append(empty);
  }
}

/** Footer math is presentation only: "1 - 10 of 100" from API-provided totals. */
export function renderPagination(
  container: HTMLElement,
  shown: number,
  total: number,
  cb: QueueCallbacks,
): void {
  container.textContent = "";
  const label = document.createElement("span");
  label.dataset.testid = "pagination-label";
  label.textContent = total === 0 ? "0 of 0" : `1 - ${shown} of ${total}`;
  container.append(label);
  if (shown < total) {
    const more = document.createElement("button");
    more.dataset.testid = "show-more";
    more.textContent = "SHOW MORE";
    more.addEventListener("click", () => cb.onShowMore());
    container.append(more);
  }
}
