/** Browser tests for the review console against a live primary stack. */

import { afterAll, beforeAll, beforeEach, describe, expect, it } from "vitest";

import { DashboardApi } from "../src/api.js";
import { ConsoleApp } from "../src/app.js";
import { startStack, until, type Stack } from "./stack.js";

let stack: Stack;
let api: DashboardApi;

beforeAll(async () => {
  stack = await startStack();
  api = new DashboardApi(stack.urls.dashboard);
});

afterAll(async () => {
  await stack.stop();
});

function mount(): ConsoleApp {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  return new ConsoleApp(root, api, { pollIntervalMs: 0, pageSize: 10 });
}

function text(testid: string): string {
  const el = document.querySelector(`[data-testid="${testid}"]`);
  return el?.textContent ?? "";
}

function click(testid: string): void {
  const el = document.querySelector<HTMLElement>(`[data-testid="${testid}"]`);
  if (!el) {
    throw new Error(`no element ${testid}`);
  }
  el.click();
}

function rowKeys(): string[] {
  return Array.from(document.querySelectorAll<HTMLElement>("tr.row")).map(
    (tr) => tr.dataset.key!,
  );
}

describe("review console", () => {
  let app: ConsoleApp;

  beforeEach(async () => {
    app = mount();
    await app.start();
  });

  it("shows cards equal to the API tallies", async () => {
    const tallies = await api.tallies();
    expect(text("card-ready-count")).toBe(String(tallies.ready));
    expect(text("card-sent-count")).toBe(String(tallies.sent));
    expect(text("card-responded-count")).toBe(String(tallies.responded));
  });

  it("lists the ready queue with pagination and SHOW MORE", async () => {
    const view = await api.queue("ready", 1, 10);
    expect(rowKeys().length).toBe(Math.min(10, view.total));
    expect(text("pagination-label")).toBe(`1 - ${rowKeys().length} of ${view.total}`);
    if (view.total > 10) {
      click("show-more");
      await until(() => rowKeys().length > 10, 10_000, "SHOW MORE never appended");
      expect(rowKeys().length).toBe(Math.min(20, view.total));
    }
  });

  it("opens a detail panel with the mention fields and recipient", async () => {
    const key = rowKeys()[0]!;
    click(`row-${key}`);
    await until(() => text("detail-name").length > 0);
    const detail = await api.detail(key);
    expect(text("detail-name")).toBe(detail.mention["sorg:citation"].name);
    expect(text("detail-confidence")).toBe(String(detail.mention.mentionConfidence));
    expect(text("detail-recipients")).toContain(detail.recipients[0]!.email);
  });

  it("shows sub-tabs when one paper carries several mentions", async () => {
    const view = await api.queue("ready", 1, 20);
    const byPaper = new Map<string, number>();
    for (const row of view.rows) {
      byPaper.set(row.oaiId, (byPaper.get(row.oaiId) ?? 0) + 1);
    }
    const paper = [...byPaper.entries()].find(([, count]) => count > 1);
    expect(paper).toBeDefined();
    click("show-more");
    await until(() => rowKeys().length === view.rows.length);
    const twin = view.rows.find((row) => row.oaiId === paper![0])!;
    click(`row-${twin.key}`);
    await until(() => document.querySelector('[data-testid="mention-subtabs"]') !== null);
    const tabs = document.querySelectorAll('[data-testid^="subtab-"]');
    expect(tabs.length).toBe(paper![1]);
  });

  it("approve moves a row from Ready to Sent and repolls the tallies", async () => {
    const before = await api.tallies();
    const key = rowKeys()[0]!;
    click(`row-${key}`);
    await until(() => text("detail-name").length > 0);
    click("approve");
    await until(() => !rowKeys().includes(key), 10_000, "row never left the ready queue");

    const after = await api.tallies();
    expect(after.sent).toBe(before.sent + 1);
    expect(text("card-sent-count")).toBe(String(after.sent));
    expect(text("card-ready-count")).toBe(String(after.ready));

    click("tab-sent");
    await until(() => rowKeys().includes(key), 10_000, "row never appeared in sent queue");
    const sentRow = document.querySelector(`[data-testid="row-${key}"]`)!;
    expect(sentRow.textContent).toContain("Sent");
  });

  it("cancel moves a row to the cancelled queue", async () => {
    const key = rowKeys()[0]!;
    click(`row-${key}`);
    await until(() => text("detail-name").length > 0);
    click("cancel");
    await until(() => !rowKeys().includes(key));
    click("tab-cancelled");
    await until(() => rowKeys().includes(key));
    const row = document.querySelector(`[data-testid="row-${key}"]`)!;
    expect(row.textContent).toContain("Cancelled");
  });

  it("disables the action buttons while an operation is pending", async () => {
    const key = rowKeys()[0]!;
    click(`row-${key}`);
    await until(() => text("detail-name").length > 0);
    click("approve");
    const button = document.querySelector<HTMLButtonElement>('[data-testid="approve"]')!;
    expect(button.disabled).toBe(true);
    await until(() => !rowKeys().includes(key));
  });

  it("round-trips the sending policy through the settings form", async () => {
    click("settings-high");
    await until(
      () =>
        !document.querySelector<HTMLInputElement>('[data-testid="settings-threshold"]')!
          .disabled,
    );
    const threshold = document.querySelector<HTMLInputElement>(
      '[data-testid="settings-threshold"]',
    )!;
    threshold.value = "90";
    threshold.dispatchEvent(new Event("change"));
    const auto = document.querySelector<HTMLInputElement>('[data-testid="settings-autosend"]')!;
    if (!auto.checked) {
      auto.click();
    }
    click("settings-save");
    await until(() => text("settings-save") === "Save settings");

    const saved = await api.getSettings();
    expect(saved.highConfidenceOnly).toBe(true);
    expect(saved.threshold).toBe(90);
    expect(saved.autoSend).toBe(true);

    // put the stack back into manual mode for the remaining tests
    await api.putSettings({ ...saved, autoSend: false, highConfidenceOnly: false });
  });

  it("surfaces API validation errors inline in the settings form", async () => {
    click("settings-high");
    await until(
      () =>
        !document.querySelector<HTMLInputElement>('[data-testid="settings-threshold"]')!
          .disabled,
    );
    const threshold = document.querySelector<HTMLInputElement>(
      '[data-testid="settings-threshold"]',
    )!;
    threshold.value = "150";
    threshold.dispatchEvent(new Event("change"));
    click("settings-save");
    await until(() => text("settings-error").length > 0);
    expect(text("settings-error")).toContain("threshold");
  });

  it("threshold input is disabled in all-notifications mode", async () => {
    const threshold = document.querySelector<HTMLInputElement>(
      '[data-testid="settings-threshold"]',
    )!;
    const allRadio = document.querySelector<HTMLInputElement>('[data-testid="settings-all"]')!;
    expect(allRadio.checked).toBe(true);
    expect(threshold.disabled).toBe(true);
  });

  it("links the CSV download straight to the API", () => {
    const link = document.querySelector<HTMLAnchorElement>('[data-testid="csv-link"]')!;
    expect(link.href).toBe(`${stack.urls.dashboard}/api/export.csv`);
  });
});

describe("degraded API", () => {
  it("shows a retry banner instead of a blank screen", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const dead = new DashboardApi("http://127.0.0.1:9");
    const app = new ConsoleApp(document.getElementById("app")!, dead, { pollIntervalMs: 0 });
    await app.start();
    const banner = document.querySelector('[data-testid="banner"]')!;
    expect(banner.classList.contains("hidden")).toBe(false);
    expect(banner.textContent).toContain("Cannot reach the dashboard API");
    expect(document.querySelector('[data-testid="retry"]')).not.toBeNull();
    expect(document.body.textContent!.length).toBeGreaterThan(0);
  });
});
