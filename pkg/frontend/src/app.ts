import { ApiError, DashboardApi } from "./api.js";
import type { MentionDetail, QueueRow, QueueTab, SendPolicy } from "./api.js";
import { clearDetail, renderDetail } from "./detail.js";
import { renderCards, renderPagination, renderTable, renderTabs } from "./queue.js";
import { renderSettings } from "./settings.js";
import { initialState, UiState } from "./state.js";

export interface ConsoleOptions {
  pollIntervalMs?: number; // 0 disables background polling
  pageSize?: number;
}

/** Composition root: owns the UI state, talks to the API, renders sections.
 * The server is authoritative; after every completed action the tallies and
 * the visible queue are re-fetched rather than patched locally. */
export class ConsoleApp {
  readonly state: UiState;
  private readonly api: DashboardApi;
  private readonly sections: Record<string, HTMLElement>;
  private detailData: MentionDetail | null = null;
  private settingsError: string | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly pollIntervalMs: number;

  constructor(root: HTMLElement, api: DashboardApi, options: ConsoleOptions = {}) {
    this.api = api;
    this.pollIntervalMs = options.pollIntervalMs ?? 5000;
    this.state = initialState(options.pageSize ?? 10);
    root.textContent = "";
    this.sections = {
      banner: this.section(root, "banner", "banner hidden"),
      header: this.section(root, "header", "header"),
      cards: this.section(root, "cards", "cards"),
      tabs: this.section(root, "tabs", "tabs"),
      table: this.section(root, "table", "queue"),
      pagination: this.section(root, "pagination", "pagination"),
      detail: this.section(root, "detail", "detail hidden"),
      settings: this.section(root, "settings", "settings"),
      toast: this.section(root, "toast", "toast hidden"),
    };
    this.renderHeader();
  }

  private section(root: HTMLElement, testid: string, className: string): HTMLElement {
    const el = document.createElement("section");
    el.dataset.testid = testid;
    el.className = className;
    root.append(el);
    return el;
  }

  private renderHeader(): void {
    const heading = document.createElement("h1");
    heading.textContent = "Research software";
    const csv = document.createElement("a");
    csv.dataset.testid = "csv-link";
    csv.textContent = "DOWNLOAD CSV";
    csv.href = this.api.csvUrl();
    this.sections.header!.append(heading, csv);
  }

  async start(): Promise<void> {
    await this.loadSettings();
    await this.refresh();
    if (this.pollIntervalMs > 0) {
      this.timer = setInterval(() => {
        void this.refresh();
      }, this.pollIntervalMs);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  // -- data flows ---------------------------------------------------------

  /** Re-fetch tallies, the visible queue window, and the open detail.
   * On failure the previous content stays and a retry banner appears. */
  async refresh(): Promise<void> {
    try {
      const tallies = await this.api.tallies();
      const pages = Math.max(this.state.pagesLoaded, 1);
      const rows: QueueRow[] = [];
      let total = 0;
      for (let page = 1; page <= pages; page += 1) {
        const view = await this.api.queue(this.state.activeTab, page, this.state.pageSize);
        rows.push(...view.rows);
        total = view.total;
        if (view.rows.length < this.state.pageSize) {
          break;
        }
      }
      this.state.rows = rows;
      this.state.total = total;
      this.state.pagesLoaded = pages;
      this.hideBanner();
      renderCards(this.sections.cards!, tallies, this.callbacks());
      renderTabs(this.sections.tabs!, this.state.activeTab, this.callbacks());
      renderTable(this.sections.table!, rows, this.state.selection, this.callbacks());
      renderPagination(this.sections.pagination!, rows.length, total, this.callbacks());
      if (this.state.selection) {
        await this.loadDetail(this.state.selection);
      }
    } catch (error) {
      this.showBanner(error);
    }
  }

  private callbacks() {
    return {
      onTab: (tab: QueueTab) => void this.switchTab(tab),
      onRow: (key: string) => void this.openDetail(key),
      onShowMore: () => void this.showMore(),
      onApprove: (key: string) => void this.approve(key),
      onCancel: (key: string) => void this.cancel(key),
      onSwitchMention: (key: string) => void this.openDetail(key),
      onClose: () => this.closeDetail(),
    };
  }

  async switchTab(tab: QueueTab): Promise<void> {
    this.state.activeTab = tab;
    this.state.pagesLoaded = 1;
    this.closeDetail();
    await this.refresh();
  }

  async showMore(): Promise<void> {
    this.state.pagesLoaded += 1;
    await this.refresh();
  }

  async openDetail(key: string): Promise<void> {
    this.state.selection = key;
    await this.loadDetail(key);
    renderTable(this.sections.table!, this.state.rows, key, this.callbacks());
  }

  closeDetail(): void {
    this.state.selection = null;
    this.detailData = null;
    clearDetail(this.sections.detail!);
  }

  private async loadDetail(key: string): Promise<void> {
    try {
      this.detailData = await this.api.detail(key);
    } catch (error) {
      this.showBanner(error);
      return;
    }
    this.renderDetailSection();
  }

  private renderDetailSection(): void {
    if (!this.detailData) {
      return;
    }
    const siblings = this.state.rows.filter((row) => row.oaiId === this.detailData!.oaiId);
    renderDetail(
      this.sections.detail!,
      this.detailData,
      siblings,
      this.state.pendingOps.size > 0,
      this.callbacks(),
    );
  }

  // -- actions -------------------------------------------------------------

  /** One user action, one API call; the pending-op registry absorbs
   * double-clicks by disabling the source button until the call settles. */
  private async mutate(op: string, call: () => Promise<unknown>): Promise<void> {
    if (this.state.pendingOps.has(op)) {
      return;
    }
    this.state.pendingOps.add(op);
    this.renderDetailSection();
    try {
      await call();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.toast(`Refused: ${error.message}`);
      } else {
        this.showBanner(error);
      }
    } finally {
      this.state.pendingOps.delete(op);
    }
    await this.refresh();
  }

  approve(key: string): Promise<void> {
    return this.mutate(`approve:${key}`, () => this.api.approve(key));
  }

  cancel(key: string): Promise<void> {
    return this.mutate(`cancel:${key}`, () => this.api.cancel(key));
  }

  // -- settings --------------------------------------------------------------

  async loadSettings(): Promise<void> {
    try {
      this.state.settingsDraft = await this.api.getSettings();
      this.settingsError = null;
    } catch (error) {
      this.showBanner(error);
      return;
    }
    this.renderSettingsSection(false);
  }

  private renderSettingsSection(pending: boolean): void {
    if (!this.state.settingsDraft) {
      return;
    }
    renderSettings(this.sections.settings!, this.state.settingsDraft, pending, this.settingsError, {
      onDraftChange: (draft: SendPolicy) => {
        this.state.settingsDraft = draft;
        this.renderSettingsSection(false);
      },
      onSave: (draft: SendPolicy) => void this.saveSettings(draft),
    });
  }

  async saveSettings(draft: SendPolicy): Promise<void> {
    if (this.state.pendingOps.has("settings-save")) {
      return;
    }
    this.state.pendingOps.add("settings-save");
    this.renderSettingsSection(true);
    try {
      this.state.settingsDraft = await this.api.putSettings(draft);
      this.settingsError = null;
    } catch (error) {
      this.settingsError =
        error instanceof ApiError && error.problems.length > 0
          ? error.problems.join("; ")
          : error instanceof Error
            ? error.message
            : String(error);
    } finally {
      this.state.pendingOps.delete("settings-save");
    }
    this.renderSettingsSection(false);
  }

  // -- notices ------------------------------------------------------------------

  private showBanner(error: unknown): void {
    const banner = this.sections.banner!;
    banner.className = "banner";
    banner.textContent = "";
    const text = document.createElement("span");
    text.textContent =
      error instanceof Error ? `Cannot reach the dashboard API: ${error.message}` : "Request failed";
    const retry = document.createElement("button");
    retry.dataset.testid = "retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void this.refresh());
    banner.append(text, retry);
  }

  private hideBanner(): void {
    this.sections.banner!.className = "banner hidden";
    this.sections.banner!.textContent = "";
  }

  private toast(message: string): void {
    const toast = this.sections.toast!;
    toast.className = "toast";
    toast.textContent = message;
    setTimeout(() => {
      toast.className = "toast hidden";
    }, 4000);
  }
}
