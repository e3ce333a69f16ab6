import type { QueueRow, QueueTab, SendPolicy } from "./api.js";

/** Client-side view state. At most one detail panel is open (selection),
 * and every in-flight mutation registers in pendingOps so its originating
 * button stays disabled until the request settles. */
export interface UiState {
  activeTab: QueueTab;
  rows: QueueRow[];
  total: number;
  pagesLoaded: number;
  pageSize: number;
  selection: string | null;
  settingsDraft: SendPolicy | null;
  pendingOps: Set<string>;
}

export function initialState(pageSize = 10): UiState {
  return {
    activeTab: "ready",
    rows: [],
    total: 0,
    pagesLoaded: 0,
    pageSize,
    selection: null,
    settingsDraft: null,
    pendingOps: new Set(),
  };
}

export const TAB_LABELS: Record<QueueTab, string> = {
  ready: "READY FOR VALIDATION",
  sent: "SENT",
  responded: "RESPONDED TO",
  cancelled: "CANCELLED",
};

export const CARD_TEXT: Array<{ tab: QueueTab; title: string; subtitle: string }> = [
  { tab: "ready", title: "Mentions ready for validation", subtitle: "action recommended" },
  { tab: "sent", title: "Sent mentions", subtitle: "mentions that wait author's approval" },
  { tab: "responded", title: "Responded to mentions", subtitle: "reviewed mentions by authors" },
];
