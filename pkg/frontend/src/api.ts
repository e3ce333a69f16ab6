/** Typed client for the dashboard REST API. The console computes nothing
 * itself: every count and status string on screen comes from these calls. */

export type QueueTab = "ready" | "sent" | "responded" | "cancelled";

export interface QueueRow {
  key: string;
  oaiId: string;
  title: string;
  authorsDisplay: string;
  statusLabel: string;
  confidence: number;
}

export interface QueueView {
  queue: QueueTab;
  rows: QueueRow[];
  total: number;
  page: number;
  pageSize: number;
}

export interface Tallies {
  ready: number;
  sent: number;
  responded: number;
  cancelled: number;
}

export interface SendPolicy {
  autoSend: boolean;
  highConfidenceOnly: boolean;
  threshold: number;
  maxAuthorsPerInstitution: number;
}

export interface Person {
  name: string;
  email: string;
}

export interface MentionDetail {
  key: string;
  oaiId: string;
  paperTitle: string;
  authors: Person[];
  state: string;
  statusLabel: string;
  responseKind: string | null;
  offerId: string | null;
  pid: string | null;
  mention: {
    id: string;
    "sorg:citation": { name: string; codeRepository?: string };
    mentionConfidence: number;
    mentionType: string;
    mentionContext: string;
  };
  recipients: Person[];
}

export interface ApproveResult {
  delivered: boolean;
  offerId: string | null;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly problems: string[] = [],
  ) {
    super(message);
  }
}

export class DashboardApi {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/api${path}`, init);
    } catch (cause) {
      throw new ApiError(0, `cannot reach ${this.baseUrl}`, []);
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const problems = Array.isArray(body.problems) ? body.problems : [];
      throw new ApiError(response.status, body.error ?? `HTTP ${response.status}`, problems);
    }
    return body as T;
  }

  queue(tab: QueueTab, page = 1, pageSize = 10): Promise<QueueView> {
    return this.request(`/mentions?state=${tab}&page=${page}&page_size=${pageSize}`);
  }

  tallies(): Promise<Tallies> {
    return this.request("/tallies");
  }

  detail(key: string): Promise<MentionDetail> {
    return this.request(`/mentions/${key}`);
  }

  approve(key: string): Promise<ApproveResult> {
    return this.request(`/mentions/${key}/approve`, { method: "POST" });
  }

  cancel(key: string): Promise<{ state: string }> {
    return this.request(`/mentions/${key}/cancel`, { method: "POST" });
  }

  getSettings(): Promise<SendPolicy> {
    return this.request("/settings");
  }

  putSettings(policy: SendPolicy): Promise<SendPolicy> {
    return this.request("/settings", {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(policy),
    });
  }

  csvUrl(): string {
    return `${this.baseUrl}/api/export.csv`;
  }
}
