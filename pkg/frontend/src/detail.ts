import type { MentionDetail, QueueRow } from "./api.js";

export interface DetailCallbacks {
  onApprove(key: string): void;
  onCancel(key: string): void;
  onSwitchMention(key: string): void;
  onClose(): void;
}

function field(label: string, value: string, testid: string): HTMLElement {
  const wrapper = document.createElement("div");
  wrapper.className = "field";
  const dt = document.createElement("dt");
  dt.textContent = label;
  const dd = document.createElement("dd");
  dd.dataset.testid = testid;
  dd.textContent = value;
  wrapper.append(dt, dd);
  return wrapper;
}

/** The inspection panel for one mention; papers carrying several mentions
 * get one sub-tab per sibling record. */
export function renderDetail(
  container: HTMLElement,
  detail: MentionDetail,
  siblings: QueueRow[],
  pending: boolean,
  cb: DetailCallbacks,
): void {
  container.textContent = "";
  container.classList.remove("hidden");

  const close = document.createElement("button");
  close.dataset.testid = "detail-close";
  close.textContent = "×";
  close.addEventListener("click", () => cb.onClose());

  const heading = document.createElement("h2");
  heading.dataset.testid = "detail-oai";
  heading.textContent = detail.oaiId;
  const title = document.createElement("p");
  title.textContent = detail.paperTitle;
  const authors = document.createElement("p");
  authors.className = "authors";
  authors.textContent = detail.authors.map((a) => a.name).join(", ");
  container.append(close, heading, title, authors);

  if (siblings.length > 1) {
    const tabs = document.createElement("nav");
    tabs.dataset.testid = "mention-subtabs";
    siblings.forEach((row, index) => {
      const button = document.createElement("button");
      button.dataset.testid = `subtab-${index + 1}`;
      button.textContent = `SW mention ${index + 1}`;
      button.className = row.key === detail.key ? "subtab active" : "subtab";
      button.addEventListener("click", () => cb.onSwitchMention(row.key));
      tabs.append(button);
    });
    container.append(tabs);
  }

  const citation = detail.mention["sorg:citation"];
  const fields = document.createElement("dl");
  fields.append(
    field("Software name", citation.name, "detail-name"),
    field("Software mention context", detail.mention.mentionContext, "detail-context"),
    field("Mention type", detail.mention.mentionType, "detail-type"),
    field("Software repository link", citation.codeRepository ?? "—", "detail-link"),
    field("Confidence", String(detail.mention.mentionConfidence), "detail-confidence"),
    field("Status", detail.statusLabel, "detail-status"),
  );
  if (detail.pid) {
    fields.append(field("Persistent identifier", detail.pid, "detail-pid"));
  }
  const recipients = detail.recipients
    .map((person) => `${person.name} <${person.email}>`)
    .join(", ");
  fields.append(
    field("Who will be send the notification", recipients || "—", "detail-recipients"),
  );
  container.append(fields);

  const actions = document.createElement("div");
  actions.className = "actions";
  const approve = document.createElement("button");
  approve.dataset.testid = "approve";
  approve.textContent = "Approve and send notification ➤";
  approve.disabled = pending || detail.state !== "Ready";
  approve.addEventListener("click", () => cb.onApprove(detail.key));
  const cancel = document.createElement("button");
  cancel.dataset.testid = "cancel";
  cancel.textContent = "Cancel notification";
  cancel.disabled = pending || !(detail.state === "Ready" || detail.state === "Sent");
  cancel.addEventListener("click", () => cb.onCancel(detail.key));
  actions.append(approve, cancel);
  container.append(actions);
}

export function clearDetail(container: HTMLElement): void {
  container.textContent = "";
  container.classList.add("hidden");
}
