import type { SendPolicy } from "./api.js";

export interface SettingsCallbacks {
  onSave(draft: SendPolicy): void;
  onDraftChange(draft: SendPolicy): void;
}

/** Sending settings bound to GET/PUT /api/settings. The threshold input is
 * live only in high-confidence mode; save stays disabled while a PUT runs. */
export function renderSettings(
  container: HTMLElement,
  draft: SendPolicy,
  pending: boolean,
  error: string | null,
  cb: SettingsCallbacks,
): void {
  container.textContent = "";
  const heading = document.createElement("h2");
  heading.textContent = "Sending settings";
  container.append(heading);

  const autoLabel = document.createElement("label");
  const auto = document.createElement("input");
  auto.type = "checkbox";
  auto.dataset.testid = "settings-autosend";
  auto.checked = draft.autoSend;
  auto.addEventListener("change", () => cb.onDraftChange({ ...draft, autoSend: auto.checked }));
  autoLabel.append(auto, document.createTextNode(" Authorise sending notifications automatically"));
  container.append(autoLabel);

  const modes = document.createElement("div");
  const all = document.createElement("input");
  all.type = "radio";
  all.name = "confidence-mode";
  all.dataset.testid = "settings-all";
  all.checked = !draft.highConfidenceOnly;
  all.addEventListener("change", () =>
    cb.onDraftChange({ ...draft, highConfidenceOnly: false }),
  );
  const allLabel = document.createElement("label");
  allLabel.append(all, document.createTextNode(" All notifications"));

  const high = document.createElement("input");
  high.type = "radio";
  high.name = "confidence-mode";
  high.dataset.testid = "settings-high";
  high.checked = draft.highConfidenceOnly;
  high.addEventListener("change", () =>
    cb.onDraftChange({ ...draft, highConfidenceOnly: true }),
  );
  const highLabel = document.createElement("label");
  highLabel.append(high, document.createTextNode(" Only notifications with high confidence"));
  modes.append(allLabel, highLabel);
  container.append(modes);

  const thresholdLabel = document.createElement("label");
  thresholdLabel.append(document.createTextNode("Confidence threshold "));
  const threshold = document.createElement("input");
  threshold.type = "number";
  threshold.dataset.testid = "settings-threshold";
  threshold.value = String(draft.threshold);
  threshold.disabled = !draft.highConfidenceOnly;
  threshold.addEventListener("change", () =>
    cb.onDraftChange({ ...draft, threshold: Number(threshold.value) }),
  );
  thresholdLabel.append(threshold);
  container.append(thresholdLabel);

  const capLabel = document.createElement("label");
  capLabel.append(document.createTextNode("Authors notified per institution "));
  const cap = document.createElement("input");
  cap.type = "number";
  cap.dataset.testid = "settings-max-authors";
  cap.value = String(draft.maxAuthorsPerInstitution);
  cap.min = "1";
  cap.addEventListener("change", () =>
    cb.onDraftChange({ ...draft, maxAuthorsPerInstitution: Number(cap.value) }),
  );
  capLabel.append(cap);
  container.append(capLabel);

  const save = document.createElement("button");
  save.dataset.testid = "settings-save";
  save.textContent = pending ? "Saving…" : "Save settings";
  save.disabled = pending;
  save.addEventListener("click", () => cb.onSave(draft));
  container.append(save);

  const problem = document.createElement("p");
  problem.dataset.testid = "settings-error";
  problem.className = error ? "error" : "error hidden";
  problem.textContent = error ?? "";
  container.append(problem);
}
