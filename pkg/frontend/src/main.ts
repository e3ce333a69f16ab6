import { DashboardApi } from "./api.js";
import { ConsoleApp } from "./app.js";

declare global {
  interface Window {
    MENTION_NOTIFY_API?: string;
  }
}

/** Browser entry. The only configuration is the API base URL, taken from
 * window.MENTION_NOTIFY_API, the ?api= query parameter, or the page origin. */
function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return window.MENTION_NOTIFY_API ?? fromQuery ?? window.location.origin;
}

const root = document.getElementById("app");
if (root) {
  const app = new ConsoleApp(root, new DashboardApi(apiBase()));
  void app.start();
}
