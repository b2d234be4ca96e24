/** Page bootstrap: session panel plus leaderboard, wired to one server. */

import { ArenaApi } from "./api.js";
import { el } from "./dom.js";
import { LeaderboardPage, queryString } from "./leaderboard.js";
import { SessionController } from "./session.js";
import { SessionPanel } from "./view.js";

export interface AppHandles {
  api: ArenaApi;
  controller: SessionController;
  panel: SessionPanel;
  leaderboard: LeaderboardPage;
}

export async function mountApp(root: HTMLElement, serverUrl: string): Promise<AppHandles> {
  const api = new ArenaApi(serverUrl);
  const controller = new SessionController(api);

  const sessionRoot = el("div", { id: "session-root" });
  const leaderboardRoot = el("div", { id: "leaderboard-root" });
  root.replaceChildren(
    el("h1", {}, ["Evaluation console"]),
    sessionRoot,
    el("h1", {}, ["Leaderboard"]),
    leaderboardRoot,
  );

  const panel = new SessionPanel(controller, sessionRoot);
  if (!(await panel.resume())) {
    panel.renderIdle();
  }

  const leaderboard = new LeaderboardPage(
    api,
    leaderboardRoot,
    window.location.search,
    (query) => {
      const url = `${window.location.pathname}?${queryString(query)}`;
      window.history.replaceState(null, "", url);
    },
  );
  await leaderboard.load();
  return { api, controller, panel, leaderboard };
}

declare global {
  interface Window {
    ARENA_SERVER_URL?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const server = window.ARENA_SERVER_URL ?? "http://127.0.0.1:8400";
  void mountApp(document.getElementById("app")!, server);
}
