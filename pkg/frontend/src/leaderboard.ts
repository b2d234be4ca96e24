/**
 * Leaderboard page: ranked table with method and filter selectors driven by
 * query parameters, and per-policy report summaries whose <ref> citations
 * render as episode links.
 */

import { ApiError, ArenaApi } from "./api.js";
import { clear, el, errorBanner } from "./dom.js";
import {
  LEADERBOARD_FILTERS,
  METHOD_LABELS,
  RANKING_METHODS,
  type LeaderboardFilter,
  type LeaderboardSnapshot,
  type RankingMethod,
} from "./schema.js";

export interface LeaderboardQuery {
  method: RankingMethod;
  filter: LeaderboardFilter;
}

export function parseQuery(search: string): LeaderboardQuery {
  const params = new URLSearchParams(search);
  const method = params.get("method") ?? "task_em";
  const filter = params.get("filter") ?? "all";
  return {
    method: (RANKING_METHODS as readonly string[]).includes(method)
      ? (method as RankingMethod)
      : "task_em",
    filter: (LEADERBOARD_FILTERS as readonly string[]).includes(filter)
      ? (filter as LeaderboardFilter)
      : "all",
  };
}

export function queryString(query: LeaderboardQuery): string {
  return new URLSearchParams({ method: query.method, filter: query.filter }).toString();
}

const REF_RE = /<ref>([0-9a-fA-F-]{36})<\/ref>/g;

/** Render a report summary, turning <ref>uuid</ref> spans into episode links. */
export function renderReportSummary(text: string): HTMLElement {
  const container = el("div", { class: "report-summary" });
  let cursor = 0;
  for (const match of text.matchAll(REF_RE)) {
    container.append(text.slice(cursor, match.index));
    const sessionId = match[1]!;
    container.append(
      el("a", { class: "episode-ref", href: `#episode-${sessionId}` }, [sessionId]),
    );
    cursor = match.index + match[0].length;
  }
  container.append(text.slice(cursor));
  return container;
}

export class LeaderboardPage {
  query: LeaderboardQuery;
  snapshot: LeaderboardSnapshot | null = null;

  constructor(
    private readonly api: ArenaApi,
    private readonly root: HTMLElement,
    initialSearch: string = "",
    private readonly onQueryChange: (query: LeaderboardQuery) => void = () => {},
  ) {
    this.query = parseQuery(initialSearch);
  }

  async load(): Promise<void> {
    try {
      this.snapshot = await this.api.leaderboard(this.query.method, this.query.filter);
    } catch (err) {
      if (err instanceof ApiError && err.code === "insufficient_data") {
        this.renderEmptyState(err.message);
        return;
      }
      if (err instanceof ApiError) {
        clear(this.root).append(errorBanner(err.code, err.message));
        return;
      }
      throw err;
    }
    this.render();
  }

  async setQuery(query: Partial<LeaderboardQuery>): Promise<void> {
    this.query = { ...this.query, ...query };
    this.onQueryChange(this.query);
    await this.load();
  }

  private renderEmptyState(message: string) {
    clear(this.root).append(
      this.selectors(),
      el("p", { class: "empty-state" }, [`No rankings yet: ${message}`]),
    );
  }

  private selectors(): HTMLElement {
    const methodSelect = el("select", { "data-role": "method" });
    for (const method of RANKING_METHODS) {
      const option = el("option", { value: method }, [METHOD_LABELS[method]]);
      if (method === this.query.method) option.setAttribute("selected", "");
      methodSelect.append(option);
    }
    methodSelect.addEventListener("change", () => {
      void this.setQuery({ method: methodSelect.value as RankingMethod });
    });
    const filterSelect = el("select", { "data-role": "filter" });
    for (const filter of LEADERBOARD_FILTERS) {
      const option = el("option", { value: filter }, [
        filter === "all" ? "all policies" : "open-source policies",
      ]);
      if (filter === this.query.filter) option.setAttribute("selected", "");
      filterSelect.append(option);
    }
    filterSelect.addEventListener("change", () => {
      void this.setQuery({ filter: filterSelect.value as LeaderboardFilter });
    });
    return el("div", { class: "selectors" }, [methodSelect, filterSelect]);
  }

  private render() {
    const snapshot = this.snapshot!;
    const tbody = el("tbody");
    snapshot.entries.forEach((entry, rank) => {
      const reportLink = el(
        "a",
        { href: "#", "data-role": "report-link", "data-policy-id": entry.policy_id },
        ["report"],
      );
      reportLink.addEventListener("click", (ev) => {
        ev.preventDefault();
        void this.openReport(entry.policy_id);
      });
      tbody.append(
        el("tr", { "data-policy-id": entry.policy_id }, [
          el("td", {}, [String(rank + 1)]),
          el("td", { class: "policy-name" }, [entry.display_name]),
          el("td", {}, [entry.score.toFixed(4)]),
          el("td", {}, [entry.open_source ? "open-source" : "closed"]),
          el("td", {}, [reportLink]),
        ]),
      );
    });
    const table = el("table", { class: "leaderboard" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, ["#"]),
          el("th", {}, ["policy"]),
          el("th", {}, ["score"]),
          el("th", {}, ["license"]),
          el("th", {}, ["report"]),
        ]),
      ]),
      tbody,
    ]);
    clear(this.root).append(
      this.selectors(),
      el("p", { class: "meta" }, [
        `${METHOD_LABELS[this.query.method]} ranking over ${snapshot.record_count} evaluations`,
      ]),
      table,
      el("div", { "data-role": "report-panel" }),
    );
  }

  async openReport(policyId: string): Promise<void> {
    const panel = this.root.querySelector<HTMLElement>('[data-role="report-panel"]');
    if (!panel) return;
    const text = await this.api.fetchReportSummary(policyId);
    clear(panel);
    if (text === null) {
      panel.append(el("p", { class: "empty-state" }, ["No report available for this policy."]));
      return;
    }
    panel.append(renderReportSummary(text));
  }
}
