import { ApiClient } from "./api.js";
import { ExploreController } from "./explore.js";
import { ciText, fmt, pct } from "./format.js";
import { JudgeController } from "./judge.js";
import type {
  ClusterMember,
  Estimates,
  Overview,
  PairDetail,
  SliceGroup,
  VerdictValue,
} from "./types.js";

// ── DOM helpers ─────────────────────────────────────

type Attrs = Record<string, string | boolean | ((e: Event) => void) | null>;

function el(
  tag: string,
  attrs: Attrs = {},
  ...children: Array<string | Node | null | undefined>
): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (v == null || v === false) continue;
    if (k === "className" && typeof v === "string") node.className = v;
    else if (k.startsWith("on") && typeof v === "function")
      node.addEventListener(k.slice(2).toLowerCase(), v as EventListener);
    else if (v === true) node.setAttribute(k, "");
    else if (typeof v === "string") node.setAttribute(k, v);
  }
  for (const c of children) {
    if (typeof c === "string") node.appendChild(document.createTextNode(c));
    else if (c) node.appendChild(c);
  }
  return node;
}

function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

// ── App state ───────────────────────────────────────

const api = new ApiClient();
const judge = new JudgeController(api);
const explore = new ExploreController(api);

let page: "judge" | "explore" = "judge";
let overview: Overview | null = null;

// ── Overview strip ──────────────────────────────────

function renderOverview(): HTMLElement {
  if (!overview) return el("div", { className: "overview" }, "loading…");
  const cells: Array<[string, string]> = [
    ["JaccardDistance", fmt(overview.jaccard_distance)],
    ["SplitDistance", fmt(overview.split_distance)],
    ["MergeDistance", fmt(overview.merge_distance)],
    ["AffectedJaccardIndex", fmt(overview.affected_jaccard_index)],
    ["affected weight", pct(overview.affected_weight_fraction)],
    ["items", String(overview.items)],
    ["draws", String(overview.sample.total_draws)],
  ];
  return el(
    "div",
    { className: "overview" },
    ...cells.map(([label, value]) =>
      el("div", { className: "stat" },
        el("span", { className: "stat-value" }, value),
        el("span", { className: "stat-label" }, label)),
    ),
  );
}

// ── Judge view ──────────────────────────────────────

const VERDICTS: Array<[VerdictValue, string, string]> = [
  ["equivalent", "Equivalent", "verdict-eq"],
  ["not_equivalent", "Not equivalent", "verdict-ne"],
  ["unknown", "Unknown", "verdict-unk"],
];

function memberChip(m: ClusterMember, vantage: string, other: string): HTMLElement {
  const cls =
    m.id === vantage ? "member vantage" :
    m.id === other ? `member other region-${m.region}` :
    `member region-${m.region}`;
  const attrs = Object.entries(m.attributes)
    .map(([k, v]) => `${k}=${v}`)
    .join(" ");
  return el("span", { className: cls, title: `weight ${fmt(m.weight)} ${attrs}` }, m.id);
}

function clusterColumn(title: string, members: ClusterMember[], total: number,
                       detail: PairDetail): HTMLElement {
  const extra = total > members.length
    ? el("span", { className: "member more" }, `… +${total - members.length} more`)
    : null;
  return el(
    "div",
    { className: "cluster-col" },
    el("h4", {}, `${title} (${total})`),
    el("div", { className: "members" },
      ...members.map((m) => memberChip(m, detail.i, detail.j)), extra),
  );
}

function renderTaskCard(): HTMLElement {
  const s = judge.state;
  if (s.done) {
    return el(
      "div",
      { className: "card done" },
      el("h3", {}, "All pairs judged"),
      el("p", {}, "Every sampled pair has a verdict. The estimates below are final for this sample."),
      el("button", { onClick: () => switchPage("explore") }, "Explore the slices"),
    );
  }
  const task = s.task;
  const detail = s.detail;
  if (!task || !detail) return el("div", { className: "card" }, "loading task…");
  return el(
    "div",
    { className: "card task" },
    el("div", { className: "task-head" },
      el("span", { className: `badge badge-${detail.class}` }, detail.class),
      el("span", {}, ` pair (${task.i}, ${task.j}) — drawn ${task.draw_count}× `),
      el("span", { className: "muted" },
        `w=${fmt(detail.w, 6)} stratum=${detail.stratum}`)),
    el("p", { className: "question" },
      "Are these two items truly the same thing — would an ideal clustering put ",
      el("b", {}, task.i), " and ", el("b", {}, task.j), " together?"),
    el("div", { className: "clusters" },
      clusterColumn(`Base(${detail.i})`, detail.base_cluster,
                    detail.base_cluster_size, detail),
      clusterColumn(`Exp(${detail.i})`, detail.exp_cluster,
                    detail.exp_cluster_size, detail)),
    el("div", { className: "legend" },
      el("span", { className: "member region-both" }, "in both clusters"),
      el("span", { className: "member region-base_only" }, "base only (split)"),
      el("span", { className: "member region-exp_only" }, "exp only (merge)")),
    el("div", { className: "verdicts" },
      ...VERDICTS.map(([value, label, cls]) =>
        el("button", {
          className: cls,
          disabled: s.busy,
          onClick: () => void judge.submit(value),
        }, label))),
  );
}

function renderProgress(): HTMLElement {
  const p = judge.state.progress;
  if (!p) return el("div", { className: "progress" });
  const ratio = p.tasks_total ? p.tasks_answered / p.tasks_total : 1;
  const perClass = Object.entries(p.per_class)
    .map(([cls, c]) => `${cls} ${c.answered}/${c.total}`)
    .join(" · ");
  return el(
    "div",
    { className: "progress" },
    el("div", { className: "bar" },
      el("div", { className: "bar-fill", style: `width:${100 * ratio}%` } as Attrs)),
    el("span", {}, `${p.tasks_answered}/${p.tasks_total} answered (${perClass})`),
  );
}

function renderEstimates(est: Estimates | null): HTMLElement {
  if (!est) return el("div", { className: "card" }, "estimates load after the first verdict…");
  const headline = new Set([
    "good_split_distance", "bad_split_distance", "good_merge_distance",
    "bad_merge_distance", "good_distance", "bad_distance",
    "affected_good_index", "affected_bad_index", "delta_precision",
  ]);
  const rows = est.reports.filter((r) => headline.has(r.metric));
  const reweights = Object.entries(est.class_reweights)
    .map(([cls, v]) => `${cls}: ${v === null ? "–" : fmt(v, 3)}`)
    .join("  ");
  return el(
    "div",
    { className: "card estimates" },
    el("h3", {}, `Quality estimates (${est.n_verdicts} verdicts)`),
    el("table", {},
      el("thead", {}, el("tr", {},
        el("th", {}, "metric"), el("th", {}, "point"), el("th", {}, "std err"),
        el("th", {}, "95% CI"), el("th", {}, "usable/draws"))),
      el("tbody", {},
        ...rows.map((r) =>
          el("tr", { className: r.point === null ? "no-estimate" : "" },
            el("td", {}, r.metric),
            el("td", { "data-metric": r.metric }, fmt(r.point)),
            el("td", {}, fmt(r.std_err)),
            el("td", {}, ciText(r.ci_low, r.ci_high)),
            el("td", {}, `${r.n_usable}/${r.n_draws}`))))),
    el("p", { className: "muted", id: "reweights" }, `class reweights — ${reweights}`),
    est.conflicts.length
      ? el("p", { className: "error" },
          `⚠ ${est.conflicts.length} conflicting verdict pair(s) excluded`)
      : null,
  );
}

function renderJudge(root: HTMLElement): void {
  const s = judge.state;
  clear(root).append(
    renderProgress(),
    s.error ? el("div", { className: "error" }, s.error) : el("span", {}),
    s.pendingRetries
      ? el("div", { className: "warn" },
          `${s.pendingRetries} verdict(s) queued for retry `,
          el("button", { onClick: () => void judge.retry() }, "retry now"))
      : el("span", {}),
    renderTaskCard(),
    renderEstimates(s.estimates),
  );
}

// ── Explore view ────────────────────────────────────

function renderExplore(root: HTMLElement): void {
  const s = explore.state;
  const result = s.result;

  const crumbs = el(
    "div",
    { className: "crumbs" },
    el("a", { href: "#", onClick: (e) => { e.preventDefault(); void explore.restore(0); } },
      "all pairs"),
    ...s.crumbs.map((crumb, depth) =>
      el("span", {}, " › ",
        el("a", {
          href: "#",
          onClick: (e) => { e.preventDefault(); void explore.restore(depth); },
        }, crumb.label))),
    s.crumbs.length
      ? el("span", { className: "muted" },
          s.parentContribution !== null
            ? `  (parent contribution ${fmt(s.parentContribution)})`
            : "")
      : el("span", {}),
  );

  const chips = el(
    "div",
    { className: "chips" },
    ...s.filters.map((f, n) =>
      el("span", { className: "chip" },
        `${f.key} ${f.op === "eq" ? "=" : "≠"} ${f.value} `,
        el("button", { onClick: () => void explore.removeFilter(n) }, "×"))),
  );

  const keys = explore.attributeKeys();
  const keySelect = el("select", { id: "filter-key" },
    ...keys.map((k) => el("option", { value: k }, k))) as HTMLSelectElement;
  const opSelect = el("select", { id: "filter-op" },
    el("option", { value: "eq" }, "="),
    el("option", { value: "ne" }, "≠")) as HTMLSelectElement;
  const valueInput = el("input", { id: "filter-value", placeholder: "value" }) as HTMLInputElement;
  const addBtn = el("button", {
    onClick: () => {
      if (keySelect.value && valueInput.value !== "") {
        void explore.addFilter({
          key: keySelect.value,
          op: opSelect.value as "eq" | "ne",
          value: valueInput.value,
        });
      }
    },
  }, "add filter");

  const groupSelect = el("select", { id: "group-by",
    onChange: (e) => void explore.setGroupBy((e.target as HTMLSelectElement).value || null) },
    el("option", { value: "" }, "(no grouping)"),
    ...keys.map((k) =>
      el("option", { value: k, selected: s.groupBy === k }, k))) as HTMLSelectElement;

  const grouped = s.groupBy !== null;
  const table = el(
    "table",
    { className: "slice-table" },
    el("thead", {}, el("tr", {},
      el("th", {}, grouped ? s.groupBy : "slice"),
      el("th", {}, "draws"),
      el("th", {}, "JD contribution"),
      el("th", {}, "split"),
      el("th", {}, "merge"),
      el("th", {}, "share"))),
    el("tbody", {},
      ...(result?.groups ?? []).map((g: SliceGroup) =>
        el("tr", {
          className: grouped && g.group !== "(other)" ? "drillable" : "",
          onClick: grouped ? () => void explore.drillInto(g) : null,
        },
          el("td", {}, g.group),
          el("td", {}, String(g.draws)),
          el("td", { "data-contribution": g.group }, fmt(g.contribution, 6)),
          el("td", {}, fmt(g.split_contribution, 6)),
          el("td", {}, fmt(g.merge_contribution, 6)),
          el("td", {}, pct(g.share))))),
    el("tfoot", {}, el("tr", {},
      el("td", {}, "total"),
      el("td", {}, String(result?.total_draws ?? 0)),
      el("td", { id: "slice-total" }, fmt(result?.total_contribution ?? null, 6)),
      el("td", {}, ""), el("td", {}, ""), el("td", {}, ""))),
  );

  clear(root).append(
    crumbs,
    el("div", { className: "controls" },
      chips, keySelect, opSelect, valueInput, addBtn,
      el("label", {}, " group by "), groupSelect),
    s.error ? el("div", { className: "error" }, s.error) : el("span", {}),
    el("p", { className: "muted" },
      "Contributions are drawCount/N × stratum total: the root view totals the ",
      "sampled population's JaccardDistance-scale weight; groups are additive."),
    table,
  );
}

// ── Shell ───────────────────────────────────────────

function switchPage(next: "judge" | "explore"): void {
  page = next;
  render();
  if (next === "explore" && !explore.state.result) void explore.run();
}

function render(): void {
  const root = document.getElementById("app");
  if (!root) return;
  clear(root).append(
    el("header", {},
      el("h1", {}, "clusterdiff"),
      renderOverview(),
      el("nav", {},
        el("button", {
          className: page === "judge" ? "active" : "",
          onClick: () => switchPage("judge"),
        }, "Judge pairs"),
        el("button", {
          className: page === "explore" ? "active" : "",
          onClick: () => switchPage("explore"),
        }, "Explore slices"))),
    el("main", { id: "page" }),
  );
  const main = document.getElementById("page")!;
  if (page === "judge") renderJudge(main);
  else renderExplore(main);
}

export async function boot(): Promise<void> {
  judge.onChange(() => { if (page === "judge") render(); });
  explore.onChange(() => { if (page === "explore") render(); });
  overview = await api.overview().catch(() => null);
  render();
  await judge.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
