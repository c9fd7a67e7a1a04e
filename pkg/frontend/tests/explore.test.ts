import { describe, expect, it } from "vitest";

import { ExploreController, type ExploreApi } from "../src/explore.js";
import type { SliceGroup, SlicePredicate, SliceResult } from "../src/types.js";

/** Serves slice queries from a fixed draw table, mimicking the service's
 * contribution arithmetic (count/N × stratum total). */
class FakeSlices implements ExploreApi {
  queries: Array<{ filters: SlicePredicate[]; groupBy: string | null }> = [];

  constructor(
    private draws: Array<{ attrs: Record<string, string>; count: number }>,
    private total: number,
  ) {}

  async slice(filters: SlicePredicate[], groupBy: string | null): Promise<SliceResult> {
    this.queries.push({ filters, groupBy });
    const n = this.draws.reduce((acc, d) => acc + d.count, 0);
    const match = (attrs: Record<string, string>) =>
      filters.every((f) =>
        f.op === "eq" ? attrs[f.key] === f.value : attrs[f.key] !== f.value);
    const groups = new Map<string, SliceGroup>();
    let totalContribution = 0;
    let totalDraws = 0;
    for (const d of this.draws) {
      if (!match(d.attrs)) continue;
      const share = (d.count / n) * this.total;
      totalContribution += share;
      totalDraws += d.count;
      const key = groupBy ? (d.attrs[groupBy] ?? "") : "(all)";
      const g = groups.get(key) ?? {
        group: key, draws: 0, contribution: 0,
        split_contribution: 0, merge_contribution: 0, share: 0,
      };
      g.draws += d.count;
      g.contribution += share;
      if (d.attrs["class"] === "split") g.split_contribution += share;
      if (d.attrs["class"] === "merge") g.merge_contribution += share;
      groups.set(key, g);
    }
    const ordered = [...groups.values()].sort((a, b) => b.contribution - a.contribution);
    for (const g of ordered) g.share = totalContribution ? g.contribution / totalContribution : 0;
    return {
      groups: ordered,
      total_contribution: totalContribution,
      total_draws: totalDraws,
      attribute_keys: ["class", "is_self", "i_kind"],
    };
  }
}

const DRAWS = [
  { attrs: { class: "split", is_self: "false", i_kind: "alpha" }, count: 3 },
  { attrs: { class: "split", is_self: "false", i_kind: "beta" }, count: 1 },
  { attrs: { class: "merge", is_self: "false", i_kind: "alpha" }, count: 2 },
  { attrs: { class: "stable", is_self: "true", i_kind: "beta" }, count: 4 },
];

function makeController() {
  const svc = new FakeSlices(DRAWS, 0.8);
  return { svc, ctl: new ExploreController(svc) };
}

describe("ExploreController", () => {
  it("trivial query totals come straight from the service", async () => {
    const { ctl } = makeController();
    await ctl.run();
    expect(ctl.state.result?.total_contribution).toBeCloseTo(0.8, 12);
    expect(ctl.state.result?.groups[0].group).toBe("(all)");
  });

  it("group contributions sum to the parent contribution", async () => {
    const { ctl } = makeController();
    await ctl.setGroupBy("class");
    const groups = ctl.state.result!.groups;
    const sum = groups.reduce((acc, g) => acc + g.contribution, 0);
    expect(sum).toBeCloseTo(ctl.state.result!.total_contribution, 12);
    const shareSum = groups.reduce((acc, g) => acc + g.share, 0);
    expect(shareSum).toBeCloseTo(1.0, 12);
  });

  it("drill-down appends the group predicate and records a breadcrumb", async () => {
    const { svc, ctl } = makeController();
    await ctl.setGroupBy("class");
    const splitGroup = ctl.state.result!.groups.find((g) => g.group === "split")!;
    await ctl.drillInto(splitGroup);
    expect(ctl.state.filters).toEqual([{ key: "class", op: "eq", value: "split" }]);
    expect(ctl.state.groupBy).toBeNull();
    expect(ctl.state.crumbs.map((c) => c.label)).toEqual(["class=split"]);
    expect(ctl.state.parentContribution).toBeCloseTo(splitGroup.contribution, 12);
    // the filtered total equals the clicked group's contribution
    expect(ctl.state.result!.total_contribution).toBeCloseTo(splitGroup.contribution, 12);
    expect(svc.queries.at(-1)?.filters).toHaveLength(1);
  });

  it("sub-grouping after a drill-down still sums to the parent row", async () => {
    const { ctl } = makeController();
    await ctl.setGroupBy("class");
    const splitGroup = ctl.state.result!.groups.find((g) => g.group === "split")!;
    await ctl.drillInto(splitGroup);
    await ctl.setGroupBy("i_kind");
    const sub = ctl.state.result!.groups;
    expect(sub.map((g) => g.group).sort()).toEqual(["alpha", "beta"]);
    const sum = sub.reduce((acc, g) => acc + g.contribution, 0);
    expect(sum).toBeCloseTo(ctl.state.parentContribution!, 12);
  });

  it("breadcrumbs restore the previous filter stack", async () => {
    const { ctl } = makeController();
    await ctl.setGroupBy("class");
    await ctl.drillInto(ctl.state.result!.groups.find((g) => g.group === "split")!);
    await ctl.setGroupBy("i_kind");
    await ctl.drillInto(ctl.state.result!.groups.find((g) => g.group === "alpha")!);
    expect(ctl.state.filters).toHaveLength(2);
    await ctl.restore(0);
    expect(ctl.state.filters).toHaveLength(0);
    expect(ctl.state.groupBy).toBe("class");
    expect(ctl.state.crumbs).toHaveLength(0);
    expect(ctl.state.parentContribution).toBeNull();
  });

  it("filters can be removed individually", async () => {
    const { ctl } = makeController();
    await ctl.addFilter({ key: "class", op: "ne", value: "stable" });
    await ctl.addFilter({ key: "i_kind", op: "eq", value: "alpha" });
    expect(ctl.state.result!.total_draws).toBe(5);
    await ctl.removeFilter(1);
    expect(ctl.state.filters).toEqual([{ key: "class", op: "ne", value: "stable" }]);
    expect(ctl.state.result!.total_draws).toBe(6);
  });
});
