import type { SliceGroup, SlicePredicate, SliceResult } from "./types.js";

/** The slice of the service API the explorer needs. */
export interface ExploreApi {
  slice(filters: SlicePredicate[], groupBy: string | null): Promise<SliceResult>;
}

export interface Crumb {
  label: string;
  filters: SlicePredicate[];
  groupBy: string | null;
  parentContribution: number | null;
}

export interface ExploreState {
  filters: SlicePredicate[];
  groupBy: string | null;
  result: SliceResult | null;
  parentContribution: number | null;
  crumbs: Crumb[];
  error: string | null;
}

/** Drives the slice table: a filter stack with group-by drill-down.
 *
 * Every number shown comes from the service's slice responses; the
 * controller only stacks predicates and replays queries.
 */
export class ExploreController {
  state: ExploreState = {
    filters: [],
    groupBy: null,
    result: null,
    parentContribution: null,
    crumbs: [],
    error: null,
  };

  private listeners: Array<(s: ExploreState) => void> = [];

  constructor(private api: ExploreApi) {}

  onChange(fn: (s: ExploreState) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  async run(): Promise<void> {
    try {
      this.state.result = await this.api.slice(this.state.filters, this.state.groupBy);
      this.state.error = null;
    } catch (err) {
      this.state.error = String(err);
    }
    this.emit();
  }

  async setGroupBy(key: string | null): Promise<void> {
    this.state.groupBy = key;
    await this.run();
  }

  async addFilter(pred: SlicePredicate): Promise<void> {
    this.state.filters = [...this.state.filters, pred];
    await this.run();
  }

  async removeFilter(index: number): Promise<void> {
    this.state.filters = this.state.filters.filter((_, n) => n !== index);
    await this.run();
  }

  /** Click-through on a group row: its group-by value becomes a filter. */
  async drillInto(group: SliceGroup): Promise<void> {
    const key = this.state.groupBy;
    if (!key || group.group === "(other)") return;
    this.state.crumbs = [
      ...this.state.crumbs,
      {
        label: `${key}=${group.group}`,
        filters: this.state.filters,
        groupBy: key,
        parentContribution: this.state.parentContribution,
      },
    ];
    this.state.parentContribution = group.contribution;
    this.state.filters = [...this.state.filters, { key, op: "eq", value: group.group }];
    this.state.groupBy = null;
    await this.run();
  }

  /** Breadcrumb click: restore the filter stack as it was at that depth. */
  async restore(depth: number): Promise<void> {
    const crumb = this.state.crumbs[depth];
    if (!crumb) return;
    this.state.crumbs = this.state.crumbs.slice(0, depth);
    this.state.filters = crumb.filters;
    this.state.groupBy = crumb.groupBy;
    this.state.parentContribution = crumb.parentContribution;
    await this.run();
  }

  attributeKeys(): string[] {
    return this.state.result?.attribute_keys ?? [];
  }
}
