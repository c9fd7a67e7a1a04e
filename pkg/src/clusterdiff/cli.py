"""Batch entry points: one subcommand per pipeline stage.

Typical flow: impact -> sample -> tasks -> (judge-synthetic | explore) ->
estimate. simulate runs the Monte-Carlo calibration harness.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import ClusterDiffError
from .estimator import estimate_all, write_estimates
from .judgements import (
    export_tasks,
    ingest_verdicts,
    read_tasks,
    read_verdicts,
    synthetic_judge,
    task_payload,
    write_tasks,
    write_verdicts,
)
from .model import (
    affected_partition,
    dump_joined,
    load_clustering_files,
    load_joined_file,
    write_jsonl,
)
from .oracle import GeneratorParams, TruthTable, generate_instance
from .pairs import enumerate_pairs, pair_totals, write_pairs
from .pointwise import impact_report_rows
from .sampling import (
    SamplePlan,
    SingleStratum,
    TwoStrata,
    exhaustive_sample,
    sample,
    sample_meta,
    write_sample,
)
from .session import SessionDirectory
from .simulate import run_calibration


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(1)
    except ClusterDiffError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@click.group()
def cli():
    """Quantify and judge the diff between two clusterings."""


def _session(path: str) -> SessionDirectory:
    return SessionDirectory(Path(path))


@cli.command()
@click.option("--base", type=click.Path(exists=True), help="base clustering records")
@click.option("--exp", type=click.Path(exists=True), help="exp clustering records")
@click.option("--joined", type=click.Path(exists=True),
              help="joined single-file form instead of --base/--exp")
@click.option("--session", "session_dir", required=True, type=click.Path())
def impact(base, exp, joined, session_dir):
    """Load the clusterings and write exact impact reports and pair totals."""
    if joined:
        cp = load_joined_file(joined)
    elif base and exp:
        cp = load_clustering_files(base, exp)
    else:
        raise click.UsageError("provide --joined or both --base and --exp")
    session = _session(session_dir)
    session.ensure_root()
    dump_joined(cp, session.clustering_file)
    partition = affected_partition(cp)
    write_jsonl(session.impact_report_file, impact_report_rows(cp, partition))
    totals = pair_totals(cp, partition)
    session.update_config(pair_totals={
        "split_total": totals.split_total,
        "merge_total": totals.merge_total,
        "stable_total": totals.stable_total,
        "delta_precision_multiplier": totals.delta_precision_multiplier,
    })
    click.echo(f"impact report: {session.impact_report_file}")
    click.echo(f"jaccard_distance={totals.split_total + totals.merge_total:.6g} "
               f"split={totals.split_total:.6g} merge={totals.merge_total:.6g} "
               f"affected_jaccard_index={totals.stable_total:.6g}")


@cli.command()
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--cap", default=100_000_000, show_default=True,
              help="warn when the pair population exceeds this count")
def pairs(session_dir, cap):
    """Export the full pair population with weights and labels."""
    session = _session(session_dir)
    cp = session.load_clustering()
    partition = affected_partition(cp)
    n = write_pairs(cp, enumerate_pairs(cp, partition, cap=cap), session.pairs_file)
    click.echo(f"wrote {n} pairs to {session.pairs_file}")


@cli.command(name="sample")
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--draws", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--strata", type=click.Choice(["single", "diff-stable"]),
              default="single", show_default=True)
@click.option("--diff-fraction", default=0.5, show_default=True,
              help="share of draws for the diff stratum under diff-stable")
@click.option("--weight-floor", default=0.0, show_default=True)
@click.option("--exhaustive", is_flag=True,
              help="take every pair once with its own weight (small instances; "
                   "estimates become exact)")
def sample_cmd(session_dir, draws, seed, strata, diff_fraction, weight_floor,
               exhaustive):
    """Draw a seeded weighted sample of pairs with replacement."""
    session = _session(session_dir)
    cp = session.load_clustering()
    partition = affected_partition(cp)
    if exhaustive:
        sample_set = exhaustive_sample(enumerate_pairs(cp, partition))
    else:
        if draws is None or seed is None:
            raise click.UsageError("provide --draws and --seed (or --exhaustive)")
        if strata == "diff-stable":
            diff_draws = int(round(draws * diff_fraction))
            plan_strata: SingleStratum | TwoStrata = TwoStrata(diff_draws,
                                                               draws - diff_draws)
        else:
            plan_strata = SingleStratum()
        plan = SamplePlan(draws, seed, plan_strata, weight_floor)
        sample_set = sample(enumerate_pairs(cp, partition), plan)
    write_sample(sample_set, session.sample_file)
    session.update_config(sample=sample_meta(sample_set))
    if sample_set.total_draws == 0:
        click.echo("warning: --draws 0 produced an empty sample", err=True)
    click.echo(f"wrote {len(sample_set.draws)} distinct pairs "
               f"({sample_set.total_draws} draws) to {session.sample_file}")


@cli.command()
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
def tasks(session_dir):
    """Export judgement tasks for the sampled non-self pairs."""
    session = _session(session_dir)
    sample_set = session.load_sample()
    cp = session.load_clustering()
    payloads = {(d.pair.i, d.pair.j): task_payload(cp, d.pair)
                for d in sample_set.draws if not d.pair.is_self}
    task_list = export_tasks(sample_set, payloads)
    write_tasks(task_list, session.tasks_file)
    click.echo(f"wrote {len(task_list)} tasks to {session.tasks_file}")


@cli.command(name="judge-synthetic")
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True))
@click.option("--unanswerable-rate", default=0.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
def judge_synthetic(session_dir, truth_path, unanswerable_rate, seed):
    """Answer the task file from a ground-truth table (test stand-in for raters)."""
    session = _session(session_dir)
    session.require(session.tasks_file, "clusterdiff tasks")
    truth = TruthTable.read(truth_path)
    records = synthetic_judge(read_tasks(session.tasks_file), truth,
                              unanswerable_rate, seed)
    n = write_verdicts(records, session.verdicts_file)
    click.echo(f"wrote {n} verdicts to {session.verdicts_file}")


@cli.command()
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--confidence", default=0.95, show_default=True)
def estimate(session_dir, confidence):
    """Estimate the quality metrics from the sample and its verdicts."""
    session = _session(session_dir)
    sample_set = session.load_sample()
    totals = session.load_totals()
    session.require(session.verdicts_file, "clusterdiff judge-synthetic (or explore)")
    js = ingest_verdicts(sample_set, read_verdicts(session.verdicts_file))
    cp = session.load_clustering()
    partition = affected_partition(cp)
    reports = estimate_all(js, totals,
                           partition.affected_weight / cp.total_weight, confidence)
    write_estimates(reports, session.estimates_file)
    for rep in reports:
        click.echo(f"{rep.metric}: {rep.point:.6g} ± {rep.std_err:.3g}"
                   if rep.notes[:11] != "no estimate" else f"{rep.metric}: no estimate")
    if js.conflicts:
        click.echo(f"warning: {len(js.conflicts)} conflicting verdict pair(s) excluded",
                   err=True)
    click.echo(f"wrote {len(reports)} estimates to {session.estimates_file}")


@cli.command()
@click.option("--session-dir", "--session", "session_dir", required=True,
              type=click.Path(exists=True))
@click.option("--bind", default="127.0.0.1:8321", show_default=True)
@click.option("--lease-seconds", default=300.0, show_default=True)
def explore(session_dir, bind, lease_seconds):
    """Serve the exploration and judging API (and the web UI if built)."""
    from .service import serve

    host, _, port = bind.partition(":")
    serve(_session(session_dir), host or "127.0.0.1", int(port or 8321), lease_seconds)


@cli.command()
@click.option("--items", default=10_000, show_default=True)
@click.option("--reps", default=1000, show_default=True)
@click.option("--draws", default=500, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--unanswerable-rate", default=0.0, show_default=True)
@click.option("--mean-class-size", default=8.0, show_default=True)
@click.option("--weight-dist", type=click.Choice(["unit", "uniform", "lognormal"]),
              default="uniform", show_default=True)
@click.option("--good-split-rate", default=0.5, show_default=True)
@click.option("--bad-split-rate", default=0.15, show_default=True)
@click.option("--good-merge-rate", default=0.5, show_default=True)
@click.option("--bad-merge-rate", default=0.15, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="write the calibration report JSON here")
def simulate(items, reps, draws, seed, unanswerable_rate, mean_class_size,
             weight_dist, good_split_rate, bad_split_rate, good_merge_rate,
             bad_merge_rate, out):
    """Check estimator bias and CI coverage on a synthetic instance."""
    params = GeneratorParams(
        n_items=items, mean_class_size=mean_class_size, weight_dist=weight_dist,
        good_split_rate=good_split_rate, bad_split_rate=bad_split_rate,
        good_merge_rate=good_merge_rate, bad_merge_rate=bad_merge_rate)
    instance = generate_instance(params, seed)
    report = run_calibration(instance, reps, draws, seed,
                             unanswerable_rate=unanswerable_rate)
    payload = report.to_dict()
    if report.degenerate:
        click.echo("degenerate instance: no affected pairs, quality metrics are "
                   "exactly zero/undefined", err=True)
    for name, m in payload["metrics"].items():
        cov = m["coverage"]
        cov_str = f"{cov:.3f}" if isinstance(cov, float) else cov
        click.echo(f"{name}: oracle={m['oracle_value']:.6g} "
                   f"mean={m['empirical_mean']:.6g} bias_sigmas={m['bias_sigmas']:.2f} "
                   f"coverage={cov_str}")
    if out:
        Path(out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
        click.echo(f"wrote calibration report to {out}")


if __name__ == "__main__":
    main()
