"""Command-line front end: batch and sweep execution, provenance-complete
persistence, invariant checks, and plot-ready exports.

Artifact layout for one batch (cmd `run`):
    out/config.json                    resolved config + digest + tool version
    out/runs/<strategy>/run_<i>.jsonl  one release record per line
    out/summary.json                   distribution stats + convergence + run meta
    out/findings.json                  traffic-light invariant findings
"""

from __future__ import annotations

import itertools
import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .domain import Distribution, ScenarioConfig, config_digest, validate_config
from .invariants import Status, check_batch, check_runs
from .montecarlo import BatchResult, run_batch
from .report import FIGURES, export_figure
from .strategies import STRATEGY_NAMES

DEFAULT_SWEEP_DIMENSIONS = {
    "distribution": ["pareto", "uniform"],
    "workload_executions": [1, 2, 4],
    "multi_type_share": [0.0, 0.25, 0.5, 0.75, 1.0],
    "cardinality_n": [1, 10, 25],
}


def _default_out_root() -> Path:
    return Path(os.environ.get("MIGSIM_OUT", "migsim-out"))


def _parse_scalar(text: str):
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config_file(path: Path) -> dict:
    """Flat key=value text (one pair per line, '#' comments) or JSON."""
    raw = path.read_text(encoding="utf-8")
    stripped = raw.lstrip()
    if path.suffix == ".json" or stripped.startswith("{"):
        data = json.loads(raw)
        if not isinstance(data, dict):
            raise ValueError("JSON config must be an object")
        return data
    out: dict = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip().split(".")[-1]  # dotted prefixes are namespacing only
        if key == "incremental_schedule" and not value.strip().startswith("["):
            out[key] = [int(x) for x in value.split(",") if x.strip()]
        else:
            out[key] = _parse_scalar(value)
    return out


def resolve_config(config_file: Path | None, overrides: dict) -> ScenarioConfig:
    data = load_config_file(config_file) if config_file else {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig.from_dict(data)


def _json_dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _config_record(config: ScenarioConfig) -> dict:
    record = config.to_dict()
    record["runs"] = config.effective_runs()
    record["config_digest"] = config_digest(config)
    record["tool_version"] = __version__
    return record


def write_batch_artifacts(out_dir: Path, batch: BatchResult, findings) -> None:
    _json_dump(out_dir / "config.json", _config_record(batch.config))
    runs_meta: dict = {}
    for strategy, ordered in batch.raw_runs.items():
        strategy_dir = out_dir / "runs" / strategy
        strategy_dir.mkdir(parents=True, exist_ok=True)
        runs_meta[strategy] = []
        for run in ordered:
            lines = [json.dumps(rec.to_dict(), sort_keys=True) for rec in run.releases]
            (strategy_dir / f"run_{run.run_index}.jsonl").write_text(
                "\n".join(lines) + "\n", encoding="utf-8"
            )
            runs_meta[strategy].append(
                {
                    "run_index": run.run_index,
                    "seed": run.seed,
                    "conforms": run.conforms,
                    "final_population": run.final_population,
                }
            )
    summary = batch.to_dict()
    summary["runs_meta"] = runs_meta
    summary["tool_version"] = __version__
    _json_dump(out_dir / "summary.json", summary)
    _json_dump(out_dir / "findings.json", [f.to_dict() for f in findings])


def _exit_code(findings) -> int:
    return 2 if any(f.status is Status.RED for f in findings) else 0


def _echo_findings(findings) -> None:
    marks = {Status.GREEN: "PASS ", Status.YELLOW: "WARN ", Status.RED: "FAIL "}
    for f in findings:
        click.echo(f"{marks[f.status]}{f.invariant_id} [{f.kind.value}] {f.message}")


def _execute_batch(config: ScenarioConfig, runs: int, parallelism: int) -> tuple[BatchResult, list]:
    batch = run_batch(config, STRATEGY_NAMES, runs=runs, processes=parallelism)
    findings = check_batch(batch)
    return batch, findings


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Monte Carlo simulator for NoSQL schema-migration strategies."""


_set_option = click.option(
    "--set",
    "sets",
    multiple=True,
    metavar="KEY=VALUE",
    help="Override a config field (repeatable).",
)


def _collect_overrides(sets, **named) -> dict:
    overrides = dict(named)
    for item in sets:
        if "=" not in item:
            raise click.BadParameter(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = _parse_scalar(value)
    return overrides


def _validated(config: ScenarioConfig, strict_grid: bool = False) -> ScenarioConfig:
    violations = validate_config(config, strict_grid=strict_grid)
    if violations:
        for v in violations:
            click.echo(f"invalid config: {v}", err=True)
        sys.exit(1)
    return config


@main.command("run")
@click.argument("config_file", required=False, type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output directory.")
@click.option("--runs", type=int, default=None)
@click.option("--releases", type=int, default=None)
@click.option("--seed", "master_seed", type=int, default=None)
@click.option("--parallelism", type=int, default=os.cpu_count() or 1, show_default=True)
@_set_option
def cmd_run(config_file, out, runs, releases, master_seed, parallelism, sets):
    """Run one batch (all four strategies) and persist the artifacts."""
    try:
        overrides = _collect_overrides(sets, runs=runs, releases=releases, master_seed=master_seed)
        config = _validated(resolve_config(config_file, overrides))
        out_dir = out if out is not None else _default_out_root() / config_digest(config)
        out_dir.mkdir(parents=True, exist_ok=True)
        batch, findings = _execute_batch(config, config.effective_runs(), parallelism)
        write_batch_artifacts(out_dir, batch, findings)
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _echo_findings(findings)
    click.echo(f"artifacts written to {out_dir}")
    sys.exit(_exit_code(findings))


def sweep_configs(base: ScenarioConfig, dimensions: dict) -> list[ScenarioConfig]:
    names = list(dimensions)
    configs = []
    for combo in itertools.product(*(dimensions[n] for n in names)):
        values = dict(zip(names, combo))
        if "distribution" in values:
            values["distribution"] = Distribution(str(values["distribution"]).lower())
        configs.append(base.with_values(runs=None, **values))
    return configs


def _final_means(summary: dict, strategy: str) -> tuple[float, float]:
    cost = summary["stats"][strategy]["cumulated_cost"][-1]["mean"]
    latency = summary["stats"][strategy]["mean_latency"][-1]["mean"]
    return cost, latency


def build_factor_table(base: ScenarioConfig, dimensions: dict, summaries: dict[str, dict]) -> dict:
    """Cross-configuration factors relative to the all-defaults column.

    For each varied dimension value v != default, the entry reports per
    strategy the factor rel(default)/rel(v) for cumulated cost and mean
    latency after the final release, where rel() normalizes a strategy's
    metric by the eager strategy's under the same configuration.
    """
    defaults = {
        "distribution": base.distribution.value,
        "workload_executions": base.workload_executions,
        "multi_type_share": base.multi_type_share,
        "cardinality_n": base.cardinality_n,
    }

    def digest_for(**values) -> str:
        cfg_values = dict(values)
        if "distribution" in cfg_values:
            cfg_values["distribution"] = Distribution(str(cfg_values["distribution"]).lower())
        return config_digest(base.with_values(runs=None, **cfg_values))

    default_digest = digest_for()
    if default_digest not in summaries:
        return {"reference": defaults, "entries": [], "note": "default cell missing from sweep"}

    def rels(digest: str) -> dict[str, tuple[float, float]]:
        summary = summaries[digest]
        eager_cost, eager_lat = _final_means(summary, "eager")
        out = {}
        for strategy in summary["stats"]:
            cost, lat = _final_means(summary, strategy)
            out[strategy] = (
                cost / eager_cost if eager_cost else float("nan"),
                lat / eager_lat if eager_lat else float("nan"),
            )
        return out

    default_rels = rels(default_digest)
    entries = []
    for dim, values in dimensions.items():
        if dim not in defaults:
            continue
        for value in values:
            normalized = value.lower() if isinstance(value, str) else value
            if normalized == defaults[dim]:
                continue
            digest = digest_for(**{dim: value})
            if digest not in summaries:
                continue
            variant_rels = rels(digest)
            for strategy, (v_cost, v_lat) in variant_rels.items():
                d_cost, d_lat = default_rels[strategy]
                entries.append(
                    {
                        "dimension": dim,
                        "from": normalized,
                        "to": defaults[dim],
                        "strategy": strategy,
                        "cost_factor": d_cost / v_cost if v_cost else float("nan"),
                        "latency_factor": d_lat / v_lat if v_lat else float("nan"),
                    }
                )
    return {"reference": defaults, "entries": entries}


@main.command("sweep")
@click.argument("sweep_file", required=False, type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.option("--parallelism", type=int, default=os.cpu_count() or 1, show_default=True)
@_set_option
def cmd_sweep(sweep_file, out, parallelism, sets):
    """Run every configuration of a sweep grid (defaults to the standard
    2x3x5x3 = 90-cell grid) and write the cross-configuration factor table."""
    try:
        grid = json.loads(sweep_file.read_text(encoding="utf-8")) if sweep_file else {}
        base_data = dict(grid.get("base", {}))
        base_data.update(_collect_overrides(sets))
        base = ScenarioConfig.from_dict(base_data)
        dimensions = grid.get("dimensions", DEFAULT_SWEEP_DIMENSIONS)
        configs = sweep_configs(base, dimensions)
        out_dir = out if out is not None else _default_out_root() / "sweep"
        out_dir.mkdir(parents=True, exist_ok=True)
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)

    index = []
    summaries: dict[str, dict] = {}
    failed = False
    for i, config in enumerate(configs, start=1):
        digest = config_digest(config)
        cell_dir = out_dir / digest
        violations = validate_config(config)
        if violations:
            index.append({"config_digest": digest, "status": "invalid", "errors": [str(v) for v in violations]})
            failed = True
            continue
        try:
            batch, findings = _execute_batch(config, config.effective_runs(), parallelism)
            write_batch_artifacts(cell_dir, batch, findings)
        except Exception as exc:  # record per-cell failures, keep sweeping
            index.append({"config_digest": digest, "status": "failed", "error": str(exc)})
            failed = True
            continue
        summaries[digest] = batch.to_dict()
        index.append(
            {
                "config_digest": digest,
                "status": "ok",
                "runs": batch.runs,
                "red_findings": sum(1 for f in findings if f.status is Status.RED),
            }
        )
        click.echo(f"[{i}/{len(configs)}] {digest} done")

    table = build_factor_table(base, dimensions, summaries)
    _json_dump(out_dir / "sweep.json", {"base": _config_record(base), "dimensions": dimensions, "configs": index})
    _json_dump(out_dir / "factor_table.json", table)
    with (out_dir / "factor_table.csv").open("w", encoding="utf-8", newline="") as fh:
        fh.write("dimension,from,to,strategy,cost_factor,latency_factor\n")
        for e in table["entries"]:
            fh.write(
                f"{e['dimension']},{e['from']},{e['to']},{e['strategy']},"
                f"{e['cost_factor']},{e['latency_factor']}\n"
            )
    sys.exit(2 if failed else 0)


@main.command("export")
@click.argument("out_dir", type=click.Path(exists=True, path_type=Path))
@click.option("--figure", type=click.Choice(FIGURES + ("all",)), default="all", show_default=True)
def cmd_export(out_dir, figure):
    """Project persisted batch artifacts into CSV files and figures."""
    summary_path = out_dir / "summary.json"
    if not summary_path.exists():
        click.echo(f"error: no summary.json under {out_dir}", err=True)
        sys.exit(1)
    summary = json.loads(summary_path.read_text(encoding="utf-8"))
    export_dir = out_dir / "export"
    figures = FIGURES if figure == "all" else (figure,)
    for fig in figures:
        for path in export_figure(summary, fig, export_dir):
            click.echo(str(path))


def load_runs_by_strategy(out_dir: Path) -> tuple[ScenarioConfig, dict[str, list[dict]]]:
    config_data = json.loads((out_dir / "config.json").read_text(encoding="utf-8"))
    config_data.pop("config_digest", None)
    config_data.pop("tool_version", None)
    config = ScenarioConfig.from_dict(config_data)
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    runs_by_strategy: dict[str, list[dict]] = {}
    for strategy, metas in summary.get("runs_meta", {}).items():
        runs_by_strategy[strategy] = []
        for meta in metas:
            run_path = out_dir / "runs" / strategy / f"run_{meta['run_index']}.jsonl"
            releases = [json.loads(line) for line in run_path.read_text(encoding="utf-8").splitlines()]
            runs_by_strategy[strategy].append(
                {
                    "strategy": strategy,
                    "run_index": meta["run_index"],
                    "seed": meta["seed"],
                    "conforms": meta["conforms"],
                    "releases": releases,
                }
            )
    return config, runs_by_strategy


@main.command("check")
@click.argument("out_dir", type=click.Path(exists=True, path_type=Path))
def cmd_check(out_dir):
    """Re-evaluate the invariant catalog on stored artifacts."""
    try:
        config, runs_by_strategy = load_runs_by_strategy(out_dir)
    except (OSError, ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    findings = check_runs(config, runs_by_strategy)
    _json_dump(out_dir / "findings.json", [f.to_dict() for f in findings])
    _echo_findings(findings)
    sys.exit(_exit_code(findings))


@main.command("validate")
@click.argument("config_file", required=False, type=click.Path(exists=True, path_type=Path))
@click.option("--strict-grid", is_flag=True, help="Require multi_type_share on the 25-point grid.")
@_set_option
def cmd_validate(config_file, strict_grid, sets):
    """Lint a configuration without running anything."""
    try:
        config = resolve_config(config_file, _collect_overrides(sets))
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    violations = validate_config(config, strict_grid=strict_grid)
    if violations:
        for v in violations:
            click.echo(str(v))
        sys.exit(1)
    click.echo(f"ok (digest {config_digest(config)})")


if __name__ == "__main__":
    main()
