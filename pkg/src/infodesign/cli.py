"""Command-line front end: capacity reports, region grids, best-reply curves,
utility surfaces, equilibrium solves, and coordination simulations.

Grids and curves go to CSV (header row, 9 significant digits); reports go to
JSON. Every run writes a side-car manifest <out>.manifest.json recording the
resolved parameters, input digests, seed, version, output digests, and wall
clock. Data outputs are byte-identical across reruns; the manifest is the one
file that is not (it carries the duration).
"""
from __future__ import annotations

import hashlib
import json
import math
import sys
import time

import click
import numpy as np

from . import __version__
from .channel import DMC, CapacityError, bsc, capacity
from .coding import (load_experiment, run_experiment, single_letter_utilities)
from .mac import build_scenario, default_config, scenario_surface
from .persuasion import (Block, OneShot, Scenario, Unconstrained,
                         grid_best_replies, load_scenario, solve_equilibrium)
from .prob import binary_entropy, marginal, mutual_information
from .splitting import RegionLabel, region_scan


def _fmt(x) -> str:
    """9-significant-digit cell formatting for CSV."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".9g")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def _digest(path: str) -> str:
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w") as f:
        json.dump(_jsonable(doc), f, indent=2, sort_keys=True)
        f.write("\n")


def _write_csv(path: str, header, rows) -> int:
    count = 0
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(c) for c in row) + "\n")
            count += 1
    return count


def _write_manifest(subcommand: str, parameters: dict, inputs: dict,
                    outputs, seed, started: float) -> str:
    first = outputs[0]
    manifest_path = first + ".manifest.json"
    doc = {
        "subcommand": subcommand,
        "parameters": parameters,
        "inputs": {p: _digest(p) for p in inputs},
        "seed": seed,
        "version": __version__,
        "duration_s": time.perf_counter() - started,
        "outputs": {p: _digest(p) for p in outputs},
    }
    _write_json(manifest_path, doc)
    return manifest_path


def _load_scenario_arg(spec: str):
    """Scenario path, or the literal 'mac' for the bundled case study."""
    if spec == "mac":
        return build_scenario(default_config()), []
    return load_scenario(spec), [spec]


@click.group()
@click.version_option(__version__)
def cli():
    """Equilibrium signaling and coordination-coding toolkit."""


@cli.command("capacity")
@click.option("--bsc", "bsc_eps", type=float, default=None,
              help="Binary symmetric channel with this flip probability.")
@click.option("--matrix", "matrix_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file with a row-stochastic matrix.")
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--max-iter", type=int, default=100_000, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="capacity.json",
              show_default=True)
def cmd_capacity(bsc_eps, matrix_file, tol, max_iter, out):
    """Channel capacity with the optimal input distribution."""
    started = time.perf_counter()
    if (bsc_eps is None) == (matrix_file is None):
        raise click.UsageError("pass exactly one of --bsc or --matrix")
    if bsc_eps is not None:
        ch = bsc(bsc_eps)
        spec = {"bsc": bsc_eps}
        inputs = []
    else:
        with open(matrix_file) as f:
            doc = json.load(f)
        rows = doc["matrix"] if isinstance(doc, dict) and "matrix" in doc else doc
        try:
            ch = DMC.from_rows(rows)
        except (ValueError, TypeError) as e:
            raise ValueError(f"channel matrix: {e}") from None
        spec = {"matrix_file": matrix_file}
        inputs = [matrix_file]
    res = capacity(ch, tol=tol, max_iter=max_iter)
    report = {"capacity": res.capacity,
              "optimal_input": res.optimal_input.probs,
              "iterations": res.iterations,
              "residual": res.residual,
              "channel": spec,
              "manifest": out + ".manifest.json"}
    _write_json(out, report)
    _write_manifest("capacity", {"channel": spec, "tol": tol,
                                 "max_iter": max_iter, "out": out},
                    inputs, [out], None, started)
    click.echo(json.dumps(_jsonable(report), sort_keys=True))


@cli.command("region")
@click.option("--p", type=float, required=True, help="Prior probability of state 1.")
@click.option("--eps", type=float, required=True, help="Channel flip probability.")
@click.option("--resolution", type=float, default=1.0 / 500, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="region.csv",
              show_default=True)
def cmd_region(p, eps, resolution, out):
    """Feasibility labels over the posterior square."""
    started = time.perf_counter()
    grid = region_scan(p, eps, resolution)
    names = {int(v): v.name for v in RegionLabel}
    p1s = [_fmt(v) for v in grid.p1_axis]
    p2s = [_fmt(v) for v in grid.p2_axis]

    def rows():
        for i, p1 in enumerate(p1s):
            row = grid.labels[i]
            for j, p2 in enumerate(p2s):
                yield (p1, p2, names[int(row[j])])

    count = _write_csv(out, ("p1", "p2", "label"), rows())
    _write_manifest("region", {"p": p, "eps": eps, "resolution": resolution,
                               "out": out, "capacity": grid.capacity},
                    [], [out], None, started)
    click.echo(f"wrote {out}: {count} cells")


@cli.command("bestreply")
@click.option("--scenario", required=True,
              help="Scenario JSON path, or 'mac' for the bundled case study.")
@click.option("--step", type=float, default=1e-3, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="bestreply.csv",
              show_default=True)
def cmd_bestreply(scenario, step, out):
    """Receiver best reply and value swept over the prior."""
    started = time.perf_counter()
    sc, inputs = _load_scenario_arg(scenario)
    if not 0.0 < step < 1.0:
        raise ValueError(f"step {step!r} outside (0, 1)")
    grid = np.linspace(0.0, 1.0, round(1.0 / step) + 1)
    sel, _, v2 = grid_best_replies(sc, grid)
    labels = [sc.actions[int(k)] for k in sel]
    count = _write_csv(out, ("p", "v_star", "receiver_value"),
                       zip(grid, labels, v2))
    _write_manifest("bestreply", {"scenario": scenario, "step": step, "out": out},
                    inputs, [out], None, started)
    click.echo(f"wrote {out}: {count} grid points")


@cli.command("surface")
@click.option("--scenario", required=True,
              help="Scenario JSON path, or 'mac' for the bundled case study.")
@click.option("--mode", type=click.Choice(["unconstrained", "one_shot", "block"]),
              default="unconstrained", show_default=True)
@click.option("--eps", type=float, default=None,
              help="Channel flip probability (required for one_shot/block).")
@click.option("--resolution", type=float, default=1.0 / 500, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="surface.csv",
              show_default=True)
def cmd_surface(scenario, mode, eps, resolution, out):
    """Split values over the posterior square, labeled by feasibility."""
    started = time.perf_counter()
    sc, inputs = _load_scenario_arg(scenario)
    if mode != "unconstrained" and eps is None:
        raise click.UsageError(f"--mode {mode} requires --eps")
    surf = scenario_surface(sc, resolution, eps if mode != "unconstrained" else None)
    names = {int(v): v.name for v in RegionLabel}
    p1s = [_fmt(v) for v in surf.p1_axis]
    p2s = [_fmt(v) for v in surf.p2_axis]

    def rows():
        for i, p1 in enumerate(p1s):
            f1 = surf.phi1[i]
            f2 = surf.phi2[i]
            lab = surf.labels[i]
            for j, p2 in enumerate(p2s):
                yield (p1, p2, f1[j], f2[j], names[int(lab[j])])

    count = _write_csv(out, ("p1", "p2", "phi1", "phi2", "label"), rows())
    _write_manifest("surface", {"scenario": scenario, "mode": mode, "eps": eps,
                                "resolution": resolution, "out": out},
                    inputs, [out], None, started)
    click.echo(f"wrote {out}: {count} cells")


def _parse_mode(mode: str, eps, cap):
    if mode == "unconstrained":
        return Unconstrained()
    if mode == "one_shot":
        if eps is None:
            raise click.UsageError("--mode one_shot requires --eps")
        return OneShot(eps)
    if cap is None:
        if eps is None:
            raise click.UsageError("--mode block requires --eps or --cap")
        cap = 1.0 - binary_entropy(eps)
    return Block(cap)


@cli.command("solve")
@click.option("--scenario", required=True,
              help="Scenario JSON path, or 'mac' for the bundled case study.")
@click.option("--mode", type=click.Choice(["unconstrained", "one_shot", "block"]),
              required=True)
@click.option("--eps", type=float, default=None,
              help="Channel flip probability for one_shot/block feasibility.")
@click.option("--cap", type=float, default=None,
              help="Capacity in bits for block mode (overrides --eps).")
@click.option("--resolution", type=float, default=1e-3, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="solve.json",
              show_default=True)
def cmd_solve(scenario, mode, eps, cap, resolution, out):
    """Sender-optimal split under the chosen feasibility mode."""
    started = time.perf_counter()
    sc, inputs = _load_scenario_arg(scenario)
    mode_obj = _parse_mode(mode, eps, cap)
    res = solve_equilibrium(sc, mode_obj, resolution)
    report = {
        "mode": mode,
        "parameters": {"eps": eps, "cap": getattr(mode_obj, "capacity", None),
                       "resolution": resolution},
        "phi1_star": res.phi1_star,
        "phi2_star": res.phi2_star,
        "posteriors": {"p1": res.posteriors.p1, "p2": res.posteriors.p2},
        "signal": {"alpha": res.signal.alpha, "beta": res.signal.beta},
        "message_weights": res.message_weights.probs,
        "receiver_actions": list(res.receiver_actions),
        "no_info": res.no_info,
        "feasibility": {"feasible": res.feasibility.feasible,
                        "slack": res.feasibility.slack,
                        "mode": res.feasibility.mode},
        "manifest": out + ".manifest.json",
    }
    _write_json(out, report)
    _write_manifest("solve", {"scenario": scenario, "mode": mode, "eps": eps,
                              "cap": getattr(mode_obj, "capacity", None),
                              "resolution": resolution, "out": out},
                    inputs, [out], None, started)
    click.echo(json.dumps(_jsonable(report), sort_keys=True))


@cli.command("simulate")
@click.option("--experiment", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Experiment JSON (block-coding config).")
@click.option("--trials", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=None,
              help="Override the config seed.")
@click.option("--out", type=click.Path(dir_okay=False), default="simulate.json",
              show_default=True)
@click.option("--trials-csv", type=click.Path(dir_okay=False), default=None,
              help="Per-trial CSV path [default: <out stem>_trials.csv].")
def cmd_simulate(experiment, trials, seed, out, trials_csv):
    """Monte Carlo coordination run over the configured channel."""
    started = time.perf_counter()
    cfg = load_experiment(experiment)
    if seed is not None:
        import dataclasses
        cfg = dataclasses.replace(cfg, seed=seed)
    if trials_csv is None:
        stem = out[:-5] if out.endswith(".json") else out
        trials_csv = stem + "_trials.csv"

    rate_needed = mutual_information(marginal(cfg.target, ("u", "w")))
    cap = capacity(cfg.channel).capacity
    if cfg.rate <= rate_needed:
        raise ValueError(
            f"experiment.rate: covering requirement violated; rate {cfg.rate} "
            f"must exceed the signal's information rate {rate_needed:.6f} bits")
    if cfg.rate >= cap:
        raise ValueError(
            f"experiment.rate: packing requirement violated; rate {cfg.rate} "
            f"must stay below the channel capacity {cap:.6f} bits")

    summary = run_experiment(cfg, trials)
    phi1_sl, phi2_sl = single_letter_utilities(cfg)
    report = {
        "experiment": experiment,
        "trials": trials,
        "n": cfg.n,
        "rate": cfg.rate,
        "eps_typ": cfg.eps_typ,
        "seed": cfg.seed,
        "codebook_size": cfg.codebook_size,
        "typicality_radius": cfg.typicality_radius,
        "signal_information_rate": rate_needed,
        "channel_capacity": cap,
        "error_rate": summary.error_rate,
        "nocover_rate": summary.nocover_rate,
        "decodefail_rate": summary.decodefail_rate,
        "mean_l1": summary.mean_l1,
        "median_l1": summary.median_l1,
        "mean_util1": summary.mean_util1,
        "mean_util2": summary.mean_util2,
        "hw_error_rate": summary.hw_error_rate,
        "hw_l1": summary.hw_l1,
        "hw_util1": summary.hw_util1,
        "hw_util2": summary.hw_util2,
        "single_letter": {"phi1": phi1_sl, "phi2": phi2_sl},
        "trials_csv": trials_csv,
        "manifest": out + ".manifest.json",
    }
    _write_json(out, report)
    _write_csv(trials_csv,
               ("trial", "error", "chosen_m", "decoded_m",
                "l1_to_target", "util1", "util2"),
               ((t, r.error_event, r.chosen_m, r.decoded_m,
                 r.l1_to_target, r.util1_n, r.util2_n)
                for t, r in enumerate(summary.results)))
    _write_manifest("simulate", {"experiment": experiment, "trials": trials,
                                 "out": out, "trials_csv": trials_csv},
                    [experiment], [out, trials_csv], cfg.seed, started)
    click.echo(json.dumps(_jsonable({k: report[k] for k in
                                     ("error_rate", "mean_l1", "mean_util1",
                                      "mean_util2", "trials")}), sort_keys=True))


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}},
                                sort_keys=True) + "\n")


def main(argv=None) -> int:
    """Entry point with machine-readable error reporting."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as e:
        return int(e.exit_code)
    except click.UsageError as e:
        _emit_error("usage", str(e))
        return 2
    except click.ClickException as e:
        _emit_error("usage", str(e))
        return 2
    except CapacityError as e:
        _emit_error("no_convergence", str(e))
        return 1
    except (ValueError, TypeError, KeyError) as e:
        _emit_error("invalid_input", str(e))
        return 1
    except OSError as e:
        _emit_error("io", str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
