"""Experiment command line: one entry point per experiment kind.

Every run writes its artifacts plus a ``manifest.json`` next to the main
output, echoing the fully resolved configuration, tool version, and wall
time.  All numeric output is deterministic for a fixed (config, seed):
floats carry 17 significant digits and randomness flows from the config
seed through ``rng.derive_seed(seed, kind)``.

Exit codes: 0 success, 2 schema violation (path-qualified message),
3 numeric/module error.
"""

import dataclasses
import json
import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .core import DiscreteMixture, NoiseScale
from .cumulants import cumulant_coefficients
from .em import EMConfig, run_em, t1_one_step_scan
from .exceptions import LowSNRError, SchemaError
from .groups import check_haar_identity, cyclic_group, planar_rotation_group
from .landscape1d import (
    PowerSumSystem,
    classify_by_multiplicity,
    find_critical_point,
    power_sum_problem,
    restricted_hessian_classify,
    restricted_hessian_spectrum,
)
from .likelihood import (
    EmpiricalEvaluator,
    LikelihoodEvaluator,
    MonteCarlo,
    Quadrature,
    expansion_scan,
)
from .moment_match import stagewise_solve
from .rng import derive_seed, generator
from .serialize import format_float, load_group, load_mixture, write_csv

_EXIT_SCHEMA = 2
_EXIT_NUMERIC = 3


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LOWSNR_THREADS", "1")))
    except ValueError:
        return 1


def _write_manifest(out_path: Path, kind: str, config: dict, started: float):
    manifest = {
        "kind": kind,
        "config": config,
        "tool_version": __version__,
        "wall_time_s": time.time() - started,
    }
    path = out_path.parent / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _run(kind: str, config: dict, out, body):
    """Shared error handling and manifest writing for every subcommand."""
    started = time.time()
    try:
        body()
    except SchemaError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_EXIT_SCHEMA)
    except (LowSNRError, ValueError, ArithmeticError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_EXIT_NUMERIC)
    if out is not None:
        _write_manifest(Path(out), kind, config, started)


def _load_config_defaults(ctx, param, value):
    """--config file.json provides defaults for any flag not given explicitly.

    Config keys are the long option names (e.g. "truth", "max-iter");
    they are translated to the underlying parameter names here.
    """
    if value is None:
        return None
    try:
        data = json.loads(Path(value).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(f"cannot read config: {exc}")
    if not isinstance(data, dict):
        raise click.BadParameter("config file must hold a JSON object")
    by_flag = {}
    for p in ctx.command.params:
        for opt in getattr(p, "opts", []):
            by_flag[opt.lstrip("-")] = p.name
        by_flag[p.name] = p.name
    resolved = {}
    for key, val in data.items():
        name = by_flag.get(key) or by_flag.get(key.replace("-", "_"))
        if name is None:
            raise click.BadParameter(f"unknown config key {key!r}")
        resolved[name] = val
    ctx.default_map = {**resolved, **(ctx.default_map or {})}
    return value


def _config_option():
    return click.option(
        "--config",
        type=click.Path(exists=True, dir_okay=False),
        callback=_load_config_defaults,
        is_eager=True,
        expose_value=False,
        help="JSON file with defaults for any omitted flag.",
    )


def _parse_group(spec: str):
    if spec.startswith("cyclic:"):
        return cyclic_group(int(spec.split(":", 1)[1]))
    if spec.startswith("rot2:"):
        return planar_rotation_group(int(spec.split(":", 1)[1]))
    if spec.startswith("file:"):
        return load_group(spec.split(":", 1)[1])
    raise SchemaError(f"group: unknown spec {spec!r}; use cyclic:d, rot2:n, or file:<path>")


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _center_columns(mix: DiscreteMixture) -> list[str]:
    return [f"center_{j}_{a}" for j in range(mix.n_components) for a in range(mix.dim)]


@click.group()
@click.version_option(version=__version__, prog_name="lowsnr")
def main():
    """Low-SNR Gaussian mixture experiments."""


@main.command()
@_config_option()
@click.option("--max-order", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True, help="echoed in the manifest")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cumulants(max_order, seed, out):
    """Dump the moment-cumulant coefficient table as JSON."""

    def body():
        table = cumulant_coefficients(max_order)
        payload = {
            str(m): {str(p): int(c) for p, c in sorted(table.coeffs[m].items(), key=lambda kv: kv[0].parts, reverse=True)}
            for m in range(1, max_order + 1)
        }
        text = json.dumps(payload, indent=2) + "\n"
        if out:
            Path(out).write_text(text)
        else:
            click.echo(text, nl=False)

    _run("cumulant-dump", {"max_order": max_order, "seed": seed, "out": out}, out, body)


@main.command("expansion-scan")
@_config_option()
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mix", "mix_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "m", type=int, required=True)
@click.option("--sigmas", required=True, help="comma-separated sigma grid")
@click.option("--nodes", type=int, default=60, show_default=True)
@click.option("--mc-samples", type=int, default=0, help="use Monte Carlo with this many samples")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def expansion_scan_cmd(truth_path, mix_path, m, sigmas, nodes, mc_samples, seed, out):
    """Measure the order-m expansion residuals over a sigma grid."""
    config = {
        "truth": truth_path,
        "mix": mix_path,
        "order": m,
        "sigmas": sigmas,
        "nodes": nodes,
        "mc_samples": mc_samples,
        "seed": seed,
        "out": out,
    }

    def body():
        truth = load_mixture(truth_path)
        mix = load_mixture(mix_path)
        grid = _parse_floats(sigmas)
        if mc_samples > 0:
            method = MonteCarlo(mc_samples, derive_seed(seed, "expansion-scan"))
        else:
            method = Quadrature(nodes)
        report = expansion_scan(truth, mix, m, grid, method, max_workers=_threads())
        rows = [
            [s, g, t, r, abs(r)]
            for s, g, t, r in zip(
                report.sigma_grid, report.gaps, report.leading_terms, report.measured_residuals
            )
        ]
        write_csv(out, ["sigma", "neg_loglik_gap", "leading_term", "residual", "abs_residual"], rows)
        sidecar = {
            "fitted_slope": report.fitted_slope,
            "slope_stderr": report.slope_stderr,
            "theoretical_slope": -(2 * m + 2),
            "n_points_used": int(report.used_mask.sum()),
            "dropped_sigmas": report.sigma_grid[~report.used_mask].tolist(),
        }
        Path(out).with_suffix(".slope.json").write_text(json.dumps(sidecar, indent=2) + "\n")

    _run("expansion-scan", config, out, body)


@main.command("em-run")
@_config_option()
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--init", "init_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sigma", type=float, required=True)
@click.option("--mode", type=click.Choice(["standard", "gradient"]), default="standard", show_default=True)
@click.option("--tau", type=float, default=None, help="step size for gradient mode")
@click.option("--max-iter", type=int, default=50, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--nodes", type=int, default=60, show_default=True)
@click.option("--data-mode", type=click.Choice(["population", "sample"]), default="population", show_default=True)
@click.option("--n-samples", type=int, default=100000, show_default=True, help="dataset size for sample mode")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def em_run(truth_path, init_path, sigma, mode, tau, max_iter, tol, nodes, data_mode, n_samples, seed, out):
    """Run (standard | gradient) EM and write the trajectory as CSV."""
    config = {
        "truth": truth_path, "init": init_path, "sigma": sigma, "mode": mode,
        "tau": tau, "max_iter": max_iter, "tol": tol, "nodes": nodes,
        "data_mode": data_mode, "n_samples": n_samples, "seed": seed, "out": out,
    }

    def body():
        truth = load_mixture(truth_path)
        init = load_mixture(init_path)
        ns = NoiseScale(sigma)
        if data_mode == "population":
            ev = LikelihoodEvaluator(truth, ns, Quadrature(nodes))
        else:
            g = generator(derive_seed(seed, "em-run"))
            idx = g.choice(truth.n_components, size=n_samples, p=truth.weights)
            data = sigma * g.standard_normal((n_samples, truth.dim)) + truth.centers[idx]
            ev = EmpiricalEvaluator(data, ns)
        traj = run_em(init, EMConfig(mode=mode, max_iter=max_iter, tol=tol, tau=tau), ev)
        rows = [
            [s.iteration, s.loglik, s.t1_norm, *s.mix.centers.ravel().tolist()]
            for s in traj.states
        ]
        write_csv(out, ["iter", "loglik", "t1_norm", *_center_columns(init)], rows)

    _run("em-run", config, out, body)


@main.command("t1-scan")
@_config_option()
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--init", "init_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sigmas", required=True)
@click.option("--nodes", type=int, default=60, show_default=True)
@click.option("--radius", type=float, default=2.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def t1_scan(truth_path, init_path, sigmas, nodes, radius, seed, out):
    """One-step EM first-moment decay across sigma."""
    config = {
        "truth": truth_path, "init": init_path, "sigmas": sigmas,
        "nodes": nodes, "radius": radius, "seed": seed, "out": out,
    }

    def body():
        truth = load_mixture(truth_path)
        init = load_mixture(init_path)
        res = t1_one_step_scan(truth, init, _parse_floats(sigmas), Quadrature(nodes), radius)
        rows = [[s, t] for s, t in zip(res.sigma_grid, res.t1_norms)]
        write_csv(out, ["sigma", "t1_norm"], rows)
        sidecar = {
            "fitted_slope": res.fitted_slope,
            "slope_stderr": res.slope_stderr,
            "theoretical_slope": -1,
        }
        Path(out).with_suffix(".slope.json").write_text(json.dumps(sidecar, indent=2) + "\n")

    _run("t1-scan", config, out, body)


@main.command("stagewise")
@_config_option()
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--init", "init_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--orders", "m", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def stagewise(truth_path, init_path, m, seed, out):
    """Stagewise moment matching through order m."""
    config = {"truth": truth_path, "init": init_path, "orders": m, "seed": seed, "out": out}

    def body():
        truth = load_mixture(truth_path)
        init = load_mixture(init_path)
        results = stagewise_solve(truth, init, m)
        rows = [
            [r.stage, r.objective_value, r.constraint_violation, r.converged,
             *r.solution.centers.ravel().tolist()]
            for r in results
        ]
        write_csv(out, ["stage", "objective", "violation", "converged", *_center_columns(init)], rows)

    _run("stagewise", config, out, body)


@main.command("landscape1d")
@_config_option()
@click.option("--weights", "weights_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--stage", type=int, required=True)
@click.option("--mults", required=True, help="comma-separated multiplicity vector")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def landscape1d_cmd(weights_path, truth_path, stage, mults, seed, out):
    """Find and classify a 1-D critical point with given multiplicities."""
    config = {
        "weights": weights_path, "truth": truth_path, "stage": stage,
        "mults": mults, "seed": seed, "out": out,
    }

    def body():
        try:
            weights = np.array(json.loads(Path(weights_path).read_text()), dtype=float)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise SchemaError(f"{weights_path}: weights must be a JSON array ({exc})")
        try:
            values = np.array(json.loads(Path(truth_path).read_text()), dtype=float)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise SchemaError(f"{truth_path}: truth values must be a JSON array ({exc})")
        sys_ = PowerSumSystem(weights, values)
        multiplicities = tuple(int(t) for t in mults.split(","))
        if len(multiplicities) != stage:
            raise SchemaError(f"mults: got {len(multiplicities)} entries, expected stage = {stage}")
        cp = find_critical_point(sys_, multiplicities, seed=derive_seed(seed, "landscape1d"))
        by_mult = classify_by_multiplicity(cp, sys_)
        f, cons = power_sum_problem(sys_, stage)
        spectrum = restricted_hessian_spectrum(f, cons, cp.full_point)
        oracle = restricted_hessian_classify(f, cons, cp.full_point)
        cp = dataclasses.replace(cp, classification=by_mult)
        payload = {
            "values": cp.values.tolist(),
            "multiplicities": list(cp.multiplicities),
            "assignment": list(cp.assignment),
            "stage": cp.stage,
            "p_next": cp.p_next,
            "p_next_truth": sys_.truth_power_sum(stage + 1),
            "classification_multiplicity": by_mult,
            "classification_hessian": oracle,
            "projected_hessian_spectrum": spectrum.tolist(),
        }
        Path(out).write_text(json.dumps(payload, indent=2) + "\n")

    _run("landscape1d", config, out, body)


@main.command("orbit-check")
@_config_option()
@click.option("--group", "group_spec", required=True, help="cyclic:d, rot2:n, or file:<path>")
@click.option("--max-total-order", type=int, default=4, show_default=True)
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def orbit_check(group_spec, max_total_order, trials, seed, out):
    """Haar inner-product identity residuals for random orbit seeds."""
    config = {
        "group": group_spec, "max_total_order": max_total_order,
        "trials": trials, "seed": seed, "out": out,
    }

    def body():
        group = _parse_group(group_spec)
        rng = generator(derive_seed(seed, "orbit-check"))
        pairs = _index_lists(max_total_order)
        rows = []
        worst = 0.0
        for trial in range(trials):
            theta = rng.standard_normal(group.dim)
            theta_star = rng.standard_normal(group.dim)
            for I, J in pairs:
                res = check_haar_identity(group, theta, theta_star, I, J, max_total_order)
                worst = max(worst, res)
                rows.append(
                    ["-".join(map(str, I)), "-".join(map(str, J)),
                     sum(I) + sum(J), trial, res]
                )
        write_csv(out, ["I", "J", "total_order", "trial", "residual"], rows)
        click.echo(f"max residual over {len(rows)} checks: {format_float(worst)}")

    _run("orbit-check", config, out, body)


def _index_lists(max_total: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (I, J) multiset pairs with 1 <= sum(I) + sum(J) <= max_total."""
    from .cumulants import partitions_with_max_part

    multisets = [()]
    for total in range(1, max_total + 1):
        multisets += [tuple(p.parts) for p in partitions_with_max_part(total, total)]
    out = []
    for I in multisets:
        for J in multisets:
            k = sum(I) + sum(J)
            if 1 <= k <= max_total:
                out.append((I, J))
    return out


if __name__ == "__main__":
    main()
