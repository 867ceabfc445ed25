"""Config-driven batch front door.

One JSON config per run selects a mode (measure, simulate, sweep, verify) and
carries every run parameter; the only flags are the config path, an output
directory, and a seed override, so a run is reproducible from its config
alone. Exit codes: 0 success, 1 hard failure, 2 completed with warnings
(optimizer non-convergence, partial sweep failures).
"""

import argparse
import itertools
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bec_dynamics import (
    IntegratorOptions,
    ModeParams,
    entanglement_series,
    init_from_amplitudes,
    integrate,
    write_trajectory_csv,
)
from .disentangled_norm import OptimizerOptions
from .entanglement_measure import measure_report, report_document
from .rk import IntegrationError
from .tensor_core import SchemaError, load_operator, validate_operator
from .verify import run_property_suites

EXIT_OK = 0
EXIT_HARD = 1
EXIT_SOFT = 2
SWEEP_AXES = ("b12", "b23", "delta21", "delta32")
_MODES = ("measure", "simulate", "sweep", "verify")


def _fail(field, message):
    raise SchemaError(field, message)


def _get(config, field, kinds, default=None, required=False):
    if field not in config:
        if required:
            _fail(field, "missing")
        return default
    value = config[field]
    if kinds is not None and not isinstance(value, kinds):
        wanted = kinds.__name__ if isinstance(kinds, type) else (
            " or ".join(k.__name__ for k in kinds)
        )
        _fail(field, f"expected a {wanted} value")
    return value


def _parse_params(config, overrides=None):
    block = _get(config, "params", dict, default={})
    known = {
        "b12",
        "b23",
        "alpha",
        "delta21",
        "delta32",
        "gamma12",
        "gamma23",
    }
    for key in block:
        if key not in known:
            _fail("params", f"unknown entry {key!r}")
    values = {}
    for key in known - {"alpha"}:
        raw = block.get(key, 0.0)
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            _fail(f"params.{key}", "expected a number")
        values[key] = float(raw)
    alpha = block.get("alpha")
    if alpha is not None:
        arr = np.asarray(alpha, dtype=float)
        if arr.shape != (3, 3):
            _fail("params.alpha", "expected a 3x3 array")
        values["alpha"] = arr
    if overrides:
        values.update(overrides)
    return ModeParams(**values)


def _parse_amplitudes(config):
    raw = _get(config, "amplitudes", list, required=True)
    if len(raw) != 3:
        _fail("amplitudes", "expected 3 [re, im] pairs")
    out = np.empty(3, dtype=complex)
    for i, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            _fail("amplitudes", f"entry {i} is not an [re, im] pair")
        out[i] = complex(float(pair[0]), float(pair[1]))
    return out


def _parse_integrator(config):
    block = _get(config, "integrator", dict, default={})
    kwargs = {}
    for key in (
        "rel_tol",
        "abs_tol",
        "max_step",
        "renormalize_populations",
        "residual_abort",
    ):
        if key in block:
            kwargs[key] = block[key]
    extra = set(block) - set(
        (
            "rel_tol",
            "abs_tol",
            "max_step",
            "renormalize_populations",
            "residual_abort",
        )
    )
    if extra:
        _fail("integrator", f"unknown entry {sorted(extra)[0]!r}")
    return IntegratorOptions(**kwargs)


def _parse_optimizer(config, seed_override):
    block = _get(config, "optimizer", dict, default={})
    kwargs = {}
    for key in ("restarts", "tol", "max_iter", "seed"):
        if key in block:
            kwargs[key] = block[key]
    extra = set(block) - {"restarts", "tol", "max_iter", "seed"}
    if extra:
        _fail("optimizer", f"unknown entry {sorted(extra)[0]!r}")
    if seed_override is not None:
        kwargs["seed"] = seed_override
    return OptimizerOptions(**kwargs)


def _write_json(path, document):
    with open(path, "w") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_measure(config, out_dir, seed_override):
    operator_path = _get(config, "operator", str, required=True)
    opts = _parse_optimizer(config, seed_override)
    a = load_operator(operator_path)
    validate_operator(a)
    report = measure_report(a, opts)
    document = report_document(report)
    out_path = out_dir / _get(config, "output", str, default="measure_report.json")
    _write_json(out_path, document)
    print(
        f"epsilon_bits={report.epsilon_bits:.12g} "
        f"norm_numerator={report.norm_numerator:.12g} "
        f"norm_denominator={report.norm_denominator:.12g} "
        f"converged={report.converged}"
    )
    print(f"wrote {out_path}")
    if not report.converged:
        print("warning: optimizer did not converge; best value reported", file=sys.stderr)
        return EXIT_SOFT
    return EXIT_OK


def _simulate_trajectory(config, params):
    amplitudes = _parse_amplitudes(config)
    p_order = _get(config, "p_order", int, default=2)
    t_end = _get(config, "t_end", (int, float), required=True)
    sample_count = _get(config, "sample_count", int, default=201)
    opts = _parse_integrator(config)
    state0 = init_from_amplitudes(amplitudes, params)
    traj = integrate(state0, params, float(t_end), opts, sample_count)
    return entanglement_series(traj, p_order)


def _trajectory_summary(traj):
    return (
        f"samples={len(traj)} "
        f"peak_epsilon={float(np.max(traj.epsilon)):.12g} "
        f"max_population_drift={float(np.max(np.abs(traj.residuals[:, 0]))):.3e} "
        f"max_ladder_residual={float(np.max(np.abs(traj.residuals[:, 1:]))):.3e}"
    )


def run_simulate(config, out_dir, seed_override):
    del seed_override  # the integration is deterministic; nothing to seed
    traj = _simulate_trajectory(config, _parse_params(config))
    out_path = out_dir / _get(config, "output", str, default="trajectory.csv")
    with open(out_path, "w") as fh:
        write_trajectory_csv(traj, fh)
    print(_trajectory_summary(traj))
    print(f"wrote {out_path}")
    return EXIT_OK


def run_sweep(config, out_dir, seed_override):
    del seed_override
    grid = _get(config, "grid", dict, required=True)
    if not grid:
        _fail("grid", "empty")
    for axis in grid:
        if axis not in SWEEP_AXES:
            _fail("grid", f"unknown axis {axis!r}; choose from {SWEEP_AXES}")
    axes = [axis for axis in SWEEP_AXES if axis in grid]
    for axis in axes:
        values = grid[axis]
        if not isinstance(values, list) or not values:
            _fail("grid", f"axis {axis!r} needs a nonempty list")
    points = list(itertools.product(*(grid[axis] for axis in axes)))
    index = {"axes": axes, "points": []}
    failures = 0
    for point in points:
        overrides = {axis: float(v) for axis, v in zip(axes, point)}
        name = "_".join(f"{axis}={v:g}" for axis, v in overrides.items()) + ".csv"
        entry = {"params": overrides, "file": None, "status": "ok"}
        try:
            traj = _simulate_trajectory(config, _parse_params(config, overrides))
            with open(out_dir / name, "w") as fh:
                write_trajectory_csv(traj, fh)
            entry["file"] = name
            print(f"point {name[:-4]}: ok")
        except (ValueError, IntegrationError) as exc:
            failures += 1
            entry["status"] = f"error: {exc}"
            print(f"point {name[:-4]}: failed ({exc})")
        index["points"].append(entry)
    index_path = out_dir / "sweep_index.json"
    _write_json(index_path, index)
    print(f"wrote {index_path} ({len(points) - failures}/{len(points)} points ok)")
    return EXIT_SOFT if failures else EXIT_OK


def run_verify(config, out_dir, seed_override):
    cases = _get(config, "cases", int, default=200)
    seed = _get(config, "seed", int, default=0)
    if seed_override is not None:
        seed = seed_override
    canary = _get(config, "canary", bool, default=False)
    if cases < 1:
        _fail("cases", "must be at least 1")
    report = run_property_suites(
        cases=cases, seed=seed, corrupt_semipositivity=canary
    )
    out_path = out_dir / _get(config, "output", str, default="verify_report.json")
    _write_json(out_path, report.to_document())
    for suite in report.suites:
        if suite.passed:
            print(f"suite {suite.name}: pass ({suite.cases} cases)")
        else:
            print(
                f"suite {suite.name}: FAIL "
                f"({suite.failures}/{suite.cases} cases, "
                f"worst excess {suite.worst_excess:.3e})"
            )
            for note in suite.notes:
                print(f"  {note}")
    print(f"wrote {out_path}")
    print("verification " + ("PASSED" if report.passed else "FAILED"))
    return EXIT_OK if report.passed else EXIT_HARD


_RUNNERS = {
    "measure": run_measure,
    "simulate": run_simulate,
    "sweep": run_sweep,
    "verify": run_verify,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="entnorm",
        description="Run a measure, simulate, sweep, or verify job from a JSON config.",
    )
    parser.add_argument("--config", required=True, help="path to the run config")
    parser.add_argument(
        "--output-dir", default=".", help="directory for all output files"
    )
    parser.add_argument(
        "--seed", type=int, default=None, help="override the config seed"
    )
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_HARD
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_HARD

    try:
        if not isinstance(config, dict):
            _fail("config", "expected a JSON object")
        mode = _get(config, "mode", str, required=True)
        if mode not in _MODES:
            _fail("mode", f"unknown mode {mode!r}; choose from {_MODES}")
        out_dir = Path(args.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _RUNNERS[mode](config, out_dir, args.seed)
    except IntegrationError as exc:
        print(f"error: integration failed: {exc}", file=sys.stderr)
        return EXIT_HARD
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HARD


if __name__ == "__main__":
    sys.exit(main())
