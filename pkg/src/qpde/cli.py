"""Configuration-driven command line runner.

Subcommands:

  qpde run      --config FILE [--seed N] [--shots N|exact]
                [--mode exact|shots|noisy] [--out DIR] [--schedule T:N,...]
  qpde oracle   --config FILE
  qpde optimize --config FILE [--out DIR]

`run` writes iterations.csv, sweeps.csv, optimizer_report.csv and
summary.json into the output directory and exits 0 on convergence, 2 on
non-convergence, 1 on a configuration error.  `oracle` prints the exact
spectrum and labeled gap as JSON.  `optimize` writes only the compression
report.  A bare config name (e.g. "two_spin") resolves to the bundled
configuration of that name.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import traceback
from importlib import resources
from pathlib import Path

from .engine import EstimatorConfig, PriorSpec, run_estimation
from .evolution import TrotterPlan, trotter_circuit
from .optimizer import collapse_register_block, cost_report
from .sampling import SamplerSpec
from .spin import SpinSystem, exact_gap, named_state
from .statevector import inner_product


class ConfigError(Exception):
    """Invalid configuration; the message names the offending field."""


def bundled_config_names() -> list[str]:
    root = resources.files("qpde").joinpath("configs")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _resolve_config_path(spec: str) -> Path:
    path = Path(spec)
    if path.exists():
        return path
    bundled = resources.files("qpde").joinpath("configs", f"{spec}.json")
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"config: no file {spec!r} and no bundled config of that "
                      f"name (available: {', '.join(bundled_config_names())})")


def _require(mapping: dict, key: str, kind, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}.{key}: missing required field")
    value = mapping[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, "
                          f"got {type(value).__name__}")
    return value


def parse_config(raw: dict) -> dict:
    """Validate the raw JSON structure and build typed components."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")

    system_raw = _require(raw, "system", dict, "config")
    n_spins = _require(system_raw, "n_spins", int, "system")
    couplings_raw = _require(system_raw, "couplings", list, "system")
    couplings = []
    for idx, entry in enumerate(couplings_raw):
        if (not isinstance(entry, list) or len(entry) != 3
                or not all(isinstance(v, (int, float)) for v in entry)):
            raise ConfigError(f"system.couplings[{idx}]: expected [i, j, J]")
        couplings.append((int(entry[0]), int(entry[1]), float(entry[2])))
    try:
        system = SpinSystem(n_spins, tuple(couplings))
    except ValueError as exc:
        raise ConfigError(f"system.couplings: {exc}") from exc

    ground = _require(raw, "ground_label", str, "config")
    excited = _require(raw, "excited_label", str, "config")
    for field_name, label in (("ground_label", ground), ("excited_label", excited)):
        try:
            named_state(label, system.n_spins)
        except ValueError as exc:
            raise ConfigError(f"{field_name}: {exc}") from exc
    phi0 = named_state(ground, system.n_spins).to_statevector()
    phi1 = named_state(excited, system.n_spins).to_statevector()
    if abs(inner_product(phi0, phi1)) > 1e-10:
        raise ConfigError("excited_label: preparation states must be orthogonal")

    prior_raw = _require(raw, "prior", dict, "config")
    try:
        prior = PriorSpec(_require(prior_raw, "shape", str, "prior"),
                          _require(prior_raw, "mu", float, "prior"),
                          _require(prior_raw, "sigma", float, "prior"))
    except ValueError as exc:
        raise ConfigError(f"prior: {exc}") from exc

    est_raw = dict(raw.get("estimator", {}))
    schedule = est_raw.pop("explicit_schedule", None)
    if schedule is not None:
        parsed = []
        for idx, entry in enumerate(schedule):
            if not isinstance(entry, list) or len(entry) != 2:
                raise ConfigError(f"estimator.explicit_schedule[{idx}]: "
                                  f"expected [t, n_steps]")
            parsed.append((float(entry[0]), int(entry[1])))
        schedule = tuple(parsed)
    known = {f for f in EstimatorConfig.__dataclass_fields__}
    for key in est_raw:
        if key not in known:
            raise ConfigError(f"estimator.{key}: unknown field")
    try:
        estimator = EstimatorConfig(explicit_schedule=schedule, **est_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"estimator: {exc}") from exc

    sampler_raw = dict(raw.get("sampler", {}))
    known = {f for f in SamplerSpec.__dataclass_fields__}
    for key in sampler_raw:
        if key not in known:
            raise ConfigError(f"sampler.{key}: unknown field")
    try:
        sampler = SamplerSpec(**sampler_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sampler: {exc}") from exc

    output_dir = raw.get("output_dir", "runs/qpde")
    if not isinstance(output_dir, str):
        raise ConfigError("output_dir: expected string path")

    return {"system": system, "ground_label": ground, "excited_label": excited,
            "prior": prior, "estimator": estimator, "sampler": sampler,
            "output_dir": output_dir}


def load_config(spec: str) -> dict:
    path = _resolve_config_path(spec)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path}: line {exc.lineno}: {exc.msg}") from exc
    return parse_config(raw)


def echo_config(cfg: dict) -> dict:
    """JSON-ready copy of a parsed config; reloading it reproduces the run."""
    estimator = cfg["estimator"]
    sampler = cfg["sampler"]
    out = {
        "system": {"n_spins": cfg["system"].n_spins,
                   "couplings": [[i, j, J] for i, j, J in cfg["system"].couplings]},
        "ground_label": cfg["ground_label"],
        "excited_label": cfg["excited_label"],
        "prior": {"shape": cfg["prior"].shape, "mu": cfg["prior"].mu,
                  "sigma": cfg["prior"].sigma},
        "estimator": {name: getattr(estimator, name)
                      for name in EstimatorConfig.__dataclass_fields__},
        "sampler": {name: getattr(sampler, name)
                    for name in SamplerSpec.__dataclass_fields__},
        "output_dir": cfg["output_dir"],
    }
    sched = out["estimator"]["explicit_schedule"]
    if sched is not None:
        out["estimator"]["explicit_schedule"] = [[t, n] for t, n in sched]
    return out


def _apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    from dataclasses import replace

    sampler = cfg["sampler"]
    if args.seed is not None:
        sampler = replace(sampler, seed=args.seed)
    if args.shots is not None:
        if args.shots == "exact":
            sampler = replace(sampler, mode="exact")
        else:
            try:
                sampler = replace(sampler, shots=int(args.shots))
            except ValueError as exc:
                raise ConfigError(f"--shots: expected integer or 'exact'") from exc
    if args.mode is not None:
        sampler = replace(sampler, mode=args.mode)
    cfg["sampler"] = sampler
    if args.out is not None:
        cfg["output_dir"] = args.out
    if getattr(args, "schedule", None):
        entries = []
        for chunk in args.schedule.split(","):
            try:
                t_str, n_str = chunk.split(":")
                entries.append((float(t_str), int(n_str)))
            except ValueError as exc:
                raise ConfigError(f"--schedule: bad entry {chunk!r}, "
                                  f"expected T:N") from exc
        cfg["estimator"] = EstimatorConfig(
            **{**{name: getattr(cfg["estimator"], name)
                  for name in EstimatorConfig.__dataclass_fields__},
               "explicit_schedule": tuple(entries)})
    return cfg


def _write_iterations_csv(path: Path, trace):
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "n_steps", "mu_ini", "sigma_ini", "mu_fit",
                         "sigma_fit", "mu_upd", "sigma_upd", "restarted"])
        for row in trace:
            writer.writerow([repr(row.t), row.n_steps, repr(row.prior.mu),
                             repr(row.prior.sigma), repr(row.fit.mu),
                             repr(row.fit.sigma), repr(row.posterior.mu),
                             repr(row.posterior.sigma),
                             "true" if row.restarted else "false"])


def _write_sweeps_csv(path: Path, trace):
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration_index", "delta_eps", "p0_sampled", "p0_exact"])
        for index, row in enumerate(trace):
            for point in row.points:
                writer.writerow([index, repr(point.delta_eps), repr(point.p0),
                                 repr(point.p0_exact)])


def _write_optimizer_csv(path: Path, system: SpinSystem, pairs):
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "n_steps", "pre_depth", "pre_two_qubit_count",
                         "pre_gate_count", "post_depth", "post_two_qubit_count",
                         "post_gate_count"])
        for t, n_steps in pairs:
            circuit = trotter_circuit(system, TrotterPlan(t, n_steps))
            pre = cost_report(circuit)
            post = cost_report(collapse_register_block(circuit,
                                                       max_qubits=system.n_spins))
            writer.writerow([repr(t), n_steps, pre.depth, pre.two_qubit_count,
                             pre.gate_count, post.depth, post.two_qubit_count,
                             post.gate_count])


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    out_dir = Path(cfg["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_estimation(cfg["system"], cfg["ground_label"],
                            cfg["excited_label"], cfg["prior"],
                            cfg["estimator"], cfg["sampler"])
    _write_iterations_csv(out_dir / "iterations.csv", result.trace)
    _write_sweeps_csv(out_dir / "sweeps.csv", result.trace)
    seen = []
    for row in result.trace:
        if (row.t, row.n_steps) not in seen:
            seen.append((row.t, row.n_steps))
    _write_optimizer_csv(out_dir / "optimizer_report.csv", cfg["system"], seen)
    summary = {
        "final": {"mu": result.final.mu, "sigma": result.final.sigma},
        "converged": result.converged,
        "exact_gap": result.exact_gap,
        "accuracy": result.accuracy,
        "seed": cfg["sampler"].seed,
        "iterations": len(result.trace),
        "config": echo_config(cfg),
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"final gap estimate: {result.final.mu:.6f} +- {result.final.sigma:.6f} "
          f"({'converged' if result.converged else 'not converged'}); "
          f"outputs in {out_dir}")
    return 0 if result.converged else 2


def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    report, gap = exact_gap(cfg["system"], cfg["ground_label"], cfg["excited_label"])
    payload = {
        "eigenvalues": [float(v) for v in report.eigenvalues],
        "assignments": {
            label: {"eigenstate_index": idx, "energy": energy,
                    "overlap_sq": overlap}
            for label, (idx, energy, overlap) in report.assignments.items()},
        "gap": {"ground": cfg["ground_label"], "excited": cfg["excited_label"],
                "value": gap},
    }
    print(json.dumps(payload, indent=2))
    return 0


_OPTIMIZE_PROBE_TIMES = (0.2, 0.4, 1.0, 4.2)


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    if args.out is not None:
        cfg["output_dir"] = args.out
    out_dir = Path(cfg["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    estimator = cfg["estimator"]
    if estimator.explicit_schedule:
        pairs = list(estimator.explicit_schedule)
    else:
        from .engine import default_steps
        pairs = [(t, default_steps(cfg["system"], t, estimator.steps_per_unit_time))
                 for t in _OPTIMIZE_PROBE_TIMES]
    _write_optimizer_csv(out_dir / "optimizer_report.csv", cfg["system"], pairs)
    print(f"optimizer report written to {out_dir / 'optimizer_report.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpde",
        description="Energy-gap estimation for small Heisenberg spin systems")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a gap estimation")
    run_p.add_argument("--config", required=True,
                       help="config file path or bundled config name")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--shots", default=None, help="shot count or 'exact'")
    run_p.add_argument("--mode", choices=["exact", "shots", "noisy"], default=None)
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--schedule", default=None,
                       help="explicit schedule as T:N,T:N,...")
    run_p.set_defaults(func=cmd_run)

    oracle_p = sub.add_parser("oracle", help="print the exact spectrum and gap")
    oracle_p.add_argument("--config", required=True)
    oracle_p.set_defaults(func=cmd_oracle)

    opt_p = sub.add_parser("optimize", help="write the circuit compression report")
    opt_p.add_argument("--config", required=True)
    opt_p.add_argument("--out", default=None)
    opt_p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
