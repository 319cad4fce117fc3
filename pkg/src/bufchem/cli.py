"""Command-line front end: load a config file, run one analysis, emit files.

Every command reads the same INI-style config and writes its artifacts
into --out (default: current directory).  Success prints a one-line
JSON summary listing the written paths; any failure prints a JSON
error object and exits non-zero.  Output bytes depend only on the
config contents, so identical invocations produce identical files.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import buffered, design, io, multiplicity, simulate, single
from .config import ConfigError, RunConfig, parse_config
from .kinetics import GrowthModel, Haldane, Monod

__all__ = ["main"]

_COMMANDS = ("kinetics", "classify", "equilibria", "domain", "design",
             "simulate", "audit")

_DEFAULT_SWEEP_POINTS = 400
_COMPARISON_POINTS = 30


def _model_payload(model: GrowthModel) -> dict:
    if isinstance(model, Haldane):
        return {"type": "haldane",
                "parameters": {"mu_bar": model.mu_bar, "K": model.K,
                               "K_I": model.K_I}}
    if isinstance(model, Monod):
        return {"type": "monod",
                "parameters": {"mu_max": model.mu_max, "K_s": model.K_s}}
    raise ValueError("only monod and haldane models are serializable")


def _break_even_payload(window) -> dict | None:
    if window is None:
        return None
    return {"lower": window.lower, "upper": io.finite_or_none(window.upper)}


def _cmd_kinetics(cfg: RunConfig, out: str, fmt: str) -> list[str]:
    peak = cfg.model.peak()
    payload = {
        "seed": cfg.seed,
        "model": _model_payload(cfg.model),
        "peak": {"abscissa": io.finite_or_none(peak.abscissa),
                 "height": peak.height},
        "dilution": cfg.D,
        "break_even": _break_even_payload(cfg.model.break_even(cfg.D)),
    }
    path = os.path.join(out, "kinetics.json")
    io.write_json(path, payload)
    return [path]


def _cmd_classify(cfg: RunConfig, out: str, fmt: str) -> list[str]:
    portrait = single.classify_portrait(cfg.single_params())
    payload = {
        "seed": cfg.seed,
        "S_in": cfg.S_in,
        "D": cfg.D,
        "case": portrait.case,
        "break_even": _break_even_payload(cfg.model.break_even(cfg.D)),
        "equilibria": [{"S": e.S, "X": e.X, "tag": e.tag}
                       for e in portrait.equilibria],
    }
    path = os.path.join(out, "classify.json")
    io.write_json(path, payload)
    return [path]


def _cmd_equilibria(cfg: RunConfig, out: str, fmt: str) -> list[str]:
    bc = cfg.buffered_config()
    points = buffered.find_equilibria(bc)
    payload = {
        "seed": cfg.seed,
        "S_in": bc.S_in,
        "D": bc.D,
        "alpha": bc.alpha,
        "r": bc.r,
        "buffer_substrate": buffered.buffer_substrate(bc.model, bc.S_in,
                                                      bc.D, bc.alpha),
        "pivot": buffered.pivot_level(bc.model, bc.S_in, bc.D, bc.alpha),
        "positive_count": sum(e.branch == buffered.BRANCH_POSITIVE
                              for e in points),
        "equilibria": [{
            "s1": e.s1, "x1": e.x1, "s2": e.s2, "x2": e.x2,
            "branch": e.branch, "tag": e.tag, "unstable": e.unstable,
            "eigenvalues": list(e.eigenvalues),
        } for e in points],
    }
    path = os.path.join(out, "equilibria.json")
    io.write_json(path, payload)
    return [path]


def _default_alpha_grid(cfg: RunConfig) -> list[float]:
    # sweep the whole feasibility range (0, mu(S_in)/D) on a log scale,
    # stopping just short of both ends where the buffer turns infeasible
    bound = cfg.model.rate(cfg.S_in) / cfg.D
    lo, hi, n = bound / 1000.0, 0.999 * bound, _DEFAULT_SWEEP_POINTS
    step = (math.log(hi) - math.log(lo)) / (n - 1)
    return [math.exp(math.log(lo) + k * step) for k in range(n)]


def _cmd_domain(cfg: RunConfig, out: str, fmt: str) -> list[str]:
    if cfg.sweep is not None:
        lo, hi, n = cfg.sweep
        step = (math.log(hi) - math.log(lo)) / (n - 1)
        grid = [math.exp(math.log(lo) + k * step) for k in range(n)]
    else:
        grid = _default_alpha_grid(cfg)
    curve = multiplicity.stable_domain_curve(cfg.model, cfg.S_in, cfg.D,
                                             grid)
    csv_path = os.path.join(out, "domain.csv")
    io.write_csv(csv_path, ["alpha", "r_bar"], curve.points)
    payload = {
        "seed": cfg.seed,
        "S_in": cfg.S_in,
        "D": cfg.D,
        "alpha_min": grid[0],
        "alpha_max": grid[-1],
        "point_count": len(curve.points),
        "crossing_alpha": curve.crossing_alpha,
        "jump": None if curve.jump is None else list(curve.jump),
    }
    json_path = os.path.join(out, "domain.json")
    io.write_json(json_path, payload)
    return [csv_path, json_path]


def _cmd_design(cfg: RunConfig, out: str, fmt: str) -> list[str]:
    report = design.buffer_design(cfg.model, cfg.S_in, cfg.D)
    payload = {
        "seed": cfg.seed,
        "S_in": cfg.S_in,
        "D": cfg.D,
        "delta_v_inf": report.delta_v_inf,
        "v2_inf": report.v2_inf,
        "d2_star": report.d2_star,
        "s_bar": report.s_bar,
        "surplus_max": report.surplus_max,
    }
    json_path = os.path.join(out, "design.json")
    io.write_json(json_path, payload)

    # sweep the feed over (upper break-even, max(S_in, 3)] and compare
    # the two enlargement requirements at each level
    window = cfg.model.break_even(cfg.D)
    assert window is not None and window.has_finite_upper
    lo, hi = window.upper, max(cfg.S_in, 3.0)
    rows = []
    for k in range(1, _COMPARISON_POINTS + 1):
        feed = lo + k * (hi - lo) / _COMPARISON_POINTS
        rows.append((feed,
                     design.min_enlargement_ratio(cfg.model, feed, cfg.D),
                     design.buffer_design(cfg.model, feed, cfg.D).v2_inf))
    csv_path = os.path.join(out, "design_comparison.csv")
    io.write_csv(csv_path, ["S_in", "delta_v_inf", "v2_inf"], rows)
    return [json_path, csv_path]


def _cmd_simulate(cfg: RunConfig, out: str, fmt: str) -> list[str]:
    if cfg.initial is None:
        raise ConfigError("simulate needs an [initial] section with state")
    if cfg.has_buffered:
        system = cfg.buffered_config()
        expected = 4
    else:
        system = cfg.single_params()
        expected = 2
    if len(cfg.initial) != expected:
        raise ConfigError(
            f"initial state has {len(cfg.initial)} components; the "
            f"configured system needs {expected}")
    traj = simulate.integrate(system, cfg.initial, cfg.integrator)
    if fmt == "json":
        path = os.path.join(out, "trajectory.json")
        io.write_json(path, io.trajectory_payload(traj, cfg.seed))
    else:
        path = os.path.join(out, "trajectory.csv")
        io.write_trajectory_csv(path, traj)
    return [path]


def _cmd_audit(cfg: RunConfig, out: str, fmt: str) -> list[str]:
    topology = cfg.audit_topology
    if topology is None:
        raise ConfigError("audit needs an [audit] section")
    flags = single.washout_audit(cfg.single_params(), topology)
    if isinstance(topology, single.Serial):
        kind = "serial"
        flow = None
        dilutions = [cfg.D / r for r in topology.volume_fractions]
    else:
        kind = "parallel"
        flow = list(topology.flow_fractions)
        dilutions = [a / r * cfg.D
                     for a, r in zip(topology.flow_fractions,
                                     topology.volume_fractions)]
    payload = {
        "seed": cfg.seed,
        "kind": kind,
        "volume_fractions": list(topology.volume_fractions),
        "flow_fractions": flow,
        "effective_dilutions": dilutions,
        "flags": flags,
        "any_flagged": any(flags),
    }
    path = os.path.join(out, "audit.json")
    io.write_json(path, payload)
    return [path]


_DISPATCH = {
    "kinetics": _cmd_kinetics,
    "classify": _cmd_classify,
    "equilibria": _cmd_equilibria,
    "domain": _cmd_domain,
    "design": _cmd_design,
    "simulate": _cmd_simulate,
    "audit": _cmd_audit,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="bufchem",
        description="Equilibrium, stability, and design analysis for "
                    "buffered chemostats.")
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("--config", required=True,
                        help="path to an INI-style run configuration")
    parser.add_argument("--out", default=".",
                        help="directory for output artifacts")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="trajectory format for simulate (default csv)")
    args = parser.parse_args(argv)

    try:
        if args.format is not None and args.command != "simulate":
            raise ValueError("--format applies to simulate only; "
                             f"{args.command} writes fixed artifacts")
        cfg = parse_config(args.config)
        io.ensure_out_dir(args.out)
        written = _DISPATCH[args.command](cfg, args.out,
                                          args.format or "csv")
    except Exception as exc:  # boundary: every failure becomes an error object
        print(json.dumps({"error": {"type": type(exc).__name__,
                                    "message": str(exc)}},
                         sort_keys=True))
        return 1
    print(json.dumps({"command": args.command, "written": written},
                     sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
