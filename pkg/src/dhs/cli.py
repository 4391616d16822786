"""Command-line driver: synthetic data, sharpening, bounds, verification suites
and the Hardy differentiation demo.

Every command writes its artifacts into ``--out``. The exit status is 0
when all checks of the command pass, 1 when a check fails and 2 on invalid
input; failures also leave a ``failure.json`` record.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hardy import diff_experiment, hardy_truth
from .index_functions import Exp, PowerLaw
from .io import read_signal, write_report, write_signal
from .peaks import Peak, PeakModel, error_dominance_check, synth_spectrum
from .sharpen import (
    METHODS,
    SIGMA_CONVENTIONS,
    SharpenConfig,
    SharpenError,
    apriori_bound,
    error_bound,
    sharpen,
    sigma_of_beta,
)
from .verify import run_all

log = logging.getLogger("dhs")

COMMANDS = ("synth", "sharpen", "bounds", "verify", "diff-demo")

DEFAULT_GRID = {"n": 4096, "dx": 0.01, "x0": -20.48}
DEFAULT_PEAKS = (
    {"center": -1.0, "amplitude": 1.0, "width": 0.3},
    {"center": 1.0, "amplitude": 0.7, "width": 0.4},
)
DEFAULT_HARDY = {"R": 2.0, "K": 256, "epsilons": [1e-2, 1e-3, 1e-4], "m": 2.0, "seeds": 10}

_TOP_KEYS = {"model", "gamma", "beta", "epsilon", "method", "sigma_convention",
             "grid", "seed", "peaks", "hardy"}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class Grid:
    n: int = 4096
    dx: float = 0.01
    x0: float = -20.48


@dataclass(frozen=True)
class RunConfig:
    sharpen: SharpenConfig
    grid: Grid = Grid()
    peaks: tuple = ()
    seed: int = 0
    hardy: dict = field(default_factory=lambda: dict(DEFAULT_HARDY))


def _number(raw, key, kind=float):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {raw!r}")
    if kind is int:
        if isinstance(raw, float) and not raw.is_integer():
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
        return int(raw)
    if not math.isfinite(raw):
        raise ConfigError(f"{key}: must be finite")
    return float(raw)


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a config mapping and fill in defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    unknown = sorted(set(raw) - _TOP_KEYS)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown config key")
    for key in ("model", "gamma", "beta", "epsilon"):
        if key not in raw:
            raise ConfigError(f"{key}: required key missing")
    try:
        model = PeakModel(raw["model"])
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None
    gamma = _number(raw["gamma"], "gamma")
    beta = _number(raw["beta"], "beta")
    epsilon = _number(raw["epsilon"], "epsilon")
    if not gamma > 0:
        raise ConfigError("gamma: must be positive")
    if not 0 < beta < gamma:
        raise ConfigError(f"beta: must satisfy 0 < beta < gamma, got beta={beta}, gamma={gamma}")
    if not epsilon > 0:
        raise ConfigError("epsilon: must be positive")
    method = raw.get("method", "tikhonov")
    if method not in METHODS:
        raise ConfigError(f"method: must be one of {', '.join(METHODS)}, got {method!r}")
    conv = raw.get("sigma_convention", "lambda_domain")
    if conv not in SIGMA_CONVENTIONS:
        raise ConfigError(
            f"sigma_convention: must be one of {', '.join(SIGMA_CONVENTIONS)}, got {conv!r}")

    g = raw.get("grid", {})
    if not isinstance(g, dict):
        raise ConfigError("grid: expected an object")
    bad = sorted(set(g) - set(DEFAULT_GRID))
    if bad:
        raise ConfigError(f"grid.{bad[0]}: unknown grid key")
    n = _number(g.get("n", DEFAULT_GRID["n"]), "grid.n", int)
    dx = _number(g.get("dx", DEFAULT_GRID["dx"]), "grid.dx")
    x0 = _number(g.get("x0", DEFAULT_GRID["x0"]), "grid.x0")
    if n < 2 or n % 2:
        raise ConfigError(f"grid.n: must be even and >= 2, got {n}")
    if not dx > 0:
        raise ConfigError("grid.dx: must be positive")

    peaks = []
    for i, p in enumerate(raw.get("peaks", DEFAULT_PEAKS)):
        where = f"peaks[{i}]"
        if not isinstance(p, dict) or set(p) != {"center", "amplitude", "width"}:
            raise ConfigError(f"{where}: expected keys center, amplitude, width")
        try:
            peaks.append(Peak(*(_number(p[k], f"{where}.{k}")
                                for k in ("center", "amplitude", "width"))))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    if not peaks:
        raise ConfigError("peaks: need at least one peak")

    seed = _number(raw.get("seed", 0), "seed", int)
    hardy = dict(DEFAULT_HARDY)
    h = raw.get("hardy", {})
    if not isinstance(h, dict):
        raise ConfigError("hardy: expected an object")
    bad = sorted(set(h) - set(DEFAULT_HARDY))
    if bad:
        raise ConfigError(f"hardy.{bad[0]}: unknown key")
    hardy.update(h)
    hardy["R"] = _number(hardy["R"], "hardy.R")
    hardy["K"] = _number(hardy["K"], "hardy.K", int)
    hardy["m"] = _number(hardy["m"], "hardy.m")
    hardy["seeds"] = _number(hardy["seeds"], "hardy.seeds", int)
    if not hardy["R"] > 1:
        raise ConfigError("hardy.R: must be > 1")
    if hardy["K"] < 1 or hardy["seeds"] < 1:
        raise ConfigError("hardy.K and hardy.seeds: must be >= 1")
    if not hardy["m"] > 1:
        raise ConfigError("hardy.m: must be > 1")
    eps = hardy["epsilons"]
    if not isinstance(eps, list) or not eps:
        raise ConfigError("hardy.epsilons: expected a nonempty list")
    hardy["epsilons"] = [_number(e, f"hardy.epsilons[{i}]") for i, e in enumerate(eps)]
    if not all(e > 0 for e in hardy["epsilons"]):
        raise ConfigError("hardy.epsilons: values must be positive")

    cfg = SharpenConfig(model, gamma, beta, epsilon, method, conv)
    return RunConfig(cfg, Grid(n, dx, x0), tuple(peaks), seed, hardy)


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror or exc})") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(raw)


# --------------------------------------------------------------------------
# commands; each returns (ok, summary dict)

def _synth(rc: RunConfig):
    c = rc.sharpen
    return synth_spectrum(rc.peaks, c.model, c.gamma, c.epsilon, rc.seed,
                          n=rc.grid.n, dx=rc.grid.dx, x0=rc.grid.x0)


def cmd_synth(rc: RunConfig, out: Path, args):
    s = _synth(rc)
    write_signal(s.f, out / "f.csv")
    write_signal(s.g, out / "g.csv")
    write_signal(s.g_eps, out / "g_eps.csv")
    return True, {"written": ["f.csv", "g.csv", "g_eps.csv"]}


def cmd_sharpen(rc: RunConfig, out: Path, args):
    truth = _synth(rc)
    if args.input is not None:
        g_eps = read_signal(args.input)
        same = (g_eps.n == truth.g_eps.n and g_eps.dx == truth.g_eps.dx
                and g_eps.x0 == truth.g_eps.x0
                and np.array_equal(g_eps.samples, truth.g_eps.samples))
        if not same:
            log.info("input differs from the configured synthetic data; residuals are bounded")
            truth = None
    else:
        g_eps = truth.g_eps
    rep = sharpen(g_eps, rc.sharpen, truth=truth)
    write_signal(rep.z_eps, out / "z_eps.csv")
    d = rep.to_dict()
    d.update(model=rc.sharpen.model.value, gamma=rc.sharpen.gamma, beta=rc.sharpen.beta,
             sigma_convention=rc.sharpen.sigma_convention, seed=rc.seed, output="z_eps.csv")
    checks = {"converged": rep.converged,
              "discrepancy_in_bracket": 0.99 * rep.epsilon <= rep.discrepancy <= 1.01 * rep.epsilon}
    if rep.empirical_error is not None:
        checks["error_within_bound"] = rep.empirical_error <= rep.bound
    if rep.morozov_bound is not None:
        checks["error_within_morozov_bound"] = rep.empirical_error <= rep.morozov_bound * (1 + 1e-9)
    if rep.degenerate:
        checks["discrepancy_in_bracket"] = True
    d["checks"] = checks
    ok = all(checks.values())
    d["ok"] = ok
    write_report(d, out / "report.json")
    return ok, {"empirical_error": rep.empirical_error, "bound": rep.bound}


def _bounds_report(rc: RunConfig | None):
    sigmas = [i / 10 for i in range(11)]
    r_norm, r_s = 1e-3, 1.0
    eb = {}
    monotone = True
    for m in PeakModel:
        vals = [error_bound(m, s, r_norm, r_s) for s in sigmas]
        monotone &= all(b >= a for a, b in zip(vals, vals[1:]))
        eb[m.value] = {"sigma": sigmas, "bound": vals}

    ap = []
    worst = 0.0
    for C in (0.5, 1.0, 2.0):
        for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
            if not eps < C:
                continue
            v = apriori_bound(PowerLaw(1.0), Exp(), C, eps)
            ref = 2 * eps * math.sqrt(2 * math.log(C / eps))
            row = {"C": C, "epsilon": eps, "exp": v, "exp_closed_form": ref}
            worst = max(worst, abs(v - ref) / ref)
            for m in (2.0, 3.0):
                v = apriori_bound(PowerLaw(1.0), PowerLaw(m), C, eps)
                ref = 2 * C ** (1 / m) * eps ** (1 - 1 / m)
                row[f"power_{m:g}"] = v
                row[f"power_{m:g}_closed_form"] = ref
                worst = max(worst, abs(v - ref) / ref)
            ap.append(row)
    checks = {"error_bound_monotone_in_sigma": monotone,
              "apriori_matches_closed_forms": worst <= 1e-12}
    rep = {"error_bound": {"r_norm": r_norm, "r_s_norm": r_s, "sweeps": eb},
           "apriori_bound": {"rows": ap, "max_relative_deviation": worst}}
    if rc is not None:
        c = rc.sharpen
        omega = np.linspace(0.0, 50.0, 2001)
        conv = {}
        for name in SIGMA_CONVENTIONS:
            sigma = sigma_of_beta(c.model, c.beta, c.gamma, name)
            entry = {"sigma": sigma}
            if 0 < sigma < 1:
                dom = error_dominance_check(c.model, c.gamma, c.beta, sigma, omega)
                entry.update(dominance_ok=dom.ok, dominance_min_margin=dom.value)
            conv[name] = entry
        rep["config"] = {"model": c.model.value, "gamma": c.gamma, "beta": c.beta,
                         "conventions": conv}
        selected = conv[c.sigma_convention]
        checks["error_dominance_selected_convention"] = selected.get("dominance_ok", True)
    rep["checks"] = checks
    rep["ok"] = all(checks.values())
    return rep


def cmd_bounds(rc, out: Path, args):
    rep = _bounds_report(rc)
    write_report(rep, out / "bounds.json")
    return rep["ok"], {"checks": rep["checks"]}


def cmd_verify(rc, out: Path, args):
    seed = args.seed if args.seed is not None else (rc.seed if rc else 0)
    results = run_all(seed, args.trials)
    ok = all(r.ok for r in results)
    write_report({"seed": seed, "trials": args.trials, "ok": ok,
                  "suites": [r.to_dict() for r in results]}, out / "verify.json")
    return ok, {"failed": [r.inequality for r in results if not r.ok]}


def cmd_diff_demo(rc, out: Path, args):
    h = rc.hardy if rc else dict(DEFAULT_HARDY)
    seed0 = args.seed if args.seed is not None else (rc.seed if rc else 0)
    R, K, m = float(h["R"]), int(h["K"]), float(h["m"])
    g = hardy_truth(R, K, seed0)
    trials = []
    ok = True
    for eps in h["epsilons"]:
        for j in range(int(h["seeds"])):
            r = diff_experiment(g, R, float(eps), seed0 + 1 + j, m=m).to_dict()
            if r["vhs_bound"] is not None:
                r["within_vhs_bound"] = r["empirical_error"] <= r["vhs_bound"]
                ok &= r["within_vhs_bound"]
            trials.append(r)
    write_report({"R": R, "K": K, "m": m, "seed": seed0, "ok": ok, "trials": trials},
                 out / "diff_demo.json")
    return ok, {"trials": len(trials)}


_DISPATCH = {"synth": cmd_synth, "sharpen": cmd_sharpen, "bounds": cmd_bounds,
             "verify": cmd_verify, "diff-demo": cmd_diff_demo}
_NEEDS_CONFIG = {"synth", "sharpen"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dhs", description=__doc__.splitlines()[0])
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--config", type=Path, help="JSON config file")
    p.add_argument("--input", type=Path, help="CSV signal (x,y) for sharpen")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--trials", type=int, default=100, help="trials per verify suite")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def _fail(out: Path | None, command: str, kind: str, message: str, code: int) -> int:
    record = {"command": command, "error": kind, "message": message}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    if out is not None and out.is_dir():
        try:
            write_report(record, out / "failure.json")
        except OSError:
            pass
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.ERROR if args.quiet else (logging.DEBUG if args.verbose > 1
                                              else logging.INFO if args.verbose else logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    out = args.out
    try:
        if args.trials < 1:
            raise ConfigError("--trials: must be >= 1")
        if args.command in _NEEDS_CONFIG and args.config is None:
            raise ConfigError(f"--config: required for {args.command}")
        if args.input is not None and not args.input.is_file():
            raise ConfigError(f"--input: {args.input} is not a file")
        if out.exists() and not out.is_dir():
            raise ConfigError(f"--out: {out} is not a directory")
        rc = parse_config(args.config) if args.config is not None else None
        if rc is not None and args.seed is not None:
            rc = RunConfig(rc.sharpen, rc.grid, rc.peaks, args.seed, rc.hardy)
        out.mkdir(parents=True, exist_ok=True)
    except (ConfigError, OSError) as exc:
        return _fail(None, args.command, "invalid_input", str(exc), 2)

    try:
        ok, summary = _DISPATCH[args.command](rc, out, args)
    except (ConfigError, ValueError) as exc:
        return _fail(out, args.command, "invalid_input", str(exc), 2)
    except SharpenError as exc:
        return _fail(out, args.command, "sharpen_failed", str(exc), 1)
    except OSError as exc:
        return _fail(out, args.command, "io_error", str(exc), 2)

    log.info("%s: %s", args.command, summary)
    if not ok:
        return _fail(out, args.command, "check_failed", json.dumps(summary, default=str), 1)
    if not args.quiet:
        print(f"{args.command}: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
