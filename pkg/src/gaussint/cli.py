"""Command-line front end.

Examples::

    gaussint qfi --config qfi-passive --alpha 1 --gamma 1 --xi 0.3 --r 0.3 --theta 0
    gaussint sensitivity --config aa --ntot 10 --beta 1 --phi 2.9 --theta 0
    gaussint optimize --config pp --ntot 10
    gaussint sweep --config pp --eta 1.0 --ntot 0.1:100:40:log --out pp.csv --plot pp.png
    gaussint verify --suite se-act

Exit codes: 0 success, 1 numerical failure or unwritable output, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import beam_splitter, coherent, displaced_squeezed, tensor, two_mode_squeezer
from .errors import GaussIntError
from .families import get_family
from .interferometers import (ActiveInputParams, PassiveInputParams, make_configuration, qfi_of,
                              s1_aa_closed, s1_pp_closed, s_eta_ap_closed, sensitivity_of)
from .optimizer import OptimizerSettings, SearchBox, default_workers, minimize, sweep
from .qfi import phase_qfi, qfi_active_closed, qfi_passive_closed
from .serialize import FORMATS, NGrid, RunSpec, emit
from .verify import SUITES, run_suite

COMMANDS = ("qfi", "sensitivity", "sweep", "optimize", "verify")
CONFIGS = ("pp", "pa", "ap", "aa", "qfi-passive", "qfi-active")
PHYSICAL = ("alpha", "gamma", "xi", "r")
ENERGY = ("delta", "beta_tot", "beta", "theta", "phi", "theta_xi")


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaussint", description="Gaussian interferometry toolkit")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "verify":
            p.add_argument("--suite", default="all", choices=["all", *SUITES])
            continue
        p.add_argument("--config", choices=CONFIGS)
        p.add_argument("--eta", type=float, default=1.0, help="detector quantum efficiency")
        p.add_argument("--ntot", help="total photon number, or lo:hi:count:scale for sweeps")
        for k in ENERGY + PHYSICAL:
            p.add_argument("--" + k.replace("_", "-"), dest=k, type=float)
        p.add_argument("--r2", type=float, default=10.0, help="gain of the amplifier stage")
        p.add_argument("--theta2", type=float, default=0.0, help="phase of the amplifier stage")
        p.add_argument("--seed", type=int, default=0)
        if name in ("sweep", "optimize"):
            p.add_argument("--out")
            p.add_argument("--format", choices=FORMATS)
            p.add_argument("--plot", help="also render a matplotlib figure to this path")
            p.add_argument("--grid-points", type=int, default=17)
            p.add_argument("--cold", action="store_true", help="disable warm starts between sweep points")
    return ap


def parse_args(argv=None) -> RunSpec:
    """Parse ``argv`` into a :class:`RunSpec`; exits with status 2 on bad input."""
    ap = _parser()
    # unknown flags are reported before missing ones so the message names them
    ns, extra = ap.parse_known_args(argv)
    if extra:
        ap.error(f"unrecognized arguments: {' '.join(extra)}")
    if ns.command == "verify":
        return RunSpec("verify", suite=ns.suite)
    if ns.config is None:
        ap.error(f"{ns.command}: the following arguments are required: --config")
    params = {k: getattr(ns, k) for k in ENERGY + PHYSICAL if getattr(ns, k) is not None}
    n_tot = n_grid = None
    try:
        if ns.command == "sweep":
            if ns.ntot is None:
                raise ValueError("sweep needs --ntot lo:hi:count:scale")
            n_grid = NGrid.parse(ns.ntot)
        elif ns.ntot is not None:
            n_tot = float(ns.ntot)
            if n_tot <= 0:
                raise ValueError("--ntot must be positive")
        if not 0.0 < ns.eta <= 1.0:
            raise ValueError("--eta must lie in (0, 1]")
    except ValueError as exc:
        ap.error(str(exc))
    fmt = getattr(ns, "format", None)
    out = getattr(ns, "out", None)
    if fmt is None:
        suffix = Path(out).suffix.lstrip(".").lower() if out else ""
        fmt = suffix if suffix in FORMATS else "csv"
    return RunSpec(ns.command, ns.config, params, ns.eta, n_tot, n_grid, fmt, out, ns.seed, ns.r2, ns.theta2,
                   plot=getattr(ns, "plot", None), grid_points=getattr(ns, "grid_points", 17),
                   warm_start=not getattr(ns, "cold", False))


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _box(spec: RunSpec) -> SearchBox:
    box = get_family(spec.config).box
    fixed = {k: v for k, v in spec.params.items() if k in ENERGY}
    return box.freeze(**fixed) if fixed else box


def _family(spec: RunSpec):
    fam = get_family(spec.config)
    return lambda n: fam.objective(n, eta=spec.eta, r2=spec.r2)


def _meta(spec: RunSpec) -> dict:
    fam = get_family(spec.config)
    return {"label": spec.config, "eta": spec.eta, "r2": spec.r2, "quantity": fam.quantity, "seed": spec.seed}


def _settings(spec: RunSpec) -> OptimizerSettings:
    return OptimizerSettings(grid_points=spec.grid_points, seed=spec.seed, workers=default_workers())


def _run_qfi(spec: RunSpec) -> int:
    p = spec.params
    if spec.config not in ("qfi-passive", "qfi-active"):
        if spec.n_tot is None:
            raise UsageError("--ntot is required")
        cfg = _configuration(spec)
        print(f"qfi {_fmt(qfi_of(cfg))}")
        return 0
    if any(k in p for k in PHYSICAL):
        al, ga, r, th = p.get("alpha", 0.0), p.get("gamma", 0.0), p.get("r", 0.0), p.get("theta", 0.0)
        if spec.config == "qfi-passive":
            xi = p.get("xi", 0.0)
            inp = tensor(displaced_squeezed(al, xi), displaced_squeezed(ga, r * np.exp(-1j * th)))
            probe = beam_splitter(np.pi / 4)(inp)
            closed = qfi_passive_closed(al, ga, xi, r, th)
        else:
            probe = two_mode_squeezer(r * np.exp(-1j * th))(tensor(coherent(al), coherent(ga)))
            closed = qfi_active_closed(al, ga, r, th)
        h = phase_qfi(probe)
        n = probe.mean_photon_number()
    else:
        if spec.n_tot is None:
            raise UsageError("give --ntot with energy parameters, or --alpha/--gamma/--xi/--r")
        n = spec.n_tot
        closed = get_family(spec.config).objective(n)(p)
        label = "pp" if spec.config == "qfi-passive" else "ap"
        h = qfi_of(make_configuration(label, _params(label, n, p)))
    print(f"n_tot {_fmt(n)}")
    print(f"qfi {_fmt(h)}")
    print(f"closed_form {_fmt(closed)}")
    print(f"cramer_rao_std {_fmt(1.0 / math.sqrt(h))}" if h > 0 else "cramer_rao_std inf")
    return 0


def _params(label: str, n: float, p: dict):
    if label[0] == "p":
        p = dict(p)
        if label == "pa":
            p["beta_tot"] = p.get("beta", 0.0)
        return PassiveInputParams(n, **{k: v for k, v in p.items() if k in ENERGY})
    return ActiveInputParams(n, **{k: v for k, v in p.items() if k in ("delta", "beta", "theta", "phi")})


def _configuration(spec: RunSpec):
    return make_configuration(spec.config, _params(spec.config, spec.n_tot, spec.params), spec.eta,
                              r2=spec.r2, theta2=spec.theta2)


def _closed_form(spec: RunSpec, cfg) -> float | None:
    inp, label = cfg.input, spec.config
    try:
        if label == "pp" and spec.eta == 1.0 and inp.delta == 0.0 and inp.theta == 0.0 and inp.phi == np.pi / 2:
            return s1_pp_closed(inp.n_tot, inp.beta_tot, inp.beta)
        if label == "ap" and inp.delta == 0.5 and inp.theta == np.pi and inp.phi == np.pi / 2:
            return s_eta_ap_closed(inp.n_tot, inp.beta, spec.eta)
        if label == "aa" and spec.eta == 1.0 and inp.beta == 1.0:
            return s1_aa_closed(inp.n_tot, inp.theta + inp.phi)
    except (GaussIntError, ValueError):
        return None
    return None


def _run_sensitivity(spec: RunSpec) -> int:
    if spec.config not in ("pp", "pa", "ap", "aa"):
        raise UsageError("sensitivity needs --config pp|pa|ap|aa")
    if spec.n_tot is None:
        raise UsageError("--ntot is required")
    cfg = _configuration(spec)
    s = sensitivity_of(cfg)
    print(f"sensitivity {_fmt(s)}")
    print(f"ratio_to_heisenberg {_fmt(s * spec.n_tot)}")
    closed = _closed_form(spec, cfg)
    if closed is not None:
        print(f"closed_form {_fmt(closed)}")
    return 0


def _write(spec: RunSpec, result) -> int:
    data = emit(result, spec.format, spec)
    if spec.out:
        try:
            Path(spec.out).write_bytes(data)
        except OSError as exc:
            print(f"error: cannot write {spec.out}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(data.decode("utf-8"))
    if spec.plot:
        from .plotting import plot_sweep
        try:
            plot_sweep(result, spec.plot, title=spec.config)
        except OSError as exc:
            print(f"error: cannot write {spec.plot}: {exc}", file=sys.stderr)
            return 1
    return 0


def _run_sweep(spec: RunSpec, grid) -> int:
    fam = get_family(spec.config)
    result = sweep(_family(spec), grid, _box(spec), _settings(spec), warm_start=spec.warm_start,
                   maximize=fam.maximize, meta=_meta(spec))
    status = _write(spec, result)
    failed = [p for p in result.points if p.error]
    for p in failed:
        print(f"error: n_tot={p.n_tot!r}: {p.error}", file=sys.stderr)
    return status or (1 if failed else 0)


def _run_optimize(spec: RunSpec) -> int:
    if spec.n_tot is None:
        raise UsageError("--ntot is required")
    if spec.out or spec.plot:
        return _run_sweep(spec, [spec.n_tot])
    fam = get_family(spec.config)
    obj = fam.objective(spec.n_tot, eta=spec.eta, r2=spec.r2)
    res = minimize((lambda p: -obj(p)) if fam.maximize else obj, _box(spec), _settings(spec))
    value = -res.value if fam.maximize else res.value
    print(f"{fam.quantity} {_fmt(value)}")
    for k in sorted(res.params):
        print(f"{k} {_fmt(res.params[k])}")
    return 0


def _run_verify(spec: RunSpec) -> int:
    checks = run_suite(spec.suite)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.suite:<12} {c.name:<{width}}  "
              f"residual {c.residual:.3e}  tol {c.tol:.0e}")
    return 0 if all(c.passed for c in checks) else 1


def run(spec: RunSpec) -> int:
    try:
        if spec.command == "verify":
            return _run_verify(spec)
        if spec.command == "qfi":
            return _run_qfi(spec)
        if spec.command == "sensitivity":
            return _run_sensitivity(spec)
        if spec.command == "optimize":
            return _run_optimize(spec)
        if spec.command == "sweep":
            return _run_sweep(spec, spec.n_grid.values())
    except UsageError as exc:
        print(f"gaussint {spec.command}: error: {exc}", file=sys.stderr)
        return 2
    except (GaussIntError, ValueError, TypeError) as exc:
        where = f" at n_tot={spec.n_tot!r}" if spec.n_tot is not None else ""
        print(f"error{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(spec.command)


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    raise SystemExit(main())
