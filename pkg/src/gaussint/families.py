"""Objective families for the optimizer: one per configuration label.

Each family maps ``n_tot`` to an objective over a parameter dictionary and
comes with a default search box.  Sensitivity families are minimized and
QFI families maximized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InfeasibleParams
from .interferometers import (ActiveInputParams, PassiveInputParams, make_configuration,
                              recover_physical_params, sensitivity_of)
from .optimizer import SearchBox
from .qfi import qfi_active_closed, qfi_passive_closed

TWO_PI = 2.0 * np.pi
PASSIVE_NAMES = ("delta", "beta_tot", "beta", "theta", "phi", "theta_xi")
ACTIVE_NAMES = ("delta", "beta", "theta", "phi")


@dataclass(frozen=True)
class Family:
    label: str
    objective: Callable[..., Callable[[dict], float]]
    box: SearchBox
    maximize: bool = False
    quantity: str = "sensitivity"


def _passive(n, p):
    return PassiveInputParams(n, **{k: p[k] for k in PASSIVE_NAMES if k in p})


def _active(n, p):
    return ActiveInputParams(n, **{k: p[k] for k in ACTIVE_NAMES if k in p})


def pp_objective(n_tot, eta=1.0, **_):
    def f(p):
        return sensitivity_of(make_configuration("pp", _passive(n_tot, p), eta))
    return f


def pa_objective(n_tot, eta=1.0, r2=10.0, **_):
    def f(p):
        # squeezing only in the coherent arm
        p = {**p, "beta_tot": p["beta"]}
        return sensitivity_of(make_configuration("pa", _passive(n_tot, p), eta, r2=r2))
    return f


def ap_objective(n_tot, eta=1.0, **_):
    def f(p):
        return sensitivity_of(make_configuration("ap", _active(n_tot, p), eta))
    return f


def aa_objective(n_tot, eta=1.0, r2=10.0, **_):
    def f(p):
        return sensitivity_of(make_configuration("aa", _active(n_tot, p), eta, r2=r2))
    return f


def qfi_passive_objective(n_tot, **_):
    def f(p):
        phys = recover_physical_params(_passive(n_tot, p))
        return qfi_passive_closed(phys.alpha, phys.gamma, phys.xi, phys.r, phys.theta)
    return f


def qfi_active_objective(n_tot, **_):
    def f(p):
        phys = recover_physical_params(_active(n_tot, p))
        return qfi_active_closed(phys.alpha, phys.gamma, phys.r, phys.theta)
    return f


FAMILIES = {
    "pp": Family("pp", pp_objective,
                 SearchBox({"beta_tot": (0.0, 1.0), "beta": (0.0, 1.0), "delta": (0.0, 1.0)},
                           {"theta": 0.0, "phi": np.pi / 2})),
    "pa": Family("pa", pa_objective,
                 SearchBox({"phi": (0.0, TWO_PI), "beta": (0.0, 1.0), "theta_xi": (0.0, TWO_PI)},
                           {"delta": 1.0})),
    "ap": Family("ap", ap_objective,
                 SearchBox({"beta": (1e-8, 1.0 - 1e-9)}, {"delta": 0.5, "theta": np.pi, "phi": np.pi / 2},
                           log=frozenset({"beta"}))),
    "aa": Family("aa", aa_objective,
                 SearchBox({"phi": (0.0, TWO_PI), "beta": (0.0, 1.0)}, {"delta": 0.5, "theta": 0.0})),
    "qfi-passive": Family("qfi-passive", qfi_passive_objective,
                          SearchBox({"delta": (0.0, 1.0), "beta_tot": (0.0, 1.0), "beta": (0.0, 1.0),
                                     "theta": (0.0, TWO_PI)}),
                          maximize=True, quantity="qfi"),
    "qfi-active": Family("qfi-active", qfi_active_objective,
                         # balanced coherent inputs sit on a ridge of width ~1/N
                         SearchBox({"delta": (0.0, 1.0), "beta": (0.0, 1.0), "theta": (0.0, TWO_PI)},
                                   stretch={"delta": (0.5, 1e-6)}),
                         maximize=True, quantity="qfi"),
}


def get_family(label: str) -> Family:
    try:
        return FAMILIES[label]
    except KeyError:
        raise ValueError(f"unknown configuration {label!r}; choose from {sorted(FAMILIES)}") from None


def feasible(label: str, n_tot: float, params: dict) -> bool:
    try:
        (_active if get_family(label).label in ("ap", "aa", "qfi-active") else _passive)(n_tot, params)
    except InfeasibleParams:
        return False
    return True
