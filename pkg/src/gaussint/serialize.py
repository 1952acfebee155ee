"""Run specifications and CSV / JSON / SVG output of sweep results.

Floats are written with 17 significant digits so that a double survives
the round trip.  Every file embeds the run specification: ``#`` comment
lines in CSV, the ``meta`` object in JSON and ``<desc>`` in SVG.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple
from xml.sax.saxutils import escape

import numpy as np

from .optimizer import SweepResult

FORMATS = ("csv", "json", "svg")


class NGrid(NamedTuple):
    lo: float
    hi: float
    count: int
    scale: str = "log"

    @classmethod
    def parse(cls, text: str) -> "NGrid":
        """Parse ``lo:hi:count:scale`` (scale ``log`` or ``linear``, default ``log``)."""
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"expected lo:hi:count[:scale], got {text!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        scale = parts[3] if len(parts) == 4 else "log"
        if scale not in ("log", "linear"):
            raise ValueError(f"scale must be 'log' or 'linear', got {scale!r}")
        if not 0 < lo <= hi or count < 1:
            raise ValueError(f"need 0 < lo <= hi and count >= 1, got {text!r}")
        return cls(lo, hi, count, scale)

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        if self.scale == "log":
            return np.logspace(np.log10(self.lo), np.log10(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def __str__(self):
        return f"{self.lo!r}:{self.hi!r}:{self.count}:{self.scale}"


@dataclass(frozen=True)
class RunSpec:
    command: str
    config: str | None = None
    params: dict = field(default_factory=dict)
    eta: float = 1.0
    n_tot: float | None = None
    n_grid: NGrid | None = None
    format: str = "csv"
    out: str | None = None
    seed: int = 0
    r2: float = 10.0
    theta2: float = 0.0
    suite: str = "all"
    plot: str | None = None
    grid_points: int = 17
    warm_start: bool = True

    def as_dict(self) -> dict:
        d = asdict(self)
        d["n_grid"] = str(self.n_grid) if self.n_grid is not None else None
        return d


def _num(x: float) -> str:
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return format(float(x), ".17g")


def _spec_json(spec: RunSpec | None) -> str:
    return json.dumps(spec.as_dict() if spec else None, sort_keys=True, separators=(",", ":"))


def param_names(result: SweepResult) -> list[str]:
    return sorted({k for p in result.points for k in p.params})


def to_csv(result: SweepResult, spec: RunSpec | None = None) -> bytes:
    names = param_names(result)
    lines = ["# gaussint sweep", f"# runspec: {_spec_json(spec)}",
             f"# meta: {json.dumps(result.meta, sort_keys=True, separators=(',', ':'))}"]
    lines += [f"# error: n_tot={_num(p.n_tot)}: {p.error}" for p in result.points if p.error]
    lines.append(",".join(["n_tot", "value", *names]))
    for p in result.points:
        lines.append(",".join([_num(p.n_tot), _num(p.value), *(_num(p.params[k]) if k in p.params else ""
                                                              for k in names)]))
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_csv(data: bytes) -> tuple[list[str], np.ndarray]:
    """Header and numeric rows of a CSV written by :func:`to_csv` (blank cells become nan)."""
    rows = [ln for ln in data.decode("utf-8").splitlines() if ln and not ln.startswith("#")]
    header = rows[0].split(",")
    values = [[float(c) if c else math.nan for c in r.split(",")] for r in rows[1:]]
    return header, np.array(values, dtype=float).reshape(len(values), len(header))


def to_json(result: SweepResult, spec: RunSpec | None = None) -> bytes:
    data = result.as_dict()
    data["meta"] = {**data["meta"], "runspec": spec.as_dict() if spec else None}
    return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode("utf-8")


def from_json(data: bytes) -> SweepResult:
    d = json.loads(data)
    meta = dict(d["meta"])
    meta.pop("runspec", None)
    return SweepResult.from_dict({"meta": meta, "points": d["points"]})


def reference_curves(n: np.ndarray, quantity: str) -> dict[str, np.ndarray]:
    """Shot-noise and Heisenberg scalings for sensitivities (``N^-1/2``, ``N^-1``) or QFIs (``N``, ``N^2``)."""
    if quantity == "qfi":
        return {"shot noise": n, "Heisenberg": n ** 2}
    return {"shot noise": 1.0 / np.sqrt(n), "Heisenberg": 1.0 / n}


def to_svg(result: SweepResult, spec: RunSpec | None = None, width: int = 640, height: int = 440) -> bytes:
    """Log-log chart: one polyline for the data and one per reference scaling."""
    pts = [(p.n_tot, p.value) for p in result.points if math.isfinite(p.value) and p.value > 0]
    n = np.array([x for x, _ in pts]) if pts else np.array([1.0, 10.0])
    v = np.array([y for _, y in pts]) if pts else np.array([])
    refs = reference_curves(n, result.meta.get("quantity", "sensitivity"))
    ys = np.concatenate([v, *refs.values()])
    lx0, lx1 = np.log10(n.min()), np.log10(n.max())
    ly0, ly1 = np.log10(ys.min()), np.log10(ys.max())
    if lx1 == lx0:
        lx0, lx1 = lx0 - 0.5, lx1 + 0.5
    if ly1 == ly0:
        ly0, ly1 = ly0 - 0.5, ly1 + 0.5
    left, right, top, bottom = 70, 20, 20, 50
    pw, ph = width - left - right, height - top - bottom

    def xy(x, y):
        return (left + (np.log10(x) - lx0) / (lx1 - lx0) * pw,
                top + (ly1 - np.log10(y)) / (ly1 - ly0) * ph)

    def polyline(xs, ys_, style):
        coords = " ".join("{:.3f},{:.3f}".format(*xy(a, b)) for a, b in zip(xs, ys_))
        return f'<polyline fill="none" {style} points="{coords}"/>'

    label = escape(str(result.meta.get("label", "")))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f"<desc>{escape(_spec_json(spec))}</desc>",
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for d in range(int(np.ceil(lx0)), int(np.floor(lx1)) + 1):
        x, _ = xy(10.0 ** d, 10.0 ** ly1)
        out.append(f'<text x="{x:.3f}" y="{height - bottom + 18}" font-size="12" '
                   f'text-anchor="middle">1e{d}</text>')
    for d in range(int(np.ceil(ly0)), int(np.floor(ly1)) + 1):
        _, y = xy(10.0 ** lx0, 10.0 ** d)
        out.append(f'<text x="{left - 6}" y="{y + 4:.3f}" font-size="12" text-anchor="end">1e{d}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" font-size="13" text-anchor="middle">N_tot</text>')
    if len(v):
        out.append(polyline(n, v, 'stroke="#1f4e9c" stroke-width="2"'))
    else:
        out.append('<polyline fill="none" stroke="#1f4e9c" points=""/>')
    styles = {"shot noise": 'stroke="#c0392b" stroke-dasharray="8,5"',
              "Heisenberg": 'stroke="#1e8449" stroke-dasharray="2,4"'}
    for i, (name, ref) in enumerate(refs.items()):
        out.append(polyline(n, ref, styles[name]))
        out.append(f'<text x="{left + pw - 8}" y="{top + 18 + 16 * i}" font-size="12" '
                   f'text-anchor="end">{name}</text>')
    if label:
        out.append(f'<text x="{left + 8}" y="{top + 18}" font-size="12">{label}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def emit(result: SweepResult, fmt: str = "csv", spec: RunSpec | None = None) -> bytes:
    if fmt == "csv":
        return to_csv(result, spec)
    if fmt == "json":
        return to_json(result, spec)
    if fmt == "svg":
        return to_svg(result, spec)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
