"""Time series containers and transport-efficiency metrics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from .model import StateIndex

#: Allowed mismatch between the sink diagonal and the rate integral of the feeding site.
SINK_QUADRATURE_TOL = 1e-4


@dataclass
class TimeSeries:
    """Sampled populations of the extended space.

    ``populations[k, i]`` is the diagonal entry ``i`` (StateIndex layout) at
    ``times[k]``.  ``sink_rate`` and ``sink_source`` record which site feeds
    the sink so the sink curve can be cross-checked by quadrature.
    """

    times: np.ndarray
    populations: np.ndarray
    index: StateIndex
    purity: np.ndarray
    trace_error: np.ndarray
    hermiticity_error: np.ndarray | None = None
    min_eigenvalue: np.ndarray | None = None
    states: np.ndarray | None = None
    sink_rate: float = 0.0
    sink_source: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.populations = np.asarray(self.populations, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.populations.shape != (self.times.size, self.index.dim):
            raise ValueError(f"populations shape {self.populations.shape} does not match "
                             f"{self.times.size} samples x dimension {self.index.dim}")

    def __len__(self):
        return self.times.size

    @property
    def sites(self) -> np.ndarray:
        return self.populations[:, self.index.site_slice]

    @property
    def pseudomodes(self) -> np.ndarray:
        return self.populations[:, self.index.pseudomode_slice]

    @property
    def ground(self) -> np.ndarray:
        return self.populations[:, self.index.ground]

    @property
    def sink(self) -> np.ndarray:
        return self.populations[:, self.index.sink]

    def site(self, chain: int, pos: int) -> np.ndarray:
        return self.populations[:, self.index.site(chain, pos)]

    def bookkeeping_error(self) -> np.ndarray:
        return np.abs(self.populations.sum(axis=1) - 1.0)

    def to_csv(self, path=None) -> str:
        """CSV with one row per sample; floats at 17 significant digits."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.index.labels(), "purity", "trace_err"])
        for k, t in enumerate(self.times):
            row = [t, *self.populations[k], self.purity[k], self.trace_error[k]]
            w.writerow([_fmt(x) for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _fmt(x) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class EfficiencyReport:
    p_sink_final: float
    t_half: float | None
    auc: float
    t_final: float

    def rows(self) -> list[tuple[str, str]]:
        return [("p_sink_final", _fmt(self.p_sink_final)),
                ("t_half", "" if self.t_half is None else _fmt(self.t_half)),
                ("auc", _fmt(self.auc)),
                ("t_final", _fmt(self.t_final))]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "value"])
        w.writerows(self.rows())
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


class SinkConsistencyError(RuntimeError):
    pass


def sink_quadrature(ts: TimeSeries, rule: str = "simpson") -> np.ndarray:
    """``Gamma_sink * int_0^t rho_MM dt'`` from the sampled feeding-site population.

    ``rule`` is ``"simpson"`` (cumulative composite Simpson) or ``"trapezoid"``.
    """
    if ts.sink_source is None or ts.sink_rate == 0:
        return np.zeros_like(ts.times)
    feed = ts.populations[:, ts.sink_source]
    if rule == "simpson" and feed.size >= 3:
        integral = cumulative_simpson(feed, x=ts.times, initial=0.0)
    elif rule in ("simpson", "trapezoid"):
        integral = cumulative_trapezoid(feed, x=ts.times, initial=0.0)
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    return ts.sink_rate * integral


def sink_population(ts: TimeSeries, check: bool = True) -> np.ndarray:
    """Sink diagonal of the sampled states.

    With ``check`` the curve is compared against the rate integral of the
    feeding site; the consistent prefactor is the sink rate itself.
    """
    p = ts.sink.copy()
    if check:
        dev = np.max(np.abs(p - sink_quadrature(ts) - p[0]))
        if dev > SINK_QUADRATURE_TOL:
            raise SinkConsistencyError(
                f"sink population deviates from rate quadrature by {dev:.3e} "
                f"(tolerance {SINK_QUADRATURE_TOL:g}); sample the run more densely")
    return p


def efficiency_report(ts: TimeSeries, check: bool = True) -> EfficiencyReport:
    p = sink_population(ts, check=check)
    final = float(p[-1])
    t_half = None
    if final > 0:
        k = int(np.argmax(p >= 0.5 * final))
        if k == 0:
            t_half = float(ts.times[0])
        else:
            # linear interpolation inside the crossing interval
            t0, t1, p0, p1 = ts.times[k - 1], ts.times[k], p[k - 1], p[k]
            t_half = float(t0 + (0.5 * final - p0) * (t1 - t0) / (p1 - p0))
    auc = float(cumulative_trapezoid(p, ts.times)[-1])
    return EfficiencyReport(min(max(final, 0.0), 1.0), t_half, auc, float(ts.times[-1]))


@dataclass(frozen=True)
class ComparisonTable:
    times: np.ndarray
    labels: tuple[str, ...]
    columns: np.ndarray

    @property
    def finals(self) -> dict[str, float]:
        return {lab: float(col[-1]) for lab, col in zip(self.labels, self.columns.T)}

    @property
    def ordering(self) -> list[str]:
        """Labels sorted by final sink population, lowest first."""
        fin = self.finals
        return sorted(self.labels, key=lambda lab: fin[lab])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.labels])
        for k, t in enumerate(self.times):
            w.writerow([_fmt(t), *(_fmt(x) for x in self.columns[k])])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def compare_runs(runs, labels) -> ComparisonTable:
    """Tabulate sink populations of several runs on a shared time grid."""
    runs = list(runs)
    labels = tuple(str(x) for x in labels)
    if len(runs) != len(labels) or not runs:
        raise ValueError("need one label per run and at least one run")
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be unique")
    t = runs[0].times
    for ts, lab in zip(runs, labels):
        if ts.times.shape != t.shape or not np.array_equal(ts.times, t):
            raise ValueError(f"time grid of run {lab!r} differs from run {labels[0]!r}")
    cols = np.column_stack([sink_population(ts, check=False) for ts in runs])
    return ComparisonTable(t.copy(), labels, cols)
