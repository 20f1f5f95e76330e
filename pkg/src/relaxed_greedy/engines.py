"""Greedy approximation engines: PGA, RGA, PRGA and CRGA.

All four share one loop. They differ only in how the selected signed atom
``g`` enters the approximant:

* PGA adds ``<R, g> g``.
* RGA / PRGA take ``G_1 = <f, g> g`` and for ``m >= 2`` the convex step
  ``(1 - m**-alpha) G + m**-alpha g`` (RGA is ``alpha = 1``).
* CRGA takes ``(1 - gamma) f_{m-1} + gamma g`` with ``gamma`` the exact line
  search minimiser on ``[0, 1]``.

Records are 1-based and describe the state after the m-th update.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dictionary import AtomRef, Dictionary, select_atom
from .hilbert import DimensionMismatchError, as_vector, combine, inner, norm_l1, norm_l2

CSV_FIELDS = ("m", "atom_index", "atom_sign", "step", "residual_l2", "approx_l1")


class Algorithm(str, Enum):
    PGA = "PGA"
    RGA = "RGA"
    PRGA = "PRGA"
    CRGA = "CRGA"


def _fmt(x):
    return format(x, ".17g")


@dataclass(frozen=True)
class AlgorithmConfig:
    """Which algorithm to run and for how long.

    ``alpha`` is only read by PRGA; RGA is pinned to ``alpha = 1``.
    """

    kind: Algorithm
    alpha: float = 1.0
    max_iterations: int = 100
    stop_epsilon: float = 1e-14

    def __post_init__(self):
        object.__setattr__(self, "kind", Algorithm(str(getattr(self.kind, "value", self.kind)).upper()))
        if self.kind is Algorithm.RGA:
            object.__setattr__(self, "alpha", 1.0)
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a positive finite number, got {self.alpha!r}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be a positive integer, got {self.max_iterations!r}")
        object.__setattr__(self, "max_iterations", int(self.max_iterations))
        if not self.stop_epsilon >= 0:
            raise ValueError(f"stop_epsilon must be >= 0, got {self.stop_epsilon!r}")

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "alpha": self.alpha,
            "max_iterations": self.max_iterations,
            "stop_epsilon": self.stop_epsilon,
        }


@dataclass(frozen=True)
class IterationRecord:
    """State after iteration ``m``.

    ``gap`` (``<r_{m-1}, d_m>``) and ``direction_norm`` (``||d_m||``) are only
    filled for CRGA. ``weight_sum`` and ``min_weight`` summarise the nonnegative
    weight ledger over signed atoms and are NaN for PGA.
    """

    m: int
    atom: AtomRef
    step: float
    residual_l2: float
    approx_l1: float
    residual_squared: float
    gap: float = math.nan
    direction_norm: float = math.nan
    weight_sum: float = math.nan
    min_weight: float = math.nan

    def row(self):
        return (
            str(self.m),
            str(self.atom.index),
            str(self.atom.sign),
            _fmt(self.step),
            _fmt(self.residual_l2),
            _fmt(self.approx_l1),
        )


@dataclass
class Trace:
    config: AlgorithmConfig
    label: str
    target: np.ndarray
    records: list
    final_approx: np.ndarray
    terminated_early: bool
    initial_residual_l2: float
    coefficients: np.ndarray = field(repr=False)
    weights: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.records)

    @property
    def final_residual_l2(self):
        if self.records:
            return self.records[-1].residual_l2
        return self.initial_residual_l2

    def residuals(self):
        return np.array([rec.residual_l2 for rec in self.records])

    def to_csv(self, fp=None):
        """Write the trace as CSV; returns the text when ``fp`` is None."""
        buf = io.StringIO() if fp is None else fp
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in self.records:
            writer.writerow(rec.row())
        if fp is None:
            return buf.getvalue()

    def to_dict(self):
        return {
            "label": self.label,
            "config": self.config.to_dict(),
            "terminated_early": self.terminated_early,
            "final_approx": self.final_approx.tolist(),
            "records": [
                {
                    "m": r.m,
                    "atom_index": r.atom.index,
                    "atom_sign": r.atom.sign,
                    "step": r.step,
                    "residual_l2": r.residual_l2,
                    "approx_l1": r.approx_l1,
                }
                for r in self.records
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def optimal_gamma(r, d):
    """Minimiser of ``||r - gamma d||**2`` over ``gamma in [0, 1]``.

    The unconstrained minimiser ``<r, d> / ||d||**2`` clipped to the unit
    interval; ``0`` when ``d`` is the zero vector.
    """
    rd = inner(r, d)
    dd = inner(d, d)
    if dd == 0.0:
        return 0.0
    return min(1.0, max(0.0, rd / dd))


def _check_inputs(f, dictionary, cfg, expected):
    if not isinstance(dictionary, Dictionary):
        raise TypeError(f"dictionary must be a Dictionary, got {type(dictionary).__name__}")
    if expected is not None and cfg.kind is not expected:
        raise ValueError(f"config kind {cfg.kind.value} cannot drive run_{expected.value.lower()}")
    f = as_vector(f, "f")
    if f.shape[0] != dictionary.dim:
        raise DimensionMismatchError(
            f"target has dim {f.shape[0]}, dictionary has dim {dictionary.dim}"
        )
    return f


def _run(f, dictionary, cfg, label):
    kind = cfg.kind
    n = dictionary.n_atoms
    approx = np.zeros(dictionary.dim)
    residual = f.copy()
    coefficients = np.zeros(n)
    # columns: weight on +atom, weight on -atom
    weights = None if kind is Algorithm.PGA else np.zeros((n, 2))
    records = []

    r0 = norm_l2(residual)
    residual_sq = r0 * r0
    if r0 < cfg.stop_epsilon or r0 == 0.0:
        return Trace(cfg, label, f, records, approx, True, r0, coefficients, weights)

    terminated = False
    for m in range(1, cfg.max_iterations + 1):
        atom = select_atom(dictionary, residual)
        g = dictionary.signed_atom(atom.index, atom.sign)
        col = 0 if atom.sign > 0 else 1
        gap = direction_norm = math.nan

        if kind is Algorithm.PGA:
            step = atom.correlation
            approx = combine(1.0, approx, step, g)
            coefficients[atom.index] += atom.sign * step
        elif kind is Algorithm.CRGA:
            d = combine(1.0, g, -1.0, approx)
            gap = inner(residual, d)
            direction_norm = norm_l2(d)
            step = optimal_gamma(residual, d)
            approx = combine(1.0 - step, approx, step, g)
            weights *= 1.0 - step
            weights[atom.index, col] += step
        else:
            step = 1.0 / m**cfg.alpha
            if m == 1:
                approx = combine(1.0, approx, atom.correlation, g)
                weights[atom.index, col] += atom.correlation
            else:
                approx = combine(1.0 - step, approx, step, g)
                weights *= 1.0 - step
                weights[atom.index, col] += step

        residual = combine(1.0, f, -1.0, approx)
        rl2 = norm_l2(residual)
        residual_sq = rl2 * rl2
        records.append(
            IterationRecord(
                m=m,
                atom=atom,
                step=float(step),
                residual_l2=rl2,
                approx_l1=norm_l1(approx),
                residual_squared=residual_sq,
                gap=gap,
                direction_norm=direction_norm,
                weight_sum=math.nan if weights is None else float(weights.sum()),
                min_weight=math.nan if weights is None else float(weights.min()),
            )
        )
        if rl2 < cfg.stop_epsilon:
            terminated = True
            break

    if weights is not None:
        coefficients = weights[:, 0] - weights[:, 1]
    return Trace(cfg, label, f, records, approx, terminated, r0, coefficients, weights)


def run(f, dictionary, cfg, label=""):
    """Run whichever algorithm ``cfg.kind`` names and return its :class:`Trace`."""
    f = _check_inputs(f, dictionary, cfg, None)
    return _run(f, dictionary, cfg, label)


def run_pga(f, dictionary, cfg, label=""):
    return _run(_check_inputs(f, dictionary, cfg, Algorithm.PGA), dictionary, cfg, label)


def run_rga(f, dictionary, cfg, label=""):
    return _run(_check_inputs(f, dictionary, cfg, Algorithm.RGA), dictionary, cfg, label)


def run_prga(f, dictionary, cfg, label=""):
    return _run(_check_inputs(f, dictionary, cfg, Algorithm.PRGA), dictionary, cfg, label)


def run_crga(f, dictionary, cfg, label=""):
    return _run(_check_inputs(f, dictionary, cfg, Algorithm.CRGA), dictionary, cfg, label)


def replay(trace, dictionary):
    """Rebuild the final approximant from the recorded atoms and steps."""
    approx = np.zeros(dictionary.dim)
    kind = trace.config.kind
    for rec in trace.records:
        g = dictionary.signed_atom(rec.atom.index, rec.atom.sign)
        if kind is Algorithm.PGA:
            approx = combine(1.0, approx, rec.step, g)
        elif kind is Algorithm.CRGA or rec.m >= 2:
            approx = combine(1.0 - rec.step, approx, rec.step, g)
        else:
            approx = combine(1.0, approx, rec.atom.correlation, g)
    return approx
