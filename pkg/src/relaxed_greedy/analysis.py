"""Convergence bounds, the infinite product with certified tails, and
the instance generators and oracles used to check them.
"""

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dictionary import Dictionary, build_a1_element, canonical_dictionary
from .engines import Algorithm
from .hilbert import as_vector

BOUND_TOL = 1e-12
ENUMERATION_LIMIT = 10**6


def rga_bound(m):
    """``2 / sqrt(m)``: error bound for the relaxed greedy algorithm."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return 2.0 / math.sqrt(m)


def prga_bound(m, alpha):
    """``2 / m**(alpha/2)``, the square root of the squared-error bound ``4 / m**alpha``.

    Only valid for ``0 < alpha <= 1``. For ``alpha > 1`` no such bound exists:
    the power-relaxed iteration can stall at a positive error.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if alpha > 1:
        raise ValueError(
            f"no convergence-rate bound for alpha={alpha} > 1: PRGA can fail to "
            "converge (see counterexample_instance / check_divergence_floor)"
        )
    return 2.0 / m ** (alpha / 2.0)


def crga_bound(m):
    """``2 / sqrt(m + 4)``: error bound for CRGA, valid from ``m = 0``."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return 2.0 / math.sqrt(m + 4)


def _check_alpha_gt_one(alpha):
    if not alpha > 1:
        raise ValueError(f"alpha must exceed 1 (the product vanishes otherwise), got {alpha}")


def _log_factors(alpha, n_terms):
    k = np.arange(2, n_terms + 1, dtype=np.float64)
    return np.log1p(-(k ** -alpha))


def partial_product(alpha, n_terms):
    """``prod_{k=2}^{N} (1 - k**-alpha)``, accumulated in log space."""
    _check_alpha_gt_one(alpha)
    if n_terms < 2:
        raise ValueError(f"n_terms must be >= 2, got {n_terms}")
    return math.exp(math.fsum(_log_factors(alpha, int(n_terms))))


@dataclass(frozen=True)
class ProductBound:
    """Certified enclosure ``lower <= P_alpha <= upper`` of the infinite product."""

    alpha: float
    n_terms: int
    partial: float
    lower: float
    upper: float

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, value):
        return self.lower <= value <= self.upper


def tail_sum_bound(alpha, n_terms):
    """Integral-comparison bound ``sum_{k>N} k**-alpha <= N**(1-alpha) / (alpha-1)``."""
    _check_alpha_gt_one(alpha)
    return n_terms ** (1.0 - alpha) / (alpha - 1.0)


def product_with_tail(alpha, n_terms):
    """Enclose the infinite product using ``N`` explicit factors.

    The tail factors are all below one, so the partial product is an upper
    bound. Since ``log(1 - x) >= -2x`` for ``x <= 1/2``, the tail contributes
    at least ``exp(-2 T)`` with ``T`` the tail-sum bound.
    """
    partial = partial_product(alpha, n_terms)
    lower = partial * math.exp(-2.0 * tail_sum_bound(alpha, n_terms))
    return ProductBound(float(alpha), int(n_terms), partial, lower, partial)


def counterexample_instance(b):
    """The planar instance ``f = (1-b) e1 + b e2`` over ``{+-e1, +-e2}``.

    Returns ``(dictionary, element)``; ``element.vector`` is ``f``.
    """
    if not 0 < b < 0.5:
        raise ValueError(f"b must lie in the open interval (0, 1/2), got {b}")
    d = canonical_dictionary(2)
    return d, build_a1_element(d, [(0, 1, 1.0 - b), (1, 1, b)], tau=1.0)


def counterexample_floor(b, alpha, m):
    """Per-iteration error floor ``b * prod_{k=2}^m (1 - k**-alpha) / sqrt(2)``."""
    if not 0 < b < 0.5:
        raise ValueError(f"b must lie in (0, 1/2), got {b}")
    _check_alpha_gt_one(alpha)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    prod = 1.0 if m == 1 else partial_product(alpha, m)
    return b * prod / math.sqrt(2.0)


def counterexample_limit_floor(b, alpha, n_terms=10**4):
    """Certified positive lower bound on ``inf_m ||f - T_m||``."""
    if not 0 < b < 0.5:
        raise ValueError(f"b must lie in (0, 1/2), got {b}")
    return b * product_with_tail(alpha, n_terms).lower / math.sqrt(2.0)


def _floor_sequence(b, alpha, n):
    # floors for m = 1..n via a running log-sum
    logs = np.concatenate(([0.0], np.cumsum(_log_factors(alpha, n)))) if n >= 2 else np.zeros(1)
    return b * np.exp(logs[:n]) / math.sqrt(2.0)


@dataclass
class BoundReport:
    """Per-iteration comparison of observed errors against a bound.

    ``kind`` is ``"upper"`` (observed must not exceed the bound) or
    ``"floor"`` (observed must not fall below it).
    """

    name: str
    kind: str
    rows: list = field(default_factory=list)

    def add(self, m, observed, bound):
        if self.kind == "upper":
            ok = observed <= bound + BOUND_TOL
        else:
            ok = observed >= bound - BOUND_TOL
        self.rows.append((int(m), float(observed), float(bound), bool(ok)))

    @property
    def all_satisfied(self):
        return all(r[3] for r in self.rows)

    @property
    def margins(self):
        """Signed slack per row; negative means violated (before tolerance)."""
        if self.kind == "upper":
            return [b - o for _, o, b, _ in self.rows]
        return [o - b for _, o, b, _ in self.rows]

    @property
    def worst_margin(self):
        margins = self.margins
        return min(margins) if margins else math.inf

    @property
    def worst_m(self):
        if not self.rows:
            return None
        margins = self.margins
        return self.rows[margins.index(min(margins))][0]

    def to_csv(self, fp=None):
        buf = io.StringIO() if fp is None else fp
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("m", "observed", "bound", "satisfied"))
        for m, o, b, ok in self.rows:
            writer.writerow((m, format(o, ".17g"), format(b, ".17g"), str(ok).lower()))
        if fp is None:
            return buf.getvalue()

    def summary(self):
        worst = self.worst_margin
        return {
            "name": self.name,
            "all_satisfied": self.all_satisfied,
            "worst_margin": worst if math.isfinite(worst) else None,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.summary(), **kwargs)


_UPPER_BOUNDS = {
    "rga": (Algorithm.RGA, lambda m, cfg: rga_bound(m)),
    "prga": (Algorithm.PRGA, lambda m, cfg: prga_bound(m, cfg.alpha)),
    "crga": (Algorithm.CRGA, lambda m, cfg: crga_bound(m)),
}


def check_upper_bound(trace, bound):
    """Compare every record of ``trace`` against a convergence-rate bound.

    ``bound`` is one of ``"rga"``, ``"prga"``, ``"crga"`` and must match the
    algorithm that produced the trace. The target is assumed to lie in A_1.
    For CRGA the ``m = 0`` state (``||f||``) is checked too.
    """
    try:
        kind, fn = _UPPER_BOUNDS[bound]
    except KeyError:
        raise ValueError(f"unknown bound {bound!r}; expected one of {sorted(_UPPER_BOUNDS)}") from None
    if trace.config.kind is not kind:
        raise ValueError(f"bound {bound!r} does not apply to a {trace.config.kind.value} trace")
    if kind is Algorithm.PRGA and trace.config.alpha > 1:
        # raises with the explanation
        prga_bound(1, trace.config.alpha)
    report = BoundReport(bound, "upper")
    if kind is Algorithm.CRGA:
        report.add(0, trace.initial_residual_l2, crga_bound(0))
    for rec in trace.records:
        report.add(rec.m, rec.residual_l2, fn(rec.m, trace.config))
    return report


def check_divergence_floor(trace, b, alpha):
    """Verify ``||f - T_m|| >= b * prod_{k<=m}(1 - k**-alpha) / sqrt(2)`` for every m."""
    _check_alpha_gt_one(alpha)
    if not 0 < b < 0.5:
        raise ValueError(f"b must lie in (0, 1/2), got {b}")
    if trace.config.kind is not Algorithm.PRGA or trace.config.alpha != alpha:
        raise ValueError("trace must come from PRGA with the same alpha")
    floors = _floor_sequence(b, alpha, len(trace.records))
    report = BoundReport(f"divergence-floor(b={b},alpha={alpha})", "floor")
    for rec, fl in zip(trace.records, floors):
        report.add(rec.m, rec.residual_l2, fl)
    return report


def lower_bound_instance(m):
    """``f = (1/2m) sum_{i<=2m} e_i`` in R^{2m} over the canonical dictionary."""
    if int(m) != m or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m}")
    m = int(m)
    n = 2 * m
    d = canonical_dictionary(n)
    return d, build_a1_element(d, [(i, 1, 1.0 / n) for i in range(n)], tau=1.0)


def lower_bound_value(m):
    """``1 / (2 sqrt(m))``: best m-term error on :func:`lower_bound_instance`."""
    return 1.0 / (2.0 * math.sqrt(m))


def best_m_term_error(f, dictionary, m):
    """Exhaustive best approximation from at most ``m`` atoms.

    Enumerates every support of size ``<= m``, projects ``f`` onto its span
    through the normal equations and returns the smallest residual norm.
    Independent of the greedy engines by construction.
    """
    f = as_vector(f, "f")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    n = dictionary.n_atoms
    k_max = min(int(m), n)
    count = sum(math.comb(n, k) for k in range(k_max + 1))
    if count > ENUMERATION_LIMIT:
        raise ValueError(
            f"enumeration too large: {count} supports for {n} atoms and m={m} "
            f"(limit {ENUMERATION_LIMIT})"
        )
    atoms = dictionary.atoms
    best = float(np.sqrt(np.dot(f, f)))
    for k in range(1, k_max + 1):
        for support in itertools.combinations(range(n), k):
            A = atoms[list(support)].T
            gram = A.T @ A
            rhs = A.T @ f
            coef = np.linalg.lstsq(gram, rhs, rcond=None)[0]
            r = f - A @ coef
            err = float(np.sqrt(np.dot(r, r)))
            if err < best:
                best = err
    return best


def random_a1_instance(rng, dim, n_atoms=None, support_size=None):
    """Random redundant dictionary and a random A_1 element over it.

    The dictionary is the canonical basis of R^dim followed by
    ``n_atoms - dim`` normalised Gaussian atoms. Coefficients are drawn
    nonnegative, normalised to sum to one and given random signs.

    Parameters
    ----------
    rng : numpy.random.Generator
    dim : int
    n_atoms : int, optional
        Defaults to ``2 * dim``.
    support_size : int, optional
        Defaults to a uniform draw from ``1..n_atoms``.
    """
    n_atoms = 2 * dim if n_atoms is None else int(n_atoms)
    if n_atoms < dim:
        raise ValueError("n_atoms must be at least dim")
    extra = rng.standard_normal((n_atoms - dim, dim))
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    dictionary = Dictionary(np.vstack([np.eye(dim), extra]))
    if support_size is None:
        support_size = int(rng.integers(1, n_atoms + 1))
    support = rng.choice(n_atoms, size=support_size, replace=False)
    coefs = rng.random(support_size)
    coefs /= coefs.sum()
    signs = rng.choice([-1, 1], size=support_size)
    entries = [(int(i), int(s), float(a)) for i, s, a in zip(support, signs, coefs)]
    return dictionary, build_a1_element(dictionary, entries, tau=1.0)


RNG_ID = "numpy.random.PCG64 via SeedSequence.spawn"


def trial_seeds(seed, trials):
    """Independent per-trial seed sequences; trial ``t`` never depends on scheduling."""
    return np.random.SeedSequence(seed).spawn(trials)


def trial_instance(seed_seq, dim):
    return random_a1_instance(np.random.default_rng(seed_seq), dim)
