"""Acceptance criteria. Each test prints one PASS/FAIL line (visible with ``-s``
or in the terminal summary via the ``report`` fixture)."""

import math
import time

import numpy as np
import pytest

from relaxed_greedy.analysis import (
    best_m_term_error,
    check_divergence_floor,
    check_upper_bound,
    counterexample_instance,
    counterexample_limit_floor,
    lower_bound_instance,
    lower_bound_value,
    partial_product,
    product_with_tail,
)
from relaxed_greedy.cli import simulate
from relaxed_greedy.engines import AlgorithmConfig, optimal_gamma, run

from .conftest import random_instances

TOL = 1e-12
SIMULATION_VALUES = {1.1: 0.003805, 1.5: 0.068021, 2.0: 0.177130}


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def trial_set():
    return random_instances(seed=2024, trials=100)


def test_simulation_reproduction(report):
    t0 = time.perf_counter()
    traces = simulate(500)
    elapsed = time.perf_counter() - t0
    errs = {a: tr.final_residual_l2 for a, tr in traces.items()}
    ok = all(abs(errs[a] - v) <= 1e-4 for a, v in SIMULATION_VALUES.items())
    closed = 0.5 * (501 / 1000) / math.sqrt(2)
    ok = ok and abs(errs[2.0] - closed) <= 1e-6 and elapsed < 1.0
    detail = ", ".join(f"alpha={a}: {e:.6f}" for a, e in errs.items())
    report("PRGA simulation at m=500", ok, f"{detail}; closed form {closed:.7f}; {elapsed:.3f}s")


def test_crga_rate(report, trial_set):
    t0 = time.perf_counter()
    failures, worst = 0, math.inf
    for d, el in trial_set:
        rep = check_upper_bound(run(el.vector, d, AlgorithmConfig("crga", max_iterations=200)), "crga")
        failures += not rep.all_satisfied
        worst = min(worst, rep.worst_margin)
    elapsed = time.perf_counter() - t0
    report("CRGA 2/sqrt(m+4) on 100 instances", failures == 0 and elapsed < 10.0,
           f"{failures} failures, worst margin {worst:.3e}, {elapsed:.2f}s")


def test_rga_prga_rates(report, trial_set):
    failures, identical = 0, True
    for d, el in trial_set:
        rga = run(el.vector, d, AlgorithmConfig("rga", max_iterations=200))
        failures += not check_upper_bound(rga, "rga").all_satisfied
        for alpha in (0.25, 0.5, 1.0):
            tr = run(el.vector, d, AlgorithmConfig("prga", alpha=alpha, max_iterations=200))
            failures += not check_upper_bound(tr, "prga").all_satisfied
            if alpha == 1.0:
                identical &= (tr.records == rga.records
                              and np.array_equal(tr.final_approx, rga.final_approx)
                              and tr.to_csv() == rga.to_csv())
    report("RGA/PRGA 2/m^(alpha/2) on 100 instances", failures == 0 and identical,
           f"{failures} failures, PRGA(1) bit-identical to RGA: {identical}")


def test_prga_divergence(report):
    t0 = time.perf_counter()
    failures, details = 0, []
    for b in (0.1, 0.25, 0.4):
        for alpha in (1.1, 1.5, 2.0, 3.0):
            d, el = counterexample_instance(b)
            tr = run(el.vector, d, AlgorithmConfig("prga", alpha=alpha, max_iterations=10**4))
            rep = check_divergence_floor(tr, b, alpha)
            limit = counterexample_limit_floor(b, alpha)
            ok = (len(tr.records) == 10**4 and rep.all_satisfied
                  and tr.final_residual_l2 > limit > 0)
            failures += not ok
            details.append(f"({b},{alpha}):{tr.final_residual_l2:.4g}>{limit:.4g}")
    elapsed = time.perf_counter() - t0
    report("PRGA alpha>1 floor, 12 cases, M=1e4", failures == 0 and elapsed < 30.0,
           f"{failures} failures, {elapsed:.2f}s; " + " ".join(details))


def test_infinite_product(report):
    tele = max(abs(partial_product(2, n) - (n + 1) / (2 * n))
               for n in (2, 10, 100, 10**3, 10**4, 10**5, 10**6))
    pb = product_with_tail(2, 10**4)
    positive = all(product_with_tail(a, n).lower > 0
                   for a in (1.1, 1.5, 3.0) for n in (2, 100, 10**4, 10**6))
    ok = tele < 1e-12 and pb.lower <= 0.5 <= pb.upper and pb.width < 1e-3 and positive
    report("infinite product", ok,
           f"telescoping err {tele:.2e}; P_2 in [{pb.lower:.7f}, {pb.upper:.7f}] "
           f"width {pb.width:.2e}; positive intervals {positive}")


def test_m_term_lower_bound(report):
    failures, details = 0, []
    for m in (2, 3, 4, 5):
        d, el = lower_bound_instance(m)
        target = lower_bound_value(m)
        best = best_m_term_error(el.vector, d, m)
        failures += abs(best - target) > TOL
        for kind, alpha in (("pga", 1.0), ("rga", 1.0), ("prga", 0.5), ("prga", 2.0), ("crga", 1.0)):
            tr = run(el.vector, d, AlgorithmConfig(kind, alpha=alpha, max_iterations=m, stop_epsilon=0.0))
            failures += tr.final_residual_l2 < target - TOL
        details.append(f"m={m}: {best:.12f}")
    report("m-term lower bound 1/(2 sqrt m)", failures == 0, f"{failures} failures; " + ", ".join(details))


def test_optimal_gamma_oracle(report):
    rng = np.random.default_rng(99)
    grid = np.linspace(0.0, 1.0, 100001)
    worst_gap, worst_phi = 0.0, -math.inf
    for _ in range(1000):
        r, d = rng.standard_normal(8), rng.standard_normal(8)
        g = optimal_gamma(r, d)
        phi = np.sum((r[None, :] - grid[:, None] * d[None, :]) ** 2, axis=1)
        i = int(np.argmin(phi))
        phi_g = float(np.sum((r - g * d) ** 2))
        worst_gap = max(worst_gap, abs(g - grid[i]))
        worst_phi = max(worst_phi, phi_g - float(phi[i]))
    ok = worst_gap <= 2e-5 and worst_phi <= 1e-10
    report("optimal gamma vs grid", ok, f"max |gamma - grid| {worst_gap:.2e}, max phi excess {worst_phi:.2e}")


def test_crga_monotone_and_ledger(report, trial_set):
    cases = list(trial_set)
    cases += [counterexample_instance(b) for b in (0.1, 0.25, 0.4)]
    cases += [lower_bound_instance(m) for m in (2, 3, 4, 5)]
    failures = 0
    for d, el in cases:
        tr = run(el.vector, d, AlgorithmConfig("crga", max_iterations=200))
        prev = tr.initial_residual_l2
        for rec in tr.records:
            failures += rec.residual_l2 > prev + TOL
            failures += rec.weight_sum > 1 + TOL or rec.min_weight < -1e-15
            prev = rec.residual_l2
    report("CRGA monotone residuals and weight ledger", failures == 0,
           f"{len(cases)} instances, {failures} violations")
