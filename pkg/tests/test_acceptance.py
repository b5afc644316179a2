"""Acceptance suite: one test per criterion, one printed verdict line each.

Run as part of the normal pytest suite, or alone:

    pytest tests/test_acceptance.py -v
"""

import time

import numpy as np
import pytest

from hmpx import (
    UniJet,
    conditional_bounds,
    conditional_entropy,
    entropy_rate_series,
    enumerate_sequences,
    evaluate_series,
    mc_entropy_rate,
    random_model,
    run_lemma_battery,
    sequence_probability,
    settling_table,
    settling_threshold,
)
from conftest import binary_symmetric
from oracles import markov_entropy_rate


def _verdict(num, ok, detail):
    print(f"\n[ACCEPTANCE {num}] {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_settling_reproduction():
    # C_N coefficients for N = 2..8 at order 11: every settled pair agrees
    # to 1e-8 relative, i.e. the order-11 expansion needs only N = 7.
    start = time.perf_counter()
    table = settling_table(binary_symmetric(0.3), 11, 8)
    elapsed = time.perf_counter() - start
    worst = 0.0
    for k in range(12):
        settled = table.coefficients[table.settled[:, k], k]
        for a in settled:
            for b in settled:
                rel = abs(a - b) / max(1.0, abs(a), abs(b))
                worst = max(worst, rel)
    ok = worst <= 1e-8 and elapsed < 10.0
    _verdict(1, ok, f"settled pairs agree to {worst:.2e} rel (tol 1e-8), "
                    f"N=2..8 K=11 in {elapsed:.2f}s")


def test_criterion_2_threshold_tightness():
    found = None
    for p in (0.3, 0.2, 0.4):
        table = settling_table(binary_symmetric(p), 11, 8)
        for k in range(12):
            threshold = settling_threshold(k)
            settled_value = table.coefficients[-1, k]  # N = 8, settled for all k
            for i, n in enumerate(table.n_values):
                if n < threshold and abs(table.coefficients[i, k]
                                         - settled_value) > 1e-6:
                    found = (p, k, n, table.coefficients[i, k], settled_value)
                    break
            if found:
                break
        if found:
            break
    ok = found is not None
    p, k, n, below, settled = found
    _verdict(2, ok, f"p={p}: C_{n}^({k}) = {below:.9g} vs settled {settled:.9g} "
                    f"(below-threshold gap {abs(below - settled):.3e} > 1e-6)")


def test_criterion_3_zero_order_closed_form():
    rng = np.random.default_rng(20260808)
    worst = 0.0
    for i in range(50):
        model = random_model(rng, 2 + i % 2)
        got = entropy_rate_series(model, 0).coefficients[0]
        expected = markov_entropy_rate(model.transition.matrix,
                                       model.transition.stationary)
        worst = max(worst, abs(got - expected))
    ok = worst <= 1e-12
    _verdict(3, ok, f"C^(0) vs closed-form Markov rate: worst |diff| = {worst:.2e} "
                    f"over 50 random models (tol 1e-12)")


def test_criterion_4_lemma_batteries():
    start = time.perf_counter()
    worst = {}
    for lemma in (1, 2, 3):
        reports = run_lemma_battery(lemma, 100, seed=1000 + lemma, tol=1e-9,
                                    sizes=(2, 3), n_max=6, weight_max=6)
        assert len(reports) == 100
        worst[lemma] = max(r.residual for r in reports)
    elapsed = time.perf_counter() - start
    ok = all(v <= 1e-9 for v in worst.values())
    _verdict(4, ok, "100 instances per identity, worst residuals: "
                    f"blocking {worst[1]:.2e}, zero-prepend {worst[2]:.2e}, "
                    f"no-hole {worst[3]:.2e} (tol 1e-9, {elapsed:.0f}s)")


def test_criterion_5_truncation_order_scaling():
    model = binary_symmetric(0.3)
    series = entropy_rate_series(model, 5)
    gaps = []
    for eps in (0.02, 0.01, 0.005):
        gaps.append(abs(evaluate_series(series, eps).value
                        - conditional_entropy(model, 7, eps)))
    r1, r2 = gaps[0] / gaps[1], gaps[1] / gaps[2]
    needed = 2 ** 5 * 0.8
    ok = r1 >= needed and r2 >= needed
    _verdict(5, ok, f"|series(K=5) - C_7| shrinks by {r1:.1f}x and {r2:.1f}x per "
                    f"halving of eps (needed >= {needed})")


def test_criterion_6_cross_engine_consistency():
    model = binary_symmetric(0.3)
    est = mc_entropy_rate(model, 0.05, 10 ** 6, seed=2026, batches=30)
    series_value = evaluate_series(entropy_rate_series(model, 11), 0.05).value
    sigma = abs(est.estimate - series_value) / est.standard_error
    upper, lower = conditional_bounds(model, 0.05, 6)
    sandwich = (lower - 1e-6) <= series_value <= (upper + 1e-6)
    ok = sigma <= 4.0 and sandwich
    _verdict(6, ok, f"MC {est.estimate:.6f}±{est.standard_error:.6f} vs series "
                    f"{series_value:.6f}: {sigma:.2f} sigma (<= 4); series within "
                    f"[{lower:.8f}, {upper:.8f}] ± 1e-6: {sandwich}")


def test_criterion_7_jet_algebra():
    log_series = (1 + UniJet.variable(11)).log()
    expected = [0.0, 1.0, -1 / 2, 1 / 3, -1 / 4]
    log_err = max(abs(log_series[k] - expected[k]) for k in range(5))

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        a = UniJet(rng.uniform(-1, 1, 12))
        b = UniJet(rng.uniform(-1, 1, 12))
        c = UniJet(rng.uniform(-1, 1, 12))
        for lhs, rhs in (
            ((a * b).coeffs, (b * a).coeffs),
            (((a * b) * c).coeffs, (a * (b * c)).coeffs),
            ((a * (b + c)).coeffs, (a * b + a * c).coeffs),
        ):
            scale = np.maximum(1.0, np.abs(lhs))
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
        pa = UniJet(np.concatenate([[rng.uniform(0.5, 2.0)], rng.uniform(-1, 1, 11)]))
        pb = UniJet(np.concatenate([[rng.uniform(0.5, 2.0)], rng.uniform(-1, 1, 11)]))
        lhs = (pa * pb).log().coeffs
        rhs = (pa.log() + pb.log()).coeffs
        scale = np.maximum(1.0, np.abs(lhs))
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    ok = log_err <= 1e-15 and worst <= 1e-12
    _verdict(7, ok, f"log(1+x) coefficients exact to {log_err:.1e} (tol 1e-15); "
                    f"ring/log-homomorphism worst deviation {worst:.2e} over "
                    f"1000 random order-11 jets (tol 1e-12)")


def test_criterion_8_normalization_as_series():
    rng = np.random.default_rng(88)
    worst = 0.0
    for i in range(20):
        s = 2 + i % 2
        n = int(rng.integers(2, 7))
        model = random_model(rng, s)
        var = UniJet.variable(8)
        total = UniJet.constant(0.0, 8)
        for y in enumerate_sequences(s, n):
            total = total + sequence_probability(model, y, var)
        target = np.zeros(9)
        target[0] = 1.0
        worst = max(worst, float(np.max(np.abs(total.coeffs - target))))
    ok = worst <= 1e-12
    _verdict(8, ok, f"sum_y P(y) == 1 + 0*eps + ...: worst coefficient deviation "
                    f"{worst:.2e} over 20 random models, N <= 6, K = 8 (tol 1e-12)")
