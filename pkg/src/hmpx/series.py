"""Entropy-rate Taylor coefficients from finite systems, plus identity checks.

The k-th expansion coefficient (in the noise level) of the conditional
entropy H(Y_N | Y_1..Y_{N-1}) is the same for every N >= ceil((k+3)/2)
and equals the entropy rate's coefficient.  So a single finite system of
length N* = ceil((K+3)/2) yields the exact series through order K; the
run at N*+1 exists purely as a numerical cross-check, and any settled
disagreement is an error, not a warning.

The module also hosts numerical verifiers for the three identities the
settling rests on: blocking at a zero-noise site, invariance under
prepending zero sites, and vanishing of mixed partials with a "hole"
(a site of derivative order <= 1 strictly between an active site and the
end).  Each verifier reports an absolute residual against a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .engine import block_entropy, check_budget, mixed_partial_F, multi_site_F
from .errors import EpsilonOutOfRange, HypothesisNotMet, SettlingViolation
from .jets import UniJet
from .model import random_model

DEFAULT_SETTLE_TOL = 1e-8
DEFAULT_LEMMA_TOL = 1e-9


def settling_threshold(k):
    """Smallest system length whose k-th coefficient already equals the rate's."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return (int(k) + 4) // 2  # == ceil((k+3)/2)


@dataclass(frozen=True)
class SeriesResult:
    """Entropy-rate Taylor coefficients with settling diagnostics (nats)."""

    order: int
    coefficients: tuple
    thresholds: tuple
    settle_residuals: tuple
    epsilon_max: float
    log_note: str = "natural log (nats)"


class SeriesEvaluation(NamedTuple):
    value: float
    # Heuristic tail guess |c_K| * eps^(K+1) / (1 - eps); no rigorous
    # convergence radius is certified.
    remainder_hint: float


@dataclass(frozen=True, eq=False)
class SettlingTable:
    """Coefficients of H_N - H_{N-1} for N = 2..n_max, with settled flags."""

    order: int
    n_values: tuple
    coefficients: np.ndarray      # shape (len(n_values), order+1)
    settled: np.ndarray           # same shape, bool
    thresholds: tuple
    column_disagreement: tuple    # max |difference| among settled cells, per k

    def rows(self):
        """Yield (N, k, coefficient, settled) per cell, row-major."""
        for i, n in enumerate(self.n_values):
            for k in range(self.order + 1):
                yield n, k, float(self.coefficients[i, k]), bool(self.settled[i, k])


@dataclass(frozen=True)
class LemmaReport:
    lemma: int
    instance: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)


def _conditional_jets(model, n_hi, order, *, budget=None, workers=1):
    """C_N jets for N = 2..n_hi; each H_N comes from its own enumeration."""
    var = UniJet.variable(order)
    jets = {}
    h_prev = block_entropy(model, 1, var, budget=budget, workers=workers)
    for n in range(2, n_hi + 1):
        h_n = block_entropy(model, n, var, budget=budget, workers=workers)
        jets[n] = h_n - h_prev
        h_prev = h_n
    return jets


def entropy_rate_series(model, order, *, budget=None, workers=1,
                        settle_tol=DEFAULT_SETTLE_TOL) -> SeriesResult:
    """Entropy-rate Taylor coefficients through the given order.

    Coefficient k is read off the system of length N* = ceil((order+3)/2);
    the residual for k compares it against the N*+1 run and, where N*
    exceeds k's own threshold, against the smallest valid length too.
    Any residual above settle_tol * max(1, |coefficient|) raises
    SettlingViolation: under the settling guarantee the values are equal,
    so disagreement means numerical trouble or an invalid model.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    n_star = settling_threshold(order)
    check_budget(model.size, n_star + 1, budget)
    jets = _conditional_jets(model, n_star + 1, order, budget=budget, workers=workers)
    coeffs = jets[n_star].coeffs
    check = jets[n_star + 1].coeffs
    residuals = []
    for k in range(order + 1):
        r = abs(coeffs[k] - check[k])
        n_k = settling_threshold(k)
        if n_k < n_star:
            r = max(r, abs(coeffs[k] - jets[n_k].coeffs[k]))
        residuals.append(r)
        if r > settle_tol * max(1.0, abs(coeffs[k])):
            raise SettlingViolation(
                f"coefficient k={k}: settled runs disagree by {r:.3e} "
                f"(tolerance {settle_tol:.1e} relative)"
            )
    return SeriesResult(
        order=order,
        coefficients=tuple(float(c) for c in coeffs),
        thresholds=tuple(settling_threshold(k) for k in range(order + 1)),
        settle_residuals=tuple(float(r) for r in residuals),
        epsilon_max=model.epsilon_max,
    )


def settling_table(model, order, n_max, *, budget=None, workers=1) -> SettlingTable:
    """Coefficients of H_N - H_{N-1} for N = 2..n_max, settled cells flagged.

    Cells below threshold are reported as computed, never extrapolated."""
    if n_max < 2:
        raise ValueError("need n_max >= 2")
    check_budget(model.size, n_max, budget)
    jets = _conditional_jets(model, n_max, order, budget=budget, workers=workers)
    n_values = tuple(range(2, n_max + 1))
    coef = np.array([jets[n].coeffs for n in n_values])
    thresholds = tuple(settling_threshold(k) for k in range(order + 1))
    settled = np.array(
        [[n >= thresholds[k] for k in range(order + 1)] for n in n_values]
    )
    disagreement = []
    for k in range(order + 1):
        vals = coef[settled[:, k], k]
        disagreement.append(float(vals.max() - vals.min()) if vals.size >= 2 else 0.0)
    coef.flags.writeable = False
    settled.flags.writeable = False
    return SettlingTable(
        order=order,
        n_values=n_values,
        coefficients=coef,
        settled=settled,
        thresholds=thresholds,
        column_disagreement=tuple(disagreement),
    )


def evaluate_series(result: SeriesResult, eps) -> SeriesEvaluation:
    """Horner evaluation of the truncated series at eps, plus a tail hint."""
    eps = float(eps)
    if not (0.0 <= eps <= result.epsilon_max):
        raise EpsilonOutOfRange(f"eps = {eps!r} outside [0, {result.epsilon_max!r}]")
    acc = 0.0
    for c in reversed(result.coefficients):
        acc = acc * eps + c
    tail = abs(result.coefficients[-1])
    hint = tail * eps ** (result.order + 1) / (1.0 - eps) if eps < 1.0 else math.inf
    return SeriesEvaluation(value=acc, remainder_hint=hint)


# --- identity verifiers -----------------------------------------------------

def verify_lemma_blocking(model, n, j, profile, tol=DEFAULT_LEMMA_TOL, *,
                          budget=None) -> LemmaReport:
    """Zero noise at site j (1-based, 1 < j < N) screens off earlier sites.

    Compares the length-N per-site conditional entropy against the
    shorter system starting at site j, both evaluated at plain numbers.
    """
    if not (1 < j < n):
        raise HypothesisNotMet(f"need 1 < j < N, got j={j}, N={n}")
    profile = [float(v) for v in profile]
    if len(profile) != n:
        raise HypothesisNotMet(f"profile has {len(profile)} sites, expected {n}")
    if profile[j - 1] != 0.0:
        raise HypothesisNotMet(f"profile must have 0 at site j={j}")
    full = multi_site_F(model, profile, budget=budget)
    suffix = multi_site_F(model, profile[j - 1:], budget=budget)
    return LemmaReport(
        lemma=1,
        instance=f"s={model.size} N={n} j={j} profile={tuple(round(v, 6) for v in profile)}",
        residual=float(abs(full - suffix)),
        tolerance=tol,
    )


def verify_lemma_zero_prepend(model, kvec, r, tol=DEFAULT_LEMMA_TOL, *,
                              budget=None) -> LemmaReport:
    """Prepending r zero-derivative sites leaves the mixed partial unchanged.

    Requires the first entry of kvec to be 0 or 1."""
    kvec = [int(k) for k in kvec]
    if r < 1:
        raise ValueError("r must be >= 1")
    if kvec[0] > 1:
        raise HypothesisNotMet(f"first entry must be <= 1, got {kvec[0]}")
    base = mixed_partial_F(model, kvec, budget=budget)
    extended = mixed_partial_F(model, [0] * r + kvec, budget=budget)
    return LemmaReport(
        lemma=2,
        instance=f"s={model.size} kvec={tuple(kvec)} r={r}",
        residual=float(abs(base - extended)),
        tolerance=tol,
    )


def _has_hole(kvec):
    # 1-based positions: exists i < j < N with k_i >= 1 and k_j <= 1.
    n = len(kvec)
    seen_active = False
    for pos in range(n - 1):  # positions 1..N-1
        if seen_active and kvec[pos] <= 1:
            return True
        if kvec[pos] >= 1:
            seen_active = True
    return False


def verify_lemma_no_hole(model, kvec, tol=DEFAULT_LEMMA_TOL, *,
                         budget=None) -> LemmaReport:
    """Mixed partials with a low-order site after an active one vanish."""
    kvec = [int(k) for k in kvec]
    if not _has_hole(kvec):
        raise HypothesisNotMet(
            f"kvec={tuple(kvec)} has no positions i < j < N with k_i >= 1, k_j <= 1"
        )
    value = mixed_partial_F(model, kvec, budget=budget)
    return LemmaReport(
        lemma=3,
        instance=f"s={model.size} kvec={tuple(kvec)}",
        residual=float(abs(value)),
        tolerance=tol,
    )


# --- randomized batteries ---------------------------------------------------

def _random_kvec(rng, n, weight_max, *, first_max=None, need_hole=False):
    while True:
        kvec = rng.integers(0, 4, size=n)
        w = int(kvec.sum())
        if not (1 <= w <= weight_max):
            continue
        if first_max is not None and kvec[0] > first_max:
            continue
        if need_hole and not _has_hole(kvec):
            continue
        return [int(k) for k in kvec]


def run_lemma_battery(lemma, trials, seed, tol=DEFAULT_LEMMA_TOL, *, model=None,
                      sizes=(2, 3), n_max=6, weight_max=6, budget=None):
    """Randomized verifier instances; one report per trial.

    With ``model=None`` each trial draws a fresh random model, well
    conditioned (entries floored away from zero) since the identities
    hold for any valid model and ill conditioning only inflates float
    noise, not information.  Passing a model pins it for every trial and
    randomizes only the instance.
    """
    if lemma not in (1, 2, 3):
        raise ValueError("lemma must be 1, 2, or 3")
    rng = np.random.default_rng(seed)
    fixed = model
    reports = []
    for _ in range(int(trials)):
        if fixed is None:
            s = int(rng.choice(sizes))
            model = random_model(rng, s)
        else:
            model = fixed
        if lemma == 1:
            n = int(rng.integers(3, n_max + 1))
            j = int(rng.integers(2, n))
            scale = 0.2 * min(model.epsilon_max, 1.0)  # finite even for T = 0
            profile = (scale * rng.random(n)).tolist()
            profile[j - 1] = 0.0
            reports.append(verify_lemma_blocking(model, n, j, profile, tol,
                                                 budget=budget))
        elif lemma == 2:
            n = int(rng.integers(2, n_max))
            r = int(rng.integers(1, n_max - n + 1))
            kvec = _random_kvec(rng, n, weight_max, first_max=1)
            reports.append(verify_lemma_zero_prepend(model, kvec, r, tol,
                                                     budget=budget))
        else:
            n = int(rng.integers(3, n_max + 1))
            kvec = _random_kvec(rng, n, weight_max, need_hole=True)
            reports.append(verify_lemma_no_hole(model, kvec, tol, budget=budget))
    return reports
