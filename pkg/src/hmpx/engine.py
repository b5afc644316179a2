"""Exact entropy computations by full enumeration of observation sequences.

Every quantity here is a sum over all s**N observation sequences of a
forward-algorithm probability.  The forward pass is generic over its
number type: plain floats give entropies at a fixed noise level, UniJet
values expand in a single shared noise variable, and MultiJet values give
one noise variable per site (the device behind the mixed-partial checks).

Enumeration cost is exponential and deliberately explicit: any request
beyond the sequence budget (default 2**24) raises instead of grinding.
Accumulation uses compensated (Neumaier) summation in lexicographic
order; with ``workers > 1`` the enumeration splits into contiguous
chunks, each compensated internally, reduced in fixed chunk order, so a
given worker count always reproduces the same bits.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from itertools import product

import numpy as np

from .errors import (
    BudgetExceeded,
    ConfigMismatch,
    NonPositiveConstantTerm,
    OrderMismatch,
    ProfileLengthMismatch,
    UnreachableSequence,
)
from .jets import MultiJet, UniJet, space_keys
from .model import HmpModel, check_epsilon

DEFAULT_BUDGET = 2 ** 24

_P_FLOOR = 1e-300  # constant terms below this mean the sum is corrupt


def _budget_or_default(budget):
    return DEFAULT_BUDGET if budget is None else int(budget)


def check_budget(s, n, budget=None):
    """Raise BudgetExceeded unless s**n sequences fit the budget."""
    budget = _budget_or_default(budget)
    if s ** n > budget:
        raise BudgetExceeded(
            f"N = {n} needs {s}**{n} = {s ** n} sequences, over the budget of {budget}"
        )


def enumerate_sequences(s, n, budget=None):
    """All length-n observation sequences over [0, s), lexicographically."""
    if s < 2 or n < 1:
        raise ValueError("need s >= 2 and N >= 1")
    check_budget(s, n, budget)
    return product(range(s), repeat=n)


def _sequence_at(s, n, index):
    digits = [0] * n
    for pos in range(n - 1, -1, -1):
        index, digits[pos] = divmod(index, s)
    return digits


def _iter_range(s, n, lo, hi):
    # Base-s odometer from sequence index lo (inclusive) to hi (exclusive).
    seq = _sequence_at(s, n, lo)
    for _ in range(hi - lo):
        yield seq
        for pos in range(n - 1, -1, -1):
            seq[pos] += 1
            if seq[pos] < s:
                break
            seq[pos] = 0


# --- noise profiles -------------------------------------------------------

def resolve_profile(model, noise, n):
    """Expand a shared noise value or per-site profile to one value per site.

    Scalars are range-checked against epsilon_max.  Jet entries must agree
    on their configuration; univariate and multivariate jets cannot mix.
    """
    if isinstance(noise, (list, tuple)):
        values = list(noise)
        if len(values) != n:
            raise ProfileLengthMismatch(f"profile has {len(values)} sites, expected {n}")
    else:
        values = [noise] * n
    out = []
    uni_order = None
    multi_cfg = None
    for v in values:
        if isinstance(v, UniJet):
            if uni_order is None:
                uni_order = v.order
            elif v.order != uni_order:
                raise OrderMismatch("profile mixes UniJet orders")
            out.append(v)
        elif isinstance(v, MultiJet):
            if multi_cfg is None:
                multi_cfg = v._config()
            elif v._config() != multi_cfg:
                raise ConfigMismatch("profile mixes MultiJet configurations")
            out.append(v)
        else:
            out.append(check_epsilon(model.noise, v))
    if uni_order is not None and multi_cfg is not None:
        raise ConfigMismatch("profile mixes univariate and multivariate jets")
    return out


def _site_tables(model, profile):
    # Emission entries r[x][z] = kron(x,z) + eps_i * t[x][z], one table per site.
    t = model.noise.matrix
    s = model.size
    tables = []
    for eps in profile:
        if isinstance(eps, float):
            r = np.eye(s) + eps * t
            tables.append([[float(r[x, z]) for z in range(s)] for x in range(s)])
        else:
            tables.append(
                [[eps * float(t[x, z]) + (1.0 if x == z else 0.0) for z in range(s)]
                 for x in range(s)]
            )
    return tables


def _forward(tables, m_rows, init, symbols):
    s = len(init)
    alpha = [init[x] * tables[0][x][symbols[0]] for x in range(s)]
    for i in range(1, len(symbols)):
        tab = tables[i]
        yi = symbols[i]
        new = []
        for xp in range(s):
            inner = alpha[0] * m_rows[0][xp]
            for x in range(1, s):
                inner = inner + alpha[x] * m_rows[x][xp]
            new.append(inner * tab[xp][yi])
        alpha = new
    total = alpha[0]
    for x in range(1, s):
        total = total + alpha[x]
    return total


def sequence_probability(model, symbols, noise):
    """Probability of one observation sequence under the given noise.

    ``noise`` is a shared value (float or jet) or a per-site profile; the
    result has the corresponding number type.  Shared-noise results are
    polynomials of degree <= N in the noise variable.
    """
    symbols = [int(y) for y in symbols]
    if any(y < 0 or y >= model.size for y in symbols):
        raise ValueError("symbol outside alphabet range")
    profile = resolve_profile(model, noise, len(symbols))
    tables = _site_tables(model, profile)
    m_rows = model.transition.matrix.tolist()
    init = model.transition.stationary.tolist()
    return _forward(tables, m_rows, init, symbols)


# --- compensated accumulation --------------------------------------------

class _NeumaierFloat:
    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x):
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    def total(self):
        return self.s + self.c


class _NeumaierArray:
    __slots__ = ("s", "c")

    def __init__(self, size):
        self.s = np.zeros(size)
        self.c = np.zeros(size)

    def add(self, x):
        t = self.s + x
        big = np.abs(self.s) >= np.abs(x)
        self.c += np.where(big, (self.s - t) + x, (x - t) + self.s)
        self.s = t

    def total(self):
        return self.s + self.c


def _mode_of(profile):
    for v in profile:
        if isinstance(v, MultiJet):
            return "multi", v._config()
        if isinstance(v, UniJet):
            return "uni", v.order
    return "scalar", None


def _chunk_xlogx_sum(model, profile, n, lo, hi):
    """Compensated sum of p*log(p) over sequence indices [lo, hi)."""
    mode, cfg = _mode_of(profile)
    tables = _site_tables(model, profile)
    m_rows = model.transition.matrix.tolist()
    init = model.transition.stationary.tolist()
    s = model.size
    # A probability of exactly zero is a structurally unreachable sequence
    # (point-mass start, or a hard zero in the emission pattern); its
    # p*log(p) term is zero.  Tiny-but-nonzero constant terms cannot occur
    # for strictly positive M and mean the sum is corrupt.
    if mode == "scalar":
        acc = _NeumaierFloat()
        for seq in _iter_range(s, n, lo, hi):
            p = _forward(tables, m_rows, init, seq)
            if p < _P_FLOOR:
                # emission entries may carry -1e-15 of rounding at the eps
                # boundary, so a vanishing probability can land just below 0
                if -1e-15 <= p <= 0.0:
                    continue
                raise UnreachableSequence(f"P{tuple(seq)} = {p!r} underflowed")
            acc.add(p * math.log(p))
        return acc.total()
    if mode == "uni":
        acc = _NeumaierArray(cfg + 1)
        for seq in _iter_range(s, n, lo, hi):
            p = _forward(tables, m_rows, init, seq)
            if p.coeffs[0] < _P_FLOOR:
                if not p.coeffs.any():
                    continue
                raise UnreachableSequence(f"P{tuple(seq)} constant term underflowed")
            try:
                acc.add((p * p.log()).coeffs)
            except NonPositiveConstantTerm as exc:
                raise UnreachableSequence(str(exc)) from exc
        return acc.total()
    nvars, cap, bounds = cfg
    keys = space_keys(nvars, cap, bounds)
    index = {k: i for i, k in enumerate(keys)}
    acc = _NeumaierArray(len(keys))
    vec = np.zeros(len(keys))
    for seq in _iter_range(s, n, lo, hi):
        p = _forward(tables, m_rows, init, seq)
        if p.constant_term < _P_FLOOR:
            if not p._raw:
                continue
            raise UnreachableSequence(f"P{tuple(seq)} constant term underflowed")
        try:
            term = p * p.log()
        except NonPositiveConstantTerm as exc:
            raise UnreachableSequence(str(exc)) from exc
        vec[:] = 0.0
        for k, c in term._raw.items():
            vec[index[k]] = c
        acc.add(vec)
    return acc.total()


def _chunk_worker(payload):
    model, profile, n, lo, hi = payload
    return _chunk_xlogx_sum(model, profile, n, lo, hi)


def _entropy_over_profile(model, profile, *, budget=None, workers=1, initial=None):
    n = len(profile)
    s = model.size
    check_budget(s, n, budget)
    if initial is not None:
        model = _with_initial(model, initial)
    total = s ** n
    workers = max(1, min(int(workers), total))
    if workers == 1:
        raw = _chunk_xlogx_sum(model, profile, n, 0, total)
    else:
        bounds = [total * i // workers for i in range(workers + 1)]
        payloads = [
            (model, profile, n, bounds[i], bounds[i + 1]) for i in range(workers)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_chunk_worker, payloads))
        if isinstance(partials[0], float):
            acc = _NeumaierFloat()
        else:
            acc = _NeumaierArray(partials[0].size)
        for part in partials:
            acc.add(part)
        raw = acc.total()
    mode, cfg = _mode_of(profile)
    if mode == "scalar":
        return -raw
    if mode == "uni":
        return UniJet(-raw)
    nvars, cap, bounds = cfg
    keys = space_keys(nvars, cap, bounds)
    out = {k: float(-raw[i]) for i, k in enumerate(keys) if raw[i] != 0.0}
    return MultiJet._from_raw(nvars, cap, bounds, out)


def _with_initial(model, initial):
    # Conditioning device: swap the stationary start for an arbitrary one
    # (e.g. a point mass on X_1) without touching validation.
    init = np.asarray(initial, dtype=float)
    if init.shape != (model.size,) or abs(init.sum() - 1.0) > 1e-9 or np.any(init < 0):
        raise ValueError("initial distribution must be a length-s probability vector")
    sm = model.transition
    patched = type(sm)(matrix=sm.matrix, stationary=init)
    return HmpModel(transition=patched, noise=model.noise)


# --- public entropy surface -----------------------------------------------

def block_entropy(model, n, noise, *, budget=None, workers=1, initial=None):
    """Entropy of the length-n observation block, H_n = -sum_y P(y) log P(y).

    ``noise`` as in sequence_probability.  Natural log.  ``initial``
    optionally replaces the stationary start distribution.
    """
    if n < 1:
        raise ValueError("need N >= 1")
    profile = resolve_profile(model, noise, n)
    return _entropy_over_profile(model, profile, budget=budget, workers=workers,
                                 initial=initial)


def conditional_entropy(model, n, noise, *, budget=None, workers=1, initial=None):
    """H(Y_n | Y_1..Y_{n-1}) = H_n - H_{n-1}, each term its own enumeration."""
    if n < 2:
        raise ValueError("need N >= 2")
    profile = resolve_profile(model, noise, n)
    h_n = _entropy_over_profile(model, profile, budget=budget, workers=workers,
                                initial=initial)
    h_prev = _entropy_over_profile(model, profile[:-1], budget=budget, workers=workers,
                                   initial=initial)
    return h_n - h_prev


def multi_site_F(model, profile, *, budget=None, workers=1):
    """Per-site-noise conditional entropy H(Z_1..Z_n) - H(Z_1..Z_{n-1}).

    With every profile entry equal this reduces to conditional_entropy.
    """
    if not isinstance(profile, (list, tuple)) or len(profile) < 2:
        raise ProfileLengthMismatch("profile must list at least two sites")
    profile = resolve_profile(model, profile, len(profile))
    h_n = _entropy_over_profile(model, profile, budget=budget, workers=workers)
    h_prev = _entropy_over_profile(model, profile[:-1], budget=budget, workers=workers)
    return h_n - h_prev


def mixed_partial_F(model, kvec, *, budget=None, workers=1):
    """Mixed partial of the per-site conditional entropy at zero noise.

    Site i gets its own expansion variable; the multijet is truncated at
    total degree sum(kvec), which is exact for extracting this partial.
    """
    kvec = [int(k) for k in kvec]
    if len(kvec) < 2:
        raise ValueError("kvec must cover at least two sites")
    if any(k < 0 for k in kvec):
        raise ValueError("kvec entries must be >= 0")
    n = len(kvec)
    cap = sum(kvec)
    # Degrees above kvec in any single variable cannot reach the target
    # coefficient, so the whole computation lives in the exponent box.
    box = tuple(kvec)
    profile = [MultiJet.variable(i, n, cap, bounds=box) for i in range(n)]
    f = multi_site_F(model, profile, budget=budget, workers=workers)
    return f.mixed_partial(kvec)
