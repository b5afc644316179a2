"""Model layer: hidden Markov chain plus near-identity emission noise.

A model is a pair (M, T).  M is a strictly positive row-stochastic
transition matrix over an alphabet of size s; it drives the hidden chain
and has a unique stationary distribution pi.  T is a generator-style
matrix (zero row sums, negative diagonal, nonnegative off-diagonal) that
deforms the identity into the emission matrix

    R(eps) = I + eps * T,

which stays row-stochastic for 0 <= eps <= epsilon_max = min_i 1/|t_ii|.
All validation happens at construction time; the resulting objects are
immutable and safe to share across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    EpsilonOutOfRange,
    NonPositiveEntry,
    NonSquare,
    RowSumViolation,
    SignViolation,
)

ROW_SUM_TOL = 1e-9


def _as_square(raw, what):
    a = np.array(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
        raise NonSquare(f"{what} must be a square matrix with size >= 2, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} contains non-finite entries")
    return a


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Validated transition matrix with its stationary distribution."""

    matrix: np.ndarray
    stationary: np.ndarray

    @property
    def size(self):
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class NoiseGenerator:
    """Validated noise generator T and the admissible range of eps."""

    matrix: np.ndarray
    epsilon_max: float

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def is_zero(self):
        return not self.matrix.any()


@dataclass(frozen=True, eq=False)
class HmpModel:
    """A (transition, noise) pair of matching dimension; eps is supplied per call."""

    transition: StochasticMatrix
    noise: NoiseGenerator

    def __post_init__(self):
        if self.transition.size != self.noise.size:
            raise NonSquare(
                f"transition is {self.transition.size}x{self.transition.size} but "
                f"noise is {self.noise.size}x{self.noise.size}"
            )

    @property
    def size(self):
        return self.transition.size

    @property
    def epsilon_max(self):
        return self.noise.epsilon_max


def _stationary_distribution(m):
    # Replace the last balance equation of pi (M - I) = 0 with normalization;
    # exact to machine precision for desk-scale alphabets.
    s = m.shape[0]
    a = m.T - np.eye(s)
    a[-1, :] = 1.0
    b = np.zeros(s)
    b[-1] = 1.0
    return np.linalg.solve(a, b)


def validate_transition(raw) -> StochasticMatrix:
    """Validate a raw transition matrix and compute its stationary distribution.

    Requires a square matrix of size >= 2 whose rows sum to 1 within 1e-9
    and whose entries are all strictly positive.  Rows are renormalized
    internally so downstream arithmetic sees machine-exact row sums.
    """
    m = _as_square(raw, "transition matrix")
    row_sums = m.sum(axis=1)
    bad = np.abs(row_sums - 1.0) > ROW_SUM_TOL
    if bad.any():
        i = int(np.argmax(bad))
        raise RowSumViolation(f"transition row {i} sums to {row_sums[i]!r}, expected 1")
    if np.any(m <= 0.0):
        i, j = np.argwhere(m <= 0.0)[0]
        raise NonPositiveEntry(f"transition entry ({i},{j}) = {m[i, j]!r} must be > 0")
    m = m / row_sums[:, None]
    pi = _stationary_distribution(m)
    return StochasticMatrix(matrix=_frozen(m), stationary=_frozen(pi))


def validate_noise(raw) -> NoiseGenerator:
    """Validate a raw noise generator and compute epsilon_max.

    Rows must sum to 0 within 1e-9.  Either every diagonal entry is
    strictly negative with nonnegative off-diagonals, or the matrix is
    identically zero (a useful degenerate fixture: R(eps) = I for all eps,
    epsilon_max = inf).
    """
    t = _as_square(raw, "noise generator")
    row_sums = t.sum(axis=1)
    bad = np.abs(row_sums) > ROW_SUM_TOL
    if bad.any():
        i = int(np.argmax(bad))
        raise RowSumViolation(f"noise row {i} sums to {row_sums[i]!r}, expected 0")
    if not t.any():
        return NoiseGenerator(matrix=_frozen(t), epsilon_max=float("inf"))
    off = t.copy()
    np.fill_diagonal(off, 0.0)
    if np.any(off < 0.0) or np.any(np.diag(t) >= 0.0):
        raise SignViolation("noise generator needs t_ii < 0 and t_ij >= 0 (or all zeros)")
    # Fold the (<= 1e-9) row-sum residual into the diagonal so R(eps) rows
    # sum to 1 at machine precision.
    t[np.arange(t.shape[0]), np.arange(t.shape[0])] -= row_sums
    if np.any(np.diag(t) >= 0.0):
        raise SignViolation("row-sum residual repair pushed a diagonal entry to >= 0")
    eps_max = float(np.min(1.0 / np.abs(np.diag(t))))
    return NoiseGenerator(matrix=_frozen(t), epsilon_max=eps_max)


def emission_at(noise: NoiseGenerator, eps: float) -> np.ndarray:
    """Emission matrix R(eps) = I + eps*T; requires 0 <= eps <= epsilon_max."""
    check_epsilon(noise, eps)
    return _frozen(np.eye(noise.size) + eps * noise.matrix)


def check_epsilon(noise, eps):
    eps = float(eps)
    if not (0.0 <= eps <= noise.epsilon_max):
        raise EpsilonOutOfRange(
            f"eps = {eps!r} outside [0, {noise.epsilon_max!r}]"
        )
    return eps


def make_model(transition_raw, noise_raw) -> HmpModel:
    """Validate both matrices and pair them into a model."""
    return HmpModel(transition=validate_transition(transition_raw),
                    noise=validate_noise(noise_raw))


def model_from_dict(doc) -> HmpModel:
    """Build a model from the JSON document schema.

    The document must contain exactly the keys "transition" and "noise",
    each an s x s array of numbers; anything else is rejected.
    """
    if not isinstance(doc, dict):
        raise ValueError("model document must be a JSON object")
    keys = set(doc)
    required = {"transition", "noise"}
    if keys != required:
        unknown = sorted(keys - required)
        missing = sorted(required - keys)
        parts = []
        if unknown:
            parts.append(f"unknown keys {unknown}")
        if missing:
            parts.append(f"missing keys {missing}")
        raise ValueError("model document rejected: " + ", ".join(parts))
    return make_model(doc["transition"], doc["noise"])


def load_model(path) -> HmpModel:
    """Load a model from a JSON file (strict schema, see model_from_dict)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return model_from_dict(doc)


# --- random instances (verification batteries, tests) ---

def random_transition(rng, s, mix=0.5) -> StochasticMatrix:
    """Random strictly positive transition matrix.

    Rows are a mix of a Dirichlet draw and the uniform distribution, which
    floors every entry at mix/s and keeps the chain well conditioned.
    """
    rows = (1.0 - mix) * rng.dirichlet(np.ones(s), size=s) + mix / s
    return validate_transition(rows)


def random_noise(rng, s, scale=1.0) -> NoiseGenerator:
    """Random noise generator, scaled so epsilon_max == scale."""
    t = rng.uniform(0.1, 1.0, size=(s, s))
    np.fill_diagonal(t, 0.0)
    t[np.arange(s), np.arange(s)] = -t.sum(axis=1)
    t *= scale / np.max(np.abs(np.diag(t)))
    return validate_noise(t)


def random_model(rng, s, mix=0.5) -> HmpModel:
    return HmpModel(transition=random_transition(rng, s, mix=mix),
                    noise=random_noise(rng, s))
