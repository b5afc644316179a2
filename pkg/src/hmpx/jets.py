"""Truncated Taylor-series arithmetic ("jets").

A jet is a number-like value that carries a function's Taylor coefficients
up to a fixed truncation order.  Feeding jet variables through ordinary
arithmetic propagates exact derivatives: if ``e = UniJet.variable(4)`` then
``(1 + e).log()`` holds the first five coefficients of log(1+x).

Two flavors are provided:

``UniJet``
    One expansion variable, dense coefficient vector of fixed order K.
    Supports +, -, * (with other jets of the same order and with plain
    scalars) and log().  No division or exp; the entropy sums only need
    the (-p log p) calculus.

``MultiJet``
    n expansion variables truncated by *total* degree D, stored sparsely
    as {exponent tuple: coefficient}.  Same operations, plus extraction
    of mixed partial derivatives and specialization of all variables to a
    single shared one (which must reproduce the UniJet result).

Both are immutable value types; all operations return fresh jets.
Mixing truncation orders or (nvars, cap) configurations is an error,
never an implicit resize.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement, product

import numpy as np

from .errors import (
    ConfigMismatch,
    DegreeExceedsCap,
    NonPositiveConstantTerm,
    OrderMismatch,
)

# Refusal caps for the multivariate layer; lemma checks only need tiny
# systems and anything larger would thrash.
MULTIJET_MAX_VARS = 10
MULTIJET_MAX_DEGREE = 12

_SCALARS = (int, float, np.integer, np.floating)


class UniJet:
    """Univariate truncated Taylor series; coeffs[k] multiplies x**k."""

    __slots__ = ("coeffs",)
    __array_ufunc__ = None  # numpy scalars defer to __radd__/__rmul__

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("UniJet needs a nonempty 1-D coefficient array")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("UniJet is immutable")

    @classmethod
    def constant(cls, value, order):
        if order < 0:
            raise ValueError("order must be >= 0")
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, order):
        if order < 0:
            raise ValueError("order must be >= 0")
        c = np.zeros(order + 1)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def order(self):
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return float(self.coeffs[k])

    def _coerce(self, other):
        if isinstance(other, UniJet):
            if other.order != self.order:
                raise OrderMismatch(f"orders {self.order} and {other.order} differ")
            return other.coeffs
        if isinstance(other, _SCALARS):
            c = np.zeros(self.coeffs.size)
            c[0] = other
            return c
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return UniJet(self.coeffs + c)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return UniJet(self.coeffs - c)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return UniJet(c - self.coeffs)

    def __neg__(self):
        return UniJet(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, UniJet):
            if other.order != self.order:
                raise OrderMismatch(f"orders {self.order} and {other.order} differ")
            return UniJet(np.convolve(self.coeffs, other.coeffs)[: self.coeffs.size])
        if isinstance(other, _SCALARS):
            return UniJet(self.coeffs * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def log(self):
        """Taylor coefficients of log(self), natural log.

        Solved order by order from a * (log a)' = a', which reuses the
        input coefficients instead of composing a log(1+u) series.
        """
        a = self.coeffs
        if a[0] <= 0.0:
            raise NonPositiveConstantTerm(f"log of jet with constant term {a[0]!r}")
        k_max = self.order
        b = np.empty(k_max + 1)
        wb = np.empty(k_max + 1)  # wb[j] = j * b[j]
        b[0] = math.log(a[0])
        wb[0] = 0.0
        for k in range(1, k_max + 1):
            s = float(np.dot(a[1:k], wb[k - 1:0:-1]))
            b[k] = (a[k] - s / k) / a[0]
            wb[k] = k * b[k]
        return UniJet(b)

    def __call__(self, x):
        """Evaluate the truncated polynomial at x (Horner)."""
        acc = 0.0
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc

    def __reduce__(self):
        return (UniJet, (np.array(self.coeffs),))

    def __repr__(self):
        return f"UniJet({self.coeffs.tolist()})"


def monomials(nvars, cap):
    """All exponent tuples with sum <= cap, in graded lexicographic order."""
    out = [(0,) * nvars]
    for degree in range(1, cap + 1):
        block = []
        for positions in combinations_with_replacement(range(nvars), degree):
            e = [0] * nvars
            for p in positions:
                e[p] += 1
            block.append(tuple(e))
        out.extend(sorted(set(block)))
    return out


def _check_config(nvars, cap):
    if not (1 <= nvars <= MULTIJET_MAX_VARS):
        raise DegreeExceedsCap(f"nvars = {nvars} outside [1, {MULTIJET_MAX_VARS}]")
    if not (0 <= cap <= MULTIJET_MAX_DEGREE):
        raise DegreeExceedsCap(f"cap = {cap} outside [0, {MULTIJET_MAX_DEGREE}]")


# Exponent tuples are packed into one int, 4 bits per variable, so adding
# exponent vectors is a single integer add.  Safe because the total degree
# is capped at 12 < 16, which also bounds every per-variable exponent.
_SHIFT = 4
_MASK = (1 << _SHIFT) - 1


def _encode(e):
    key = 0
    for i, v in enumerate(e):
        key |= int(v) << (_SHIFT * i)
    return key


def _decode(key, nvars):
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(nvars))


def _key_degree(key):
    d = 0
    while key:
        d += key & _MASK
        key >>= _SHIFT
    return d


@lru_cache(maxsize=256)
def space_keys(nvars, cap, bounds=None):
    """Ordered encoded exponent keys admitted by a configuration."""
    if bounds is None:
        return tuple(_encode(e) for e in monomials(nvars, cap))
    ranges = [range(min(int(b), cap) + 1) for b in bounds]
    return tuple(sorted(_encode(e) for e in product(*ranges) if sum(e) <= cap))


@lru_cache(maxsize=256)
def _valid_keys(nvars, cap, bounds):
    return frozenset(space_keys(nvars, cap, bounds))


class MultiJet:
    """Multivariate truncated Taylor series with a total-degree cap.

    Sparse: absent exponent tuples mean coefficient zero.  An optional
    ``bounds`` tuple additionally caps each variable's exponent; that is
    a quotient by a monomial ideal, so coefficients inside the box stay
    exact while everything outside is discarded.  Mixed-partial
    extraction exploits it to keep supports tiny.
    """

    __slots__ = ("nvars", "cap", "bounds", "_raw")
    __array_ufunc__ = None

    def __init__(self, nvars, cap, terms, bounds=None):
        _check_config(nvars, cap)
        if bounds is not None:
            bounds = tuple(int(b) for b in bounds)
            if len(bounds) != nvars or any(b < 0 for b in bounds):
                raise ValueError(f"bad bounds {bounds} for nvars={nvars}")
        raw = {}
        valid = _valid_keys(nvars, cap, bounds)
        for e, c in terms.items():
            if len(e) != nvars or any(k < 0 for k in e):
                raise ValueError(f"bad exponent tuple {e} for nvars={nvars}")
            if sum(e) > cap:
                raise DegreeExceedsCap(f"exponent {e} exceeds total-degree cap {cap}")
            key = _encode(e)
            if c != 0.0 and key in valid:
                raw[key] = float(c)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "cap", cap)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "_raw", raw)

    def __setattr__(self, name, value):
        raise AttributeError("MultiJet is immutable")

    @classmethod
    def _from_raw(cls, nvars, cap, bounds, raw):
        jet = cls.__new__(cls)
        object.__setattr__(jet, "nvars", nvars)
        object.__setattr__(jet, "cap", cap)
        object.__setattr__(jet, "bounds", bounds)
        object.__setattr__(jet, "_raw", raw)
        return jet

    @classmethod
    def constant(cls, value, nvars, cap, bounds=None):
        return cls(nvars, cap, {(0,) * nvars: float(value)}, bounds)

    @classmethod
    def variable(cls, index, nvars, cap, bounds=None):
        """Jet for the index-th variable (0-based)."""
        if not (0 <= index < nvars):
            raise ValueError(f"variable index {index} outside [0, {nvars})")
        e = [0] * nvars
        e[index] = 1
        if sum(e) > cap:
            return cls(nvars, cap, {}, bounds)
        return cls(nvars, cap, {tuple(e): 1.0}, bounds)

    @property
    def terms(self):
        return {_decode(k, self.nvars): c for k, c in self._raw.items()}

    def _config(self):
        return (self.nvars, self.cap, self.bounds)

    def _check_like(self, other):
        if other._config() != self._config():
            raise ConfigMismatch(
                f"configs {self._config()} and {other._config()} differ"
            )

    def coefficient(self, exponents):
        e = tuple(int(k) for k in exponents)
        if len(e) != self.nvars or any(k < 0 for k in e):
            raise ValueError(f"bad exponent vector {exponents}")
        return self._raw.get(_encode(e), 0.0)

    @property
    def constant_term(self):
        return self._raw.get(0, 0.0)

    def __add__(self, other):
        if isinstance(other, _SCALARS):
            out = dict(self._raw)
            v = out.get(0, 0.0) + float(other)
            if v == 0.0:
                out.pop(0, None)
            else:
                out[0] = v
            return MultiJet._from_raw(self.nvars, self.cap, self.bounds, out)
        if not isinstance(other, MultiJet):
            return NotImplemented
        self._check_like(other)
        out = dict(self._raw)
        for k, c in other._raw.items():
            v = out.get(k, 0.0) + c
            if v == 0.0:
                out.pop(k, None)
            else:
                out[k] = v
        return MultiJet._from_raw(self.nvars, self.cap, self.bounds, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultiJet) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        raw = {k: -c for k, c in self._raw.items()}
        return MultiJet._from_raw(self.nvars, self.cap, self.bounds, raw)

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            f = float(other)
            if f == 0.0:
                return MultiJet._from_raw(self.nvars, self.cap, self.bounds, {})
            raw = {k: c * f for k, c in self._raw.items()}
            return MultiJet._from_raw(self.nvars, self.cap, self.bounds, raw)
        if not isinstance(other, MultiJet):
            return NotImplemented
        self._check_like(other)
        # Sparser factor outermost; the other bucketed by total degree so
        # the cap prunes whole blocks (also keeps nibble adds carry-free).
        a, b = self._raw, other._raw
        if len(a) > len(b):
            a, b = b, a
        buckets = {}
        for k, c in b.items():
            buckets.setdefault(_key_degree(k), []).append((k, c))
        out = {}
        cap = self.cap
        for k1, c1 in a.items():
            d1 = _key_degree(k1)
            for d2, block in buckets.items():
                if d1 + d2 > cap:
                    continue
                for k2, c2 in block:
                    key = k1 + k2
                    out[key] = out.get(key, 0.0) + c1 * c2
        if self.bounds is not None:
            valid = _valid_keys(self.nvars, self.cap, self.bounds)
            out = {k: c for k, c in out.items() if k in valid}
        return MultiJet._from_raw(self.nvars, self.cap, self.bounds, out)

    __rmul__ = __mul__

    def log(self):
        """Natural log, solved degree layer by degree layer.

        Uses the Euler-operator identity a * E(log a) = E(a), the
        multivariate counterpart of the univariate recurrence, so each
        graded component of the result comes from one convolution with
        the input's components.
        """
        a0 = self._raw.get(0, 0.0)
        if a0 <= 0.0:
            raise NonPositiveConstantTerm(f"log of multijet with constant term {a0!r}")
        a_parts = [dict() for _ in range(self.cap + 1)]
        for k, c in self._raw.items():
            d = _key_degree(k)
            if d > 0:
                a_parts[d][k] = c
        valid = None
        if self.bounds is not None:
            valid = _valid_keys(self.nvars, self.cap, self.bounds)
        b_parts = [dict() for _ in range(self.cap + 1)]
        out = {0: math.log(a0)}
        for d in range(1, self.cap + 1):
            acc = {k: d * c for k, c in a_parts[d].items()}
            for f in range(1, d):
                bf = b_parts[f]
                af = a_parts[d - f]
                if not bf or not af:
                    continue
                for k1, c1 in bf.items():
                    w1 = f * c1
                    for k2, c2 in af.items():
                        key = k1 + k2
                        acc[key] = acc.get(key, 0.0) - w1 * c2
            scale = 1.0 / (d * a0)
            if valid is None:
                layer = {k: c * scale for k, c in acc.items() if c != 0.0}
            else:
                layer = {k: c * scale for k, c in acc.items()
                         if c != 0.0 and k in valid}
            b_parts[d] = layer
            out.update(layer)
        return MultiJet._from_raw(self.nvars, self.cap, self.bounds, out)

    def mixed_partial(self, exponents):
        """Mixed partial derivative at the origin for the given exponent vector.

        The stored value is a Taylor coefficient; the derivative multiplies
        back the product of factorials.
        """
        e = tuple(int(k) for k in exponents)
        if len(e) != self.nvars or any(k < 0 for k in e):
            raise ValueError(f"bad exponent vector {exponents}")
        if sum(e) > self.cap:
            raise DegreeExceedsCap(f"requested weight {sum(e)} exceeds cap {self.cap}")
        fact = 1.0
        for k in e:
            fact *= math.factorial(k)
        return self._raw.get(_encode(e), 0.0) * fact

    def specialize_to_univariate(self):
        """Set every variable to one shared variable; returns a UniJet of order cap."""
        c = np.zeros(self.cap + 1)
        for k, v in self._raw.items():
            c[_key_degree(k)] += v
        return UniJet(c)

    def __reduce__(self):
        return (MultiJet, (self.nvars, self.cap, self.terms, self.bounds))

    def __repr__(self):
        body = ", ".join(f"{e}: {c}" for e, c in sorted(self.terms.items()))
        return f"MultiJet(nvars={self.nvars}, cap={self.cap}, {{{body}}})"
