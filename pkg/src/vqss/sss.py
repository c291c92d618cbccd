"""Classical threshold sharing with additive components.

Any scheme usable by the qudit protocol must let each participant turn its
share into a *component* c_j such that, over an authorized set, the
components sum to the private value modulo the field size. Shamir's scheme
does this with Lagrange weights evaluated at zero.
"""

from __future__ import annotations

import abc
import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .gf import FieldElement, PrimeModulus

__all__ = [
    "SharingError",
    "CensusCapExceeded",
    "CENSUS_CAP",
    "Polynomial",
    "Share",
    "Component",
    "AdditiveComponentScheme",
    "ShamirScheme",
    "AdditiveNofN",
    "uniform_residues",
    "deal",
    "deal_polynomial",
    "component",
    "reconstruct",
    "interpolate_at_zero",
    "secrecy_census",
    "census_mutual_information",
]

CENSUS_CAP = 10**7


class SharingError(ValueError):
    pass


class CensusCapExceeded(SharingError):
    pass


def uniform_residues(rng, d: int, size: int) -> list[int]:
    """``size`` independent uniform draws from [0, d)."""
    if size == 0:
        return []
    return [int(v) for v in rng.integers(0, d, size=size, dtype=np.uint64)]


@dataclass(frozen=True)
class Polynomial:
    """f(x) = a_0 + a_1 x + ... + a_{t-1} x^{t-1} over GF(d); a_0 is the dealt value."""

    coefficients: tuple[FieldElement, ...]

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        if not coeffs:
            raise SharingError("polynomial needs at least the constant term")
        d = coeffs[0].modulus.d
        if any(c.modulus.d != d for c in coeffs):
            raise SharingError("coefficients from different fields")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def of(cls, d, values: Sequence[int]) -> Polynomial:
        m = d if isinstance(d, PrimeModulus) else PrimeModulus(int(d))
        return cls(tuple(m(v) for v in values))

    @property
    def modulus(self) -> PrimeModulus:
        return self.coefficients[0].modulus

    @property
    def threshold(self) -> int:
        return len(self.coefficients)

    @property
    def secret(self) -> FieldElement:
        return self.coefficients[0]

    def __call__(self, x) -> FieldElement:
        d = self.modulus.d
        xv = int(x) % d
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * xv + c.value) % d
        return self.modulus(acc)

    def shares(self, xs: Sequence[FieldElement]) -> list[Share]:
        _check_xs(xs, self.modulus.d)
        return [Share(x, self(x)) for x in xs]


@dataclass(frozen=True)
class Share:
    x: FieldElement
    y: FieldElement

    def __post_init__(self):
        if self.x.modulus.d != self.y.modulus.d:
            raise SharingError("share coordinates from different fields")
        if self.x.value == 0:
            raise SharingError("share identity x must be nonzero")

    @property
    def modulus(self) -> PrimeModulus:
        return self.x.modulus


@dataclass(frozen=True)
class Component:
    value: FieldElement
    owner: Hashable


def _check_xs(xs: Sequence[FieldElement], d: int) -> None:
    seen = set()
    for x in xs:
        if not isinstance(x, FieldElement):
            raise SharingError(f"x must be a field element, got {x!r}")
        if x.modulus.d != d:
            raise SharingError(f"x={x!r} is not in GF({d})")
        if x.value == 0:
            raise SharingError("x = 0 is reserved for the secret")
        if x.value in seen:
            raise SharingError(f"duplicate x = {x.value}")
        seen.add(x.value)


def deal(s: FieldElement, t: int, xs: Sequence[FieldElement], rng) -> list[Share]:
    """Shamir shares of ``s``; a_1..a_{t-1} uniform on GF(d), zero included."""
    return deal_polynomial(s, t, xs, rng).shares(xs)


def deal_polynomial(s: FieldElement, t: int, xs: Sequence[FieldElement], rng) -> Polynomial:
    if not isinstance(s, FieldElement):
        raise SharingError(f"secret must be a field element, got {s!r}")
    d = s.modulus.d
    n = len(xs)
    if not 1 <= t <= n:
        raise SharingError(f"need 1 <= t <= n, got t={t}, n={n}")
    if n >= d:
        raise SharingError(f"need n < d, got n={n}, d={d}")
    _check_xs(xs, d)
    rest = uniform_residues(rng, d, t - 1)
    return Polynomial((s, *(s.modulus(a) for a in rest)))


def component(share: Share, xs_active: Sequence[FieldElement]) -> FieldElement:
    """c_j = f(x_j) * prod_{r != j} x_r / (x_r - x_j)."""
    d = share.modulus.d
    _check_xs(xs_active, d)
    if share.x not in xs_active:
        raise SharingError(f"share x={share.x.value} is not in the active set")
    xj = share.x.value
    num, den = 1, 1
    for x in xs_active:
        xr = x.value
        if xr == xj:
            continue
        num = num * xr % d
        den = den * (xr - xj) % d
    return share.y * num * share.modulus(den).inverse()


def reconstruct(components: Sequence) -> FieldElement:
    """Sum of components mod d."""
    if not components:
        raise SharingError("no components to combine")
    vals = [c.value if isinstance(c, Component) else c for c in components]
    total = vals[0]
    for v in vals[1:]:
        total = total + v
    return total


def interpolate_at_zero(shares: Sequence[Share]) -> FieldElement:
    """Full Lagrange interpolation at 0 (independent of ``component``)."""
    if not shares:
        raise SharingError("no shares")
    m = shares[0].modulus
    _check_xs([s.x for s in shares], m.d)
    acc = m.zero
    for i, si in enumerate(shares):
        basis = m.one
        for j, sj in enumerate(shares):
            if i != j:
                basis = basis * (m.zero - sj.x) / (si.x - sj.x)
        acc = acc + si.y * basis
    return acc


class AdditiveComponentScheme(abc.ABC):
    """A threshold scheme whose authorized components sum to the secret mod d."""

    def __init__(self, modulus: PrimeModulus):
        self.modulus = modulus

    @abc.abstractmethod
    def deal(self, secret: FieldElement, t: int, xs: Sequence[FieldElement], rng) -> list[Share]:
        ...

    @abc.abstractmethod
    def component(self, share: Share, xs_active: Sequence[FieldElement]) -> FieldElement:
        ...

    def authorized(self, t: int, xs_active: Sequence[FieldElement]) -> bool:
        return len(xs_active) >= t

    def reconstruct(self, shares: Sequence[Share]) -> FieldElement:
        xs = [s.x for s in shares]
        return reconstruct([self.component(s, xs) for s in shares])


class ShamirScheme(AdditiveComponentScheme):
    def deal(self, secret, t, xs, rng):
        return deal(secret, t, xs, rng)

    def component(self, share, xs_active):
        return component(share, xs_active)


class AdditiveNofN(AdditiveComponentScheme):
    """(n, n) additive sharing: the share value is its own component.

    Only the full set of n shareholders is authorized, so ``t`` must equal n.
    """

    def deal(self, secret, t, xs, rng):
        n = len(xs)
        if t != n:
            raise SharingError(f"additive sharing is (n, n); got t={t}, n={n}")
        _check_xs(xs, self.modulus.d)
        parts = [self.modulus(v) for v in uniform_residues(rng, self.modulus.d, n - 1)]
        last = secret
        for p in parts:
            last = last - p
        return [Share(x, y) for x, y in zip(xs, [*parts, last])]

    def component(self, share, xs_active):
        _check_xs(xs_active, self.modulus.d)
        if share.x not in xs_active:
            raise SharingError(f"share x={share.x.value} is not in the active set")
        return share.y

    def authorized(self, t, xs_active):
        return len(xs_active) == t


def secrecy_census(d: int, t: int, fixed_shares: Sequence[Share], *, cap: int = CENSUS_CAP,
                   allow_determined: bool = False) -> dict[int, int]:
    """Count, for each a_0, the degree < t polynomials consistent with ``fixed_shares``.

    Enumerates all d**t coefficient vectors. ``allow_determined`` lifts the
    ``len(fixed_shares) <= t - 1`` precondition for negative controls.
    """
    d = int(d)
    if t < 1:
        raise SharingError("t must be >= 1")
    if len(fixed_shares) > t - 1 and not allow_determined:
        raise SharingError(f"census takes at most t-1={t - 1} shares, got {len(fixed_shares)}")
    total = d**t
    if total > cap:
        raise CensusCapExceeded(f"d**t = {total} polynomials exceeds cap {cap}")
    _check_xs([s.x for s in fixed_shares], d)

    # rows: all (a_1..a_{t-1}); each a_0 handled as a shift of the evaluations
    rest = t - 1
    if rest:
        grids = np.indices((d,) * rest, dtype=np.int64).reshape(rest, -1)
    else:
        grids = np.zeros((0, 1), dtype=np.int64)
    counts = Counter({a0: 0 for a0 in range(d)})
    for a0 in range(d):
        ok = np.ones(grids.shape[1], dtype=bool)
        for sh in fixed_shares:
            x, y = sh.x.value, sh.y.value
            acc = np.zeros(grids.shape[1], dtype=np.int64)
            for i in range(rest - 1, -1, -1):
                acc = (acc * x + grids[i]) % d
            val = (acc * x + a0) % d
            ok &= val == y
        counts[a0] = int(ok.sum())
    return dict(sorted(counts.items()))


def census_mutual_information(census: dict[int, int]) -> float:
    """I(S; shares) in bits for a uniform prior, from one census histogram."""
    total = sum(census.values())
    if total == 0:
        raise SharingError("census is empty: fixed shares are inconsistent")
    h = 0.0
    for c in census.values():
        if c:
            p = c / total
            h -= p * math.log2(p)
    mi = math.log2(len(census)) - h
    return 0.0 if abs(mi) < 1e-12 else mi
