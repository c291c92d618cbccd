"""Single-qudit statevector simulation in the d cyclic mutually unbiased bases.

For prime d the vectors

    |phi_l^k> = d^-1/2 sum_j omega^{j(l + k j)} |j>,    omega = exp(2 pi i / d)

form d mutually unbiased bases (k labels the basis, l the vector). The
diagonal unitaries X_d = diag(omega^j) and Y_d = diag(omega^{j^2}) shift l and
k by one, so U_{p,q} = X_d^p Y_d^q maps |phi_l^k> to |phi_{l+p}^{k+q}>.

Two representations are kept side by side: ``QuditState`` holds amplitudes,
``MubLabel`` holds the exact (l, k) pair. ``label_apply`` is the symbolic twin
of ``apply_unitary`` and serves as an oracle for it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .gf import FieldElement, PrimeModulus

__all__ = [
    "MAX_QUDIT_DIM",
    "ATOL",
    "NORM_DRIFT",
    "QuditSpace",
    "QuditState",
    "MubLabel",
    "space",
    "mub_vector",
    "computational_vector",
    "inner_product",
    "apply_unitary",
    "measure_in_basis",
    "basis_probabilities",
    "label_apply",
    "states_close",
]

# Statevectors are dense; the field itself allows much larger moduli.
MAX_QUDIT_DIM = 1 << 16

ATOL = 1e-9
NORM_DRIFT = 1e-12


class QuditError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuditSpace:
    d: PrimeModulus
    roots: np.ndarray  # roots[e] = omega**e, e in [0, d)

    @property
    def dim(self) -> int:
        return self.d.d

    @property
    def omega(self) -> complex:
        return complex(self.roots[1])


@lru_cache(maxsize=None)
def _space(d: int) -> QuditSpace:
    modulus = PrimeModulus(d)
    if d > MAX_QUDIT_DIM:
        raise QuditError(f"qudit dimension {d} exceeds simulator limit {MAX_QUDIT_DIM}")
    roots = np.array([cmath.exp(2j * math.pi * e / d) for e in range(d)], dtype=np.complex128)
    roots.setflags(write=False)
    return QuditSpace(modulus, roots)


def space(d) -> QuditSpace:
    """Shared, cached space for dimension ``d`` (int or PrimeModulus)."""
    return _space(int(d.d if isinstance(d, PrimeModulus) else d))


@dataclass(frozen=True, eq=False)
class QuditState:
    amplitudes: np.ndarray
    space: QuditSpace

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.space.dim,):
            raise QuditError(f"expected {self.space.dim} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def d(self) -> int:
        return self.space.dim

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def is_normalized(self, tol: float = ATOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol


@dataclass(frozen=True)
class MubLabel:
    l: FieldElement
    k: FieldElement

    def __post_init__(self):
        if self.l.modulus.d != self.k.modulus.d:
            raise QuditError("label components live in different fields")

    @classmethod
    def of(cls, d, l: int, k: int) -> MubLabel:
        m = d if isinstance(d, PrimeModulus) else PrimeModulus(int(d))
        return cls(m(l), m(k))

    @property
    def d(self) -> int:
        return self.l.modulus.d

    def as_tuple(self) -> tuple[int, int]:
        return (self.l.value, self.k.value)


def mub_vector(label: MubLabel) -> QuditState:
    sp = space(label.d)
    out = np.empty(sp.dim, dtype=np.complex128)
    kernels.mub_fill(out, sp.roots, label.l.value, label.k.value)
    return QuditState(out, sp)


def computational_vector(d, j: int) -> QuditState:
    """|j> of the computational basis (the remaining, (d+1)-th MUB)."""
    sp = space(d)
    out = np.zeros(sp.dim, dtype=np.complex128)
    out[j % sp.dim] = 1.0
    return QuditState(out, sp)


def _same_space(a: QuditState, b: QuditState) -> None:
    if a.d != b.d:
        raise QuditError(f"dimension mismatch: {a.d} vs {b.d}")


def inner_product(a: QuditState, b: QuditState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    _same_space(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _field_value(x, d: int) -> int:
    if isinstance(x, FieldElement):
        if x.modulus.d != d:
            raise QuditError(f"exponent from GF({x.modulus.d}) applied to a d={d} qudit")
        return x.value
    return int(x) % d


def apply_unitary(state: QuditState, p, q) -> QuditState:
    """U_{p,q} = X_d^p Y_d^q as one diagonal phase pass."""
    d = state.d
    amps = state.amplitudes.copy()
    kernels.phase_apply(amps, state.space.roots, _field_value(p, d), _field_value(q, d))
    return QuditState(amps, state.space)


def basis_probabilities(state: QuditState, k) -> np.ndarray:
    """|<phi_l^k|state>|^2 for l = 0..d-1 (not renormalised)."""
    out = np.empty(state.d, dtype=np.float64)
    kernels.mub_probs(state.amplitudes, state.space.roots, _field_value(k, state.d), out)
    return out


def measure_in_basis(state: QuditState, k, rng) -> tuple[FieldElement, QuditState]:
    """Projective measurement in basis k; returns the outcome l and |phi_l^k>."""
    d = state.d
    kv = _field_value(k, d)
    probs = basis_probabilities(state, kv)
    l = kernels.sample_index(probs, float(rng.random()))
    modulus = state.space.d
    outcome = modulus(l)
    return outcome, mub_vector(MubLabel(outcome, modulus(kv)))


def label_apply(label: MubLabel, p, q) -> MubLabel:
    d = label.d
    return MubLabel(label.l + _field_value(p, d), label.k + _field_value(q, d))


def states_close(a: QuditState, b: QuditState, atol: float = ATOL) -> bool:
    """Componentwise equality; no global-phase slack."""
    _same_space(a, b)
    return bool(np.max(np.abs(a.amplitudes - b.amplitudes)) <= atol)
