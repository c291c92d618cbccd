"""Self-check suite run by ``vqss properties``.

Each check returns a :class:`CheckResult`; the suite passes only if all do.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import qudit as qd
from .gf import PrimeModulus
from .qudit import MubLabel
from .sss import Share, secrecy_census

__all__ = ["CheckResult", "run_suite", "mub_table"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def mub_table(d: int, perturb: float = 0.0) -> np.ndarray:
    """Array [k, l, j] of all d*d MUB vectors; ``perturb`` corrupts one amplitude."""
    out = np.empty((d, d, d), dtype=np.complex128)
    for k in range(d):
        for l in range(d):
            out[k, l] = qd.mub_vector(MubLabel.of(d, l, k)).amplitudes
    if perturb:
        out[0, 0, 0] += perturb
    return out


def check_mub(d: int, tol: float = qd.ATOL, perturb: float = 0.0) -> list[CheckResult]:
    vecs = mub_table(d, perturb)
    gram = np.einsum("kli,mni->klmn", vecs.conj(), vecs)
    worst_orth = 0.0
    worst_unb = 0.0
    for k, kp in itertools.product(range(d), repeat=2):
        block = gram[k, :, kp, :]
        if k == kp:
            worst_orth = max(worst_orth, float(np.max(np.abs(block - np.eye(d)))))
        else:
            worst_unb = max(worst_unb, float(np.max(np.abs(np.abs(block) ** 2 - 1 / d))))
    return [
        CheckResult(f"mub-orthonormal d={d}", worst_orth <= tol, f"max dev {worst_orth:.2e}"),
        CheckResult(f"mub-unbiased d={d}", worst_unb <= tol, f"max dev {worst_unb:.2e}"),
    ]


def check_cyclic(d: int, tol: float = qd.ATOL) -> CheckResult:
    """apply_unitary against label_apply over every (l, k, p, q)."""
    worst = 0.0
    mod = PrimeModulus(d)
    for l, k in itertools.product(range(d), repeat=2):
        lab = MubLabel(mod(l), mod(k))
        st = qd.mub_vector(lab)
        for p, q in itertools.product(range(d), repeat=2):
            got = qd.apply_unitary(st, p, q).amplitudes
            want = qd.mub_vector(qd.label_apply(lab, p, q)).amplitudes
            worst = max(worst, float(np.max(np.abs(got - want))))
    return CheckResult(f"cyclic-equivalence d={d}", worst <= tol, f"{d**4} cases, max dev {worst:.2e}")


def check_composition(d: int, tol: float = qd.ATOL, rng=None, samples: int = 200) -> CheckResult:
    rng = np.random.default_rng(0) if rng is None else rng
    worst = 0.0
    for _ in range(samples):
        l, k, p1, q1, p2, q2 = (int(v) for v in rng.integers(0, d, 6))
        st = qd.mub_vector(MubLabel.of(d, l, k))
        a = qd.apply_unitary(qd.apply_unitary(st, p1, q1), p2, q2)
        b = qd.apply_unitary(qd.apply_unitary(st, p2, q2), p1, q1)
        c = qd.apply_unitary(st, (p1 + p2) % d, (q1 + q2) % d)
        worst = max(worst, float(np.max(np.abs(a.amplitudes - c.amplitudes))),
                    float(np.max(np.abs(b.amplitudes - c.amplitudes))))
        worst = max(worst, abs(a.norm() - 1.0))
    return CheckResult(f"composition d={d}", worst <= tol, f"{samples} samples, max dev {worst:.2e}")


def check_census(d: int, t: int) -> CheckResult:
    """Every choice of <= t-1 fixed shares leaves a_0 exactly uniform."""
    mod = PrimeModulus(d)
    xs_all = range(1, d)
    cases = 0
    bad = None
    for r in range(t):
        for xs in itertools.combinations(xs_all, r):
            for ys in itertools.product(range(d), repeat=r):
                fixed = [Share(mod(x), mod(y)) for x, y in zip(xs, ys)]
                counts = set(secrecy_census(d, t, fixed).values())
                cases += 1
                if len(counts) != 1:
                    bad = (xs, ys)
    detail = f"{cases} share sets, uniform" if bad is None else f"non-uniform at {bad}"
    return CheckResult(f"secrecy-census d={d} t={t}", bad is None, detail)


def run_suite(dims=(3, 5, 7, 11), census=((3, 2), (5, 2), (5, 3)), perturb: float = 0.0,
              cyclic_dims=(3, 5)) -> list[CheckResult]:
    out: list[CheckResult] = []
    for d in dims:
        out.extend(check_mub(d, perturb=perturb))
        out.append(check_composition(d))
    for d in cyclic_dims:
        out.append(check_cyclic(d))
    for d, t in census:
        out.append(check_census(d, t))
    return out
