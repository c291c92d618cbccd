"""Exact branch enumeration for small d.

A stand-alone symbolic model of the session: qudits are (l, k) label pairs,
unitaries add to them, and a measurement in basis k' of |phi_l^k> yields
outcome l' with probability 1 if k == k' and l == l', 0 if k == k' and
l != l', and 1/d if k != k'. Every random branch (Eve's guesses, measurement
outcomes, replacement labels, forged values) is enumerated with its exact
``Fraction`` weight; the result is an exact rational detection rate.

Nothing here calls the statevector simulator or :mod:`vqss.protocol`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "BranchCapExceeded",
    "BRANCH_CAP",
    "ExactRates",
    "transition_probability",
    "count_undetectable_triples",
    "exact_intercept_resend",
    "exact_fake_share",
    "exact_lying_measurer",
    "exact_state_replacement",
    "exact_rates",
]

BRANCH_CAP = 10**7


class BranchCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ExactRates:
    detection: Fraction
    disturbance: Fraction
    undetected_wrong_secret: Fraction
    correct_basis: Fraction | None = None
    branches: int = 0

    def to_dict(self) -> dict:
        def q(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"

        return {
            "detection": q(self.detection),
            "disturbance": q(self.disturbance),
            "undetected_wrong_secret": q(self.undetected_wrong_secret),
            "correct_basis": q(self.correct_basis),
            "branches": self.branches,
        }


def transition_probability(d: int, prepared: tuple[int, int], k_meas: int, outcome: int) -> Fraction:
    l, k = prepared
    if k % d == k_meas % d:
        return Fraction(int(l % d == outcome % d))
    return Fraction(1, d)


def _accept(d, R, masks, truth=None):
    rec = tuple((R[v] - masks[v]) % d for v in range(3))
    return rec[0] == rec[1] * rec[2] % d, rec


def _final_outcomes(d, labels):
    """Yield (R triple, probability) for basis-0 measurement of three labels."""
    per = []
    for lab in labels:
        opts = [(o, transition_probability(d, lab, 0, o)) for o in range(d)]
        per.append([(o, p) for o, p in opts if p])
    for combo in itertools.product(*per):
        prob = Fraction(1)
        for _, p in combo:
            prob *= p
        yield tuple(o for o, _ in combo), prob


def _check_cap(n):
    if n > BRANCH_CAP:
        raise BranchCapExceeded(f"{n} branches exceeds cap {BRANCH_CAP}")


def _setup(d, secrets, s, components, masks):
    S1, S2 = secrets
    N = S1 * pow(S2, -1, d) % d
    p0 = (S1 % d, S2 % d, N)
    if sum(components) % d != s % d:
        raise ValueError("components must sum to s")
    total_mask = tuple(sum(pj[v] for pj in masks) % d for v in range(3))
    return p0, total_mask


def _labels_at(d, p0, s, components, masks, upto):
    """Labels after the dealer and the first ``upto`` hops."""
    out = []
    for v in range(3):
        l = (p0[v] + sum(masks[j][v] for j in range(upto))) % d
        k = (-s + sum(components[:upto])) % d
        out.append((l, k))
    return out


def _advance(d, labels, components, masks, start):
    out = []
    for v, (l, k) in enumerate(labels):
        l = (l + sum(masks[j][v] for j in range(start, len(masks)))) % d
        k = (k + sum(components[start:])) % d
        out.append((l, k))
    return out


def exact_intercept_resend(d, secrets, s, components, masks, position=1, per_qudit=False):
    """Eve on link ``position`` guessing k' uniformly (one guess or one per qudit)."""
    p0, total = _setup(d, secrets, s, components, masks)
    before = _labels_at(d, p0, s, components, masks, position)
    guesses = (itertools.product(range(d), repeat=3) if per_qudit
               else ((g, g, g) for g in range(d)))
    n_guess = d**3 if per_qudit else d
    _check_cap(n_guess * d**3 * d**3)
    w_guess = Fraction(1, n_guess)
    det = dist = wrong = cb = Fraction(0)
    branches = 0
    honest_final = _advance(d, before, components, masks, position)
    for g in guesses:
        correct = all(g[v] == before[v][1] for v in range(3))
        if correct:
            cb += w_guess
        per = []
        for v in range(3):
            opts = [(o, transition_probability(d, before[v], g[v], o)) for o in range(d)]
            per.append([(o, p) for o, p in opts if p])
        for combo in itertools.product(*per):
            w = w_guess
            for _, p in combo:
                w *= p
            collapsed = [(combo[v][0], g[v]) for v in range(3)]
            final = _advance(d, collapsed, components, masks, position)
            changed = final != honest_final
            for R, pr in _final_outcomes(d, final):
                branches += 1
                ok, rec = _accept(d, R, total)
                ww = w * pr
                if not ok:
                    det += ww
                elif rec != p0:
                    wrong += ww
                if changed:
                    dist += ww
    return ExactRates(det, dist, wrong, cb, branches)


def exact_fake_share(d, secrets, s, components, masks, cheater=1, inclusive=False):
    p0, total = _setup(d, secrets, s, components, masks)
    honest_c = components[cheater - 1]
    forged = [c for c in range(d) if inclusive or c != honest_c]
    _check_cap(len(forged) * d**3)
    w0 = Fraction(1, len(forged))
    det = dist = wrong = Fraction(0)
    branches = 0
    for c in forged:
        comps = list(components)
        comps[cheater - 1] = c
        final = _advance(d, [(p0[v], -s % d) for v in range(3)], comps, masks, 0)
        if c != honest_c:
            dist += w0
        for R, pr in _final_outcomes(d, final):
            branches += 1
            ok, rec = _accept(d, R, total)
            if not ok:
                det += w0 * pr
            elif rec != p0:
                wrong += w0 * pr
    return ExactRates(det, dist, wrong, None, branches)


def count_undetectable_triples(d, N):
    """#{R' in GF(d)^3 : (R1'-N1) == (R2'-N2)(R3'-N3)} for mask sums N."""
    return sum(
        1 for R in itertools.product(range(d), repeat=3)
        if (R[0] - N[0]) % d == (R[1] - N[1]) * (R[2] - N[2]) % d
    )


def exact_lying_measurer(d, secrets, s, components, masks, inclusive=False):
    p0, total = _setup(d, secrets, s, components, masks)
    true_R = tuple((p0[v] + total[v]) % d for v in range(3))
    forged = [R for R in itertools.product(range(d), repeat=3) if inclusive or R != true_R]
    _check_cap(len(forged))
    w = Fraction(1, len(forged))
    det = dist = wrong = Fraction(0)
    for R in forged:
        ok, rec = _accept(d, R, total)
        if R != true_R:
            dist += w
        if not ok:
            det += w
        elif rec != p0:
            wrong += w
    return ExactRates(det, dist, wrong, None, len(forged))


def exact_state_replacement(d, secrets, s, components, masks, position=1):
    p0, total = _setup(d, secrets, s, components, masks)
    before = _labels_at(d, p0, s, components, masks, position)
    honest_final = _advance(d, before, components, masks, position)
    labels = list(itertools.product(range(d), repeat=2))
    _check_cap(len(labels) ** 3 * d**3)
    w0 = Fraction(1, len(labels) ** 3)
    det = dist = wrong = Fraction(0)
    branches = 0
    for repl in itertools.product(labels, repeat=3):
        final = _advance(d, list(repl), components, masks, position)
        changed = final != honest_final
        for R, pr in _final_outcomes(d, final):
            branches += 1
            ok, rec = _accept(d, R, total)
            ww = w0 * pr
            if not ok:
                det += ww
            elif rec != p0:
                wrong += ww
            if changed:
                dist += ww
    return ExactRates(det, dist, wrong, None, branches)


def exact_rates(strategy_name, d, secrets, s, components, masks, **knobs):
    fn = {
        "intercept-resend": exact_intercept_resend,
        "fake-share": exact_fake_share,
        "lying-measurer": exact_lying_measurer,
        "state-replacement": exact_state_replacement,
    }[strategy_name]
    return fn(d, secrets, s, components, masks, **knobs)
