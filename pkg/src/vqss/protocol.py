"""The sequential secret-sharing session.

Alice prepares three qudits |phi_{p0^v}^{d-s}>, v = 1..3, with p0 = (S1, S2, N)
and S1 = S2 * N. Each active participant j applies U_{p_j^v, c_j} with fresh
random p_j^v and its Shamir component c_j. Because the components sum to s,
the basis index returns to 0, the last participant measures in basis 0 and
publishes R_v = sum_j p_j^v. After R is public the participants exchange their
p_j^v, subtract, and accept iff p0^1 == p0^2 * p0^3.

Adversaries plug in through :class:`SessionHooks`.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from . import qudit as qd
from .gf import FieldElement, PrimeModulus
from .qudit import MubLabel, QuditState
from .sss import (
    AdditiveComponentScheme,
    Polynomial,
    ShamirScheme,
    Share,
    deal_polynomial,
    component,
    uniform_residues,
)

__all__ = [
    "ProtocolError",
    "MalformedTranscript",
    "Verdict",
    "Participant",
    "SessionParams",
    "DealerSecrets",
    "ClassicalDeal",
    "HopRecord",
    "Transcript",
    "SessionHooks",
    "deal_classical",
    "dealer_prepare",
    "participant_hop",
    "final_measure",
    "recover",
    "verify",
    "run_session",
    "run_honest_session",
    "audit",
    "initial_labels",
    "TRANSCRIPT_SCHEMA",
]

TRANSCRIPT_SCHEMA = "vqss.transcript/1"


class ProtocolError(ValueError):
    pass


class MalformedTranscript(ProtocolError):
    pass


class Verdict(str, enum.Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Participant:
    ident: Hashable
    x: FieldElement


@dataclass(frozen=True)
class SessionParams:
    """Who holds shares and who takes part, in line order Bob_1 -> ... -> Bob_m.

    ``shareholders`` lists all n identities with their public x; ``active`` is
    the ordered line. ``allow_unauthorized`` admits m < t for experiments
    that need a deliberately short line.
    """

    d: PrimeModulus
    t: int
    shareholders: tuple[Participant, ...]
    active: tuple[Participant, ...]
    allow_unauthorized: bool = False

    def __post_init__(self):
        d = self.d.d
        n, m = len(self.shareholders), len(self.active)
        if self.t < 1:
            raise ProtocolError(f"threshold t must be >= 1, got {self.t}")
        if not self.t <= n:
            raise ProtocolError(f"need t <= n, got t={self.t}, n={n}")
        if n >= d:
            raise ProtocolError(f"need n < d, got n={n}, d={d}")
        if m < 1:
            raise ProtocolError("the line needs at least one participant")
        if m < self.t and not self.allow_unauthorized:
            raise ProtocolError(f"need m >= t, got m={m}, t={self.t}")
        if m > n:
            raise ProtocolError(f"need m <= n, got m={m}, n={n}")
        xs = [p.x for p in self.shareholders]
        if any(x.modulus.d != d for x in xs):
            raise ProtocolError("shareholder x outside GF(d)")
        if any(x.value == 0 for x in xs):
            raise ProtocolError("shareholder x must be nonzero")
        if len({x.value for x in xs}) != n:
            raise ProtocolError("shareholder x values must be distinct")
        if len({p.ident for p in self.shareholders}) != n:
            raise ProtocolError("shareholder identities must be distinct")
        known = set(self.shareholders)
        if any(p not in known for p in self.active):
            raise ProtocolError("active participant is not a shareholder")
        if len(set(self.active)) != m:
            raise ProtocolError("participant listed twice in the line")

    @classmethod
    def build(cls, d: int, t: int, n: int, m: int | None = None, *,
              xs: Sequence[int] | None = None, order: Sequence[int] | None = None,
              allow_unauthorized: bool = False) -> SessionParams:
        """Shareholders 1..n with x_j = j unless ``xs`` given; first m (or ``order``) active."""
        mod = PrimeModulus(d)
        xs = list(range(1, n + 1)) if xs is None else list(xs)
        if len(xs) != n:
            raise ProtocolError(f"got {len(xs)} x values for n={n}")
        holders = tuple(Participant(j + 1, mod(x)) for j, x in enumerate(xs))
        if order is None:
            m = n if m is None else m
            if not 0 <= m <= n:
                raise ProtocolError(f"need m <= n, got m={m}, n={n}")
            active = holders[:m]
        else:
            by_id = {p.ident: p for p in holders}
            try:
                active = tuple(by_id[i] for i in order)
            except KeyError as e:
                raise ProtocolError(f"unknown participant {e.args[0]}") from None
        return cls(mod, t, holders, active, allow_unauthorized)

    @property
    def n(self) -> int:
        return len(self.shareholders)

    @property
    def m(self) -> int:
        return len(self.active)

    @property
    def active_xs(self) -> list[FieldElement]:
        return [p.x for p in self.active]


@dataclass(frozen=True)
class DealerSecrets:
    S1: FieldElement
    S2: FieldElement
    N: FieldElement
    s: FieldElement

    def __post_init__(self):
        if self.S2.value == 0:
            raise ProtocolError("S2 must be nonzero")
        if self.S1 != self.S2 * self.N:
            raise ProtocolError("dealer secrets violate S1 = S2 * N")

    @property
    def p0(self) -> tuple[FieldElement, FieldElement, FieldElement]:
        return (self.S1, self.S2, self.N)

    @property
    def q0(self) -> tuple[FieldElement, FieldElement, FieldElement]:
        q = -self.s
        return (q, q, q)


@dataclass(frozen=True)
class ClassicalDeal:
    """Output of the classical phase; sealed from exported transcripts."""

    s: FieldElement
    shares: dict  # ident -> Share
    polynomial: Polynomial | None = None


def deal_classical(params: SessionParams, rng, *, s: FieldElement | None = None,
                   scheme: AdditiveComponentScheme | None = None) -> ClassicalDeal:
    """Draw s uniformly (unless given) and deal shares to all n shareholders."""
    d = params.d
    if s is None:
        s = d(uniform_residues(rng, d.d, 1)[0])
    xs = [p.x for p in params.shareholders]
    if scheme is None or isinstance(scheme, ShamirScheme):
        poly = deal_polynomial(s, params.t, xs, rng)
        shares = poly.shares(xs)
    else:
        poly = None
        shares = scheme.deal(s, params.t, xs, rng)
    return ClassicalDeal(s, {p.ident: sh for p, sh in zip(params.shareholders, shares)}, poly)


@dataclass(frozen=True)
class HopRecord:
    participant: Hashable
    p: tuple[FieldElement, FieldElement, FieldElement]
    q: FieldElement
    labels_after: tuple[MubLabel, MubLabel, MubLabel] | None = None


def dealer_prepare(secrets: tuple[FieldElement, FieldElement], s: FieldElement, rng=None
                   ) -> tuple[list[QuditState], DealerSecrets]:
    """N = S1 / S2, then each |phi_0^0> is moved to |phi_{p0^v}^{-s}>.

    ``rng`` is accepted for interface symmetry; preparation is deterministic.
    """
    S1, S2 = secrets
    if S2.value == 0:
        raise ProtocolError("S2 = 0 cannot bind S1 through S1 = S2 * N")
    dealer = DealerSecrets(S1, S2, S1 / S2, s)
    start = qd.mub_vector(MubLabel(S1.modulus.zero, S1.modulus.zero))
    states = [qd.apply_unitary(start, p, q) for p, q in zip(dealer.p0, dealer.q0)]
    return states, dealer


def initial_labels(dealer: DealerSecrets) -> list[MubLabel]:
    return [MubLabel(p, q) for p, q in zip(dealer.p0, dealer.q0)]


def participant_hop(states: Sequence[QuditState], share: Share, active_xs: Sequence[FieldElement],
                    rng, *, scheme: AdditiveComponentScheme | None = None,
                    labels: Sequence[MubLabel] | None = None, ident: Hashable = None,
                    p: Sequence[int] | None = None, q: FieldElement | None = None
                    ) -> tuple[list[QuditState], HopRecord]:
    """Apply U_{p_j^v, c_j} to each of the three qudits.

    ``p`` and ``q`` override the random masks and the component (test hooks and
    cheating participants); the three masks are drawn regardless so streams
    stay aligned.
    """
    if share.x not in list(active_xs):
        raise ProtocolError(f"share x={share.x.value} does not belong to the active set")
    d = share.modulus
    drawn = uniform_residues(rng, d.d, 3)
    masks = tuple(d(v) for v in (drawn if p is None else p))
    if q is None:
        q = _component(share, active_xs, scheme)
    qj = q
    out = [qd.apply_unitary(st, pv, qj) for st, pv in zip(states, masks)]
    after = None
    if labels is not None:
        after = tuple(qd.label_apply(lab, pv, qj) for lab, pv in zip(labels, masks))
    return out, HopRecord(share.x.value if ident is None else ident, masks, qj, after)


def _component(share, xs, scheme):
    return component(share, xs) if scheme is None else scheme.component(share, xs)


def final_measure(states: Sequence[QuditState], rng) -> tuple[FieldElement, ...]:
    """Bob_m's measurement of all three qudits in basis k = 0."""
    return tuple(qd.measure_in_basis(st, 0, rng)[0] for st in states)


def recover(R: Sequence[FieldElement], exchanged: Sequence[Sequence[FieldElement]],
            m: int | None = None) -> tuple[FieldElement, ...]:
    """p0^v = R_v - sum_j p_j^v."""
    if m is not None and len(exchanged) != m:
        raise ProtocolError(f"expected randoms from {m} participants, got {len(exchanged)}")
    out = []
    for v, Rv in enumerate(R):
        acc = Rv
        for pj in exchanged:
            if len(pj) != 3:
                raise ProtocolError("each participant exchanges exactly three randoms")
            acc = acc - pj[v]
        out.append(acc)
    return tuple(out)


def verify(recovered: Sequence[FieldElement]) -> Verdict:
    a, b, c = recovered
    return Verdict.ACCEPTED if a == b * c else Verdict.REJECTED


class SessionHooks:
    """No-op adversary. Subclasses override the points they attack.

    Transit position j is the link Bob_j -> Bob_{j+1}, with Bob_0 the dealer.
    """

    def transit(self, position: int, states: list[QuditState], labels: list[MubLabel], rng
                ) -> tuple[list[QuditState], list[MubLabel]]:
        return states, labels

    def component(self, index: int, participant: Participant, honest: FieldElement, rng
                  ) -> FieldElement:
        return honest

    def publish(self, measured: tuple[FieldElement, ...], rng) -> tuple[FieldElement, ...]:
        return measured


_HONEST = SessionHooks()


@dataclass
class Transcript:
    params: SessionParams
    hops: list[HopRecord]
    R: tuple[FieldElement, ...]
    exchanged: list[tuple[FieldElement, ...]]
    recovered: tuple[FieldElement, ...]
    verdict: Verdict
    events: list[str] = field(default_factory=list)
    dealer: DealerSecrets | None = None
    deal: ClassicalDeal | None = None
    measured: tuple[FieldElement, ...] | None = None
    final_labels: list[MubLabel] | None = None
    final_states: list[QuditState] | None = None

    def to_dict(self, include_secrets: bool = False) -> dict:
        pr = self.params
        out = {
            "schema": TRANSCRIPT_SCHEMA,
            "d": pr.d.d,
            "t": pr.t,
            "n": pr.n,
            "m": pr.m,
            "xs": [x.value for x in pr.active_xs],
            "R": [r.value for r in self.R],
            "exchanged": [[v.value for v in pj] for pj in self.exchanged],
            "recovered": [v.value for v in self.recovered],
            "verdict": self.verdict.value,
            "events": list(self.events),
        }
        if include_secrets and self.dealer is not None:
            dl = self.dealer
            sealed = {"S1": dl.S1.value, "S2": dl.S2.value, "N": dl.N.value, "s": dl.s.value}
            if self.deal is not None:
                sealed["shares"] = [{"x": sh.x.value, "y": sh.y.value}
                                    for sh in self.deal.shares.values()]
            sealed["components"] = [h.q.value for h in self.hops]
            out["sealed"] = sealed
        return out

    def to_json(self, include_secrets: bool = False) -> str:
        return json.dumps(self.to_dict(include_secrets), indent=2) + "\n"


def audit(doc: dict) -> Verdict:
    """Re-derive the verdict of an exported transcript.

    Rejects transcripts whose event log is out of order (randoms exchanged
    before R was published) or whose recorded verdict does not follow from
    R and the exchanged randoms.
    """
    try:
        if doc["schema"] != TRANSCRIPT_SCHEMA:
            raise MalformedTranscript(f"unknown schema {doc['schema']!r}")
        d = PrimeModulus(int(doc["d"]))
        events = list(doc["events"])
        R = [d(int(v)) for v in doc["R"]]
        exchanged = [[d(int(v)) for v in pj] for pj in doc["exchanged"]]
        m = int(doc["m"])
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, MalformedTranscript):
            raise
        raise MalformedTranscript(f"unreadable transcript: {e}") from None
    if "publish" not in events or "exchange" not in events:
        raise MalformedTranscript("transcript lacks publish/exchange events")
    if events.index("exchange") < events.index("publish"):
        raise MalformedTranscript("randoms were exchanged before R was published")
    if len(R) != 3 or len(exchanged) != m:
        raise MalformedTranscript("R must have 3 entries and exchanged one triple per participant")
    recovered = recover(R, exchanged, m)
    if [v.value for v in recovered] != list(doc["recovered"]):
        raise MalformedTranscript("recovered values do not follow from R and the exchanged randoms")
    verdict = verify(recovered)
    if verdict.value != doc["verdict"]:
        raise MalformedTranscript("recorded verdict does not match verification")
    return verdict


def run_session(params: SessionParams, secrets: tuple[FieldElement, FieldElement], rng, *,
                deal: ClassicalDeal | None = None, hooks: SessionHooks | None = None,
                scheme: AdditiveComponentScheme | None = None,
                check_labels: bool = False, keep_states: bool = False) -> Transcript:
    """Steps (i)-(vi) in order, with adversary hooks at every exposure point.

    ``check_labels`` asserts after every step that the statevector equals the
    MUB vector named by the symbolic label.
    """
    hooks = hooks or _HONEST
    if deal is None:
        deal = deal_classical(params, rng, scheme=scheme)
    events = ["prepare"]
    states, dealer = dealer_prepare(secrets, deal.s, rng)
    labels = initial_labels(dealer)
    if check_labels:
        _check(states, labels, "prepare")

    active_xs = params.active_xs
    hops = []
    for j, who in enumerate(params.active):
        states, labels = hooks.transit(j, states, labels, rng)
        if check_labels:
            _check(states, labels, f"transit {j}")
        share = deal.shares[who.ident]
        honest = _component(share, active_xs, scheme)
        qj = hooks.component(j, who, honest, rng)
        states, rec = participant_hop(states, share, active_xs, rng,
                                      labels=labels, ident=who.ident, q=qj)
        labels = list(rec.labels_after)
        if check_labels:
            _check(states, labels, f"hop {j + 1}")
        hops.append(rec)
        events.append(f"hop:{who.ident}")

    measured = final_measure(states, rng)
    events.append("measure")
    R = tuple(hooks.publish(measured, rng))
    events.append("publish")
    exchanged = [h.p for h in hops]
    events.append("exchange")
    recovered = recover(R, exchanged, params.m)
    verdict = verify(recovered)
    events.append("verify")
    return Transcript(params, hops, R, exchanged, recovered, verdict, events, dealer, deal,
                      measured, labels, states if keep_states else None)


def _check(states, labels, where):
    for v, (st, lab) in enumerate(zip(states, labels)):
        if not qd.states_close(st, qd.mub_vector(lab)):
            raise AssertionError(f"statevector and label disagree at {where}, qudit {v + 1}")


def run_honest_session(params: SessionParams, secrets: tuple[FieldElement, FieldElement], rng,
                       **kw) -> Transcript:
    return run_session(params, secrets, rng, **kw)
