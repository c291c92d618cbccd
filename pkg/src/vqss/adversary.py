"""Attack strategies and Monte Carlo detection statistics.

Every trial is a full session (fresh classical deal, fresh masks) run through
:func:`vqss.protocol.run_session` with the strategy's hooks. A trial counts as
*detected* exactly when verification rejects it.

Besides detection, each report separates out

* ``disturbed``: the attack actually altered what the participants recover
  from (the state reaching the final measurement differs from the honest
  one, or the published results differ from the measured ones);
* ``attacker_learned_secret``: the attacker's own estimate of S1 was right.
  Estimates use only what the attacker observes plus public R; the honest
  participants' masks are never handed over. An attacker that observes
  nothing correlated with S1 (state replacement) makes no estimate.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist

from . import qudit as qd
from . import rng as rngmod
from .protocol import SessionHooks, SessionParams, Verdict, run_session
from .qudit import MubLabel
from .sss import uniform_residues

__all__ = [
    "AttackError",
    "InterceptResend",
    "FakeShare",
    "LyingMeasurer",
    "StateReplacement",
    "STRATEGIES",
    "TrialOutcome",
    "AttackReport",
    "run_attack",
    "run_intercept_resend",
    "run_fake_share",
    "run_lying_measurer",
    "run_state_replacement",
    "detection_summary",
    "wilson_interval",
    "REPORT_FIELDS",
]

_Z95 = NormalDist().inv_cdf(0.975)


class AttackError(ValueError):
    pass


def _uniform(rng, d: int) -> int:
    return uniform_residues(rng, d, 1)[0]


def _uniform_except(rng, d: int, avoid: int) -> int:
    # uniform on the d-1 values != avoid
    v = int(rng.integers(0, d - 1))
    return v + 1 if v >= avoid else v


class _Observer(SessionHooks):
    def __init__(self):
        self.estimate: int | None = None


@dataclass(frozen=True)
class InterceptResend:
    """Eve measures the three qudits on link ``position`` in a guessed basis.

    One basis guess k' covers all three qudits unless ``per_qudit`` is set.
    ``force_correct`` pins the guess to the true basis (no-op control).
    """

    position: int | None = None
    per_qudit: bool = False
    force_correct: bool = False
    name = "intercept-resend"

    def resolve(self, params: SessionParams) -> InterceptResend:
        pos = self.position
        if pos is None:
            pos = 1 if params.m >= 2 else 0
        if not 0 <= pos < params.m:
            raise AttackError(f"position must be in [0, {params.m - 1}], got {pos}")
        return InterceptResend(pos, self.per_qudit, self.force_correct)

    def hooks(self, params):
        return _Eve(self, params)

    def prediction(self, d):
        # per-qudit guesses leave some components intact; the rate then depends on N
        return None if self.per_qudit else Fraction(d - 1, d) ** 2

    def disturbance_prediction(self, d):
        return 1 - Fraction(1, d**3) if self.per_qudit else Fraction(d - 1, d)


class _Eve(_Observer):
    def __init__(self, strat, params):
        super().__init__()
        self.strat = strat
        self.d = params.d.d
        self.correct_basis = False

    def transit(self, position, states, labels, rng):
        if position != self.strat.position:
            return states, labels
        d = self.d
        if self.strat.force_correct:
            guesses = [lab.k.value for lab in labels]
        elif self.strat.per_qudit:
            guesses = [_uniform(rng, d) for _ in labels]
        else:
            guesses = [_uniform(rng, d)] * len(labels)
        self.correct_basis = all(g == lab.k.value for g, lab in zip(guesses, labels))
        out_states, out_labels, outcomes = [], [], []
        for st, g in zip(states, guesses):
            l, post = qd.measure_in_basis(st, g, rng)
            outcomes.append(l.value)
            out_states.append(post)
            out_labels.append(MubLabel(l, l.modulus(g)))
        # Eve's view of S1: her outcome, less a guess for masks she never sees.
        mask_guess = _uniform(rng, d) if position > 0 else 0
        self.estimate = (outcomes[0] - mask_guess) % d
        return out_states, out_labels


@dataclass(frozen=True)
class FakeShare:
    """Participant ``cheater`` (1-based line index) uses c' instead of its component.

    c' is uniform over GF(d) minus the honest value unless ``inclusive``.
    """

    cheater: int = 1
    inclusive: bool = False
    force_honest: bool = False
    name = "fake-share"

    def resolve(self, params):
        if not 1 <= self.cheater <= params.m:
            raise AttackError(f"cheater must be in [1, {params.m}], got {self.cheater}")
        return self

    def hooks(self, params):
        return _Cheater(self, params)

    def prediction(self, d):
        return Fraction(d - 1, d)

    def disturbance_prediction(self, d):
        return Fraction(d - 1, d) if self.inclusive else Fraction(1)


class _Cheater(_Observer):
    def __init__(self, strat, params):
        super().__init__()
        self.strat = strat
        self.d = params.d.d
        self.m = params.m

    def component(self, index, participant, honest, rng):
        if index != self.strat.cheater - 1 or self.strat.force_honest:
            return honest
        if self.strat.inclusive:
            return honest.modulus(_uniform(rng, self.d))
        return honest.modulus(_uniform_except(rng, self.d, honest.value))

    def finish(self, transcript, rng):
        # public R1 less its own mask and a guess for everyone else's
        own = transcript.hops[self.strat.cheater - 1].p[0].value
        rest = _uniform(rng, self.d) if self.m > 1 else 0
        self.estimate = (transcript.R[0].value - own - rest) % self.d


@dataclass(frozen=True)
class LyingMeasurer:
    """Bob_m measures honestly, then publishes R' != R (as a triple)."""

    inclusive: bool = False
    force_honest: bool = False
    name = "lying-measurer"

    def resolve(self, params):
        return self

    def hooks(self, params):
        return _Liar(self, params)

    def prediction(self, d):
        return 1 - Fraction(1, d)

    def disturbance_prediction(self, d):
        return Fraction(d**3 - 1, d**3) if self.inclusive else Fraction(1)


class _Liar(_Observer):
    def __init__(self, strat, params):
        super().__init__()
        self.strat = strat
        self.d = params.d.d
        self.m = params.m
        self.measured = None

    def publish(self, measured, rng):
        self.measured = measured
        if self.strat.force_honest:
            return measured
        d = self.d
        mod = measured[0].modulus
        true = tuple(r.value for r in measured)
        while True:
            fake = tuple(_uniform(rng, d) for _ in range(3))
            if self.strat.inclusive or fake != true:
                return tuple(mod(v) for v in fake)

    def finish(self, transcript, rng):
        own = transcript.hops[-1].p[0].value
        rest = _uniform(rng, self.d) if self.m > 1 else 0
        self.estimate = (self.measured[0].value - own - rest) % self.d


@dataclass(frozen=True)
class StateReplacement:
    """Separable stand-in for the entanglement-swapping joint attack.

    On link ``position`` the three qudits are discarded and replaced by MUB
    states with independently uniform labels. Nothing is measured, so the
    attackers hold no observation of the secret.
    """

    position: int | None = None
    force_identical: bool = False
    name = "state-replacement"

    def resolve(self, params):
        pos = self.position
        if pos is None:
            pos = 1 if params.m >= 2 else 0
        if not 0 <= pos < params.m:
            raise AttackError(f"position must be in [0, {params.m - 1}], got {pos}")
        return StateReplacement(pos, self.force_identical)

    def hooks(self, params):
        return _Replacer(self, params)

    def prediction(self, d):
        return Fraction(d - 1, d)

    def disturbance_prediction(self, d):
        return 1 - Fraction(1, d**6)


class _Replacer(_Observer):
    def __init__(self, strat, params):
        super().__init__()
        self.strat = strat
        self.d = params.d.d

    def transit(self, position, states, labels, rng):
        if position != self.strat.position:
            return states, labels
        if self.strat.force_identical:
            new = list(labels)
        else:
            mod = labels[0].l.modulus
            new = [MubLabel(mod(_uniform(rng, self.d)), mod(_uniform(rng, self.d)))
                   for _ in labels]
        return [qd.mub_vector(lab) for lab in new], new


STRATEGIES = {
    "intercept-resend": InterceptResend,
    "fake-share": FakeShare,
    "lying-measurer": LyingMeasurer,
    "state-replacement": StateReplacement,
}


@dataclass(frozen=True)
class TrialOutcome:
    detected: bool
    wrong_secret_accepted: bool
    disturbed: bool
    learned: bool
    correct_basis: bool | None
    R: tuple[int, int, int]


def run_trial(strategy, params: SessionParams, secrets, seed: int, index: int) -> TrialOutcome:
    rng = rngmod.stream(seed, rngmod.ATTACK, index)
    hooks = strategy.hooks(params)
    tr = run_session(params, secrets, rng, hooks=hooks)
    finish = getattr(hooks, "finish", None)
    if finish is not None:
        finish(tr, rng)
    truth = tuple(v.value for v in tr.dealer.p0)
    got = tuple(v.value for v in tr.recovered)
    accepted = tr.verdict is Verdict.ACCEPTED
    honest_final = tuple(
        (sum(h.p[v].value for h in tr.hops) + truth[v]) % params.d.d for v in range(3)
    )
    state_changed = any(
        lab.k.value != 0 or lab.l.value != honest_final[v]
        for v, lab in enumerate(tr.final_labels)
    )
    disturbed = state_changed or tr.R != tr.measured
    learned = hooks.estimate is not None and hooks.estimate == truth[0]
    cb = getattr(hooks, "correct_basis", None) if isinstance(strategy, InterceptResend) else None
    return TrialOutcome(
        detected=not accepted,
        wrong_secret_accepted=accepted and got != truth,
        disturbed=disturbed,
        learned=learned,
        correct_basis=cb,
        R=tuple(v.value for v in tr.R),
    )


def _run_chunk(args):
    strategy, params, secrets, seed, lo, hi = args
    return [run_trial(strategy, params, secrets, seed, i) for i in range(lo, hi)]


def run_trials(strategy, params, secrets, trials: int, seed: int, workers: int = 1
               ) -> list[TrialOutcome]:
    """Outcomes in trial order; identical for any ``workers``."""
    if workers <= 1 or trials < 2 * workers:
        return _run_chunk((strategy, params, secrets, seed, 0, trials))
    step = math.ceil(trials / (workers * 4))
    chunks = [(strategy, params, secrets, seed, lo, min(lo + step, trials))
              for lo in range(0, trials, step)]
    out = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, chunks):
            out.extend(part)
    return out


def wilson_interval(k: int, n: int, z: float = _Z95) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return (lo, hi)


REPORT_FIELDS = (
    "strategy", "d", "t", "n", "m", "trials", "detected", "undetected_wrong_secret",
    "attacker_learned_secret", "detection_rate", "ci95", "prediction", "seed",
    "disturbed", "disturbance_rate", "disturbance_prediction", "correct_basis",
    "undetected_rate", "learned_rate", "knobs",
)


@dataclass
class AttackReport:
    strategy: str
    d: int
    t: int
    n: int
    m: int
    trials: int
    detected: int
    undetected_wrong_secret: int
    attacker_learned_secret: int
    detection_rate: float
    ci95: tuple[float, float]
    prediction: float | None
    seed: int
    disturbed: int = 0
    disturbance_rate: float = 0.0
    disturbance_prediction: float = 0.0
    correct_basis: int | None = None
    undetected_rate: float = 0.0
    learned_rate: float = 0.0
    knobs: dict = field(default_factory=dict)
    outcomes: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        out = {k: asdict(self)[k] for k in REPORT_FIELDS}
        out["ci95"] = list(self.ci95)
        return out

    def sigma(self, p: float) -> float:
        return math.sqrt(p * (1 - p) / self.trials)


def _float(x):
    return None if x is None else float(x)


def run_attack(strategy, params: SessionParams, secrets, trials: int, seed: int,
               workers: int = 1) -> AttackReport:
    if trials < 1:
        raise AttackError("trials must be >= 1")
    strategy = strategy.resolve(params)
    outs = run_trials(strategy, params, secrets, trials, seed, workers)
    d = params.d.d
    det = sum(o.detected for o in outs)
    wrong = sum(o.wrong_secret_accepted for o in outs)
    learned = sum(o.learned for o in outs)
    dist = sum(o.disturbed for o in outs)
    cb = None
    if isinstance(strategy, InterceptResend):
        cb = sum(bool(o.correct_basis) for o in outs)
    knobs = {k: v for k, v in asdict(strategy).items()}
    return AttackReport(
        strategy=strategy.name, d=d, t=params.t, n=params.n, m=params.m,
        trials=trials, detected=det, undetected_wrong_secret=wrong,
        attacker_learned_secret=learned, detection_rate=det / trials,
        ci95=wilson_interval(det, trials), prediction=_float(strategy.prediction(d)),
        seed=seed, disturbed=dist, disturbance_rate=dist / trials,
        disturbance_prediction=float(strategy.disturbance_prediction(d)),
        correct_basis=cb, undetected_rate=wrong / trials, learned_rate=learned / trials,
        knobs=knobs, outcomes=outs,
    )


def run_intercept_resend(params, secrets, trials, rng_seed, **kw):
    return run_attack(InterceptResend(**kw), params, secrets, trials, rng_seed)


def run_fake_share(params, secrets, cheater_index, trials, rng_seed, **kw):
    return run_attack(FakeShare(cheater_index, **kw), params, secrets, trials, rng_seed)


def run_lying_measurer(params, secrets, trials, rng_seed, **kw):
    return run_attack(LyingMeasurer(**kw), params, secrets, trials, rng_seed)


def run_state_replacement(params, secrets, trials, rng_seed, **kw):
    return run_attack(StateReplacement(**kw), params, secrets, trials, rng_seed)


SUMMARY_COLUMNS = ("strategy", "d", "trials", "detection_rate", "ci_low", "ci_high",
                   "predicted_rate")


def detection_summary(reports) -> list[dict]:
    reports = list(reports)
    if not reports:
        raise AttackError("no reports to summarise")
    return [
        {
            "strategy": r.strategy,
            "d": r.d,
            "trials": r.trials,
            "detection_rate": r.detection_rate,
            "ci_low": r.ci95[0],
            "ci_high": r.ci95[1],
            "predicted_rate": r.prediction,
        }
        for r in reports
    ]
