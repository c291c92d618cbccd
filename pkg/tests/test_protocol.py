import cmath
import itertools
import json
import math

import numpy as np
import pytest
from scipy.stats import chi2

from vqss import qudit as qd
from vqss.gf import PrimeModulus
from vqss.protocol import (
    MalformedTranscript,
    ProtocolError,
    SessionHooks,
    SessionParams,
    Verdict,
    audit,
    deal_classical,
    dealer_prepare,
    final_measure,
    initial_labels,
    participant_hop,
    recover,
    run_honest_session,
    run_session,
    verify,
)
from vqss.qudit import MubLabel
from vqss.sss import AdditiveNofN, Polynomial, component


def brute_inverse(a, d):
    return next(x for x in range(1, d) if a * x % d == 1)


def test_dealer_prepare_example(gf7):
    s = gf7(4)
    states, dl = dealer_prepare((gf7(6), gf7(3)), s)
    assert brute_inverse(3, 7) == 5 and 6 * 5 % 7 == 2 and 3 * 2 % 7 == 6
    assert dl.N == 2
    for st, l in zip(states, (6, 3, 2)):
        assert qd.states_close(st, qd.mub_vector(MubLabel.of(7, l, 7 - 4)))


def test_dealer_prepare_zero_s1(gf7):
    _, dl = dealer_prepare((gf7(0), gf7(4)), gf7(0))
    assert dl.N == 0
    assert [q.value for q in dl.q0] == [0, 0, 0]


def test_dealer_rejects_zero_s2(gf7):
    with pytest.raises(ProtocolError):
        dealer_prepare((gf7(1), gf7(0)), gf7(0))


def test_zero_randomness_hop_shifts_basis_only(gf7, rng):
    f = Polynomial.of(gf7, [3, 2])
    shares = f.shares([gf7(1), gf7(2)])
    xs = [gf7(1), gf7(2)]
    states, dl = dealer_prepare((gf7(6), gf7(3)), gf7(3))
    labels = initial_labels(dl)
    out, rec = participant_hop(states, shares[0], xs, rng, labels=labels, p=(0, 0, 0))
    c = component(shares[0], xs)
    assert c == 3
    for before, after, st in zip(labels, rec.labels_after, out):
        assert after.l == before.l and after.k == before.k + c
        assert qd.states_close(st, qd.mub_vector(after))


def test_hop_rejects_foreign_share(gf7, rng):
    states, _ = dealer_prepare((gf7(6), gf7(3)), gf7(3))
    with pytest.raises(ProtocolError):
        participant_hop(states, Polynomial.of(gf7, [1]).shares([gf7(5)])[0],
                        [gf7(1), gf7(2)], rng)


def test_single_participant_chain(rng):
    params = SessionParams.build(7, 1, 1, 1)
    m = params.d
    tr = run_session(params, (m(5), m(2)), rng, check_labels=True)
    assert all(lab.k == 0 for lab in tr.final_labels)
    assert tr.verdict is Verdict.ACCEPTED


def test_no_masking_example():
    params = SessionParams.build(7, 1, 1, 1)
    m = params.d
    deal = deal_classical(params, None, s=m(0))
    states, dl = dealer_prepare((m(6), m(3)), deal.s)
    states, rec = participant_hop(states, deal.shares[1], params.active_xs,
                                  np.random.default_rng(0), p=(0, 0, 0))
    R = final_measure(states, np.random.default_rng(0))
    assert [r.value for r in R] == [6, 3, 2]
    assert recover(R, [rec.p]) == R


def test_recover_and_verify_examples(gf7):
    R = (gf7(5), gf7(0), gf7(0))
    assert recover(R, [(gf7(1), gf7(0), gf7(0)), (gf7(1), gf7(0), gf7(0))])[0] == 3
    assert verify((gf7(6), gf7(3), gf7(2))) is Verdict.ACCEPTED
    assert verify((gf7(5), gf7(3), gf7(2))) is Verdict.REJECTED
    for x in range(7):
        assert verify((gf7(0), gf7(0), gf7(x))) is Verdict.ACCEPTED
    with pytest.raises(ProtocolError):
        recover(R, [(gf7(1), gf7(0), gf7(0))], m=2)


@pytest.mark.parametrize("seed", range(20))
def test_honest_example(seed):
    params = SessionParams.build(7, 2, 4, 3)
    m = params.d
    tr = run_honest_session(params, (m(6), m(3)), np.random.default_rng(seed), check_labels=True)
    assert tr.verdict is Verdict.ACCEPTED
    assert [v.value for v in tr.recovered] == [6, 3, 2]


def test_basis_closure_and_eq5(rng):
    for d, t, n in [(3, 2, 2), (7, 3, 6), (11, 4, 10), (31, 5, 10)]:
        for m in range(t, n + 1):
            params = SessionParams.build(d, t, n, m)
            mod = params.d
            tr = run_session(params, (mod(1), mod(1)), rng, check_labels=True)
            assert all(lab.k.value == 0 for lab in tr.final_labels)
            for v in range(3):
                total = tr.dealer.p0[v].value + sum(h.p[v].value for h in tr.hops)
                assert tr.R[v].value == total % d


def test_final_state_closed_form(rng):
    # numeric final state vs d^-1/2 sum_j omega^{sum_r (j p_r + j^2 q_r)} |j>
    d = 11
    params = SessionParams.build(d, 3, 6, 5)
    mod = params.d
    tr = run_session(params, (mod(4), mod(9)), rng, keep_states=True)
    for v in range(3):
        ps = [tr.dealer.p0[v].value] + [h.p[v].value for h in tr.hops]
        qs = [tr.dealer.q0[v].value] + [h.q.value for h in tr.hops]
        want = np.array([
            cmath.exp(2j * math.pi * sum(j * p + j * j * q for p, q in zip(ps, qs)) / d)
            for j in range(d)
        ]) / math.sqrt(d)
        assert np.max(np.abs(tr.final_states[v].amplitudes - want)) < 1e-9


def test_line_order_is_free(rng):
    base = SessionParams.build(13, 3, 6, order=[1, 2, 3, 4])
    for order in itertools.permutations([1, 2, 3, 4]):
        params = SessionParams.build(13, 3, 6, order=list(order))
        mod = params.d
        tr = run_session(params, (mod(7), mod(2)), rng)
        assert tr.verdict is Verdict.ACCEPTED and tr.recovered[:2] == (mod(7), mod(2))
    assert base.m == 4


@pytest.mark.parametrize("kw", [dict(d=7, t=3, n=4, m=2), dict(d=7, t=2, n=7, m=3),
                                dict(d=7, t=5, n=4, m=4), dict(d=9, t=2, n=4, m=3),
                                dict(d=7, t=2, n=4, m=5)])
def test_params_validation(kw):
    with pytest.raises(Exception):
        SessionParams.build(**kw)


def test_duplicate_xs_rejected():
    with pytest.raises(ProtocolError):
        SessionParams.build(7, 2, 3, xs=[1, 2, 2])


def test_unauthorized_line_rejected_at_rate():
    d = 7
    params = SessionParams.build(d, 3, 5, 2, allow_unauthorized=True)
    mod = params.d
    trials = 3000
    rej = 0
    g = np.random.default_rng(11)
    for _ in range(trials):
        tr = run_session(params, (mod(6), mod(3)), g)
        rej += tr.verdict is Verdict.REJECTED
    # mostly rejected: the basis is wrong unless the m components happen to sum to s
    p = (d - 1) / d * (d - 1) / d
    assert abs(rej / trials - p) < 4 * math.sqrt(p * (1 - p) / trials)


def test_additive_scheme_drives_protocol(rng):
    params = SessionParams.build(11, 4, 4, 4)
    mod = params.d
    scheme = AdditiveNofN(mod)
    for _ in range(30):
        tr = run_session(params, (mod(3), mod(5)), rng, scheme=scheme, check_labels=True)
        assert tr.verdict is Verdict.ACCEPTED


def test_share_reuse(rng):
    params = SessionParams.build(31, 3, 5, 4)
    mod = params.d
    deal = deal_classical(params, rng)
    Rs = []
    for _ in range(400):
        tr = run_session(params, (mod(10), mod(7)), rng, deal=deal)
        assert tr.verdict is Verdict.ACCEPTED
        Rs.append(tr.R[0].value)
    # fresh masks: R1 across sessions with the same shares stays uniform
    counts = np.bincount(Rs, minlength=31)
    exp = len(Rs) / 31
    assert float(((counts - exp) ** 2 / exp).sum()) < chi2.ppf(0.999, 30)
    pairs = sum(a == b for a, b in zip(Rs, Rs[1:]))
    assert pairs < len(Rs) / 31 + 4 * math.sqrt(len(Rs) / 31)


def test_tampered_chain_gives_uniform_results():
    class BadComponent(SessionHooks):
        def component(self, index, participant, honest, rng):
            return honest + 1 if index == 0 else honest

    params = SessionParams.build(7, 2, 4, 3)
    mod = params.d
    g = np.random.default_rng(4)
    counts = np.zeros((3, 7))
    for _ in range(7000):
        tr = run_session(params, (mod(6), mod(3)), g, hooks=BadComponent())
        for v in range(3):
            counts[v, tr.R[v].value] += 1
    for v in range(3):
        stat = float(((counts[v] - 1000) ** 2 / 1000).sum())
        assert stat < chi2.ppf(0.999, 6)


def test_transcript_json_roundtrip_and_audit(rng):
    params = SessionParams.build(7, 2, 4, 3)
    mod = params.d
    tr = run_session(params, (mod(6), mod(3)), rng)
    doc = json.loads(tr.to_json())
    assert list(doc) == ["schema", "d", "t", "n", "m", "xs", "R", "exchanged", "recovered",
                         "verdict", "events"]
    assert "sealed" not in doc
    assert audit(doc) is Verdict.ACCEPTED
    sealed = tr.to_dict(include_secrets=True)["sealed"]
    assert (sealed["S1"], sealed["S2"], sealed["N"]) == (6, 3, 2)


def test_audit_rejects_exchange_before_publish(rng):
    params = SessionParams.build(7, 2, 4, 3)
    mod = params.d
    doc = run_session(params, (mod(6), mod(3)), rng).to_dict()
    ev = doc["events"]
    i, j = ev.index("publish"), ev.index("exchange")
    ev[i], ev[j] = ev[j], ev[i]
    with pytest.raises(MalformedTranscript):
        audit(doc)


def test_audit_rejects_forged_verdict(rng):
    params = SessionParams.build(7, 2, 4, 3)
    mod = params.d
    doc = run_session(params, (mod(6), mod(3)), rng).to_dict()
    doc["recovered"][0] = (doc["recovered"][0] + 1) % 7
    with pytest.raises(MalformedTranscript):
        audit(doc)
    doc = run_session(params, (mod(6), mod(3)), rng).to_dict()
    doc["verdict"] = "rejected"
    with pytest.raises(MalformedTranscript):
        audit(doc)
