"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` (or as a script) to see the
lines. Seeds and tolerances are fixed below and must not be tuned.
"""

import math
import sys

import numpy as np
import pytest

from infocheck.icp import Challenge, GenVerifierMsg, ProtocolParams, receive
from infocheck.polynomial import poly_eval
from infocheck.rng import Stream
from infocheck.simnet import (
    SessionConfig,
    analytic_counts,
    ledger_matches,
    montecarlo,
    run_batch,
    run_session,
    secrecy_audit,
    view_from_transcript,
    wilson,
)
from infocheck.simnet.batch import C2, CORRUPT

# pinned parameters
SEED0 = 0
CONFIDENCE = 0.99
SIGMAS = 3.0  # tolerance above (t+1)/(|F|-1) for the Wilson upper bound
STAT = ProtocolParams.build(3, 4, kappa=8)
N_STAT = 100_000
N_HONEST = 10_000
N_INCONSISTENT = 10_000
N_RUSHING = 10_000
RUSHING_MIN_SUCCESS = 0.99
SECRECY_SESSIONS = 100
LINEARITY_HONEST = 1_000

LINES = []  # printed in the terminal summary by conftest.py


def line(key, ok, detail):
    text = f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}"
    LINES.append(text)
    print(text)
    assert ok, detail


def tight_limit(params, trials):
    b = float(params.guess_bound)
    return b + SIGMAS * math.sqrt(b * (1 - b) / trials)


# 1 ------------------------------------------------------------------------


def test_c1_completeness():
    pick = Stream(SEED0, 7)
    kappas = (4, 8, 16)
    bad = broadcasts = 0
    for k in range(N_HONEST):
        params = ProtocolParams.build(3, 1 + pick.below(8), kappa=kappas[k % 3])
        tr = run_session(SessionConfig(params, seed=SEED0 + k))
        bad += not tr.correct
        broadcasts += any(tr.dealer_broadcasts)
    line("1", bad == 0 and broadcasts == 0,
         f"{N_HONEST} honest sessions, kappa in {kappas}, ell in 1..8: "
         f"{bad} not accepted with S, {broadcasts} with a dealer broadcast")


# 2 ------------------------------------------------------------------------


def test_c2_unforgeability():
    cfg = SessionConfig(STAT, strategy="guessing")
    est = montecarlo(cfg, N_STAT, SEED0, "accepted", CONFIDENCE)
    eps = float(STAT.epsilon)
    limit = tight_limit(STAT, N_STAT)
    ok = est.rate <= eps and est.high <= limit
    line("2", ok,
         f"guessing INT acceptance {est.hits}/{N_STAT} = {est.rate:.5f} <= eps {eps:.5f}; "
         f"Wilson {CONFIDENCE:.0%} upper {est.high:.5f} <= {limit:.5f}")


# 3 ------------------------------------------------------------------------


def test_c3a_dguessing_dealer():
    cfg = SessionConfig(STAT, strategy="dguessing")
    est = montecarlo(cfg, N_STAT, SEED0, "rejected", CONFIDENCE)
    eps = float(STAT.epsilon)
    line("3a", est.high <= eps,
         f"d-guessing dealer, honest-INT rejection {est.hits}/{N_STAT} = {est.rate:.5f}, "
         f"Wilson {CONFIDENCE:.0%} upper {est.high:.5f} <= eps {eps:.5f}")


def test_c3b_inconsistent_case_b():
    cfg = SessionConfig(STAT, strategy="inconsistent", strategy_args={"case": "b"})
    res = run_batch(cfg, np.arange(SEED0, SEED0 + N_INCONSISTENT, dtype=np.uint64))
    honest = res.reasons != CORRUPT
    all_c2 = bool((res.reasons[honest] == C2).all())
    acc = int(res.accepted.sum())
    line("3b", acc == N_INCONSISTENT and all_c2,
         f"inconsistent dealer (wrong v, right r): {acc}/{N_INCONSISTENT} accepted, "
         f"every honest vote via C2: {all_c2}")


def _honest_checks(tr):
    """Per honest verifier: does B(alpha) = d*v + r hold, recomputed from the raw transcript."""
    params = tr.config.params
    ch = next(receive(r.payload, Challenge, params) for r in tr.records
              if r.phase == "ver" and r.sender == "INT")
    out = {}
    for r in tr.records:
        if r.phase == "gen" and r.recipient.startswith("P"):
            i = int(r.recipient[1:]) - 1
            if i in tr.reasons:
                m = receive(r.payload, GenVerifierMsg, params)
                out[i] = poly_eval(ch.B, m.alpha) == ch.d * m.v + m.r
    return out


def test_c3c_inconsistent_case_c():
    """Wrong v and r; the dealer's implied challenge d* = (r' - r)/(v' - v) is unguessed
    unless INT's d happens to equal it. Every honest verifier whose check fails must
    accept via C2, and the verdict-level rejection rate must stay within eps."""
    violations = exposed = rejected = lucky = 0
    for k in range(N_INCONSISTENT):
        tr = run_session(SessionConfig(STAT, strategy="inconsistent", seed=SEED0 + k))
        checks = _honest_checks(tr)
        for i, consistent in checks.items():
            if not consistent:
                exposed += 1
                violations += tr.reasons[i] != "C2"
        if all(not c for c in checks.values()):
            violations += not tr.accepted
        else:
            lucky += 1
        rejected += not tr.accepted
    _, high = wilson(rejected, N_INCONSISTENT, CONFIDENCE)
    eps = float(STAT.epsilon)
    line("3c", violations == 0 and high <= eps,
         f"inconsistent dealer (wrong v and r): {exposed} exposed honest verifiers all accept "
         f"via C2, every session with d unguessed accepted ({N_INCONSISTENT - lucky}); "
         f"rejections {rejected}/{N_INCONSISTENT}, Wilson upper {high:.5f} <= eps {eps:.5f}")


# 4 ------------------------------------------------------------------------


def _views(ell, leak):
    params = ProtocolParams.build(3, ell, kappa=4)
    for k in range(SECRECY_SESSIONS):
        tr = run_session(SessionConfig(params, corrupt_verifiers=(1,), seed=SEED0 + k))
        yield params, view_from_transcript(tr, leak)


def test_c4a_secrecy_uniform():
    counts = {ell: sum(secrecy_audit(p, v).uniform for p, v in _views(ell, 0)) for ell in (1, 2)}
    line("4a", all(c == SECRECY_SESSIONS for c in counts.values()),
         f"uniform histograms, t corrupted triples + (d, B): "
         f"ell=1 {counts[1]}/{SECRECY_SESSIONS}, ell=2 {counts[2]}/{SECRECY_SESSIONS}")


def test_c4b_secrecy_one_leak_nonuniform():
    counts = {ell: sum(not secrecy_audit(p, v).uniform for p, v in _views(ell, 1)) for ell in (1, 2)}
    line("4b", all(c == SECRECY_SESSIONS for c in counts.values()),
         f"non-uniform with one extra honest triple: "
         f"ell=1 {counts[1]}/{SECRECY_SESSIONS}, ell=2 {counts[2]}/{SECRECY_SESSIONS}")


# 5 ------------------------------------------------------------------------

GRID = [(n, ell, kappa) for n in (3, 5, 7) for ell, kappa in ((1, 4), (2, 8), (4, 16), (8, 32))]


def test_c5_complexity():
    mismatches = []
    for n, ell, kappa in GRID:
        params = ProtocolParams.build(n, ell, kappa=kappa)
        for rr, rushing in ((2, True), (1, False)):
            tr = run_session(SessionConfig(params, reveal_rounds=rr, rushing=rushing, seed=SEED0))
            want = analytic_counts(params, reveal_rounds=rr)
            if tr.ledger.as_dict() != want or tr.ledger.rounds != {"gen": 1, "ver": 2, "reveal": rr}:
                mismatches.append((n, ell, kappa, rr))
        tr = run_session(SessionConfig(params, strategy="broadcasting", seed=SEED0))
        if not ledger_matches(tr):
            mismatches.append((n, ell, kappa, "broadcast"))
    line("5", not mismatches,
         f"{len(GRID)} (n, ell, kappa) points, rounds (1,2,2) and one-round (1,2,1): "
         f"mismatches {mismatches or 'none'}")


# 6 ------------------------------------------------------------------------


def test_c6a_linearity_honest():
    seeds = np.arange(SEED0, SEED0 + LINEARITY_HONEST, dtype=np.uint64)
    gen = Stream(SEED0, 8)
    bad = {}
    for q in (2, 5):
        res = run_batch(SessionConfig(STAT, q=q), seeds)
        bad[q] = int((~res.correct).sum())
        for k in range(100):  # explicit secrets, sum computed here
            S = tuple(tuple(gen.bits(8) for _ in range(STAT.ell)) for _ in range(q))
            tr = run_session(SessionConfig(STAT, q=q, secrets=S, seed=SEED0 + k))
            total = tuple(int(x) for x in np.bitwise_xor.reduce(np.array(S), axis=0))
            bad[q] += not (tr.accepted and tr.revealed == total)
    line("6a", not any(bad.values()),
         f"q=2 and q=5 honest combined reveals accepted with the summed secret: failures {bad}")


def test_c6b_linearity_adversarial():
    eps = float(STAT.epsilon)
    rows, ok = [], True
    for q in (2, 5):
        for strategy, event in (("guessing", "accepted"), ("forging", "accepted"),
                                ("dguessing", "rejected")):
            est = montecarlo(SessionConfig(STAT, strategy=strategy, q=q), N_STAT, SEED0, event,
                             CONFIDENCE)
            good = est.rate <= eps and est.high <= eps
            ok &= good
            rows.append(f"q={q} {strategy} {event} {est.rate:.5f} (upper {est.high:.5f})")
    line("6b", ok, f"combined-signature attacks vs eps {eps:.5f}: " + "; ".join(rows))


def test_c6c_public_offsets():
    gen = Stream(SEED0, 9)
    bad = 0
    for k in range(LINEARITY_HONEST):
        S = tuple(gen.bits(8) for _ in range(STAT.ell))
        a = tuple(gen.bits(8) for _ in range(STAT.ell))
        tr = run_session(SessionConfig(STAT, secrets=(S,), offsets=a, seed=SEED0 + k))
        bad += not (tr.accepted and tr.revealed == tuple(x ^ y for x, y in zip(S, a)))
        tr = run_session(SessionConfig(STAT, secrets=(S,), offsets=S, seed=SEED0 + k))
        bad += not (tr.accepted and tr.revealed == (0,) * STAT.ell)
    line("6c", bad == 0,
         f"{LINEARITY_HONEST} offset signatures reveal b - a exactly (and zero for a = b): "
         f"{bad} failures")


# 7 ------------------------------------------------------------------------


def test_c7_rushing_oneround():
    nonsingular = success = 0
    for k in range(N_RUSHING):
        tr = run_session(SessionConfig(STAT, strategy="rushing-oneround", reveal_rounds=1,
                                       seed=SEED0 + k))
        if tr.notes.get("nonsingular"):
            nonsingular += 1
            success += tr.accepted and not tr.correct
    rate = success / nonsingular if nonsingular else 0.0
    line("7", nonsingular > 0 and rate >= RUSHING_MIN_SUCCESS,
         f"rushing one-round forgery succeeded in {success}/{nonsingular} sessions with a "
         f"nonsingular system ({rate:.4f} >= {RUSHING_MIN_SUCCESS}); "
         f"{N_RUSHING - nonsingular} singular")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
