"""Vectorized Monte-Carlo engine.

Runs many sessions at once as ``uint64`` arrays, one lane per seed. Every
lane consumes its random streams in the same order as
:func:`infocheck.simnet.session.run_session`, so lane ``k`` reproduces the
session with seed ``seeds[k]`` vote for vote. Field arithmetic goes through
:mod:`infocheck.kernels` (numba or numpy).

Transcripts and one-round Reveal are out of reach here; those configurations
must use the session engine.
"""

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import ConfigurationError
from ..rng import ADVERSARY, DEALER, INT, SECRET, LaneStreams

BATCH_STRATEGIES = frozenset(
    {"honest", "forging", "guessing", "dguessing", "inconsistent", "tampering", "broadcasting"}
)

# reason codes, aligned with icp.Reason
REJECT, C1, C2, PUBLIC = 0, 1, 2, 3
REASON_NAMES = {REJECT: "reject", C1: "C1", C2: "C2", PUBLIC: "public-match"}
CORRUPT = -1


@dataclass
class BatchResult:
    seeds: np.ndarray
    accepted: np.ndarray  # (N,) bool
    correct: np.ndarray  # (N,) bool: accepted with the expected secret
    votes: np.ndarray  # (N, n) 0/1
    reasons: np.ndarray  # (N, n) reason code, CORRUPT for corrupted verifiers
    dealer_broadcasts: np.ndarray  # (N, q) bool
    aux: dict


def supports(config):
    return (
        config.strategy in BATCH_STRATEGIES
        and config.reveal_rounds == 2
        and config.secrets is None
    )


def _distinct_count(used):
    if not used:
        return 0
    arr = np.sort(np.stack(used, axis=1), axis=1)
    return 1 + (np.diff(arr, axis=1) != 0).sum(axis=1)


def _draw_avoiding(adv, kappa, used):
    """Lane-wise twin of ``strategies.draw_avoiding``."""
    n_lanes = len(adv)
    full = _distinct_count(used) >= (1 << kappa) - 1 if used else np.zeros(n_lanes, bool)
    need = np.ones(n_lanes, dtype=bool)
    out = np.zeros(n_lanes, dtype=np.uint64)
    while need.any():
        v = adv.nonzero_bits(kappa, need)
        out = np.where(need, v, out)
        clash = np.zeros(n_lanes, dtype=bool)
        for u in used:
            clash |= out == u
        need = need & clash & ~full
    return out


def _draw_distinct_block(adv, kappa, ell, target, active=None):
    n_lanes = len(adv)
    need = np.ones(n_lanes, dtype=bool) if active is None else active.copy()
    out = np.zeros((n_lanes, ell), dtype=np.uint64)
    while need.any():
        for l in range(ell):
            out[:, l] = np.where(need, adv.bits(kappa, need), out[:, l])
        need = need & (out == target).all(axis=1)
    return out


def run_batch(config, seeds, backend=None):
    """Simulate one session per seed under ``config`` (its own ``seed`` is ignored)."""
    if not supports(config):
        raise ConfigurationError(
            f"batch engine cannot run strategy={config.strategy!r}, "
            f"reveal_rounds={config.reveal_rounds}, fixed secrets={config.secrets is not None}"
        )
    params = config.params
    n, t, ell, q, K = params.n, params.t, params.ell, config.q, params.kappa
    L = params.length
    poly = params.field.reduction_poly
    seeds = np.asarray(seeds, dtype=np.uint64)
    N = seeds.shape[0]
    lanes = np.arange(N)

    def mul(a, b):
        return kernels.gf_mul(a, b, K, poly, backend)

    def peval(coeffs, x):
        return kernels.poly_eval(coeffs, x, K, poly, backend)

    def eval_instances(P, x):
        # P (N, q, len), x (N, n) -> (N, q, n)
        width = P.shape[2]
        xx = np.repeat(x[:, None, :], q, axis=1).reshape(N * q, n)
        return peval(P.reshape(N * q, width), xx).reshape(N, q, n)

    strategy = config.strategy
    args = dict(config.strategy_args)
    corrupt = [i - 1 for i in config.verifiers_corrupted()]
    honest = [i for i in range(n) if i not in corrupt]

    # secrets
    sec = LaneStreams(seeds, SECRET)
    S = np.zeros((N, q, ell), dtype=np.uint64)
    for j in range(q):
        for l in range(ell):
            S[:, j, l] = sec.bits(K)

    # Gen
    ds = LaneStreams(seeds, DEALER)
    alpha = np.zeros((N, n), dtype=np.uint64)
    for i in range(n):
        alpha[:, i] = ds.nonzero_bits(K)
    F = np.zeros((N, q, L), dtype=np.uint64)
    R = np.zeros((N, q, L), dtype=np.uint64)
    for j in range(q):
        F[:, j, :ell] = S[:, j]
        for c in range(ell, L):
            F[:, j, c] = ds.bits(K)
        for c in range(L):
            R[:, j, c] = ds.bits(K)
    v_true = eval_instances(F, alpha)
    r_true = eval_instances(R, alpha)
    v = v_true.copy()
    r = r_true.copy()

    adv = LaneStreams(seeds, ADVERSARY)
    aux = {}
    if strategy in ("dguessing", "inconsistent"):
        jstar = adv.below(q).astype(np.int64) if q > 1 else np.zeros(N, dtype=np.int64)
        aux["instance"] = jstar
        used = []
        case = args.get("case", "c")
        for i in honest:
            if strategy == "dguessing":
                g = _draw_avoiding(adv, K, used)
                used.append(g)
                e = adv.nonzero_bits(K)
                v[lanes, jstar, i] ^= e
                r[lanes, jstar, i] ^= mul(g, e)
            else:
                e = adv.nonzero_bits(K)
                v[lanes, jstar, i] ^= e
                if case == "c":
                    r[lanes, jstar, i] ^= adv.nonzero_bits(K)
        if strategy == "dguessing":
            aux["guesses"] = np.stack(used, axis=1) if used else np.zeros((N, 0), np.uint64)

    # Ver round 1
    ist = LaneStreams(seeds, INT)
    d = np.zeros((N, q), dtype=np.uint64)
    for j in range(q):
        d[:, j] = ist.nonzero_bits(K)
    B = mul(np.repeat(d[:, :, None], L, axis=2), F) ^ R
    Bb = B.copy()
    if strategy == "tampering":
        jt = int(args.get("j", 0))
        k = adv.below(L).astype(np.int64)
        delta = adv.nonzero_bits(K)
        Bb[lanes, jt, k] ^= delta

    # Ver round 2: dealer's check against its own (true) triples
    B_at = eval_instances(Bb, alpha)
    dealer_ok = B_at == (mul(np.repeat(d[:, :, None], n, axis=2), v_true) ^ r_true)
    bcast = ~dealer_ok.all(axis=2)
    if strategy in ("dguessing", "inconsistent"):
        bcast[:] = False
    elif strategy == "broadcasting":
        bcast[:, int(args.get("j", 0))] = True

    # honest INT's payload
    combined = q > 1 or config.offsets is not None
    offset = None
    if config.offsets is not None:
        offset = np.array(config.offsets, dtype=np.uint64)
    if combined:
        lifted = np.zeros((N, q, L), dtype=np.uint64)
        lifted[:, :, :ell] = S
        P = np.bitwise_xor.reduce(np.where(bcast[:, :, None], lifted, F), axis=1)
        if offset is not None:
            P[:, :ell] ^= offset
        is_block = np.zeros(N, dtype=bool)
        block = P[:, :ell].copy()
    else:
        is_block = bcast[:, 0].copy()
        P = F[:, 0].copy()
        block = S[:, 0].copy()

    def payload_secret():
        return np.where(is_block[:, None], block, P[:, :ell])

    # corrupted INT
    if strategy == "forging":
        target = payload_secret()
        forged = _draw_distinct_block(adv, K, ell, target)
        high = np.zeros((N, L - ell), dtype=np.uint64)
        poly_lanes = ~is_block
        for c in range(L - ell):
            high[:, c] = adv.bits(K, poly_lanes)
        block = np.where(is_block[:, None], forged, block)
        P = np.where(poly_lanes[:, None], np.concatenate([forged, high], axis=1), P)
    elif strategy == "guessing":
        used = [alpha[:, i] for i in corrupt]
        guess = _draw_avoiding(adv, K, used)
        delta = adv.nonzero_bits(K)
        poly_lanes = ~is_block
        P = P.copy()
        P[:, 0] = np.where(poly_lanes, P[:, 0] ^ mul(delta, guess), P[:, 0])
        P[:, 1] = np.where(poly_lanes, P[:, 1] ^ delta, P[:, 1])
        aux["guess"] = guess

    # Reveal round 2: honest votes
    d_rep = np.repeat(d[:, :, None], n, axis=2)
    consistent = B_at == (mul(d_rep, v) ^ r)  # (N, q, n) verifier's own check
    F_at = peval(P, alpha)  # (N, n)
    votes = np.zeros((N, n), dtype=np.int8)
    reasons = np.full((N, n), CORRUPT, dtype=np.int8)
    if combined:
        lift_at = eval_instances(S, alpha)
        vsum = np.bitwise_xor.reduce(np.where(bcast[:, :, None], lift_at, v), axis=1)
        if offset is not None:
            off = np.broadcast_to(offset, (N, ell))
            vsum = vsum ^ peval(off, alpha)
        c1 = F_at == vsum
        c2 = ((~bcast[:, :, None]) & ~consistent).any(axis=1)
        reason = np.where(c1, C1, np.where(c2, C2, REJECT))
    else:
        c1 = F_at == v[:, 0]
        c2 = ~consistent[:, 0]
        poly_reason = np.where(c1, C1, np.where(c2, C2, REJECT))
        public_ok = (block == S[:, 0]).all(axis=1) & is_block
        reason = np.where(
            bcast[:, 0:1],
            np.where(public_ok[:, None], PUBLIC, REJECT),
            np.where(is_block[:, None], REJECT, poly_reason),
        )
    for i in honest:
        reasons[:, i] = reason[:, i]
        votes[:, i] = reason[:, i] != REJECT
    int_side = strategy in ("forging", "guessing", "tampering")
    for i in corrupt:
        votes[:, i] = 1 if int_side else 0

    accepted = votes.sum(axis=1) >= t + 1
    expected = np.bitwise_xor.reduce(S, axis=1)
    if offset is not None:
        expected = expected ^ offset
    correct = accepted & (payload_secret() == expected).all(axis=1)
    return BatchResult(seeds, accepted, correct, votes, reasons, bcast, aux)
