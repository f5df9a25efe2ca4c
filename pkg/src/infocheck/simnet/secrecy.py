"""Exhaustive audit of what an adversary's view says about the secret.

Enumerates every candidate polynomial F, derives ``R = B + d*F`` from the
Ver broadcast, keeps the candidates consistent with every triple in the
view, and counts survivors per secret prefix.
"""

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import ConfigurationError
from ..icp import Challenge, GenVerifierMsg, receive

MAX_KAPPA = 5
MAX_SECRET_BITS = 12
MAX_CANDIDATE_BITS = 24


@dataclass(frozen=True)
class AuditView:
    """Triples ``(alpha, v, r)`` as ints, plus the broadcast challenge ``(d, B)``."""

    triples: tuple
    d: int
    B: tuple


@dataclass(frozen=True)
class SecrecyHistogram:
    counts: np.ndarray  # indexed by secret prefix, little-endian base 2^kappa digits
    kappa: int
    ell: int

    @property
    def uniform(self):
        return bool(self.counts.size and (self.counts == self.counts[0]).all() and self.counts[0] > 0)

    @property
    def support(self):
        return int((self.counts > 0).sum())

    def count_for(self, secret):
        idx = 0
        for l, s in enumerate(secret):
            idx |= int(s) << (self.kappa * l)
        return int(self.counts[idx])


def _check_feasible(params):
    k, L = params.kappa, params.length
    if k > MAX_KAPPA or params.ell * k > MAX_SECRET_BITS or k * L > MAX_CANDIDATE_BITS:
        raise ConfigurationError(
            f"exhaustive audit infeasible for kappa={k}, ell={params.ell}, length={L} "
            f"(need kappa <= {MAX_KAPPA}, ell*kappa <= {MAX_SECRET_BITS}, "
            f"kappa*length <= {MAX_CANDIDATE_BITS})"
        )


def secrecy_audit(params, view, backend=None):
    _check_feasible(params)
    k, L, ell = params.kappa, params.length, params.ell
    poly = params.field.reduction_poly
    M = 1 << (k * L)
    idx = np.arange(M, dtype=np.uint64)
    mask = np.uint64((1 << k) - 1)
    cands = np.stack([(idx >> np.uint64(k * c)) & mask for c in range(L)], axis=1)
    keep = np.ones(M, dtype=bool)
    if view.triples:
        B = np.asarray(view.B, dtype=np.uint64).reshape(1, L)
        d = np.full(M, view.d, dtype=np.uint64)
        for alpha, v, r in view.triples:
            x = np.full((M, 1), alpha, dtype=np.uint64)
            f_at = kernels.poly_eval(cands, x, k, poly, backend)[:, 0]
            b_at = kernels.poly_eval(B, x[:1], k, poly, backend)[0, 0]
            r_at = np.uint64(b_at) ^ kernels.gf_mul(d, f_at, k, poly, backend)
            keep &= (f_at == np.uint64(v)) & (r_at == np.uint64(r))
    prefix = (idx & np.uint64((1 << (k * ell)) - 1))[keep]
    counts = np.bincount(prefix.astype(np.int64), minlength=1 << (k * ell))
    return SecrecyHistogram(counts, k, ell)


def view_from_transcript(transcript, leak=0):
    """Adversary's view after Ver: corrupted triples, optionally ``leak`` honest ones, and (d, B)."""
    params = transcript.config.params
    corrupt = set(transcript.config.verifiers_corrupted())
    honest = [i for i in range(1, params.n + 1) if i not in corrupt]
    wanted = sorted(corrupt) + honest[:leak]
    if leak > len(honest):
        raise ConfigurationError("cannot leak more triples than there are honest verifiers")
    triples = []
    ch = None
    for rec in transcript.records:
        if rec.phase == "gen" and rec.instance == 0 and rec.recipient in {f"P{i}" for i in wanted}:
            m = receive(rec.payload, GenVerifierMsg, params)
            triples.append((int(rec.recipient[1:]), (m.alpha.value, m.v.value, m.r.value)))
        if rec.phase == "ver" and rec.sender == "INT" and rec.instance == 0 and ch is None:
            ch = receive(rec.payload, Challenge, params)
    triples.sort()
    return AuditView(tuple(tr for _, tr in triples), ch.d.value, ch.B.values)
