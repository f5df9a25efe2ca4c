"""Closed-form communication and round counts, checked against live ledgers."""

from dataclasses import dataclass

from ..icp import Tag
from .session import SessionConfig, run_session


def analytic_counts(params, q=1, reveal_rounds=2, dealer_broadcasts=0, block_reveal=False):
    """Bits and rounds per phase.

    Gen sends F and R (``length`` elements each) to INT and three elements
    to every verifier; Ver broadcasts ``(d, B)`` per instance plus ``ell``
    elements for each dealer complaint; Reveal broadcasts the signature
    and either one vote bit per verifier or, in the one-round variant,
    every verifier's triple.
    """
    k, L, n, ell = params.kappa, params.length, params.n, params.ell
    sig = (ell if block_reveal else L) * k
    reveal = sig + (n if reveal_rounds == 2 else 3 * n * k)
    return {
        "private_bits": {"gen": q * (2 * L + 3 * n) * k, "ver": 0, "reveal": 0},
        "broadcast_bits": {
            "gen": 0,
            "ver": q * (1 + L) * k + dealer_broadcasts * ell * k,
            "reveal": reveal,
        },
        "rounds": {"gen": 1, "ver": 2, "reveal": reveal_rounds},
    }


def expected_for(transcript):
    """Analytic counts for the structure this transcript actually exhibits."""
    cfg = transcript.config
    block = any(
        rec.phase == "reveal" and rec.sender == "INT" and rec.payload[:1] == bytes([Tag.REVEAL_BLOCK])
        for rec in transcript.records
    )
    return analytic_counts(
        cfg.params, cfg.q, cfg.reveal_rounds, sum(transcript.dealer_broadcasts), block
    )


def ledger_matches(transcript):
    return transcript.ledger.as_dict() == expected_for(transcript)


@dataclass
class ComplexityReport:
    params: object
    reveal_rounds: int
    analytic: dict
    measured: dict

    @property
    def equal(self):
        return self.analytic == self.measured

    def asymptotic(self):
        p = self.params
        L = p.length
        return {
            "gen_private": f"(2*(ell+t+1) + 3n) * kappa = (2*{L} + 3*{p.n}) * {p.kappa}",
            "ver_broadcast": f"(1 + ell+t+1) * kappa = {1 + L} * {p.kappa}  (+ ell*kappa if D complains)",
            "reveal_broadcast": (
                f"(ell+t+1) * kappa + n = {L} * {p.kappa} + {p.n}" if self.reveal_rounds == 2
                else f"(ell+t+1) * kappa + 3n * kappa = ({L} + {3 * p.n}) * {p.kappa}"
            ),
            "order": "O((ell + n) log 1/epsilon) bits per phase",
        }

    def as_dict(self):
        return {
            "n": self.params.n, "t": self.params.t, "ell": self.params.ell,
            "kappa": self.params.kappa, "reveal_rounds": self.reveal_rounds,
            "analytic": self.analytic, "measured": self.measured,
            "equal": self.equal, "asymptotic": self.asymptotic(),
        }


def complexity_report(params, reveal_rounds=2, seed=0):
    """Analytic counts next to the ledger of a live all-honest session."""
    cfg = SessionConfig(params, reveal_rounds=reveal_rounds, rushing=reveal_rounds == 2, seed=seed)
    tr = run_session(cfg)
    return ComplexityReport(params, reveal_rounds, analytic_counts(params, 1, reveal_rounds),
                            tr.ledger.as_dict())
