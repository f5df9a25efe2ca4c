"""Run one protocol session under a static adversary and record everything."""

import hashlib
import json
from dataclasses import dataclass, field, asdict
from typing import Optional

from .. import rng as rngmod
from ..errors import ConfigurationError
from ..icp import (
    Challenge,
    DealerSecret,
    GenIntMsg,
    GenVerifierMsg,
    IntermediaryState,
    ProtocolParams,
    RevealBlock,
    RevealPoly,
    SecretBlock,
    TripleMsg,
    VerifierState,
    VoteMsg,
    finalize_sig_int,
    gen_dealer,
    int_observe_dealer,
    judge,
    receive,
    receive_or_default,
    reveal_oneround,
    reveal_round1_int,
    sample_alphas,
    tally,
    ver_round1_int,
    ver_round2_dealer,
    default_message,
)
from ..linearity import as_poly, judge_combined, lift_public_sig
from ..polynomial import Poly
from .network import Network
from .strategies import make_strategy

PHASES = ("gen", "ver", "reveal")


@dataclass(frozen=True)
class SessionConfig:
    """Everything that determines a session.

    ``corrupt_verifiers`` holds 1-based verifier ids; ``None`` means the
    strategy default (the first ``t`` verifiers for an adversarial strategy,
    nobody for ``honest``). The dealer or INT is corrupted whenever the
    strategy plays that role, or when the matching flag is set.
    """

    params: ProtocolParams
    strategy: str = "honest"
    strategy_args: dict = field(default_factory=dict)
    corrupt_verifiers: Optional[tuple] = None
    corrupt_dealer: bool = False
    corrupt_int: bool = False
    rushing: bool = True
    reveal_rounds: int = 2
    seed: int = 0
    q: int = 1
    offsets: Optional[tuple] = None
    secrets: Optional[tuple] = None

    def __post_init__(self):
        if self.reveal_rounds not in (1, 2):
            raise ConfigurationError("reveal_rounds must be 1 or 2")
        if self.q < 1:
            raise ConfigurationError("q must be >= 1")
        if self.reveal_rounds == 1 and (self.q > 1 or self.offsets is not None):
            raise ConfigurationError("one-round Reveal is defined for a single signature only")
        if self.offsets is not None and len(self.offsets) != self.params.ell:
            raise ConfigurationError(f"offsets need {self.params.ell} values")
        if self.secrets is not None:
            if len(self.secrets) != self.q or any(len(s) != self.params.ell for s in self.secrets):
                raise ConfigurationError("secrets must be q blocks of ell values")
        cv = self.verifiers_corrupted()
        if len(cv) > self.params.t:
            raise ConfigurationError(
                f"{len(cv)} corrupted verifiers exceed the threshold t={self.params.t}"
            )
        if any(not 1 <= i <= self.params.n for i in cv):
            raise ConfigurationError("verifier ids run from 1 to n")
        make_strategy(self.strategy, **self.strategy_args)

    @property
    def strategy_role(self):
        return make_strategy(self.strategy, **self.strategy_args).role

    def verifiers_corrupted(self):
        if self.corrupt_verifiers is not None:
            return tuple(sorted(set(self.corrupt_verifiers)))
        if self.strategy == "honest":
            return ()
        return tuple(range(1, self.params.t + 1))

    @property
    def dealer_corrupt(self):
        return self.corrupt_dealer or self.strategy_role == "D"

    @property
    def int_corrupt(self):
        return self.corrupt_int or self.strategy_role == "INT"

    @property
    def guarantees_void(self):
        """One-round Reveal against a rushing adversary carries no security guarantee."""
        return self.reveal_rounds == 1 and self.rushing

    def echo(self):
        p = self.params
        return {
            "n": p.n, "t": p.t, "ell": p.ell, "kappa": p.kappa,
            "reduction_poly": p.field.reduction_poly,
            "epsilon": str(p.epsilon),
            "strategy": self.strategy,
            "strategy_args": dict(sorted(self.strategy_args.items())),
            "corrupt_verifiers": list(self.verifiers_corrupted()),
            "corrupt_dealer": self.dealer_corrupt,
            "corrupt_int": self.int_corrupt,
            "rushing": self.rushing,
            "reveal_rounds": self.reveal_rounds,
            "seed": self.seed,
            "q": self.q,
            "offsets": list(self.offsets) if self.offsets is not None else None,
            "secrets": [list(s) for s in self.secrets] if self.secrets is not None else None,
        }


@dataclass
class CostLedger:
    private_bits: dict
    broadcast_bits: dict
    rounds: dict

    @classmethod
    def from_network(cls, net):
        priv = {p: 0 for p in PHASES}
        bc = {p: 0 for p in PHASES}
        for rec in net.records:
            (priv if rec.channel == "private" else bc)[rec.phase] += rec.bits
        rounds = {p: net.phase_rounds.get(p, 0) for p in PHASES}
        return cls(priv, bc, rounds)

    def as_dict(self):
        return asdict(self)


@dataclass
class Transcript:
    config: SessionConfig
    records: list
    accepted: bool
    revealed: Optional[tuple]
    expected: tuple
    votes: list
    reasons: dict
    dealer_broadcasts: list
    ledger: CostLedger
    notes: dict

    @property
    def correct(self):
        """Accepted with exactly the secret the dealer signed (summed and offset as configured)."""
        return self.accepted and self.revealed == self.expected

    def summary(self):
        return {
            "verdict": "Accepted" if self.accepted else "Rejected",
            "revealed": list(self.revealed) if self.revealed is not None else None,
            "expected": list(self.expected),
            "votes": [int(v) for v in self.votes],
            "honest_reasons": {str(i + 1): r for i, r in sorted(self.reasons.items())},
            "dealer_broadcasts": self.dealer_broadcasts,
            "ledger": self.ledger.as_dict(),
            "flags": {"guarantees_void": self.config.guarantees_void},
            "notes": _jsonable(self.notes),
            "config": self.config.echo(),
        }

    def lines(self):
        for rec in self.records:
            yield json.dumps({
                "round": rec.round,
                "phase": rec.phase,
                "sender": rec.sender,
                "channel": rec.channel,
                "to": rec.recipient,
                "instance": rec.instance,
                "payload": rec.payload.hex(),
            }, sort_keys=True)
        yield json.dumps({"summary": self.summary()}, sort_keys=True)

    def to_jsonl(self):
        return "\n".join(self.lines()) + "\n"

    def export(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())

    def digest(self):
        return hashlib.sha256(self.to_jsonl().encode()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


class SessionContext:
    """What the adversary may consult: its own stream and the corrupted parties' state."""

    def __init__(self, params, q, adv, secrets, corrupt_verifiers):
        self.params = params
        self.q = q
        self.adv = adv
        self.secrets = secrets
        self.corrupt_verifiers = tuple(i - 1 for i in corrupt_verifiers)
        self.honest_verifiers = tuple(i for i in range(params.n) if i not in self.corrupt_verifiers)
        self.verifier_states = {}
        self.round = 0


def _party(i):
    return f"P{i + 1}"


def run_session(config, strategy=None):
    """Execute Gen, Ver and Reveal for ``config`` and return the transcript.

    Inside every round honest parties speak first, in ascending id order;
    the strategy then acts on an adversary view that includes the current
    round only when ``config.rushing`` is set.
    """
    params = config.params
    n, t, ell, q = params.n, params.t, params.ell, config.q
    field = params.field
    strat = strategy or make_strategy(config.strategy, **config.strategy_args)
    corrupt_v = config.verifiers_corrupted()
    corrupt = {_party(i - 1) for i in corrupt_v}
    if config.dealer_corrupt:
        corrupt.add("D")
    if config.int_corrupt:
        corrupt.add("INT")
    streams = rngmod.session_streams(config.seed)
    net = Network(params.kappa, corrupt, config.rushing)

    if config.secrets is not None:
        secrets = [SecretBlock.of(field, s) for s in config.secrets]
    else:
        sec = streams[rngmod.SECRET]
        secrets = [SecretBlock.of(field, [sec.bits(params.kappa) for _ in range(ell)])
                   for _ in range(q)]
    offset = SecretBlock.of(field, config.offsets) if config.offsets is not None else None
    expected = secrets[0]
    for s in secrets[1:]:
        expected = expected + s
    if offset is not None:
        expected = expected + offset

    ctx = SessionContext(params, q, streams[rngmod.ADVERSARY], secrets, corrupt_v)
    combined = q > 1 or offset is not None

    # Gen, round 1
    net.start_round("gen")
    ctx.round = net.round
    dstream = streams[rngmod.DEALER]
    alphas = sample_alphas(params, dstream)
    dealer_states, int_msgs = [], []
    ver_msgs = [[None] * q for _ in range(n)]
    for j in range(q):
        st, mi, mv = gen_dealer(params, secrets[j].values, dstream, alphas=alphas)
        dealer_states.append(st)
        int_msgs.append(mi)
        for i in range(n):
            ver_msgs[i][j] = mv[i]
    if config.dealer_corrupt:
        int_msgs, ver_msgs = strat.fabricate_gen(ctx, int_msgs, ver_msgs)
    for j in range(q):
        net.send("D", "INT", int_msgs[j], j)
        for i in range(n):
            net.send("D", _party(i), ver_msgs[i][j], j)

    gen_round = net.round
    int_states = [
        IntermediaryState.from_gen(receive_or_default(
            net.first_payload("INT", gen_round, "D", j), GenIntMsg, params))
        for j in range(q)
    ]
    vstates = [
        [VerifierState.from_gen(receive_or_default(
            net.first_payload(_party(i), gen_round, "D", j), GenVerifierMsg, params))
         for j in range(q)]
        for i in range(n)
    ]
    ctx.verifier_states = {i: vstates[i] for i in ctx.corrupt_verifiers}

    # Ver, round 1: INT challenges
    net.start_round("ver")
    ctx.round = net.round
    istream = streams[rngmod.INT]
    for j in range(q):
        int_states[j], ch = ver_round1_int(int_states[j], istream)
        if config.int_corrupt:
            ch = strat.int_ver1(ctx, j, ch)
        net.broadcast("INT", ch, j)
    ch_round = net.round
    challenges = [net.first_payload("D", ch_round, "INT", j) for j in range(q)]
    for i in range(n):
        for j in range(q):
            ch = receive_or_default(challenges[j], Challenge, params)
            vstates[i][j] = vstates[i][j].with_challenge(ch)

    # Ver, round 2: dealer complains by broadcasting S
    net.start_round("ver")
    ctx.round = net.round
    for j in range(q):
        resp = ver_round2_dealer(dealer_states[j], receive(challenges[j], Challenge, params))
        if config.dealer_corrupt:
            resp = strat.dealer_ver2(ctx, j, resp)
        if resp is not None:
            net.broadcast("D", resp, j)
    v2_round = net.round
    bcasts = []
    for j in range(q):
        raw = net.first_payload("INT", v2_round, "D", j)
        msg = None if raw is None else receive_or_default(raw, DealerSecret, params)
        bcasts.append(msg)
        int_states[j] = int_observe_dealer(int_states[j], msg)
        for i in range(n):
            vstates[i][j] = vstates[i][j].with_dealer_broadcast(msg)

    # honest INT's reveal
    if combined:
        total = Poly.zero(field, params.length)
        for st in int_states:
            total = total + as_poly(finalize_sig_int(st), params)
        if offset is not None:
            total = total + lift_public_sig(offset, params)
        honest_payload = RevealPoly(total)
    else:
        honest_payload = reveal_round1_int(finalize_sig_int(int_states[0]))

    reasons = {}
    if config.reveal_rounds == 2:
        net.start_round("reveal")
        ctx.round = net.round
        payload_out = honest_payload
        if config.int_corrupt:
            payload_out = strat.int_reveal(ctx, net.adversary_view(), honest_payload)
        net.broadcast("INT", payload_out)
        r1 = net.round
        payload = receive(net.first_payload(_party(0), r1, "INT"), (RevealPoly, RevealBlock), params)

        net.start_round("reveal")
        ctx.round = net.round
        for i in ctx.honest_verifiers:
            if combined:
                vote, why = judge_combined(vstates[i], payload, params, offset)
            else:
                vote, why = judge(vstates[i][0], payload)
            reasons[i] = why.value
            net.broadcast(_party(i), VoteMsg(vote))
        bad = strat.corrupt_votes(ctx, net.adversary_view(), payload)
        for i in ctx.corrupt_verifiers:
            net.broadcast(_party(i), VoteMsg(bad[i]))
        r2 = net.round
        votes = []
        for i in range(n):
            raw = net.first_payload("INT", r2, _party(i))
            votes.append(receive_or_default(raw, VoteMsg, params).vote)
        verdict = tally(votes, payload, t, ell)
    else:
        net.start_round("reveal")
        ctx.round = net.round
        if not config.int_corrupt:
            net.broadcast("INT", honest_payload)
        for i in ctx.honest_verifiers:
            s = vstates[i][0]
            net.broadcast(_party(i), TripleMsg(s.alpha, s.v, s.r))
        view = net.adversary_view()
        if config.int_corrupt:
            net.broadcast("INT", strat.int_reveal(ctx, view, honest_payload))
        forged = receive(net.first_payload(_party(0), net.round, "INT"),
                         (RevealPoly, RevealBlock), params)
        bad = strat.corrupt_triples(ctx, view, forged)
        for i in ctx.corrupt_verifiers:
            net.broadcast(_party(i), bad[i])
        r1 = net.round
        payload = forged
        triples = [receive(net.first_payload("INT", r1, _party(i)), TripleMsg, params)
                   for i in range(n)]
        ch = receive_or_default(challenges[0], Challenge, params)
        dealer_bcast = bcasts[0].S if bcasts[0] is not None else None
        verdict, votes = reveal_oneround(payload, triples, ch.d, ch.B, dealer_bcast, t, ell)
        for i in ctx.honest_verifiers:
            reasons[i] = "accept" if int(votes[i]) else "reject"

    revealed = verdict.secret.ints if verdict.accepted else None
    return Transcript(
        config=config,
        records=list(net.records),
        accepted=verdict.accepted,
        revealed=revealed,
        expected=expected.ints,
        votes=list(votes),
        reasons=reasons,
        dealer_broadcasts=[b is not None for b in bcasts],
        ledger=CostLedger.from_network(net),
        notes=dict(strat.notes),
    )
