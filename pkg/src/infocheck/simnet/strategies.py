"""Built-in adversary strategies.

A strategy controls every corrupted party. Each hook receives what the
honest protocol would have sent and returns what the corrupted party sends
instead. Random choices come from the adversary's own stream
(``ctx.adv``), drawn in a fixed order that the batch engine mirrors.
"""

from ..errors import ConfigurationError, InterpolationError
from ..gf2k import FieldElement
from ..icp import (
    Challenge,
    DealerSecret,
    GenVerifierMsg,
    RevealBlock,
    RevealPoly,
    SecretBlock,
    Tag,
    TripleMsg,
    Vote,
    decode,
    payload_secret,
)
from ..polynomial import Poly, interpolate, poly_eval


def draw_distinct_block(ctx, avoid):
    """ell uniform elements, redrawn as a whole until the block differs from ``avoid``."""
    k = ctx.params.kappa
    while True:
        vals = tuple(ctx.adv.bits(k) for _ in range(ctx.params.ell))
        if vals != avoid:
            return vals


def draw_avoiding(ctx, used):
    """Nonzero element not in ``used`` (repeats allowed once every value is taken)."""
    k = ctx.params.kappa
    full = len(used) >= (1 << k) - 1
    while True:
        v = ctx.adv.nonzero_bits(k)
        if full or v not in used:
            return v


class Strategy:
    """Honest behaviour for every hook; corrupted verifiers vote Reject."""

    name = "honest"
    role = None
    corrupt_vote = Vote.REJECT

    def __init__(self, **kwargs):
        if kwargs:
            raise ConfigurationError(f"{self.name} takes no parameters: {sorted(kwargs)}")
        self.notes = {}

    # dealer hooks
    def fabricate_gen(self, ctx, int_msgs, verifier_msgs):
        return int_msgs, verifier_msgs

    def dealer_ver2(self, ctx, j, honest_response):
        return honest_response

    # INT hooks
    def int_ver1(self, ctx, j, honest_challenge):
        return honest_challenge

    def int_reveal(self, ctx, view, honest_payload):
        return honest_payload

    # verifier hooks
    def corrupt_votes(self, ctx, view, payload):
        return {i: self.corrupt_vote for i in ctx.corrupt_verifiers}

    def corrupt_triples(self, ctx, view, payload):
        # alpha = 0 is outside the message domain, so it is judged as Reject
        f = ctx.params.field
        return {i: TripleMsg(f.zero, f.zero, f.zero) for i in ctx.corrupt_verifiers}


class _IntStrategy(Strategy):
    role = "INT"
    corrupt_vote = Vote.ACCEPT

    def corrupt_triples(self, ctx, view, payload):
        """Corrupted verifiers publish points that agree with the forged payload."""
        out = {}
        for i in ctx.corrupt_verifiers:
            st = ctx.verifier_states[i][0]
            if isinstance(payload, RevealPoly):
                out[i] = TripleMsg(st.alpha, poly_eval(payload.F, st.alpha), st.r)
            else:
                out[i] = TripleMsg(st.alpha, st.v, st.r)
        return out


class ForgingINT(_IntStrategy):
    """Reveal a different secret with fresh random high coefficients."""

    name = "forging"

    def forge(self, ctx, honest_payload):
        target = payload_secret(honest_payload, ctx.params.ell).ints
        forged = draw_distinct_block(ctx, target)
        field = ctx.params.field
        if isinstance(honest_payload, RevealBlock):
            return RevealBlock(SecretBlock.of(field, forged))
        high = [ctx.adv.bits(field.kappa) for _ in range(ctx.params.t + 1)]
        return RevealPoly(Poly(field, list(forged) + high))

    def int_reveal(self, ctx, view, honest_payload):
        return self.forge(ctx, honest_payload)


class GuessingINT(_IntStrategy):
    """Guess one honest evaluation point and forge a polynomial agreeing with F only there.

    The forgery is ``F + delta*(x + guess)``: it passes through
    ``(guess, F(guess))``, differs from F in its constant term and has no
    other agreement with F, so an honest verifier accepts exactly when the
    guess hits its point.
    """

    name = "guessing"

    def int_reveal(self, ctx, view, honest_payload):
        used = {ctx.verifier_states[i][0].alpha.value for i in ctx.corrupt_verifiers}
        guess = draw_avoiding(ctx, used)
        delta = ctx.adv.nonzero_bits(ctx.params.kappa)
        if not isinstance(honest_payload, RevealPoly):
            return honest_payload
        field = ctx.params.field
        coeffs = list(honest_payload.F.values)
        coeffs[0] ^= field.mul_int(delta, guess)
        coeffs[1] ^= delta
        self.notes["guess"] = guess
        return RevealPoly(Poly(field, coeffs))


class RushingINTOneRound(ForgingINT):
    """In a one-round Reveal, read the honest triples first and interpolate through them."""

    name = "rushing-oneround"

    def int_reveal(self, ctx, view, honest_payload):
        params = ctx.params
        points = {}
        for rec in view.broadcasts(ctx.round, None):
            if rec.payload[:1] != bytes([Tag.TRIPLE]):
                continue
            if rec.sender == "INT" or int(rec.sender[1:]) - 1 in ctx.corrupt_verifiers:
                continue
            try:
                tr = decode(rec.payload, params)
            except ValueError:
                continue
            points.setdefault(tr.alpha.value, tr.v)
        if not points or not isinstance(honest_payload, RevealPoly):
            self.notes["saw_triples"] = False
            return self.forge(ctx, honest_payload)
        self.notes["saw_triples"] = True
        honest_count = params.n - len(ctx.corrupt_verifiers)
        self.notes["nonsingular"] = len(points) == honest_count
        target = payload_secret(honest_payload, params.ell).ints
        forged = draw_distinct_block(ctx, target)
        field = params.field
        pts = [(FieldElement(a, field), v) for a, v in points.items()]
        try:
            F = interpolate(pts, params.length, SecretBlock.of(field, forged).values)
        except InterpolationError:
            self.notes["nonsingular"] = False
            return self.forge(ctx, honest_payload)
        return RevealPoly(F)


class TamperingINT(_IntStrategy):
    """Corrupt one coefficient of B in instance ``j`` during Ver, then reveal honestly."""

    name = "tampering"

    def __init__(self, j=0):
        self.j = int(j)
        self.notes = {}

    def int_ver1(self, ctx, j, honest_challenge):
        if j != self.j:
            return honest_challenge
        params = ctx.params
        k = ctx.adv.below(params.length)
        delta = ctx.adv.nonzero_bits(params.kappa)
        coeffs = list(honest_challenge.B.values)
        coeffs[k] ^= delta
        return Challenge(honest_challenge.d, Poly(params.field, coeffs))


class _DealerStrategy(Strategy):
    role = "D"
    corrupt_vote = Vote.REJECT

    def dealer_ver2(self, ctx, j, honest_response):
        return None

    def _instance(self, ctx):
        return ctx.adv.below(ctx.q) if ctx.q > 1 else 0


class InconsistentDealer(_DealerStrategy):
    """Hand every honest verifier a wrong ``v`` in one instance.

    ``case="b"`` keeps ``r`` correct, so the Ver check always exposes the
    dealer; ``case="c"`` also perturbs ``r`` without aiming at any
    particular challenge.
    """

    name = "inconsistent"

    def __init__(self, case="c"):
        if case not in ("b", "c"):
            raise ConfigurationError("case must be 'b' or 'c'")
        self.case = case
        self.notes = {}

    def fabricate_gen(self, ctx, int_msgs, verifier_msgs):
        j = self._instance(ctx)
        k = ctx.params.kappa
        field = ctx.params.field
        self.notes["instance"] = j
        for i in ctx.honest_verifiers:
            m = verifier_msgs[i][j]
            e = ctx.adv.nonzero_bits(k)
            f = ctx.adv.nonzero_bits(k) if self.case == "c" else 0
            verifier_msgs[i][j] = GenVerifierMsg(
                m.alpha, FieldElement(m.v.value ^ e, field), FieldElement(m.r.value ^ f, field)
            )
        return int_msgs, verifier_msgs


class DGuessingDealer(_DealerStrategy):
    """Pre-guess a distinct challenge per honest verifier and make its values consistent with it.

    With guess ``g`` and error ``e``, verifier i gets ``v = F(a) + e`` and
    ``r = R(a) + g*e``, so ``B(a) == d*v + r`` exactly when INT picks
    ``d == g``; C1 fails, C2 fails, and the verifier rejects.
    """

    name = "dguessing"

    def fabricate_gen(self, ctx, int_msgs, verifier_msgs):
        j = self._instance(ctx)
        k = ctx.params.kappa
        field = ctx.params.field
        used = set()
        guesses = {}
        for i in ctx.honest_verifiers:
            g = draw_avoiding(ctx, used)
            used.add(g)
            e = ctx.adv.nonzero_bits(k)
            m = verifier_msgs[i][j]
            verifier_msgs[i][j] = GenVerifierMsg(
                m.alpha,
                FieldElement(m.v.value ^ e, field),
                FieldElement(m.r.value ^ field.mul_int(g, e), field),
            )
            guesses[i] = g
        self.notes["instance"] = j
        self.notes["guesses"] = guesses
        return int_msgs, verifier_msgs


class BroadcastingDealer(_DealerStrategy):
    """Distribute honestly but broadcast the secret of instance ``j`` during Ver anyway."""

    name = "broadcasting"

    def __init__(self, j=0):
        self.j = int(j)
        self.notes = {}

    def dealer_ver2(self, ctx, j, honest_response):
        if j == self.j:
            return DealerSecret(ctx.secrets[j])
        return honest_response


CATALOG = {
    cls.name: cls
    for cls in (
        Strategy,
        ForgingINT,
        GuessingINT,
        RushingINTOneRound,
        TamperingINT,
        InconsistentDealer,
        DGuessingDealer,
        BroadcastingDealer,
    )
}


def strategy_catalog():
    """Name -> strategy class for every built-in adversary."""
    return dict(CATALOG)


def make_strategy(name, **kwargs):
    try:
        cls = CATALOG[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown strategy {name!r}; choose from {', '.join(sorted(CATALOG))}"
        ) from None
    return cls(**kwargs)
