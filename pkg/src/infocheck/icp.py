"""Multi-verifier, multi-secret information checking.

Roles: a dealer ``D`` signs a block of ``ell`` field elements for an
intermediary ``INT``; ``n = 2t + 1`` verifiers later judge INT's reveal.

Phases and rounds::

    Gen     R1  D -> INT : F, R          D -> P_i : (alpha_i, F(alpha_i), R(alpha_i))
    Ver     R1  INT broadcasts (d, B = d*F + R) with random d != 0
            R2  D broadcasts S if B(alpha_i) != d*v_i + r_i for any i
    Reveal  R1  INT broadcasts its signature (F, or S if D broadcast it)
            R2  P_i votes Accept on C1: v_i = F(alpha_i)
                                 or C2: B(alpha_i) != d*v_i + r_i

The signature is accepted when at least ``t + 1`` verifiers vote Accept.
Every transition here is a pure function of its inputs; sequencing lives in
:mod:`infocheck.simnet`.
"""

import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import ConfigurationError
from .gf2k import FieldElement, FieldParams, params_from_error, sample_nonzero
from .polynomial import Poly, extract_secrets, poly_eval, poly_linear, random_with_prefix


@dataclass(frozen=True)
class ProtocolParams:
    n: int
    t: int
    ell: int
    field: FieldParams

    def __post_init__(self):
        if self.t < 1 or self.n != 2 * self.t + 1:
            raise ConfigurationError(f"need n = 2t + 1 with t >= 1, got n={self.n}, t={self.t}")
        if self.ell < 1:
            raise ConfigurationError("ell must be >= 1")
        if Fraction(self.n, self.field.order) > self.epsilon:
            raise ConfigurationError("field violates n * 2^-kappa <= epsilon")

    @classmethod
    def build(cls, n, ell, kappa=None, epsilon=None):
        """Parameters from a field width, an error bound, or both."""
        if n < 3 or n % 2 == 0:
            raise ConfigurationError(f"n must be odd and >= 3, got {n}")
        if kappa is None:
            if epsilon is None:
                raise ConfigurationError("give kappa or epsilon")
            field = params_from_error(n, epsilon)
        else:
            eps = epsilon if epsilon is not None else Fraction(n, 1 << kappa)
            if Fraction(n, 1 << kappa) >= 1:
                raise ConfigurationError(f"GF(2^{kappa}) is too small for {n} verifiers")
            field = FieldParams(kappa, n=n, epsilon=eps)
        return cls(n, (n - 1) // 2, ell, field)

    @property
    def kappa(self):
        return self.field.kappa

    @property
    def length(self):
        """Coefficient count of every protocol polynomial (degree <= ell + t)."""
        return self.ell + self.t + 1

    @property
    def epsilon(self):
        if self.field.epsilon is not None:
            return self.field.epsilon
        return Fraction(self.n, self.field.order)

    @property
    def guess_bound(self):
        """``(t + 1) / (|F| - 1)``: the union bound over honest verifiers."""
        return Fraction(self.t + 1, self.field.order - 1)


@dataclass(frozen=True)
class SecretBlock:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ConfigurationError("empty secret block")

    @classmethod
    def of(cls, field, ints):
        return cls(tuple(FieldElement(v, field) for v in ints))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __add__(self, other):
        if len(self) != len(other):
            raise ConfigurationError("secret blocks differ in length")
        return SecretBlock(tuple(a + b for a, b in zip(self.values, other.values)))

    @property
    def ints(self):
        return tuple(v.value for v in self.values)

    def to_bytes(self):
        out = bytearray(len(self).to_bytes(2, "little"))
        for v in self.values:
            out += v.to_bytes()
        return bytes(out)


# --------------------------------------------------------------------------
# messages


class Tag(enum.IntEnum):
    GEN_INT = 1
    GEN_VERIFIER = 2
    CHALLENGE = 3
    DEALER_SECRET = 4
    REVEAL_POLY = 5
    REVEAL_BLOCK = 6
    VOTE = 7
    TRIPLE = 8


@dataclass(frozen=True)
class GenIntMsg:
    F: Poly
    R: Poly
    tag = Tag.GEN_INT

    def elements(self):
        return len(self.F) + len(self.R)


@dataclass(frozen=True)
class GenVerifierMsg:
    alpha: FieldElement
    v: FieldElement
    r: FieldElement
    tag = Tag.GEN_VERIFIER

    def elements(self):
        return 3


@dataclass(frozen=True)
class Challenge:
    d: FieldElement
    B: Poly
    tag = Tag.CHALLENGE

    def elements(self):
        return 1 + len(self.B)


@dataclass(frozen=True)
class DealerSecret:
    S: SecretBlock
    tag = Tag.DEALER_SECRET

    def elements(self):
        return len(self.S)


@dataclass(frozen=True)
class RevealPoly:
    F: Poly
    tag = Tag.REVEAL_POLY

    def elements(self):
        return len(self.F)


@dataclass(frozen=True)
class RevealBlock:
    S: SecretBlock
    tag = Tag.REVEAL_BLOCK

    def elements(self):
        return len(self.S)


class Vote(enum.IntEnum):
    REJECT = 0
    ACCEPT = 1


@dataclass(frozen=True)
class VoteMsg:
    vote: Vote
    tag = Tag.VOTE

    def elements(self):
        return 0


@dataclass(frozen=True)
class TripleMsg:
    alpha: FieldElement
    v: FieldElement
    r: FieldElement
    tag = Tag.TRIPLE

    def elements(self):
        return 3


Payload = Union[RevealPoly, RevealBlock]


def info_bits(msg, kappa):
    """Information content counted by the cost ledger: kappa bits per element, 1 per vote."""
    if isinstance(msg, VoteMsg):
        return 1
    return msg.elements() * kappa


def encode(msg):
    body = bytearray([int(msg.tag)])
    if isinstance(msg, GenIntMsg):
        body += msg.F.to_bytes() + msg.R.to_bytes()
    elif isinstance(msg, (GenVerifierMsg, TripleMsg)):
        body += msg.alpha.to_bytes() + msg.v.to_bytes() + msg.r.to_bytes()
    elif isinstance(msg, Challenge):
        body += msg.d.to_bytes() + msg.B.to_bytes()
    elif isinstance(msg, (DealerSecret, RevealBlock)):
        body += msg.S.to_bytes()
    elif isinstance(msg, RevealPoly):
        body += msg.F.to_bytes()
    elif isinstance(msg, VoteMsg):
        body.append(int(msg.vote))
    else:
        raise TypeError(f"not a protocol message: {msg!r}")
    return bytes(body)


class _Reader:
    def __init__(self, data, field):
        self.data, self.pos, self.field = data, 0, field

    def take(self, k):
        if self.pos + k > len(self.data):
            raise ValueError("truncated message")
        chunk = self.data[self.pos : self.pos + k]
        self.pos += k
        return chunk

    def element(self):
        return self.field.element_from_bytes(self.take(self.field.byte_len))

    def count(self):
        return int.from_bytes(self.take(2), "little")

    def poly(self, length):
        k = self.count()
        if k != length:
            raise ValueError(f"polynomial of length {k}, expected {length}")
        return Poly(self.field, [self.element() for _ in range(k)])

    def block(self, length):
        k = self.count()
        if k != length:
            raise ValueError(f"secret block of length {k}, expected {length}")
        return SecretBlock(tuple(self.element() for _ in range(k)))

    def done(self):
        if self.pos != len(self.data):
            raise ValueError("trailing bytes")


def decode(data, params):
    """Parse a wire message; raises ``ValueError`` on anything outside the domain."""
    if not data:
        raise ValueError("empty message")
    rd = _Reader(data, params.field)
    tag = Tag(rd.take(1)[0])
    L = params.length
    if tag == Tag.GEN_INT:
        msg = GenIntMsg(rd.poly(L), rd.poly(L))
    elif tag in (Tag.GEN_VERIFIER, Tag.TRIPLE):
        cls = GenVerifierMsg if tag == Tag.GEN_VERIFIER else TripleMsg
        msg = cls(rd.element(), rd.element(), rd.element())
        if not msg.alpha:
            raise ValueError("evaluation point must be nonzero")
    elif tag == Tag.CHALLENGE:
        msg = Challenge(rd.element(), rd.poly(L))
        if not msg.d:
            raise ValueError("challenge d must be nonzero")
    elif tag == Tag.DEALER_SECRET:
        msg = DealerSecret(rd.block(params.ell))
    elif tag == Tag.REVEAL_BLOCK:
        msg = RevealBlock(rd.block(params.ell))
    elif tag == Tag.REVEAL_POLY:
        msg = RevealPoly(rd.poly(L))
    else:
        b = rd.take(1)[0]
        if b not in (0, 1):
            raise ValueError("vote byte must be 0 or 1")
        msg = VoteMsg(Vote(b))
    rd.done()
    return msg


def default_message(cls, params):
    """The fixed message substituted for anything malformed or missing."""
    f = params.field
    zero_poly = Poly.zero(f, params.length)
    zero_block = SecretBlock(tuple(f.zero for _ in range(params.ell)))
    return {
        GenIntMsg: lambda: GenIntMsg(zero_poly, zero_poly),
        GenVerifierMsg: lambda: GenVerifierMsg(f.one, f.zero, f.zero),
        TripleMsg: lambda: TripleMsg(f.one, f.zero, f.zero),
        Challenge: lambda: Challenge(f.zero, zero_poly),
        DealerSecret: lambda: DealerSecret(zero_block),
        VoteMsg: lambda: VoteMsg(Vote.REJECT),
    }[cls]()


def receive(data, expected, params):
    """Decode ``data`` as one of ``expected``; malformed or absent input yields ``None``."""
    if data is None:
        return None
    try:
        msg = decode(data, params)
    except (ValueError, KeyError):
        return None
    return msg if isinstance(msg, expected) else None


def receive_or_default(data, cls, params):
    msg = receive(data, cls, params)
    return msg if msg is not None else default_message(cls, params)


# --------------------------------------------------------------------------
# signatures and states


@dataclass(frozen=True)
class PolyForm:
    F: Poly


@dataclass(frozen=True)
class PublicForm:
    S: SecretBlock


ICSignature = Union[PolyForm, PublicForm]


@dataclass(frozen=True)
class DealerState:
    params: ProtocolParams
    F: Poly
    R: Poly
    alphas: tuple
    vs: tuple
    rs: tuple

    @property
    def secret(self):
        return SecretBlock(extract_secrets(self.F, self.params.ell))


@dataclass(frozen=True)
class IntermediaryState:
    F: Poly
    R: Poly
    d: Optional[FieldElement] = None
    B: Optional[Poly] = None
    dealer_broadcast: Optional[SecretBlock] = None

    @classmethod
    def from_gen(cls, msg):
        return cls(msg.F, msg.R)


@dataclass(frozen=True)
class VerifierState:
    alpha: FieldElement
    v: FieldElement
    r: FieldElement
    d: Optional[FieldElement] = None
    B: Optional[Poly] = None
    dealer_broadcast: Optional[SecretBlock] = None

    @classmethod
    def from_gen(cls, msg):
        return cls(msg.alpha, msg.v, msg.r)

    def with_challenge(self, ch):
        return replace(self, d=ch.d, B=ch.B)

    def with_dealer_broadcast(self, msg):
        return replace(self, dealer_broadcast=None if msg is None else msg.S)

    @property
    def consistent(self):
        """Whether the Ver-phase check ``B(alpha) == d*v + r`` holds for this verifier."""
        return poly_eval(self.B, self.alpha) == self.d * self.v + self.r


class Reason(enum.Enum):
    C1 = "C1"
    C2 = "C2"
    PUBLIC_MATCH = "public-match"
    REJECT = "reject"


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    secret: Optional[SecretBlock] = None
    accepts: int = 0


# --------------------------------------------------------------------------
# transitions


def sample_alphas(params, rng):
    return tuple(sample_nonzero(params.field, rng) for _ in range(params.n))


def gen_dealer(params, S, rng, alphas=None):
    """Dealer's Gen round.

    Draw order on ``rng``: the ``n`` evaluation points (unless supplied),
    then F's ``t + 1`` high coefficients, then all of R.
    """
    S = SecretBlock(tuple(S))
    if len(S) != params.ell:
        raise ConfigurationError(f"secret has {len(S)} elements, expected {params.ell}")
    if any(v.field != params.field for v in S):
        raise ConfigurationError("secret elements are not in the protocol field")
    if alphas is None:
        alphas = sample_alphas(params, rng)
    elif len(alphas) != params.n or any(not a for a in alphas):
        raise ConfigurationError("need n nonzero evaluation points")
    F = random_with_prefix(S.values, params.t, rng)
    R = Poly(params.field, [rng.bits(params.kappa) for _ in range(params.length)])
    vs = tuple(poly_eval(F, a) for a in alphas)
    rs = tuple(poly_eval(R, a) for a in alphas)
    state = DealerState(params, F, R, tuple(alphas), vs, rs)
    to_verifiers = [GenVerifierMsg(a, v, r) for a, v, r in zip(alphas, vs, rs)]
    return state, GenIntMsg(F, R), to_verifiers


def ver_round1_int(state, rng):
    if state.F is None or state.R is None:
        raise ConfigurationError("INT has not received its Gen message")
    d = sample_nonzero(state.F.field, rng)
    B = poly_linear(d, state.F, state.R)
    return replace(state, d=d, B=B), Challenge(d, B)


def ver_round2_dealer(state, challenge):
    """Broadcast S unless the challenge is consistent with every stored triple.

    ``challenge`` is ``None`` when INT's broadcast was malformed or missing.
    """
    if challenge is None or not challenge.d or len(challenge.B) != state.params.length:
        return DealerSecret(state.secret)
    d, B = challenge.d, challenge.B
    for a, v, r in zip(state.alphas, state.vs, state.rs):
        if poly_eval(B, a) != d * v + r:
            return DealerSecret(state.secret)
    return None


def int_observe_dealer(state, msg):
    return replace(state, dealer_broadcast=None if msg is None else msg.S)


def finalize_sig_int(state):
    if state.dealer_broadcast is not None:
        return PublicForm(state.dealer_broadcast)
    return PolyForm(state.F)


def reveal_round1_int(sig):
    if isinstance(sig, PublicForm):
        return RevealBlock(sig.S)
    return RevealPoly(sig.F)


def judge(state, payload):
    """Vote and the condition that produced it."""
    if state.dealer_broadcast is not None:
        if isinstance(payload, RevealBlock) and payload.S == state.dealer_broadcast:
            return Vote.ACCEPT, Reason.PUBLIC_MATCH
        return Vote.REJECT, Reason.REJECT
    if not isinstance(payload, RevealPoly):
        return Vote.REJECT, Reason.REJECT
    if poly_eval(payload.F, state.alpha) == state.v:
        return Vote.ACCEPT, Reason.C1
    if state.B is not None and state.d is not None and not state.consistent:
        return Vote.ACCEPT, Reason.C2
    return Vote.REJECT, Reason.REJECT


def reveal_round2_verifier(state, payload):
    return judge(state, payload)[0]


def payload_secret(payload, ell):
    if isinstance(payload, RevealBlock):
        return payload.S
    if isinstance(payload, RevealPoly):
        return SecretBlock(extract_secrets(payload.F, ell))
    return None


def tally(votes: Sequence[Optional[Vote]], payload, t, ell):
    """Accept iff at least ``t + 1`` votes are Accept; absent votes count as Reject."""
    accepts = sum(1 for v in votes if v == Vote.ACCEPT)
    if accepts >= t + 1 and payload is not None:
        return Verdict(True, payload_secret(payload, ell), accepts)
    return Verdict(False, None, accepts)


def reveal_oneround(payload, triples, d, B, dealer_broadcast, t, ell):
    """Collapsed Reveal: INT's signature and every verifier's triple arrive together.

    Each published triple is judged with the same predicate as
    :func:`reveal_round2_verifier`, using only public data.
    """
    votes = []
    for tr in triples:
        if tr is None:
            votes.append(Vote.REJECT)
            continue
        st = VerifierState(tr.alpha, tr.v, tr.r, d, B, dealer_broadcast)
        votes.append(reveal_round2_verifier(st, payload))
    return tally(votes, payload, t, ell), votes
