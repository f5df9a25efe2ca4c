"""Local linear combination of signatures from one dealer to one intermediary.

If the dealer reused each verifier's evaluation point across ``q``
instances, INT can add its signature polynomials and each verifier can add
its verification values, without further interaction. Instances in which
the dealer broadcast its secret are first lifted to a public polynomial
(the secret as low coefficients, zeros above).
"""

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigurationError
from .gf2k import FieldParams
from .icp import (
    PolyForm,
    ProtocolParams,
    PublicForm,
    Reason,
    RevealPoly,
    SecretBlock,
    Vote,
    VerifierState,
)
from .polynomial import Poly, poly_eval


def lift_public_sig(S, params):
    if len(S) != params.ell:
        raise ConfigurationError(f"secret has {len(S)} elements, expected {params.ell}")
    return Poly(params.field, list(S) + [0] * (params.length - params.ell))


def as_poly(sig, params):
    if isinstance(sig, PublicForm):
        return lift_public_sig(sig.S, params)
    return sig.F


@dataclass(frozen=True)
class InstanceView:
    """INT's end of one signing instance plus the public Ver broadcasts."""

    sig: object
    d: object
    B: Poly
    dealer_broadcast: Optional[SecretBlock] = None
    dealer: str = "D"
    intermediary: str = "INT"


@dataclass(frozen=True)
class SignatureBundle:
    """``q`` instances and, per verifier, that verifier's state in each instance.

    ``verifier_states[i][j]`` is verifier ``i``'s state in instance ``j``.
    """

    params: ProtocolParams
    instances: tuple
    verifier_states: tuple

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "verifier_states", tuple(tuple(s) for s in self.verifier_states))
        q = len(self.instances)
        if q < 1:
            raise ConfigurationError("a bundle needs at least one instance")
        if len({(x.dealer, x.intermediary) for x in self.instances}) != 1:
            raise ConfigurationError("signatures from different dealers or intermediaries cannot be combined")
        for inst in self.instances:
            if len(as_poly(inst.sig, self.params)) != self.params.length:
                raise ConfigurationError("instance polynomial has the wrong length")
        if len(self.verifier_states) != self.params.n:
            raise ConfigurationError("need one state list per verifier")
        for i, states in enumerate(self.verifier_states):
            if len(states) != q:
                raise ConfigurationError(f"verifier {i + 1} holds {len(states)} states for {q} instances")
            if len({s.alpha for s in states}) != 1:
                raise ConfigurationError(
                    f"verifier {i + 1} has different evaluation points across instances"
                )

    @property
    def q(self):
        return len(self.instances)


def combine_signatures(bundle):
    params = bundle.params
    total = Poly.zero(params.field, params.length)
    for inst in bundle.instances:
        total = total + as_poly(inst.sig, params)
    return PolyForm(total)


def combine_verification(values):
    values = list(values)
    if not values:
        raise ConfigurationError("nothing to combine")
    acc = values[0]
    for v in values[1:]:
        acc = acc + v
    return acc


def verification_values(states, params):
    """Per-instance verification values, recomputed from the public secret where D broadcast."""
    out = []
    for s in states:
        if s.dealer_broadcast is not None:
            out.append(poly_eval(lift_public_sig(s.dealer_broadcast, params), s.alpha))
        else:
            out.append(s.v)
    return out


def offset_shift(a, alpha, params):
    """Change in a verification value when public values ``a`` are subtracted."""
    return poly_eval(lift_public_sig(a, params), alpha)


def offset_signature(sig, a, params):
    """Signature on ``b - a`` from a signature on ``b`` and public ``a``."""
    a = SecretBlock(tuple(a))
    lifted = lift_public_sig(a, params)
    return PolyForm(as_poly(sig, params) + lifted)


def offset_verification(v, alpha, a, params):
    return v + offset_shift(SecretBlock(tuple(a)), alpha, params)


def judge_combined(states: Sequence[VerifierState], payload, params, offset=None):
    if not isinstance(payload, RevealPoly):
        return Vote.REJECT, Reason.REJECT
    alpha = states[0].alpha
    v = combine_verification(verification_values(states, params))
    if offset is not None:
        v = v + offset_shift(offset, alpha, params)
    if poly_eval(payload.F, alpha) == v:
        return Vote.ACCEPT, Reason.C1
    for s in states:
        if s.dealer_broadcast is None and s.B is not None and s.d is not None and not s.consistent:
            return Vote.ACCEPT, Reason.C2
    return Vote.REJECT, Reason.REJECT


def reveal_combined_verifier(states, payload, params, offset=None):
    return judge_combined(states, payload, params, offset)[0]


# --------------------------------------------------------------------------
# manifest


def write_manifest(path, params, refs):
    """Header line with ``q`` and the parameters, then one transcript reference per line."""
    header = {
        "q": len(refs),
        "n": params.n,
        "t": params.t,
        "ell": params.ell,
        "kappa": params.kappa,
        "reduction_poly": params.field.reduction_poly,
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for ref in refs:
            fh.write(str(ref) + "\n")


def read_manifest(path):
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = json.loads(lines[0])
    field = FieldParams(header["kappa"], header["reduction_poly"])
    params = ProtocolParams(header["n"], header["t"], header["ell"], field)
    refs = lines[1:]
    if len(refs) != header["q"]:
        raise ConfigurationError(f"manifest declares q={header['q']} but lists {len(refs)} instances")
    return params, refs
