import pytest

from infocheck.errors import ConfigurationError
from infocheck.icp import (
    DealerSecret,
    IntermediaryState,
    PolyForm,
    ProtocolParams,
    PublicForm,
    Reason,
    RevealPoly,
    SecretBlock,
    VerifierState,
    Vote,
    gen_dealer,
    sample_alphas,
    ver_round1_int,
)
from infocheck.linearity import (
    InstanceView,
    SignatureBundle,
    as_poly,
    combine_signatures,
    combine_verification,
    judge_combined,
    lift_public_sig,
    offset_signature,
    offset_verification,
    read_manifest,
    verification_values,
    write_manifest,
)
from infocheck.polynomial import Poly, extract_secrets, poly_eval
from infocheck.rng import Stream
from infocheck.simnet import SessionConfig, run_session

PARAMS = ProtocolParams.build(3, 3, kappa=8)
F = PARAMS.field


def make_bundle(secrets, seed=0, broadcast=()):
    ds = Stream(seed, 1)
    alphas = sample_alphas(PARAMS, ds)
    instances, states = [], [[] for _ in range(PARAMS.n)]
    for j, S in enumerate(secrets):
        _, mi, mv = gen_dealer(PARAMS, [F(x) for x in S], ds, alphas=alphas)
        ist, ch = ver_round1_int(IntermediaryState.from_gen(mi), Stream(seed + j, 2))
        block = SecretBlock.of(F, S) if j in broadcast else None
        sig = PublicForm(block) if block else PolyForm(mi.F)
        instances.append(InstanceView(sig, ch.d, ch.B, block))
        for i, m in enumerate(mv):
            st = VerifierState.from_gen(m).with_challenge(ch)
            states[i].append(st.with_dealer_broadcast(DealerSecret(block) if block else None))
    return SignatureBundle(PARAMS, instances, states)


def xor_blocks(blocks):
    out = [0] * PARAMS.ell
    for b in blocks:
        out = [x ^ y for x, y in zip(out, b)]
    return out


def test_lift_public_sig():
    S = SecretBlock.of(F, [5, 6, 7])
    lifted = lift_public_sig(S, PARAMS)
    assert extract_secrets(lifted, 3) == S.values
    assert lifted.values[3:] == (0, 0)


@pytest.mark.parametrize("broadcast", [(), (1,)])
def test_combine_honest(broadcast):
    secrets = [[1, 2, 3], [40, 50, 60], [7, 7, 7]]
    bundle = make_bundle(secrets, broadcast=broadcast)
    combined = combine_signatures(bundle)
    assert [int(x) for x in extract_secrets(combined.F, 3)] == xor_blocks(secrets)
    payload = RevealPoly(combined.F)
    for states in bundle.verifier_states:
        assert judge_combined(states, payload, PARAMS) == (Vote.ACCEPT, Reason.C1)
        v = combine_verification(verification_values(states, PARAMS))
        assert v == poly_eval(combined.F, states[0].alpha)


def test_q1_identity():
    bundle = make_bundle([[9, 8, 7]])
    assert combine_signatures(bundle) == PolyForm(as_poly(bundle.instances[0].sig, PARAMS))
    assert combine_verification([F(3)]) == F(3)


def test_perturbation_is_exact_delta():
    vals = [F(10), F(20), F(30)]
    base = combine_verification(vals)
    bumped = combine_verification([vals[0], vals[1] + F(0x55), vals[2]])
    assert bumped + base == F(0x55)


def test_mismatched_alpha_rejected():
    a = make_bundle([[1, 2, 3]], seed=1)
    b = make_bundle([[1, 2, 3]], seed=2)
    states = [sa + sb for sa, sb in zip(a.verifier_states, b.verifier_states)]
    with pytest.raises(ConfigurationError):
        SignatureBundle(PARAMS, a.instances + b.instances, states)


def test_different_dealer_rejected():
    a = make_bundle([[1, 2, 3], [4, 5, 6]])
    inst = list(a.instances)
    inst[1] = InstanceView(inst[1].sig, inst[1].d, inst[1].B, dealer="D2")
    with pytest.raises(ConfigurationError):
        SignatureBundle(PARAMS, inst, a.verifier_states)


def test_forged_combined_rejected():
    bundle = make_bundle([[1, 2, 3], [4, 5, 6]])
    combined = combine_signatures(bundle).F
    forged = RevealPoly(Poly(F, [combined.values[0] ^ 1, *combined.values[1:]]))
    for states in bundle.verifier_states:
        assert judge_combined(states, forged, PARAMS)[0] == Vote.REJECT


def test_c2_when_one_instance_inconsistent():
    bundle = make_bundle([[1, 2, 3], [4, 5, 6]])
    states = list(bundle.verifier_states[0])
    s = states[1]
    states[1] = VerifierState(s.alpha, s.v + F(1), s.r + F(2), s.d, s.B)
    forged = RevealPoly(Poly(F, [0] * PARAMS.length))
    assert judge_combined(states, forged, PARAMS) == (Vote.ACCEPT, Reason.C2)


def test_offsets():
    bundle = make_bundle([[11, 22, 33]])
    sig = bundle.instances[0].sig
    b = [11, 22, 33]
    zero = offset_signature(sig, [F(0)] * 3, PARAMS)
    assert zero == PolyForm(sig.F)
    same = offset_signature(sig, [F(x) for x in b], PARAMS)
    assert extract_secrets(same.F, 3) == (F.zero,) * 3
    twice = offset_signature(same, [F(x) for x in b], PARAMS)
    assert twice == PolyForm(sig.F)
    for states in bundle.verifier_states:
        st = states[0]
        v = offset_verification(st.v, st.alpha, [F(x) for x in b], PARAMS)
        assert poly_eval(same.F, st.alpha) == v
        assert judge_combined(states, RevealPoly(same.F), PARAMS, SecretBlock.of(F, b))[0] == Vote.ACCEPT


def test_manifest_roundtrip(tmp_path):
    path = tmp_path / "bundle.manifest"
    write_manifest(path, PARAMS, ["a.jsonl", "b.jsonl"])
    params, refs = read_manifest(path)
    assert params == PARAMS and refs == ["a.jsonl", "b.jsonl"]
    path.write_text(path.read_text() + "c.jsonl\n")
    with pytest.raises(ConfigurationError):
        read_manifest(path)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_session_combined(q):
    for seed in range(20):
        tr = run_session(SessionConfig(PARAMS, q=q, seed=seed))
        assert tr.correct
        assert not any(tr.dealer_broadcasts)


def test_session_with_broadcast_instance():
    cfg = SessionConfig(PARAMS, q=3, strategy="broadcasting", strategy_args={"j": 2}, seed=4)
    tr = run_session(cfg)
    assert tr.dealer_broadcasts == [False, False, True]
    assert tr.correct


def test_session_offset_equal_to_secret_gives_zero():
    S = (9, 99, 199)
    tr = run_session(SessionConfig(PARAMS, secrets=(S,), offsets=S, seed=3))
    assert tr.accepted and tr.revealed == (0, 0, 0)
