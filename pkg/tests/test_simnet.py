import json

import numpy as np
import pytest

from infocheck._accel import HAVE_NUMBA
from infocheck.errors import ConfigurationError
from infocheck.icp import ProtocolParams
from infocheck.simnet import SessionConfig, ledger_matches, run_batch, run_session, strategy_catalog
from infocheck.simnet.batch import BATCH_STRATEGIES, REASON_NAMES
from infocheck.simnet.network import BROADCAST, Network
from infocheck.simnet.strategies import ForgingINT

P4 = ProtocolParams.build(3, 2, kappa=4)
P8 = ProtocolParams.build(3, 4, kappa=8)

FIXTURES = {
    "broadcasting": "e96e403dfe7eac175c17a4663c0704557de7492721a5bd670fbe474c45c44b46",
    "dguessing": "443c04d38c21b141e1e9ee904997db7ee94aec61179bfd207110dced9ee1a220",
    "forging": "a4e161164cf9afd84dfdc8ed51619bf2e3e6a41bafff35b9b5757f00c0246302",
    "guessing": "203c34c64360dc72c96f2ed45cbdec2115eb109ac03600c6f924b960de2cca72",
    "honest": "4efe26ae25b827c8f10723679a50c2f81612a5855c5a8363a8f02b010c546508",
    "inconsistent": "b96abceab061dc09dfc60623e74642a29f598ab9c98e6d561a96f67e27ffd29a",
    "rushing-oneround": "8a48f4c666d8daf63b0b7aaa4dc6dc323b70fe4d157adb5daf6be7a66bc23114",
    "tampering": "7dad09161cdf97d34317ad4837159a3df65a79eb84d57c79509c36815179994a",
}


def _cfg(name, **kw):
    rr = 1 if name == "rushing-oneround" else 2
    return SessionConfig(P4, strategy=name, reveal_rounds=rr, **kw)


def test_fixture_for_every_strategy():
    assert set(FIXTURES) == set(strategy_catalog())


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_digest(name):
    assert run_session(_cfg(name, seed=0)).digest() == FIXTURES[name]


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_replay_identical(name):
    a = run_session(_cfg(name, seed=17)).to_jsonl()
    b = run_session(_cfg(name, seed=17)).to_jsonl()
    assert a == b
    assert a != run_session(_cfg(name, seed=18)).to_jsonl()


def test_transcript_export(tmp_path):
    tr = run_session(SessionConfig(P8, seed=1))
    path = tmp_path / "t.jsonl"
    tr.export(path)
    lines = path.read_text().splitlines()
    assert len(lines) == len(tr.records) + 1
    assert json.loads(lines[-1])["summary"]["verdict"] == "Accepted"


def test_honest_sessions():
    for seed in range(100):
        tr = run_session(SessionConfig(P8, seed=seed))
        assert tr.correct
        assert not any(tr.dealer_broadcasts)
        assert tr.ledger.rounds == {"gen": 1, "ver": 2, "reveal": 2}
        assert set(tr.reasons.values()) == {"C1"}


def test_oneround_nonrushing_honest():
    tr = run_session(SessionConfig(P8, reveal_rounds=1, rushing=False, seed=2))
    assert tr.correct
    assert tr.ledger.rounds == {"gen": 1, "ver": 2, "reveal": 1}
    assert not tr.config.guarantees_void
    assert SessionConfig(P8, reveal_rounds=1).guarantees_void


def test_config_errors():
    with pytest.raises(ConfigurationError):
        SessionConfig(P8, corrupt_verifiers=(1, 2))
    with pytest.raises(ConfigurationError):
        SessionConfig(P8, corrupt_verifiers=(4,))
    with pytest.raises(ConfigurationError):
        SessionConfig(P8, reveal_rounds=3)
    with pytest.raises(ConfigurationError):
        SessionConfig(P8, reveal_rounds=1, q=2)
    with pytest.raises(ConfigurationError):
        SessionConfig(P8, strategy="nope")
    with pytest.raises(ConfigurationError):
        SessionConfig(P8, offsets=(1,))


class Probe(ForgingINT):
    name = "probe"

    def __init__(self):
        super().__init__()
        self.seen = []

    def int_reveal(self, ctx, view, honest_payload):
        self.seen.append((ctx.round, max(rec.round for rec in view.messages()),
                          sum(rec.round == ctx.round for rec in view.messages())))
        return super().int_reveal(ctx, view, honest_payload)


@pytest.mark.parametrize("rushing", [False, True])
def test_rushing_containment(rushing):
    probe = Probe()
    cfg = SessionConfig(P8, strategy="forging", reveal_rounds=1, rushing=rushing, seed=3)
    run_session(cfg, strategy=probe)
    (round_, latest, current), = probe.seen
    if rushing:
        assert latest == round_ and current == P8.n - P8.t  # the honest triples
    else:
        assert latest < round_ and current == 0


def test_rushing_oneround_needs_rushing():
    on = run_session(SessionConfig(P8, strategy="rushing-oneround", reveal_rounds=1, seed=0))
    off = run_session(SessionConfig(P8, strategy="rushing-oneround", reveal_rounds=1,
                                    rushing=False, seed=0))
    assert on.notes["saw_triples"] and on.accepted and not on.correct
    assert not off.notes["saw_triples"]


def test_honest_parties_post_first():
    tr = run_session(SessionConfig(P8, strategy="forging", reveal_rounds=1, seed=5))
    last = [r for r in tr.records if r.round == max(x.round for x in tr.records)]
    senders = [r.sender for r in last]
    corrupt = {"INT"} | {f"P{i}" for i in tr.config.verifiers_corrupted()}
    first_corrupt = min(i for i, s in enumerate(senders) if s in corrupt)
    assert all(s in corrupt for s in senders[first_corrupt:])


def test_broadcast_consistency():
    tr = run_session(SessionConfig(P8, strategy="broadcasting", seed=9))
    net = Network(8, set(), True)
    net.records = tr.records
    for rnd in {r.round for r in tr.records}:
        views = [
            [(r.sender, r.payload) for r in net.delivered(p, rnd) if r.recipient == BROADCAST]
            for p in ["D", "INT", "P1", "P2", "P3"]
        ]
        assert all(v == views[0] for v in views)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_ledger_exact_for_every_strategy(name):
    for seed in range(10):
        assert ledger_matches(run_session(_cfg(name, seed=seed)))


def test_ledger_example():
    tr = run_session(SessionConfig(ProtocolParams.build(3, 4, kappa=16), seed=0))
    assert tr.ledger.private_bits["gen"] == 336
    assert tr.ledger.broadcast_bits == {"gen": 0, "ver": 112, "reveal": 99}


BATCH_CASES = [
    ("honest", {}, 1, None),
    ("forging", {}, 1, None),
    ("guessing", {}, 1, None),
    ("dguessing", {}, 1, None),
    ("inconsistent", {"case": "b"}, 1, None),
    ("inconsistent", {"case": "c"}, 3, None),
    ("tampering", {"j": 1}, 2, None),
    ("broadcasting", {"j": 0}, 2, None),
    ("forging", {}, 4, (1, 2)),
    ("dguessing", {}, 2, (5, 5)),
]


@pytest.mark.parametrize("name, args, q, offsets", BATCH_CASES)
def test_batch_replays_sessions(name, args, q, offsets):
    params = ProtocolParams.build(3, 2, kappa=4)
    cfg = SessionConfig(params, strategy=name, strategy_args=args, q=q, offsets=offsets)
    seeds = np.arange(120, dtype=np.uint64)
    res = run_batch(cfg, seeds)
    for k, s in enumerate(seeds):
        tr = run_session(SessionConfig(params, strategy=name, strategy_args=args, q=q,
                                       offsets=offsets, seed=int(s)))
        assert res.accepted[k] == tr.accepted
        assert res.correct[k] == tr.correct
        assert res.votes[k].tolist() == [int(v) for v in tr.votes]
        assert res.dealer_broadcasts[k].tolist() == tr.dealer_broadcasts
        for i, reason in tr.reasons.items():
            assert REASON_NAMES[int(res.reasons[k, i])] == reason


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("name", sorted(BATCH_STRATEGIES))
def test_batch_backends_agree(name):
    cfg = SessionConfig(P8, strategy=name, q=2)
    seeds = np.arange(2000, dtype=np.uint64)
    a, b = run_batch(cfg, seeds, "numba"), run_batch(cfg, seeds, "numpy")
    for field in ("accepted", "correct", "votes", "reasons", "dealer_broadcasts"):
        assert np.array_equal(getattr(a, field), getattr(b, field))
