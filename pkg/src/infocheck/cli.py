"""``infocheck`` command line: sessions, Monte-Carlo sweeps, audits and cost tables.

Exit codes: 0 when the verdict or bound holds, 1 when a bound is violated,
2 on configuration errors.
"""

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field

from . import rng as rngmod
from .errors import ConfigurationError
from .icp import (
    IntermediaryState,
    PolyForm,
    ProtocolParams,
    VerifierState,
    gen_dealer,
    ver_round1_int,
)
from .linearity import InstanceView, SignatureBundle
from .simnet import (
    SessionConfig,
    complexity_report,
    montecarlo,
    run_session,
    secrecy_audit,
    strategy_catalog,
    view_from_transcript,
)
from .simnet.batch import supports as batch_supports

EXIT_OK, EXIT_VIOLATED, EXIT_CONFIG = 0, 1, 2


@dataclass
class ExperimentReport:
    name: str
    config: dict
    metrics: dict
    passed: object  # True, False, or None when no bound applies
    lines: list = field(default_factory=list)
    wall_time: float = 0.0

    def body(self):
        return {"experiment": self.name, "config": self.config,
                "metrics": self.metrics, "passed": self.passed}

    def digest(self):
        return hashlib.sha256(json.dumps(self.body(), sort_keys=True).encode()).hexdigest()

    def as_dict(self):
        return {**self.body(), "digest": self.digest(), "wall_time": self.wall_time}

    def text(self):
        verdict = {True: "PASS", False: "FAIL", None: "n/a"}[self.passed]
        head = f"[{self.name}] verdict: {verdict}  ({self.wall_time:.2f}s)"
        return "\n".join([head, *self.lines])

    @property
    def exit_code(self):
        return EXIT_VIOLATED if self.passed is False else EXIT_OK


# --------------------------------------------------------------------------
# argument handling


def _ids(text):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ids, got {text!r}") from None


def _ints(text):
    return _ids(text)


def _kv(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k.strip(), int(v)
    except ValueError:
        return k.strip(), v.strip()


DEFAULTS = {
    "n": 3, "t": None, "ell": 4, "kappa": None, "epsilon": None, "seed": 0,
    "rushing": True, "reveal_rounds": 2, "corrupt_dealer": False, "corrupt_int": False,
    "corrupt_verifiers": None, "strategy": "honest", "strategy_arg": [], "out": None,
    "q": 1, "offsets": None,
}


def _common_parser():
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("session")
    g.add_argument("--config", metavar="PATH", help="key=value file; explicit flags win")
    g.add_argument("--n", type=int, help="number of verifiers (odd, default 3)")
    g.add_argument("--t", type=int, help="corruption threshold, must equal (n-1)/2")
    g.add_argument("--ell", type=int, help="secrets per signature (default 4)")
    f = g.add_mutually_exclusive_group()
    f.add_argument("--kappa", type=int, help="field width in bits (default 8)")
    f.add_argument("--epsilon", help="error bound, e.g. 2^-20 or 0.001")
    g.add_argument("--seed", type=int)
    g.add_argument("--rushing", action=argparse.BooleanOptionalAction)
    g.add_argument("--reveal-rounds", type=int, choices=(1, 2), dest="reveal_rounds")
    g.add_argument("--corrupt-dealer", action="store_true", dest="corrupt_dealer")
    g.add_argument("--corrupt-int", action="store_true", dest="corrupt_int")
    g.add_argument("--corrupt-verifiers", type=_ids, metavar="IDS", dest="corrupt_verifiers")
    g.add_argument("--strategy", choices=sorted(strategy_catalog()))
    g.add_argument("--strategy-arg", type=_kv, action="append", metavar="K=V",
                   dest="strategy_arg")
    g.add_argument("--q", type=int, help="signatures combined (default 1)")
    g.add_argument("--offsets", type=_ints, metavar="VALUES", help="public offset block")
    g.add_argument("--out", metavar="PATH", help="write the JSON report here")
    return p


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="infocheck", parents=[common],
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="one session, transcript export")
    run.add_argument("--transcript", metavar="PATH", help="JSONL transcript path")

    mc = sub.add_parser("montecarlo", parents=[common], help="acceptance/rejection rates")
    mc.add_argument("--trials", type=int, default=100_000)
    mc.add_argument("--event", choices=("auto", "accepted", "rejected", "forged", "incorrect"),
                    default="auto")
    mc.add_argument("--engine", choices=("auto", "batch", "session"), default="auto")
    mc.add_argument("--confidence", type=float, default=0.99)

    sec = sub.add_parser("secrecy", parents=[common], help="exhaustive secrecy audit")
    sec.add_argument("--sessions", type=int, default=1, help="views from consecutive seeds")
    sec.add_argument("--leak", type=int, default=0, help="extra honest triples in the view")
    sec.add_argument("--leak-one-honest-triple", action="store_const", const=1, dest="leak")

    sub.add_parser("linearity", parents=[common], help="combine q signatures locally")
    sub.add_parser("complexity", parents=[common], help="analytic vs measured costs")
    return parser


def _read_config(path):
    argv = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}: expected key=value, got {line!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            flag = "--" + k.replace("_", "-")
            low = v.lower()
            if low in ("true", "yes", "1") and k in ("rushing", "corrupt_dealer", "corrupt_int",
                                                    "corrupt-dealer", "corrupt-int"):
                argv.append(flag)
            elif low in ("false", "no", "0") and k in ("rushing",):
                argv.append("--no-rushing")
            elif low in ("false", "no", "0"):
                continue
            else:
                argv += [flag, v]
    return argv


def parse(argv):
    parser = build_parser()
    ns = parser.parse_args(argv)
    if getattr(ns, "config", None):
        cmd = [ns.command]
        base = parser.parse_args(cmd + _read_config(ns.config))
        merged = vars(base)
        merged.update(vars(ns))
        ns = argparse.Namespace(**merged)
    for k, v in DEFAULTS.items():
        if not hasattr(ns, k):
            setattr(ns, k, v)
    return ns


def params_from_args(ns):
    if ns.kappa is None and ns.epsilon is None:
        ns.kappa = 8
    params = ProtocolParams.build(ns.n, ns.ell, kappa=ns.kappa, epsilon=ns.epsilon)
    if ns.t is not None and ns.t != params.t:
        raise ConfigurationError(f"t={ns.t} does not match n={ns.n}; need n = 2t + 1")
    return params


def config_from_args(ns, params=None, **overrides):
    params = params or params_from_args(ns)
    kwargs = dict(
        params=params,
        strategy=ns.strategy,
        strategy_args=dict(ns.strategy_arg or []),
        corrupt_verifiers=ns.corrupt_verifiers,
        corrupt_dealer=ns.corrupt_dealer,
        corrupt_int=ns.corrupt_int,
        rushing=ns.rushing,
        reveal_rounds=ns.reveal_rounds,
        seed=ns.seed,
        q=ns.q,
        offsets=ns.offsets,
    )
    kwargs.update(overrides)
    return SessionConfig(**kwargs)


# --------------------------------------------------------------------------
# commands


def cmd_run(ns):
    cfg = config_from_args(ns)
    tr = run_session(cfg)
    path = ns.transcript or (ns.out + ".transcript.jsonl" if ns.out else None)
    if path:
        tr.export(path)
    s = tr.summary()
    if cfg.guarantees_void:
        passed, expect = None, "none (one-round Reveal against a rushing adversary)"
    elif cfg.int_corrupt:
        passed, expect = not (tr.accepted and not tr.correct), "no forged acceptance"
    elif cfg.dealer_corrupt:
        passed, expect = tr.accepted, "Accepted"
    else:
        passed, expect = tr.correct, "Accepted with the signed secret"
    lines = [
        f"verdict: {s['verdict']}",
        f"revealed: {s['revealed']}",
        f"expected: {s['expected']}",
        f"votes: {s['votes']}",
        f"expectation: {expect}",
        f"transcript sha256: {tr.digest()}",
    ]
    if path:
        lines.append(f"transcript: {path}")
    metrics = {**{k: v for k, v in s.items() if k != "config"}, "transcript_sha256": tr.digest()}
    return ExperimentReport("run", cfg.echo(), metrics, passed, lines)


def _default_event(cfg):
    if cfg.int_corrupt:
        return "accepted"
    if cfg.dealer_corrupt:
        return "rejected"
    return "incorrect"


def cmd_montecarlo(ns):
    if ns.trials < 100:
        raise ConfigurationError("need at least 100 trials")
    cfg = config_from_args(ns)
    event = _default_event(cfg) if ns.event == "auto" else ns.event
    est = montecarlo(cfg, ns.trials, seed0=ns.seed, event=event,
                     confidence=ns.confidence, engine=ns.engine)
    p = cfg.params
    eps = float(p.epsilon)
    tight = float(p.guess_bound)
    sigma = math.sqrt(tight * (1 - tight) / ns.trials)
    metrics = {
        **est.as_dict(),
        "epsilon": eps,
        "tight_bound": tight,
        "tight_bound_plus_3sigma": tight + 3 * sigma,
        "rate_le_epsilon": est.rate <= eps,
        "upper_le_epsilon": est.high <= eps,
        "upper_le_tight_plus_3sigma": est.high <= tight + 3 * sigma,
    }
    if cfg.guarantees_void:
        passed = None
    elif event in ("accepted", "forged") and not cfg.int_corrupt:
        passed = None
    elif event == "incorrect" and not (cfg.int_corrupt or cfg.dealer_corrupt):
        passed = est.hits == 0
    else:
        passed = est.high <= eps
    lines = [
        f"event: {event}  engine: {est.engine}",
        f"rate: {est.hits}/{est.trials} = {est.rate:.6f}",
        f"wilson {est.confidence:.0%}: [{est.low:.6f}, {est.high:.6f}]",
        f"epsilon: {eps:.6f}  (upper <= epsilon: {est.high <= eps})",
        f"(t+1)/(|F|-1): {tight:.6f}  +3 sigma: {tight + 3 * sigma:.6f}",
    ]
    echo = {**cfg.echo(), "trials": ns.trials, "engine": ns.engine}
    echo.pop("seed")
    echo["seed0"] = ns.seed
    return ExperimentReport("montecarlo", echo, metrics, passed, lines)


def cmd_secrecy(ns):
    params = params_from_args(ns)
    if ns.sessions < 1:
        raise ConfigurationError("need at least one session")
    strategy = ns.strategy
    corrupt = ns.corrupt_verifiers
    if corrupt is None:
        corrupt = tuple(range(1, params.t + 1))
    per_view = []
    for k in range(ns.sessions):
        cfg = config_from_args(ns, params, seed=ns.seed + k, corrupt_verifiers=corrupt)
        view = view_from_transcript(run_session(cfg), leak=ns.leak)
        h = secrecy_audit(params, view)
        per_view.append({"seed": ns.seed + k, "uniform": h.uniform, "support": h.support,
                         "histogram": h.counts.tolist()})
    uniform = all(v["uniform"] for v in per_view)
    passed = uniform if ns.leak == 0 else None
    lines = [f"uniform: {str(uniform).lower()}",
             f"views: {len(per_view)}  leaked honest triples: {ns.leak}",
             f"secret classes: {len(per_view[0]['histogram'])}  "
             f"supports: {sorted({v['support'] for v in per_view})}"]
    echo = {"n": params.n, "t": params.t, "ell": params.ell, "kappa": params.kappa,
            "seed0": ns.seed, "sessions": ns.sessions, "leak": ns.leak, "strategy": strategy,
            "corrupt_verifiers": list(corrupt)}
    return ExperimentReport("secrecy", echo, {"uniform": uniform, "views": per_view}, passed, lines)


def mismatched_bundle_rejected(params, seed=0):
    """Two instances signed with independent evaluation points must not combine."""
    stream = rngmod.Stream(seed, rngmod.DEALER)
    zero = [params.field.zero] * params.ell
    instances, states = [], [[] for _ in range(params.n)]
    for _ in range(2):
        _, mi, mv = gen_dealer(params, zero, stream)
        _, ch = ver_round1_int(IntermediaryState.from_gen(mi), stream)
        instances.append(InstanceView(PolyForm(mi.F), ch.d, ch.B))
        for i, m in enumerate(mv):
            states[i].append(VerifierState.from_gen(m))
    if all(len({s.alpha for s in col}) == 1 for col in states):
        return None  # the draw happened to repeat every point
    try:
        SignatureBundle(params, instances, states)
    except ConfigurationError:
        return True
    return False


def cmd_linearity(ns):
    cfg = config_from_args(ns)
    tr = run_session(cfg)
    rejected = mismatched_bundle_rejected(cfg.params, ns.seed)
    if cfg.int_corrupt:
        passed = not (tr.accepted and not tr.correct)
    else:
        passed = tr.correct
    passed = passed and rejected is not False
    s = tr.summary()
    lines = [
        f"q: {cfg.q}  offsets: {list(cfg.offsets) if cfg.offsets else None}",
        f"verdict: {s['verdict']}",
        f"combined secret: {s['revealed']}",
        f"expected sum: {s['expected']}",
        f"dealer broadcasts: {s['dealer_broadcasts']}",
        f"mismatched evaluation points rejected: {rejected}",
    ]
    metrics = {k: v for k, v in s.items() if k != "config"}
    metrics["mismatched_bundle_rejected"] = rejected
    return ExperimentReport("linearity", cfg.echo(), metrics, passed, lines)


def cmd_complexity(ns):
    params = params_from_args(ns)
    rep = complexity_report(params, ns.reveal_rounds, ns.seed)
    lines = [f"{'':<23}{'analytic':>10}{'measured':>10}"]
    for kind in ("private_bits", "broadcast_bits", "rounds"):
        for ph in ("gen", "ver", "reveal"):
            lines.append(f"{kind:<15}{ph:<8}{rep.analytic[kind][ph]:>10}{rep.measured[kind][ph]:>10}")
    lines.append(f"equal: {rep.equal}")
    for k, v in rep.asymptotic().items():
        lines.append(f"{k}: {v}")
    echo = {"n": params.n, "t": params.t, "ell": params.ell, "kappa": params.kappa,
            "reveal_rounds": ns.reveal_rounds, "seed": ns.seed}
    return ExperimentReport("complexity", echo, rep.as_dict(), rep.equal, lines)


COMMANDS = {
    "run": cmd_run,
    "montecarlo": cmd_montecarlo,
    "secrecy": cmd_secrecy,
    "linearity": cmd_linearity,
    "complexity": cmd_complexity,
}


def main(argv=None):
    start = time.perf_counter()
    try:
        ns = parse(sys.argv[1:] if argv is None else argv)
        report = COMMANDS[ns.command](ns)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    except (ConfigurationError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report.wall_time = time.perf_counter() - start
    print(report.text())
    if ns.out:
        with open(ns.out, "w") as fh:
            json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
