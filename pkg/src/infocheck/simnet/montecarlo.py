"""Repeated sessions with seeds ``seed0 .. seed0 + trials - 1``."""

from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import binomtest

from ..errors import ConfigurationError
from . import batch
from .session import run_session

EVENTS = ("accepted", "rejected", "correct", "incorrect", "forged")


@dataclass(frozen=True)
class RateEstimate:
    event: str
    hits: int
    trials: int
    low: float
    high: float
    confidence: float
    engine: str

    @property
    def rate(self):
        return self.hits / self.trials

    def as_dict(self):
        return {
            "event": self.event,
            "hits": self.hits,
            "trials": self.trials,
            "rate": self.rate,
            "ci_low": self.low,
            "ci_high": self.high,
            "confidence": self.confidence,
            "engine": self.engine,
        }


def wilson(hits, trials, confidence=0.99):
    ci = binomtest(hits, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _event_mask(event, accepted, correct):
    if event == "accepted":
        return accepted
    if event == "rejected":
        return ~accepted
    if event == "correct":
        return correct
    if event == "forged":
        return accepted & ~correct
    return ~correct


def run_trials(config, trials, seed0=0, engine="auto", backend=None):
    """Per-trial ``accepted``/``correct`` arrays plus the engine that produced them."""
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    if engine == "auto":
        engine = "batch" if batch.supports(config) else "session"
    seeds = np.arange(seed0, seed0 + trials, dtype=np.uint64)
    if engine == "batch":
        res = batch.run_batch(config, seeds, backend=backend)
        return res.accepted, res.correct, engine
    if engine != "session":
        raise ConfigurationError(f"unknown engine {engine!r}")
    accepted = np.zeros(trials, dtype=bool)
    correct = np.zeros(trials, dtype=bool)
    for k in range(trials):
        tr = run_session(replace(config, seed=seed0 + k))
        accepted[k] = tr.accepted
        correct[k] = tr.correct
    return accepted, correct, engine


def montecarlo(config, trials, seed0=0, event="accepted", confidence=0.99,
               engine="auto", backend=None):
    """Frequency of ``event`` with a Wilson confidence interval."""
    if event not in EVENTS:
        raise ConfigurationError(f"event must be one of {EVENTS}")
    accepted, correct, used = run_trials(config, trials, seed0, engine, backend)
    hits = int(_event_mask(event, accepted, correct).sum())
    low, high = wilson(hits, trials, confidence)
    return RateEstimate(event, hits, trials, low, high, confidence, used)
