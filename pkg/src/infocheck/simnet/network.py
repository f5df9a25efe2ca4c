"""Synchronous round scheduler with private channels and an ideal broadcast."""

from dataclasses import dataclass
from typing import Optional

from ..icp import encode, info_bits

BROADCAST = "*"


@dataclass(frozen=True)
class Record:
    round: int
    phase: str
    sender: str
    channel: str  # "private" | "broadcast"
    recipient: str  # party id, or BROADCAST
    instance: int
    payload: bytes
    bits: int

    def visible_to(self, party):
        return self.recipient == BROADCAST or self.recipient == party or self.sender == party


class Network:
    """Message log for one session.

    Honest parties post first in every round; the adversary then gets an
    :class:`AdversaryView` whose horizon includes the current round only
    when the adversary is rushing.
    """

    def __init__(self, kappa, corrupt, rushing):
        self.kappa = kappa
        self.corrupt = frozenset(corrupt)
        self.rushing = rushing
        self.records = []
        self.round = 0
        self.phase = None
        self.phase_rounds = {}

    def start_round(self, phase):
        self.round += 1
        self.phase = phase
        self.phase_rounds[phase] = self.phase_rounds.get(phase, 0) + 1

    def _post(self, sender, channel, recipient, msg, instance):
        rec = Record(self.round, self.phase, sender, channel, recipient, instance,
                     encode(msg), info_bits(msg, self.kappa))
        self.records.append(rec)
        return rec

    def send(self, sender, recipient, msg, instance=0):
        return self._post(sender, "private", recipient, msg, instance)

    def broadcast(self, sender, msg, instance=0):
        return self._post(sender, "broadcast", BROADCAST, msg, instance)

    def delivered(self, party, round_, sender=None, instance=None, channel=None):
        """Payloads addressed to ``party`` (or broadcast) in ``round_``."""
        out = []
        for rec in self.records:
            if rec.round != round_ or not (rec.recipient == BROADCAST or rec.recipient == party):
                continue
            if sender is not None and rec.sender != sender:
                continue
            if instance is not None and rec.instance != instance:
                continue
            if channel is not None and rec.channel != channel:
                continue
            out.append(rec)
        return out

    def first_payload(self, party, round_, sender, instance=0, channel=None) -> Optional[bytes]:
        recs = self.delivered(party, round_, sender, instance, channel)
        return recs[0].payload if recs else None

    def adversary_view(self):
        horizon = self.round if self.rushing else self.round - 1
        return AdversaryView(self, horizon)


class AdversaryView:
    """Everything the corrupted parties have received up to ``horizon``."""

    def __init__(self, network, horizon):
        self._net = network
        self.horizon = horizon

    def messages(self):
        corrupt = self._net.corrupt
        return [
            rec
            for rec in self._net.records
            if rec.round <= self.horizon and any(rec.visible_to(p) for p in corrupt)
        ]

    def broadcasts(self, round_, sender=None):
        return [
            rec for rec in self.messages()
            if rec.round == round_ and rec.channel == "broadcast"
            and (sender is None or rec.sender == sender)
        ]
