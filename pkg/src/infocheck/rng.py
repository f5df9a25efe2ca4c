"""Counter-style splitmix64 streams.

A session seed fans out into independent per-role streams. The scalar
:class:`Stream` (used by the session simulator) and the vectorized
:class:`LaneStreams` (used by the batch Monte-Carlo engine) produce
identical sequences, so trial ``i`` of a batch run replays exactly the
session seeded with ``seed0 + i``.
"""

import numpy as np

M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_ROLE_SALT = 0xD1B54A32D192ED03

# per-role substreams
SECRET, DEALER, INT, ADVERSARY = 0, 1, 2, 3


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def _initial_state(seed, role):
    return mix64((seed ^ (role * _ROLE_SALT)) & M64)


class Stream:
    """Deterministic scalar generator for one role of one session."""

    __slots__ = ("_state",)

    def __init__(self, seed, role=SECRET):
        if not 0 <= seed <= M64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self._state = _initial_state(seed, role)

    def next64(self):
        self._state = (self._state + GOLDEN) & M64
        return mix64(self._state)

    def bits(self, k):
        """Uniform integer in ``[0, 2**k)`` for ``1 <= k <= 64``."""
        return self.next64() >> (64 - k)

    def nonzero_bits(self, k):
        while True:
            v = self.next64() >> (64 - k)
            if v:
                return v

    def below(self, bound):
        return self.next64() % bound


def session_streams(seed):
    return {role: Stream(seed, role) for role in (SECRET, DEALER, INT, ADVERSARY)}


# --------------------------------------------------------------------------

_M = np.uint64(M64)
_G = np.uint64(GOLDEN)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)


def _mix64_arr(z):
    z = (z ^ (z >> np.uint64(30))) * _C1
    z = (z ^ (z >> np.uint64(27))) * _C2
    return z ^ (z >> np.uint64(31))


class LaneStreams:
    """One independent :class:`Stream` per lane, advanced in lockstep.

    Methods take an optional boolean ``active`` mask; inactive lanes do not
    consume a draw, which keeps rejection sampling in step with the scalar
    generator.
    """

    def __init__(self, seeds, role=SECRET):
        seeds = np.asarray(seeds, dtype=np.uint64)
        salt = np.uint64((role * _ROLE_SALT) & M64)
        self.state = _mix64_arr(seeds ^ salt)

    def __len__(self):
        return self.state.shape[0]

    def next64(self, active=None):
        if active is None:
            self.state = self.state + _G
            return _mix64_arr(self.state)
        self.state = np.where(active, self.state + _G, self.state)
        return _mix64_arr(self.state)

    def bits(self, k, active=None):
        return self.next64(active) >> np.uint64(64 - k)

    def nonzero_bits(self, k, active=None):
        need = np.ones(len(self), dtype=bool) if active is None else active.copy()
        out = np.zeros(len(self), dtype=np.uint64)
        while need.any():
            v = self.bits(k, need)
            out = np.where(need, v, out)
            need = need & (out == 0)
        return out

    def below(self, bound, active=None):
        return self.next64(active) % np.uint64(bound)


__all__ = ["Stream", "LaneStreams", "session_streams", "mix64",
           "SECRET", "DEALER", "INT", "ADVERSARY"]
