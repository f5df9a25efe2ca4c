"""Arithmetic in the binary extension field GF(2^kappa), 1 <= kappa <= 64.

Elements are bit patterns read as polynomials over GF(2) modulo a fixed
irreducible polynomial. Addition is XOR; multiplication is a carry-less
product followed by reduction.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import ConfigurationError, FieldMismatchError

MAX_KAPPA = 64
_TRIAL_DIVISION_LIMIT = 20

# One low-weight irreducible polynomial per degree: the trinomial with the
# smallest middle exponent, else the lexicographically smallest pentanomial.
IRREDUCIBLE = {
    1: 0x3,
    2: 0x7,
    3: 0xb,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11b,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201b,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002b,
    17: 0x20009,
    18: 0x40009,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x100001b,
    25: 0x2000009,
    26: 0x400001b,
    27: 0x8000027,
    28: 0x10000003,
    29: 0x20000005,
    30: 0x40000003,
    31: 0x80000009,
    32: 0x10000008d,
    33: 0x200000401,
    34: 0x400000081,
    35: 0x800000005,
    36: 0x1000000201,
    37: 0x2000000053,
    38: 0x4000000063,
    39: 0x8000000011,
    40: 0x10000000039,
    41: 0x20000000009,
    42: 0x40000000081,
    43: 0x80000000059,
    44: 0x100000000021,
    45: 0x20000000001b,
    46: 0x400000000003,
    47: 0x800000000021,
    48: 0x100000000002d,
    49: 0x2000000000201,
    50: 0x400000000001d,
    51: 0x800000000004b,
    52: 0x10000000000009,
    53: 0x20000000000047,
    54: 0x40000000000201,
    55: 0x80000000000081,
    56: 0x100000000000095,
    57: 0x200000000000011,
    58: 0x400000000080001,
    59: 0x800000000000095,
    60: 0x1000000000000003,
    61: 0x2000000000000027,
    62: 0x4000000020000001,
    63: 0x8000000000000003,
    64: 0x1000000000000001b,
}


def _pmod(a, m):
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def _irreducible_by_trial_division(f):
    deg = f.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in range(1 << d, 1 << (d + 1)):
            if _pmod(f, g) == 0:
                return False
    return True


def _pmulmod(a, b, m):
    r = 0
    top = m.bit_length()
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a.bit_length() >= top:
            a ^= m
    return r


def _pgcd(a, b):
    while b:
        a, b = b, _pmod(a, b)
    return a


def _prime_factors(k):
    out, p = [], 2
    while k > 1:
        if k % p == 0:
            out.append(p)
            while k % p == 0:
                k //= p
        p += 1
    return out


def is_irreducible(f):
    """Rabin's irreducibility test for a polynomial over GF(2) given as bits."""
    k = f.bit_length() - 1
    if k < 1:
        return False
    if k == 1:
        return True

    def x_pow_2e(e):
        x = 2
        for _ in range(e):
            x = _pmulmod(x, x, f)
        return x

    x = _pmod(2, f)
    if x_pow_2e(k) != x:
        return False
    return all(_pgcd(f, x_pow_2e(k // p) ^ x) == 1 for p in _prime_factors(k))


def as_fraction(epsilon):
    """Exact rational for an error bound given as float, int, str or Fraction.

    Floats convert exactly (they are dyadic). Strings accept ``"2^-40"`` and
    ``"2**-40"`` in addition to anything :class:`Fraction` parses.
    """
    if isinstance(epsilon, Fraction):
        return epsilon
    if isinstance(epsilon, str):
        s = epsilon.replace(" ", "").replace("**", "^")
        if s.startswith("2^"):
            return Fraction(2) ** int(s[2:])
        return Fraction(s)
    return Fraction(epsilon)


@dataclass(frozen=True)
class FieldParams:
    """GF(2^kappa) with its reduction polynomial.

    ``n`` and ``epsilon`` are optional bookkeeping: when both are present the
    field must satisfy ``n * 2**-kappa <= epsilon``. They do not take part in
    equality, so two fields with the same modulus are interchangeable.
    """

    kappa: int
    reduction_poly: int = None
    n: int = dc_field(default=None, compare=False)
    epsilon: Fraction = dc_field(default=None, compare=False)

    def __post_init__(self):
        k = self.kappa
        if not isinstance(k, int) or not 1 <= k <= MAX_KAPPA:
            raise ConfigurationError(f"kappa must be in 1..{MAX_KAPPA}, got {k!r}")
        if self.reduction_poly is None:
            object.__setattr__(self, "reduction_poly", IRREDUCIBLE[k])
        p = self.reduction_poly
        if p.bit_length() - 1 != k:
            raise ConfigurationError(f"reduction polynomial {p:#x} is not of degree {k}")
        if k <= _TRIAL_DIVISION_LIMIT:
            if not _irreducible_by_trial_division(p):
                raise ConfigurationError(f"{p:#x} is reducible over GF(2)")
        elif p != IRREDUCIBLE[k] and not is_irreducible(p):
            raise ConfigurationError(f"{p:#x} is reducible over GF(2)")
        if self.epsilon is not None:
            eps = as_fraction(self.epsilon)
            object.__setattr__(self, "epsilon", eps)
            if self.n is not None and Fraction(self.n, 1 << k) > eps:
                raise ConfigurationError(
                    f"field too small: n*2^-kappa = {self.n}/2^{k} exceeds epsilon {eps}"
                )

    @property
    def order(self):
        return 1 << self.kappa

    @property
    def byte_len(self):
        return (self.kappa + 7) // 8

    @property
    def zero(self):
        return FieldElement(0, self)

    @property
    def one(self):
        return FieldElement(1, self)

    def __call__(self, value):
        return FieldElement(value, self)

    def __repr__(self):
        return f"GF(2^{self.kappa}; {self.reduction_poly:#x})"

    # raw integer arithmetic, used by the hot paths

    def mul_int(self, a, b):
        return _mul(a, b, self.kappa, self.reduction_poly)

    def inv_int(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        # binary extended Euclid in GF(2)[x]
        u, v = a, self.reduction_poly
        g1, g2 = 1, 0
        while u != 1:
            j = u.bit_length() - v.bit_length()
            if j < 0:
                u, v, g1, g2 = v, u, g2, g1
                j = -j
            u ^= v << j
            g1 ^= g2 << j
        return _reduce(g1, self.kappa, self.reduction_poly)

    def to_bytes(self):
        return bytes([self.kappa]) + self.reduction_poly.to_bytes(9, "little")

    @classmethod
    def from_bytes(cls, data):
        if len(data) != 10:
            raise ValueError("field encoding is 10 bytes")
        return cls(data[0], int.from_bytes(data[1:], "little"))

    def element_from_bytes(self, data):
        if len(data) != self.byte_len:
            raise ValueError(f"expected {self.byte_len} bytes, got {len(data)}")
        return FieldElement(int.from_bytes(data, "little"), self)


def _clmul(a, b):
    if a < b:
        a, b = b, a
    r = 0
    while b:
        low = b & -b
        r ^= a << (low.bit_length() - 1)
        b ^= low
    return r


def _reduce(x, kappa, poly):
    while (bl := x.bit_length()) > kappa:
        x ^= poly << (bl - kappa - 1)
    return x


def _mul(a, b, kappa, poly):
    return _reduce(_clmul(a, b), kappa, poly)


class FieldElement:
    """Immutable element of a :class:`FieldParams` field."""

    __slots__ = ("value", "field")

    def __init__(self, value, field):
        value = int(value)
        if not 0 <= value < (1 << field.kappa):
            raise ValueError(f"{value:#x} does not fit in {field.kappa} bits")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return FieldElement(self.value ^ other.value, self.field)

    __sub__ = __add__
    __radd__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.mul_int(self.value, other.value), self.field)

    def __truediv__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, e):
        result, base = 1, self.value
        if e < 0:
            base, e = self.field.inv_int(base), -e
        while e:
            if e & 1:
                result = self.field.mul_int(result, base)
            base = self.field.mul_int(base, base)
            e >>= 1
        return FieldElement(result, self.field)

    def inverse(self):
        return FieldElement(self.field.inv_int(self.value), self.field)

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.value == other.value and self.field == other.field

    def __hash__(self):
        return hash((self.value, self.field.kappa, self.field.reduction_poly))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    __index__ = __int__

    def __repr__(self):
        return f"FieldElement({self.value:#x}, kappa={self.field.kappa})"

    def to_bytes(self):
        return self.value.to_bytes(self.field.byte_len, "little")


def fe_add(a, b):
    return a + b


def fe_mul(a, b):
    return a * b


def fe_inv(a):
    return a.inverse()


def sample_uniform(field, rng):
    return FieldElement(rng.bits(field.kappa), field)


def sample_nonzero(field, rng):
    return FieldElement(rng.nonzero_bits(field.kappa), field)


def params_from_error(n, epsilon):
    """Smallest supported field with ``n * 2**-kappa <= epsilon``."""
    if not isinstance(n, int) or n < 3 or n % 2 == 0:
        raise ConfigurationError(f"n must be an odd integer >= 3, got {n!r}")
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise ConfigurationError(f"epsilon must lie in (0, 1), got {eps}")
    for kappa in range(1, MAX_KAPPA + 1):
        if Fraction(n, 1 << kappa) <= eps:
            return FieldParams(kappa, IRREDUCIBLE[kappa], n=n, epsilon=eps)
    raise ConfigurationError(
        f"no kappa <= {MAX_KAPPA} satisfies n*2^-kappa <= epsilon for n={n}, epsilon={eps}"
    )
