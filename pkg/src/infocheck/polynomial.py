"""Fixed-length polynomials over GF(2^kappa).

A :class:`Poly` always stores exactly its declared number of coefficients
(``coeffs[k]`` multiplies ``x**k``); the leading coefficient may be zero.
"""

from .errors import ConfigurationError, FieldMismatchError, InterpolationError
from .gf2k import FieldElement


class Poly:
    __slots__ = ("field", "coeffs", "_ints")

    def __init__(self, field, coeffs):
        elems = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.field != field:
                    raise FieldMismatchError(f"coefficient from {c.field!r}, expected {field!r}")
                elems.append(c)
            else:
                elems.append(FieldElement(c, field))
        if not elems:
            raise ConfigurationError("a polynomial needs at least one coefficient")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(elems))
        object.__setattr__(self, "_ints", tuple(c.value for c in elems))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def zero(cls, field, length):
        return cls(field, [0] * length)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self._ints == other._ints

    def __hash__(self):
        return hash((self._ints, self.field.kappa))

    def __repr__(self):
        body = ", ".join(f"{v:#x}" for v in self._ints)
        return f"Poly([{body}], kappa={self.field.kappa})"

    @property
    def values(self):
        """Coefficients as plain integers."""
        return self._ints

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other):
        return poly_linear(self.field.one, self, other)

    def to_bytes(self):
        out = bytearray(len(self).to_bytes(2, "little"))
        for c in self.coeffs:
            out += c.to_bytes()
        return bytes(out)

    @classmethod
    def from_bytes(cls, field, data):
        if len(data) < 2:
            raise ValueError("truncated polynomial encoding")
        length = int.from_bytes(data[:2], "little")
        w = field.byte_len
        if len(data) != 2 + length * w:
            raise ValueError("polynomial encoding length mismatch")
        return cls(field, [int.from_bytes(data[2 + i * w : 2 + (i + 1) * w], "little")
                           for i in range(length)])


def _eval_ints(field, coeffs, x):
    acc = 0
    mul = field.mul_int
    for c in reversed(coeffs):
        acc = mul(acc, x) ^ c
    return acc


def poly_eval(p, x):
    if x.field != p.field:
        raise FieldMismatchError(f"point from {x.field!r}, polynomial over {p.field!r}")
    return FieldElement(_eval_ints(p.field, p.values, x.value), p.field)


def poly_linear(d, p, q):
    """Coefficient-wise ``d*p + q``."""
    if len(p) != len(q):
        raise ConfigurationError(f"length mismatch: {len(p)} vs {len(q)}")
    if not (d.field == p.field == q.field):
        raise FieldMismatchError("operands belong to different fields")
    mul = p.field.mul_int
    dv = d.value
    return Poly(p.field, [mul(dv, a) ^ b for a, b in zip(p.values, q.values)])


def random_with_prefix(secrets, t, rng):
    """Length ``len(secrets) + t + 1`` polynomial with the secrets as its low coefficients."""
    secrets = list(secrets)
    if not secrets:
        raise ConfigurationError("secret prefix must be non-empty")
    if t < 1:
        raise ConfigurationError("t must be >= 1")
    field = secrets[0].field
    high = [rng.bits(field.kappa) for _ in range(t + 1)]
    return Poly(field, secrets + high)


def extract_secrets(p, ell):
    if not 1 <= ell <= len(p):
        raise ConfigurationError(f"ell={ell} out of range for length {len(p)}")
    return p.coeffs[:ell]


def interpolate(points, target_len, fixed_prefix=None):
    """Polynomial of length ``target_len`` through ``points``.

    The lowest coefficients are pinned to ``fixed_prefix``; the next
    ``len(points)`` coefficients are solved for and the remaining ones are
    zero. Raises :class:`InterpolationError` on duplicate abscissae or a
    singular system.
    """
    points = [(x, y) for x, y in points]
    prefix = list(fixed_prefix or ())
    if not points and not prefix:
        raise InterpolationError("nothing to interpolate")
    field = (points[0][0] if points else prefix[0]).field
    xs = [x.value for x, _ in points]
    if len(set(xs)) != len(xs):
        raise InterpolationError("duplicate x values")
    m0, k = len(prefix), len(points)
    if m0 + k > target_len:
        raise InterpolationError(
            f"{k} points and a {m0}-coefficient prefix exceed length {target_len}"
        )
    mul = field.mul_int
    pre = [c.value for c in prefix]

    def power(x, e):
        r = 1
        for _ in range(e):
            r = mul(r, x)
        return r

    # rows: [x^m0, ..., x^(m0+k-1) | y - prefix(x)]
    rows = []
    for (x, y) in points:
        base = power(x.value, m0)
        row = []
        cur = base
        for _ in range(k):
            row.append(cur)
            cur = mul(cur, x.value)
        row.append(y.value ^ _eval_ints(field, pre, x.value) if pre else y.value)
        rows.append(row)

    for col in range(k):
        pivot = next((r for r in range(col, k) if rows[r][col]), None)
        if pivot is None:
            raise InterpolationError("singular interpolation system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = field.inv_int(rows[col][col])
        rows[col] = [mul(inv, v) for v in rows[col]]
        for r in range(k):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a ^ mul(f, b) for a, b in zip(rows[r], rows[col])]

    solved = [rows[i][k] for i in range(k)]
    return Poly(field, pre + solved + [0] * (target_len - m0 - k))
