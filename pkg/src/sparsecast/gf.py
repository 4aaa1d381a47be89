"""Finite-field arithmetic for GF(p), p prime <= 257, and GF(2^m), m <= 8.

Elements are canonical integers in [0, q).  For extension fields the integer
is the bitmask of polynomial coefficients.  Scalar helpers operate on plain
ints; the v* helpers operate elementwise on numpy int64 arrays and are the
workhorses for the matrix layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PRIME_LIMIT = 257
_MAX_EXT_DEGREE = 8

# Conventional irreducible polynomials (bit i = coefficient of x^i).
DEFAULT_POLY = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11D,
}


class ZeroInverse(ZeroDivisionError):
    """Multiplicative inverse of zero requested."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _clmul(a: int, b: int) -> int:
    """Carryless (GF(2)[x]) product of two polynomial bitmasks."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _clmod(a: int, poly: int) -> int:
    """Remainder of polynomial bitmask a modulo poly over GF(2)."""
    dp = poly.bit_length() - 1
    while a.bit_length() - 1 >= dp and a:
        a ^= poly << (a.bit_length() - 1 - dp)
    return a


def _is_irreducible(poly: int, m: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..m//2."""
    if poly.bit_length() - 1 != m:
        return False
    for d in range(1, m // 2 + 1):
        for low in range(1 << d):
            divisor = (1 << d) | low
            if _clmod(poly, divisor) == 0:
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Arithmetic context for GF(q), q = p^m a prime power."""

    q: int
    p: int
    m: int
    reduction_poly: int = 0  # used only when p == 2 and m > 1

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.p ** self.m != self.q:
            raise ValueError(f"q={self.q} is not {self.p}^{self.m}")
        if self.m == 1:
            if self.q > _PRIME_LIMIT:
                raise ValueError(f"prime fields supported up to q={_PRIME_LIMIT}")
        else:
            if self.p != 2:
                raise ValueError("extension fields are supported only for p=2")
            if not 2 <= self.m <= _MAX_EXT_DEGREE:
                raise ValueError(f"GF(2^m) supported for m <= {_MAX_EXT_DEGREE}")
            if not _is_irreducible(self.reduction_poly, self.m):
                raise ValueError(
                    f"0x{self.reduction_poly:x} is not irreducible of degree {self.m}"
                )

    @property
    def is_binary_ext(self) -> bool:
        return self.p == 2 and self.m > 1

    def __repr__(self):
        if self.is_binary_ext:
            return f"GF(2^{self.m}, poly=0x{self.reduction_poly:x})"
        return f"GF({self.q})"


def field_spec(q: int, poly: int | None = None) -> FieldSpec:
    """Build a FieldSpec from the order alone, defaulting the polynomial."""
    if q < 2:
        raise ValueError(f"field order {q} < 2")
    if _is_prime(q):
        return FieldSpec(q=q, p=q, m=1)
    # prime-power check restricted to p=2
    m = q.bit_length() - 1
    if 1 << m != q:
        raise ValueError(f"unsupported field order {q} (prime or power of 2 only)")
    if poly is None:
        poly = DEFAULT_POLY[m] if m in DEFAULT_POLY else 0
    return FieldSpec(q=q, p=2, m=m, reduction_poly=poly)


# ---------------------------------------------------------------------------
# log/exp tables for GF(2^m), cached per (m, poly)

class _Tables:
    def __init__(self, f: FieldSpec):
        q = f.q
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        gen = None
        for cand in range(2, q):
            x = 1
            seen = set()
            for _ in range(q - 1):
                seen.add(x)
                x = _clmod(_clmul(x, cand), f.reduction_poly)
            if len(seen) == q - 1:
                gen = cand
                break
        if gen is None:  # cannot happen for an irreducible polynomial
            raise ValueError("no generator found")
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = _clmod(_clmul(x, gen), f.reduction_poly)
        exp[q - 1:] = exp[: q - 1]
        self.exp = exp
        self.log = log
        self.generator = gen


_table_cache: dict[tuple[int, int], _Tables] = {}


def _tables(f: FieldSpec) -> _Tables:
    key = (f.m, f.reduction_poly)
    tab = _table_cache.get(key)
    if tab is None:
        tab = _Tables(f)
        _table_cache[key] = tab
    return tab


# ---------------------------------------------------------------------------
# scalar operations

def fadd(a: int, b: int, f: FieldSpec) -> int:
    if f.p == 2:
        return a ^ b
    return (a + b) % f.p


def fneg(a: int, f: FieldSpec) -> int:
    if f.p == 2:
        return a
    return (-a) % f.p


def fsub(a: int, b: int, f: FieldSpec) -> int:
    if f.p == 2:
        return a ^ b
    return (a - b) % f.p


def fmul(a: int, b: int, f: FieldSpec) -> int:
    if f.m == 1:
        return (a * b) % f.p
    if a == 0 or b == 0:
        return 0
    t = _tables(f)
    return int(t.exp[t.log[a] + t.log[b]])


def fmul_ref(a: int, b: int, f: FieldSpec) -> int:
    """Carryless-multiply oracle for GF(2^m); the table path is checked
    against this."""
    if not f.is_binary_ext:
        return fmul(a, b, f)
    return _clmod(_clmul(a, b), f.reduction_poly)


def finv(a: int, f: FieldSpec) -> int:
    if a == 0:
        raise ZeroInverse(f"0 has no inverse in {f}")
    if f.m == 1:
        return pow(a, f.p - 2, f.p)
    t = _tables(f)
    return int(t.exp[(f.q - 1 - t.log[a]) % (f.q - 1)])


def fdiv(a: int, b: int, f: FieldSpec) -> int:
    return fmul(a, finv(b, f), f)


def elements(f: FieldSpec) -> range:
    return range(f.q)


# ---------------------------------------------------------------------------
# vectorized operations on int64 numpy arrays

def vadd(a, b, f: FieldSpec):
    if f.p == 2:
        return np.bitwise_xor(a, b)
    return (a + b) % f.p


def vsub(a, b, f: FieldSpec):
    if f.p == 2:
        return np.bitwise_xor(a, b)
    return (a - b) % f.p


def vneg(a, f: FieldSpec):
    if f.p == 2:
        return np.asarray(a).copy()
    return (-np.asarray(a)) % f.p


def vmul(a, b, f: FieldSpec):
    if f.m == 1:
        if f.p == 2:
            return np.bitwise_and(a, b)
        return (a * b) % f.p
    t = _tables(f)
    a = np.asarray(a)
    b = np.asarray(b)
    out = t.exp[t.log[a] + t.log[b]]
    zero = (a == 0) | (b == 0)
    if zero.ndim == 0:
        return np.int64(0) if zero else out
    out = np.where(zero, 0, out)
    return out


def vinv(a, f: FieldSpec):
    a = np.asarray(a)
    if np.any(a == 0):
        raise ZeroInverse(f"0 has no inverse in {f}")
    if f.m == 1:
        return np.array([pow(int(x), f.p - 2, f.p) for x in a.ravel()],
                        dtype=np.int64).reshape(a.shape)
    t = _tables(f)
    return t.exp[(f.q - 1 - t.log[a]) % (f.q - 1)]


def vsum(a, f: FieldSpec, axis=0):
    """Field sum along an axis.  Safe for int64: entries < 257 and the
    supported problem sizes keep partial sums far from overflow."""
    if f.p == 2:
        return np.bitwise_xor.reduce(a, axis=axis)
    return np.sum(a, axis=axis) % f.p


def vdot(x, y, f: FieldSpec):
    """Inner product of two 1-D vectors over the field."""
    return int(vsum(vmul(x, y, f), f))
