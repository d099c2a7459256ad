"""Exact arithmetic in a prime field GF(q).

Everything in this package sits on top of canonical residues mod a prime q:
matrix entries, encoding-function evaluations, interpolation systems. Elements
are immutable, always fully reduced, and refuse to combine across moduli.

The sampling helpers draw from a caller-owned ``random.Random``. Uniformity is
exact (rejection sampling on the generator's word stream), so distribution
tests downstream can assert bin counts rather than approximate them.
"""

from __future__ import annotations

import random

# Deterministic Miller-Rabin witnesses for every n < 3.3 * 10^24, which
# comfortably covers the supported range q < 2^64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

#: Default modulus for realistic runs: the Mersenne prime 2^31 - 1. Large
#: enough for any desk-scale admissibility bound, small enough that int64
#: matrix kernels stay exact.
DEFAULT_PRIME = 2**31 - 1


class ModulusMismatchError(ValueError):
    """Raised when elements of different prime fields are combined."""


def is_prime(n: int) -> bool:
    """Deterministic primality test for n < 2^64 (Miller-Rabin)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FieldModulus:
    """A prime q defining GF(q). Verified prime at construction."""

    __slots__ = ("q",)

    def __init__(self, q: int):
        if not isinstance(q, int) or q < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {q!r}")
        if q >= 2**64:
            raise ValueError(f"modulus {q} out of supported range (< 2^64)")
        if not is_prime(q):
            raise ValueError(f"modulus {q} is not prime")
        object.__setattr__(self, "q", q)

    def __setattr__(self, name, value):
        raise AttributeError("FieldModulus is immutable")

    def __eq__(self, other):
        return isinstance(other, FieldModulus) and self.q == other.q

    def __hash__(self):
        return hash(("FieldModulus", self.q))

    def __repr__(self):
        return f"GF({self.q})"

    def element(self, value: int) -> "FieldElement":
        """Canonical residue of an integer."""
        return FieldElement(value % self.q, self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1 % self.q, self)


class FieldElement:
    """Immutable residue in GF(q), with operator arithmetic.

    Plain ints coerce into the element's own field; elements of a different
    FieldModulus raise ModulusMismatchError rather than silently coercing.
    """

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: FieldModulus):
        q = modulus.q
        if not 0 <= value < q:
            value %= q
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.modulus.q != self.modulus.q:
                raise ModulusMismatchError(
                    f"cannot combine GF({self.modulus.q}) with GF({other.modulus.q})"
                )
            return other
        if isinstance(other, int):
            return FieldElement(other % self.modulus.q, self.modulus)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement((self.value + o.value) % self.modulus.q, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement((self.value - o.value) % self.modulus.q, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        return FieldElement(-self.value % self.modulus.q, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * o.value % self.modulus.q, self.modulus)

    __rmul__ = __mul__

    def inv(self) -> "FieldElement":
        """Multiplicative inverse via Fermat: a^(q-2) mod q."""
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.modulus.q})")
        return FieldElement(pow(self.value, self.modulus.q - 2, self.modulus.q), self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        return FieldElement(pow(self.value, exponent, self.modulus.q), self.modulus)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.modulus.q == other.modulus.q and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus.q
        return NotImplemented

    def __hash__(self):
        return hash((self.modulus.q, self.value))

    def __repr__(self):
        return f"{self.value}"

    def __int__(self):
        return self.value


def sample_uniform(modulus: FieldModulus, rng: random.Random) -> FieldElement:
    """Exactly uniform residue: rejection sampling on k-bit words.

    Draws q.bit_length()-bit words from the generator and discards values
    >= q, so every residue has probability exactly 1/q.
    """
    q = modulus.q
    k = q.bit_length()
    while True:
        v = rng.getrandbits(k)
        if v < q:
            return FieldElement(v, modulus)


def sample_distinct(
    modulus: FieldModulus,
    count: int,
    exclude,
    rng: random.Random,
) -> list[FieldElement]:
    """Ordered list of `count` pairwise-distinct elements avoiding `exclude`.

    Raises ValueError if count + |exclude| exceeds q. For small fields the
    allowed residues are materialised and partially shuffled; for large
    fields rejection sampling is used (collisions are then negligible).
    """
    q = modulus.q
    excluded = {int(e) for e in exclude}
    if count < 0:
        raise ValueError("count must be non-negative")
    if count + len(excluded) > q:
        raise ValueError(
            f"cannot pick {count} distinct elements of GF({q}) "
            f"while excluding {len(excluded)}"
        )
    if q <= 1 << 20:
        allowed = [v for v in range(q) if v not in excluded]
        picked = rng.sample(allowed, count)
        return [FieldElement(v, modulus) for v in picked]
    out: list[FieldElement] = []
    seen = set(excluded)
    while len(out) < count:
        e = sample_uniform(modulus, rng)
        if e.value not in seen:
            seen.add(e.value)
            out.append(e)
    return out


def spawn_rng(seed: int, label: str) -> random.Random:
    """Independent child generator for one purpose within an experiment.

    Seeding by "<seed>:<label>" keeps parallel phases (libraries, plan,
    noise, stragglers) from sharing a stream while staying reproducible.
    String seeding in CPython hashes with sha512, stable across processes.
    """
    return random.Random(f"{seed}:{label}")
