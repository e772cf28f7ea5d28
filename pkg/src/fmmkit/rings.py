"""Coefficient rings with exact halving.

Every algorithm in this package needs ring arithmetic plus one extra
capability: multiplication by the inverse of 2.  This module provides the
rings that satisfy that contract:

  * ``RationalRing``  -- arbitrary-precision fractions (``fractions.Fraction``)
  * ``DyadicRing``    -- rationals whose denominator is a power of two,
                         stored as (numerator, exponent); closed under
                         add/sub/mul/half, which covers every coefficient
                         appearing in the embedded decompositions
  * ``GaussianRing``  -- Q(i), pairs of fractions
  * ``ZmodRing(p)``   -- integers modulo an odd prime
  * ``FloatRing``     -- float64, for timing/accuracy experiments only

A ring object supplies ``zero``, ``one``, ``add``, ``sub``, ``neg``, ``mul``,
``half`` and ``scale`` (multiplication by an exact rational constant), plus
text parsing/formatting of scalars.  Elements themselves are immutable and
carry natural Python operators, so matrix code can use either style.

``CountingRing`` wraps any ring and counts element operations; it is how
measured operation counts are compared against the closed-form predictions.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "DyadicRational",
    "GaussianRational",
    "Mod",
    "Ring",
    "RationalRing",
    "DyadicRing",
    "GaussianRing",
    "ZmodRing",
    "FloatRing",
    "CountingRing",
    "OpCounter",
    "QQ",
    "DD",
    "QI",
    "F64",
    "canonicalize",
    "is_dyadic",
    "parse_scalar",
    "format_scalar",
    "ring_from_spec",
]


# ---------------------------------------------------------------------------
# Scalar text syntax: optional sign, decimal integer, optional "/" positive
# decimal integer.  Shared by the SMS matrix format and SLP constants.
# ---------------------------------------------------------------------------

def parse_scalar(text):
    """Parse ``"p"`` or ``"p/q"`` into a Fraction (q > 0 required)."""
    s = text.strip()
    if "/" in s:
        num_s, _, den_s = s.partition("/")
        num_s, den_s = num_s.strip(), den_s.strip()
        if not den_s.isdigit():
            raise ValueError(f"bad scalar {text!r}: denominator must be a positive integer")
        den = int(den_s)
    else:
        num_s, den = s, 1
    neg = num_s.startswith("-")
    if num_s.startswith(("+", "-")):
        num_s = num_s[1:]
    if not num_s.isdigit():
        raise ValueError(f"bad scalar {text!r}")
    num = -int(num_s) if neg else int(num_s)
    return canonicalize(num, den)


def format_scalar(value):
    """Render a Fraction (or int) as ``p`` or ``p/q``."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def canonicalize(num, den):
    """Reduced fraction with positive denominator; zero is 0/1."""
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Fraction(num, den)


def is_dyadic(value):
    """True iff the reduced denominator is a power of two."""
    den = Fraction(value).denominator
    return den & (den - 1) == 0


# ---------------------------------------------------------------------------
# Dyadic rationals: num / 2^exp2
# ---------------------------------------------------------------------------

class DyadicRational:
    """num / 2^exp2 with exp2 >= 0 and num odd whenever exp2 > 0.

    Closed under add, sub, mul and halving, which is all the embedded
    algorithms require of their coefficient domain.  There is no general
    division.
    """

    __slots__ = ("num", "exp2")

    def __init__(self, num, exp2=0):
        if exp2 < 0:
            num <<= -exp2
            exp2 = 0
        while exp2 > 0 and num != 0 and num % 2 == 0:
            num //= 2
            exp2 -= 1
        if num == 0:
            exp2 = 0
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp2", exp2)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicRational is immutable")

    @classmethod
    def from_fraction(cls, value):
        f = Fraction(value)
        if not is_dyadic(f):
            raise ValueError(f"{f} is not dyadic (denominator {f.denominator})")
        return cls(f.numerator, f.denominator.bit_length() - 1)

    def to_fraction(self):
        return Fraction(self.num, 1 << self.exp2)

    def _coerced(self, other):
        if isinstance(other, DyadicRational):
            return other
        if isinstance(other, int):
            return DyadicRational(other)
        if isinstance(other, Fraction):
            return DyadicRational.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        e = max(self.exp2, other.exp2)
        return DyadicRational(
            (self.num << (e - self.exp2)) + (other.num << (e - other.exp2)), e
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return DyadicRational(self.num * other.num, self.exp2 + other.exp2)

    __rmul__ = __mul__

    def __neg__(self):
        return DyadicRational(-self.num, self.exp2)

    def half(self):
        return DyadicRational(self.num, self.exp2 + 1)

    def __eq__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.exp2 == other.exp2

    def __hash__(self):
        return hash(self.to_fraction())

    def __bool__(self):
        return self.num != 0

    def __repr__(self):
        return f"DyadicRational({self.num}, {self.exp2})"

    def __str__(self):
        return format_scalar(self.to_fraction())


# ---------------------------------------------------------------------------
# Gaussian rationals: Q(i)
# ---------------------------------------------------------------------------

class GaussianRational:
    """Element of Q(i), stored as a pair of fractions (re, im)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def _coerced(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    @property
    def is_rational(self):
        return self.im == 0

    def to_fraction(self):
        if self.im != 0:
            raise ValueError(f"{self} has a nonzero imaginary part")
        return self.re

    def sort_key(self):
        return (self.re, self.im)

    def __eq__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return format_scalar(self.re)
        im_s = f"{format_scalar(self.im)}i"
        if self.re == 0:
            return im_s
        sign = "+" if self.im > 0 else "-"
        return f"{format_scalar(self.re)}{sign}{format_scalar(abs(self.im))}i"


I = GaussianRational(0, 1)


def parse_complex_scalar(text):
    """Parse ``a``, ``bi`` or ``a+bi`` / ``a-bi`` with rational a, b."""
    s = text.strip().replace(" ", "")
    if not s.endswith("i"):
        return GaussianRational(parse_scalar(s))
    body = s[:-1]
    # split real and imaginary at the last sign that is not a leading sign
    # and not part of a fraction
    split = -1
    for idx in range(len(body) - 1, 0, -1):
        if body[idx] in "+-" and body[idx - 1] not in "+-/":
            split = idx
            break
    if split == -1:
        re_s, im_s = "0", body
    else:
        re_s, im_s = body[:split], body[split:]
    if im_s in ("", "+"):
        im = Fraction(1)
    elif im_s == "-":
        im = Fraction(-1)
    else:
        im = parse_scalar(im_s)
    return GaussianRational(parse_scalar(re_s) if re_s else 0, im)


# ---------------------------------------------------------------------------
# Modular residues
# ---------------------------------------------------------------------------

class Mod:
    """Residue modulo an odd modulus; arithmetic wraps around."""

    __slots__ = ("value", "modulus")

    def __init__(self, value, modulus):
        object.__setattr__(self, "value", value % modulus)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("Mod is immutable")

    def _check(self, other):
        if isinstance(other, Mod):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other
        if isinstance(other, int):
            return Mod(other, self.modulus)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return Mod(self.value + other.value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return Mod(self.value - other.value, self.modulus)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return Mod(self.value * other.value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.value, self.modulus)

    def inverse(self):
        return Mod(pow(self.value, -1, self.modulus), self.modulus)

    def __eq__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self.value == other.value

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Mod({self.value}, {self.modulus})"

    def __str__(self):
        return str(self.value)


# ---------------------------------------------------------------------------
# Ring objects
# ---------------------------------------------------------------------------

class Ring:
    """Base ring contract; arithmetic defaults to the elements' operators."""

    exact = True
    name = "ring"

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def half(self, a):
        """y with y + y = a.  Every ring here has an invertible 2."""
        raise NotImplementedError

    def scale(self, a, c):
        """Multiply by an exact rational constant c."""
        raise NotImplementedError

    def from_int(self, n):
        raise NotImplementedError

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    def coerce(self, x):
        raise NotImplementedError

    def is_zero(self, a):
        return a == self.zero

    def parse(self, text):
        return self.coerce(parse_scalar(text))

    def format(self, a):
        return str(a)

    def random(self, rng):
        raise NotImplementedError

    def __repr__(self):
        return self.name


class RationalRing(Ring):
    name = "rational"

    def half(self, a):
        return a / 2

    def scale(self, a, c):
        return a * Fraction(c)

    def from_int(self, n):
        return Fraction(n)

    def coerce(self, x):
        if isinstance(x, DyadicRational):
            return x.to_fraction()
        if isinstance(x, GaussianRational):
            return x.to_fraction()
        return Fraction(x)

    def random(self, rng):
        return Fraction(rng.randint(-99, 99), rng.randint(1, 19))


class DyadicRing(Ring):
    name = "dyadic"

    def half(self, a):
        return a.half()

    def scale(self, a, c):
        return a * DyadicRational.from_fraction(Fraction(c))

    def from_int(self, n):
        return DyadicRational(n)

    def coerce(self, x):
        if isinstance(x, DyadicRational):
            return x
        return DyadicRational.from_fraction(Fraction(x))

    def random(self, rng):
        return DyadicRational(rng.randint(-99, 99), rng.randint(0, 4))


class GaussianRing(Ring):
    name = "gaussian"

    def half(self, a):
        return GaussianRational(a.re / 2, a.im / 2)

    def scale(self, a, c):
        return a * GaussianRational(Fraction(c))

    def from_int(self, n):
        return GaussianRational(n)

    def coerce(self, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, DyadicRational):
            return GaussianRational(x.to_fraction())
        return GaussianRational(Fraction(x))

    def parse(self, text):
        return parse_complex_scalar(text)

    def random(self, rng):
        return GaussianRational(
            Fraction(rng.randint(-99, 99), rng.randint(1, 19)),
            Fraction(rng.randint(-99, 99), rng.randint(1, 19)),
        )


def _is_probable_prime(n):
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
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


class ZmodRing(Ring):
    """Integers modulo an odd prime p (odd so that 2 is invertible)."""

    def __init__(self, modulus):
        if modulus % 2 == 0:
            raise ValueError(
                f"modulus {modulus} is even: the algorithms need a ring "
                "containing an inverse of 2"
            )
        if not _is_probable_prime(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        self.modulus = modulus
        self.name = f"mod:{modulus}"
        self._inv2 = Mod((modulus + 1) // 2, modulus)

    def half(self, a):
        return a * self._inv2

    def scale(self, a, c):
        c = Fraction(c)
        num = Mod(c.numerator, self.modulus)
        if c.denominator == 1:
            return a * num
        return a * num * Mod(c.denominator, self.modulus).inverse()

    def from_int(self, n):
        return Mod(n, self.modulus)

    def coerce(self, x):
        if isinstance(x, Mod):
            if x.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return x
        if isinstance(x, DyadicRational):
            x = x.to_fraction()
        if isinstance(x, Fraction):
            return self.scale(self.one, x)
        return Mod(x, self.modulus)

    def random(self, rng):
        return Mod(rng.randrange(self.modulus), self.modulus)

    def __eq__(self, other):
        return isinstance(other, ZmodRing) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("ZmodRing", self.modulus))


class FloatRing(Ring):
    """float64; only for benchmarks and accuracy experiments."""

    exact = False
    name = "f64"

    def half(self, a):
        return a * 0.5

    def scale(self, a, c):
        return a * float(Fraction(c))

    def from_int(self, n):
        return float(n)

    def coerce(self, x):
        if isinstance(x, DyadicRational):
            return float(x.to_fraction())
        if isinstance(x, GaussianRational):
            return float(x.to_fraction())
        return float(x)

    def random(self, rng):
        return rng.uniform(-1.0, 1.0)


QQ = RationalRing()
DD = DyadicRing()
QI = GaussianRing()
F64 = FloatRing()


# ---------------------------------------------------------------------------
# Instrumented ring
# ---------------------------------------------------------------------------

class OpCounter:
    """Mutable tally of element operations."""

    __slots__ = ("additions", "scalar_mults", "products")

    def __init__(self):
        self.reset()

    def reset(self):
        self.additions = 0
        self.scalar_mults = 0
        self.products = 0

    @property
    def total(self):
        return self.additions + self.scalar_mults + self.products

    def snapshot(self):
        return (self.additions, self.scalar_mults, self.products)

    def __repr__(self):
        return (
            f"OpCounter(additions={self.additions}, "
            f"scalar_mults={self.scalar_mults}, products={self.products})"
        )


class CountingRing(Ring):
    """Wraps a ring and counts additions, scalar multiplications, products.

    Negation is free and scaling by 0 or +-1 is not counted, matching the
    operation-count conventions used throughout.
    """

    def __init__(self, base):
        self.base = base
        self.exact = base.exact
        self.name = f"counting({base.name})"
        self.counter = OpCounter()

    def add(self, a, b):
        self.counter.additions += 1
        return self.base.add(a, b)

    def sub(self, a, b):
        self.counter.additions += 1
        return self.base.sub(a, b)

    def mul(self, a, b):
        self.counter.products += 1
        return self.base.mul(a, b)

    def neg(self, a):
        return self.base.neg(a)

    def half(self, a):
        self.counter.scalar_mults += 1
        return self.base.half(a)

    def scale(self, a, c):
        c = Fraction(c)
        if c == 1 or c == -1 or c == 0:
            return self.base.scale(a, c)
        self.counter.scalar_mults += 1
        return self.base.scale(a, c)

    def from_int(self, n):
        return self.base.from_int(n)

    def coerce(self, x):
        return self.base.coerce(x)

    def parse(self, text):
        return self.base.parse(text)

    def format(self, a):
        return self.base.format(a)

    def random(self, rng):
        return self.base.random(rng)


def ring_from_spec(spec):
    """Ring from a CLI-style name: rational | dyadic | gaussian | mod:<p> | f64."""
    if spec == "rational":
        return QQ
    if spec == "dyadic":
        return DD
    if spec == "gaussian":
        return QI
    if spec == "f64":
        return F64
    if spec.startswith("mod:"):
        return ZmodRing(int(spec.split(":", 1)[1]))
    raise ValueError(f"unknown ring {spec!r}")
