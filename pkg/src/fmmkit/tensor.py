"""Bilinear matrix-multiplication algorithms in LRP form.

An <m,k,n;r> algorithm is a decomposition of the matrix-multiplication
tensor into r rank-one terms A_t (x) B_t (x) C_t.  Its LRP representation is
the matrix triple

    L : r x (m*k),  row t = row-major vec of the left factor A_t
    R : r x (k*n),  row t = row-major vec of the right factor B_t
    P : (m*n) x r,  column t = row-major vec of C_t transposed

so that for any conforming matrices, vec(A.B) = P @ elementwise(L@vec(A),
R@vec(B)).  The third tensor factor C_t is n x m; its transpose is the
contribution of product t to the output, which is why P holds vec(C_t^T).

The index convention enforced by ``verify_mm_tensor`` is frozen by the
requirement that the embedded Strassen data verifies:

    sum_t L_t[i1,i2] * R_t[j1,j2] * P[(k1,k2), t]
        = 1  iff  i2 == j1 and j2 == k2 and i1 == k1,  else 0

over all m*k * k*n * m*n basis sextuples (Brent equations).
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .linalg import Matrix
from .rings import DD, QI, QQ, DyadicRational, GaussianRational

__all__ = [
    "MatShape",
    "linear_combination",
    "RankOneTensor",
    "LrpDecomposition",
    "TypePolynomial",
    "VerifyResult",
    "contract_bilinear",
    "verify_mm_tensor",
    "verify_by_contraction",
    "tensor_type",
    "equivalent_up_to_term_scaling",
    "builtin",
    "builtin_names",
]


class MatShape(NamedTuple):
    """Problem dimensions <m,k,n>: (m x k) times (k x n)."""

    m: int
    k: int
    n: int

    def check(self):
        if min(self) < 1:
            raise ValueError(f"invalid shape {self}")
        return self


class RankOneTensor(NamedTuple):
    """One summand of a decomposition.

    ``a`` is m x k, ``b`` is k x n and ``c`` is the n x m tensor factor
    (the transposed contribution of this product to the output matrix).
    """

    a: Matrix
    b: Matrix
    c: Matrix

    @property
    def output_pattern(self):
        """The m x n matrix this term adds to A.B (scaled by the product)."""
        return self.c.transpose()


class LrpDecomposition:
    """Immutable (L, R, P) triple with shape metadata."""

    def __init__(self, shape, L, R, P, name=None):
        shape = MatShape(*shape).check()
        m, k, n = shape
        r = L.nrows
        if R.nrows != r or P.ncols != r:
            raise ValueError(f"rank mismatch: L has {r} rows, R {R.nrows}, P {P.ncols} cols")
        if L.ncols != m * k or R.ncols != k * n or P.nrows != m * n:
            raise ValueError(
                f"dimension mismatch for shape {shape}: "
                f"L {L.shape}, R {R.shape}, P {P.shape}"
            )
        self.shape = shape
        self.rank = r
        self.L = L
        self.R = R
        self.P = P
        self.name = name

    @classmethod
    def from_terms(cls, shape, terms, ring=QQ, name=None):
        shape = MatShape(*shape).check()
        m, k, n = shape
        L = Matrix(ring, [t.a.vec() for t in terms])
        R = Matrix(ring, [t.b.vec() for t in terms])
        P = Matrix(ring, list(zip(*[t.c.transpose().vec() for t in terms])))
        return cls(shape, L, R, P, name=name)

    def terms(self):
        m, k, n = self.shape
        ring = self.L.ring
        out = []
        for t in range(self.rank):
            a = Matrix.from_vec(ring, list(self.L.row(t)), m, k)
            b = Matrix.from_vec(ring, list(self.R.row(t)), k, n)
            c = Matrix.from_vec(ring, list(self.P.col(t)), m, n).transpose()
            out.append(RankOneTensor(a, b, c))
        return out

    def convert(self, ring):
        return LrpDecomposition(
            self.shape,
            self.L.convert(ring),
            self.R.convert(ring),
            self.P.convert(ring),
            name=self.name,
        )

    def __eq__(self, other):
        if not isinstance(other, LrpDecomposition):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.L == other.L
            and self.R == other.R
            and self.P == other.P
        )

    def __repr__(self):
        label = self.name or "anonymous"
        m, k, n = self.shape
        return f"LrpDecomposition(<{m},{k},{n};{self.rank}> {label})"


# ---------------------------------------------------------------------------
# Contraction
# ---------------------------------------------------------------------------


def _apply_coeff(ring, x, coeff):
    """x * coeff where coeff is an exact decomposition coefficient."""
    if isinstance(coeff, GaussianRational):
        return ring.mul(x, ring.coerce(coeff))
    if isinstance(coeff, DyadicRational):
        coeff = coeff.to_fraction()
    return ring.scale(x, coeff)


def linear_combination(ring, values, coeffs):
    """sum of values[i] * coeffs[i] over nonzero coefficients."""
    acc = None
    for x, c in zip(values, coeffs):
        if not c:
            continue
        term = _apply_coeff(ring, x, c)
        acc = term if acc is None else ring.add(acc, term)
    return acc if acc is not None else ring.zero


def contract_bilinear(d, A, B):
    """Multiply A (m x k) by B (k x n) through the decomposition.

    The scalar ring is taken from A; the decomposition's exact coefficients
    are applied through ring.scale, so a rational decomposition drives
    operands over any ring with an inverse of 2.
    """
    m, k, n = d.shape
    if A.shape != (m, k) or B.shape != (k, n):
        raise ValueError(f"operands {A.shape} x {B.shape} do not fit shape {d.shape}")
    ring = A.ring
    avec, bvec = A.vec(), B.vec()
    products = []
    for t in range(d.rank):
        lv = linear_combination(ring, avec, d.L.row(t))
        rv = linear_combination(ring, bvec, d.R.row(t))
        products.append(ring.mul(lv, rv))
    cvec = [linear_combination(ring, products, d.P.row(z)) for z in range(m * n)]
    return Matrix.from_vec(ring, cvec, m, n)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


class VerifyResult(NamedTuple):
    ok: bool
    witness: tuple | None  # (i1, i2, j1, j2, k1, k2), 0-based
    checked: int

    def __bool__(self):
        return self.ok


def _as_fraction_rows(mat):
    out = []
    for row in mat.rows:
        frow = []
        for x in row:
            if isinstance(x, DyadicRational):
                frow.append(x.to_fraction())
            elif isinstance(x, Fraction):
                frow.append(x)
            elif isinstance(x, int):
                frow.append(Fraction(x))
            else:
                return None
        out.append(frow)
    return out


def verify_mm_tensor(d, force_generic=False):
    """Exhaustive Brent-equation check of a decomposition.

    Returns VerifyResult(ok, witness, checked); ``witness`` is the first
    violating basis sextuple in lexicographic order, or None.  Rational and
    dyadic data take an integer fast path (denominators cleared, numpy
    einsum); everything else runs the generic exact loop.
    """
    m, k, n = d.shape
    if not d.L.ring.exact:
        raise ValueError("verify_mm_tensor requires an exact scalar ring")
    if not force_generic:
        fl, fr, fp = (_as_fraction_rows(x) for x in (d.L, d.R, d.P))
        if fl is not None and fr is not None and fp is not None:
            return _verify_integer(fl, fr, fp, m, k, n, d.rank)
    return _verify_generic(d)


def _verify_integer(fl, fr, fp, m, k, n, rank):
    den = 1
    for rows in (fl, fr, fp):
        for row in rows:
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
    Li = np.array([[int(x) for x in row] for row in fl], dtype=np.int64)
    Ri = np.array([[int(x) for x in row] for row in fr], dtype=np.int64)
    Pi = np.array([[int(x * den) for x in row] for row in fp], dtype=np.int64)
    got = np.einsum("tx,ty,zt->xyz", Li, Ri, Pi)
    want = np.zeros((m * k, k * n, m * n), dtype=np.int64)
    for i1 in range(m):
        for i2 in range(k):
            for j2 in range(n):
                want[i1 * k + i2, i2 * n + j2, i1 * n + j2] = den
    checked = want.size
    if np.array_equal(got, want):
        return VerifyResult(True, None, checked)
    x, y, z = min(map(tuple, np.argwhere(got != want)))
    witness = (x // k, x % k, y // n, y % n, z // n, z % n)
    return VerifyResult(False, witness, checked)


def _verify_generic(d):
    m, k, n = d.shape
    ring = d.L.ring
    one, zero = ring.one, ring.zero
    checked = 0
    for x in range(m * k):
        lcol = d.L.col(x)
        for y in range(k * n):
            rcol = d.R.col(y)
            s = [ring.mul(a, b) for a, b in zip(lcol, rcol)]
            for z in range(m * n):
                acc = zero
                for t in range(d.rank):
                    p = d.P[z, t]
                    if p != zero:
                        acc = ring.add(acc, ring.mul(s[t], p))
                i1, i2 = divmod(x, k)
                j1, j2 = divmod(y, n)
                k1, k2 = divmod(z, n)
                want = one if (i2 == j1 and j2 == k2 and i1 == k1) else zero
                checked += 1
                if acc != want:
                    return VerifyResult(False, (i1, i2, j1, j2, k1, k2), checked)
    return VerifyResult(True, None, checked)


def verify_by_contraction(d, ring=None):
    """Cross-check: contract_bilinear equals the naive product on every pair
    of basis matrices.  Independent of the Brent-equation path."""
    m, k, n = d.shape
    ring = ring or d.L.ring
    for x in range(m * k):
        A = Matrix.from_vec(ring, [ring.one if i == x else ring.zero for i in range(m * k)], m, k)
        for y in range(k * n):
            B = Matrix.from_vec(ring, [ring.one if i == y else ring.zero for i in range(k * n)], k, n)
            got = contract_bilinear(d, A, B)
            want = _naive(A, B)
            if got != want:
                i1, i2 = divmod(x, k)
                j1, j2 = divmod(y, n)
                return False, (i1, i2, j1, j2)
    return True, None


def _naive(A, B):
    ring = A.ring
    out = []
    for i in range(A.nrows):
        row = []
        for j in range(B.ncols):
            acc = ring.mul(A[i, 0], B[0, j])
            for t in range(1, A.ncols):
                acc = ring.add(acc, ring.mul(A[i, t], B[t, j]))
            row.append(acc)
        out.append(row)
    return Matrix(ring, out, coerce=False)


# ---------------------------------------------------------------------------
# Type polynomial
# ---------------------------------------------------------------------------


class TypePolynomial:
    """Multiset of per-term factor ranks, written sum X^a Y^b Z^c."""

    def __init__(self, triples):
        self.counts = Counter(tuple(t) for t in triples)

    @property
    def total_terms(self):
        return sum(self.counts.values())

    def __eq__(self, other):
        if isinstance(other, str):
            return str(self) == other.replace(" ", "")
        if not isinstance(other, TypePolynomial):
            return NotImplemented
        return self.counts == other.counts

    def __hash__(self):
        return hash(frozenset(self.counts.items()))

    def __str__(self):
        def monomial(triple):
            out = []
            for sym, e in zip("XYZ", triple):
                if e == 0:
                    continue
                out.append(sym if e == 1 else f"{sym}{e}")
            return "".join(out) or "1"

        parts = []
        for triple in sorted(self.counts, key=lambda t: (sum(t), t), reverse=True):
            coeff = self.counts[triple]
            parts.append(("" if coeff == 1 else str(coeff)) + monomial(triple))
        return "+".join(parts)

    def __repr__(self):
        return f"TypePolynomial({self})"


def tensor_type(d):
    """Ranks of every factor matrix, tallied as a TypePolynomial."""
    triples = []
    for term in d.terms():
        triples.append((term.a.rank(), term.b.rank(), term.c.rank()))
    return TypePolynomial(triples)


# ---------------------------------------------------------------------------
# Projective equivalence of decompositions
# ---------------------------------------------------------------------------


def _field_lift(mat):
    if mat.nrows and isinstance(mat.rows[0][0], GaussianRational):
        return mat
    return mat.convert(QQ)


def _sort_key(x):
    if isinstance(x, GaussianRational):
        return (x.re, x.im)
    return (Fraction(x), Fraction(0))


def _canonical_terms(d):
    L, R, P = _field_lift(d.L), _field_lift(d.R), _field_lift(d.P)
    out = []
    for t in range(d.rank):
        lrow, rrow, pcol = list(L.row(t)), list(R.row(t)), list(P.col(t))
        a0 = next((x for x in lrow if x), None)
        b0 = next((x for x in rrow if x), None)
        if a0 is None or b0 is None:
            raise ValueError(f"term {t} has a zero factor")
        lnorm = tuple(x / a0 for x in lrow)
        rnorm = tuple(x / b0 for x in rrow)
        pnorm = tuple(x * a0 * b0 for x in pcol)
        out.append((lnorm, rnorm, pnorm))
    return sorted(out, key=lambda trip: tuple(_sort_key(x) for part in trip for x in part))


def equivalent_up_to_term_scaling(d1, d2):
    """True iff some term permutation plus per-term (alpha, beta, gamma)
    scalings with alpha*beta*gamma = 1 maps d1 onto d2."""
    if d1.shape != d2.shape or d1.rank != d2.rank:
        return False
    return _canonical_terms(d1) == _canonical_terms(d2)


# ---------------------------------------------------------------------------
# Built-in decompositions
# ---------------------------------------------------------------------------

_BUILTIN_SPECS = {
    "strassen_2x2x2_7": ((2, 2, 2), "strassen"),
    "rational_4x4x4_48": ((4, 4, 4), "4x4x4_48_rational"),
    "rational_4x4x4_48_alt": None,  # handled in fastmm
}

_builtin_cache = {}


def builtin_names():
    return sorted(_BUILTIN_SPECS)


def load_decomposition_asset(prefix, shape, name=None):
    """LRP triple from the embedded assets ``<prefix>_{L,R,P}.sms``."""
    from .assets import load_matrix_asset

    L = load_matrix_asset(f"{prefix}_L.sms")
    R = load_matrix_asset(f"{prefix}_R.sms")
    P = load_matrix_asset(f"{prefix}_P.sms")
    return LrpDecomposition(shape, L, R, P, name=name or prefix)


def builtin(name):
    """Embedded, pre-verified algorithm objects.

    strassen_2x2x2_7 and rational_4x4x4_48 load (and verify once) the LRP
    assets; rational_4x4x4_48_alt returns the alternative-basis sextuple.
    """
    if name in _builtin_cache:
        return _builtin_cache[name]
    if name not in _BUILTIN_SPECS:
        raise ValueError(
            f"unknown builtin {name!r}; available: {', '.join(builtin_names())}"
        )
    if name == "rational_4x4x4_48_alt":
        from .fastmm import load_alt_basis_algorithm

        obj = load_alt_basis_algorithm()
    else:
        shape, prefix = _BUILTIN_SPECS[name]
        obj = load_decomposition_asset(prefix, shape, name=name)
        check = verify_mm_tensor(obj)
        if not check.ok:
            raise AssertionError(
                f"embedded decomposition {name} failed verification at {check.witness}"
            )
    _builtin_cache[name] = obj
    return obj
