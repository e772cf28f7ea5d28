"""Dense matrices over an explicit coefficient ring.

Everything in this package is small and exact, so matrices are immutable
tuples of tuples of ring elements and all arithmetic routes through the
ring object (which makes instrumented operation counting work unchanged).
Rank, inverse and determinant use exact Gaussian elimination and therefore
require a ring with division (rationals, Gaussian rationals, Z/p, floats);
dyadic matrices are lifted to the rationals first by the callers that need
ranks.

Vectorization is row-major throughout: ``vec(A)[i*cols + j] = A[i][j]``.
"""

from __future__ import annotations

from fractions import Fraction

from .rings import QQ, QI, DyadicRational, GaussianRational, Ring

__all__ = ["Matrix"]


class Matrix:
    """Immutable dense matrix tied to a ring."""

    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring, rows, coerce=True):
        if coerce:
            rows = tuple(tuple(ring.coerce(x) for x in row) for row in rows)
        else:
            rows = tuple(tuple(row) for row in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged rows")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", len(rows[0]) if rows else 0)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, ring, nrows, ncols):
        z = ring.zero
        return cls(ring, [[z] * ncols for _ in range(nrows)], coerce=False)

    @classmethod
    def identity(cls, ring, n):
        z, o = ring.zero, ring.one
        return cls(
            ring,
            [[o if i == j else z for j in range(n)] for i in range(n)],
            coerce=False,
        )

    @classmethod
    def from_vec(cls, ring, vec, nrows, ncols):
        """Row-major un-vectorization."""
        if len(vec) != nrows * ncols:
            raise ValueError(f"vector of length {len(vec)} is not {nrows}x{ncols}")
        return cls(
            ring,
            [vec[i * ncols : (i + 1) * ncols] for i in range(nrows)],
        )

    @classmethod
    def random(cls, ring, nrows, ncols, rng):
        return cls(
            ring,
            [[ring.random(rng) for _ in range(ncols)] for _ in range(nrows)],
            coerce=False,
        )

    # -- shape and access --------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def col(self, j):
        return tuple(r[j] for r in self.rows)

    def vec(self):
        """Row-major vectorization."""
        return tuple(x for row in self.rows for x in row)

    # -- arithmetic --------------------------------------------------------

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._same_shape(other)
        add = self.ring.add
        return Matrix(
            self.ring,
            [
                [add(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
            coerce=False,
        )

    def __sub__(self, other):
        self._same_shape(other)
        sub = self.ring.sub
        return Matrix(
            self.ring,
            [
                [sub(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
            coerce=False,
        )

    def __neg__(self):
        neg = self.ring.neg
        return Matrix(
            self.ring, [[neg(a) for a in row] for row in self.rows], coerce=False
        )

    def scale(self, c):
        """Multiply every entry by the exact rational constant c."""
        c = Fraction(c)
        if c == 1:
            return self
        if c == -1:
            return -self
        scale = self.ring.scale
        return Matrix(
            self.ring, [[scale(a, c) for a in row] for row in self.rows], coerce=False
        )

    def scale_elem(self, x):
        """Multiply every entry by the ring element x."""
        mul = self.ring.mul
        return Matrix(
            self.ring, [[mul(a, x) for a in row] for row in self.rows], coerce=False
        )

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        add, mul = self.ring.add, self.ring.mul
        bt = other.transpose().rows
        out = []
        for ra in self.rows:
            out_row = []
            for cb in bt:
                acc = mul(ra[0], cb[0])
                for a, b in zip(ra[1:], cb[1:]):
                    acc = add(acc, mul(a, b))
                out_row.append(acc)
            out.append(out_row)
        return Matrix(self.ring, out, coerce=False)

    def transpose(self):
        return Matrix(self.ring, list(zip(*self.rows)), coerce=False)

    def kron(self, other):
        """Kronecker product; the left factor indexes the slow (row-major) axis."""
        mul = self.ring.mul
        out = []
        for ra in self.rows:
            for rb in other.rows:
                out.append([mul(a, b) for a in ra for b in rb])
        return Matrix(self.ring, out, coerce=False)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b
            for ra, rb in zip(self.rows, other.rows)
            for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self):
        z = self.ring.zero
        return all(x == z for row in self.rows for x in row)

    # -- block helpers -----------------------------------------------------

    def submatrix(self, r0, r1, c0, c1):
        return Matrix(
            self.ring, [row[c0:c1] for row in self.rows[r0:r1]], coerce=False
        )

    def split_blocks(self, br, bc):
        """Split into a br x bc grid of equal blocks, row-major list."""
        if self.nrows % br or self.ncols % bc:
            raise ValueError(f"{self.shape} does not split into {br}x{bc} blocks")
        h, w = self.nrows // br, self.ncols // bc
        return [
            self.submatrix(i * h, (i + 1) * h, j * w, (j + 1) * w)
            for i in range(br)
            for j in range(bc)
        ]

    @classmethod
    def assemble_blocks(cls, blocks, br, bc):
        """Inverse of split_blocks for a row-major list of equal blocks."""
        if len(blocks) != br * bc:
            raise ValueError("wrong number of blocks")
        ring = blocks[0].ring
        rows = []
        for i in range(br):
            strip = blocks[i * bc : (i + 1) * bc]
            for r in range(strip[0].nrows):
                rows.append([x for blk in strip for x in blk.rows[r]])
        return cls(ring, rows, coerce=False)

    def pad_to(self, nrows, ncols):
        """Zero-pad on the bottom/right."""
        if nrows < self.nrows or ncols < self.ncols:
            raise ValueError("pad_to cannot shrink")
        z = self.ring.zero
        rows = [list(row) + [z] * (ncols - self.ncols) for row in self.rows]
        rows += [[z] * ncols for _ in range(nrows - self.nrows)]
        return Matrix(self.ring, rows, coerce=False)

    # -- exact elimination -------------------------------------------------

    def _field_div(self, a, b):
        ring = self.ring
        if isinstance(a, (Fraction, float, GaussianRational)):
            return a / b
        if hasattr(b, "inverse"):  # Mod
            return ring.mul(a, b.inverse())
        raise TypeError(f"ring {ring.name} has no division")

    def _lifted(self):
        """Dyadic matrices move to Q so that elimination can divide."""
        if self.nrows and self.ncols and isinstance(self.rows[0][0], DyadicRational):
            return self.convert(QQ)
        return self

    def rank(self):
        """Classical matrix rank by exact Gaussian elimination.

        Dyadic matrices are lifted to the rationals; float matrices are
        rejected (rank over floats is not meaningful here).
        """
        if not self.ring.exact:
            raise ValueError("rank requires an exact ring")
        m = self._lifted()
        rows = [list(r) for r in m.rows]
        ring = m.ring
        z = ring.zero
        rank = 0
        col = 0
        nr, nc = m.nrows, m.ncols
        while rank < nr and col < nc:
            pivot = next((r for r in range(rank, nr) if rows[r][col] != z), None)
            if pivot is None:
                col += 1
                continue
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            pv = rows[rank][col]
            for r in range(rank + 1, nr):
                if rows[r][col] != z:
                    f = m._field_div(rows[r][col], pv)
                    rows[r] = [
                        ring.sub(x, ring.mul(f, y))
                        for x, y in zip(rows[r], rows[rank])
                    ]
            rank += 1
            col += 1
        return rank

    def det(self):
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        m = self._lifted()
        rows = [list(r) for r in m.rows]
        ring = m.ring
        z = ring.zero
        n = self.nrows
        det = ring.one
        sign = 1
        for c in range(n):
            pivot = next((r for r in range(c, n) if rows[r][c] != z), None)
            if pivot is None:
                return z
            if pivot != c:
                rows[c], rows[pivot] = rows[pivot], rows[c]
                sign = -sign
            pv = rows[c][c]
            det = ring.mul(det, pv)
            for r in range(c + 1, n):
                if rows[r][c] != z:
                    f = self._field_div(rows[r][c], pv)
                    rows[r] = [
                        ring.sub(x, ring.mul(f, y)) for x, y in zip(rows[r], rows[c])
                    ]
        return det if sign == 1 else ring.neg(det)

    def inverse(self):
        """Exact inverse via Gauss-Jordan; raises ValueError when singular."""
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        ring = self.ring
        z = ring.zero
        aug = [
            list(row) + [ring.one if i == j else z for j in range(n)]
            for i, row in enumerate(self.rows)
        ]
        for c in range(n):
            pivot = next((r for r in range(c, n) if aug[r][c] != z), None)
            if pivot is None:
                raise ValueError("matrix is singular")
            aug[c], aug[pivot] = aug[pivot], aug[c]
            pv = aug[c][c]
            aug[c] = [self._field_div(x, pv) for x in aug[c]]
            for r in range(n):
                if r != c and aug[r][c] != z:
                    f = aug[r][c]
                    aug[r] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(aug[r], aug[c])]
        return Matrix(ring, [row[n:] for row in aug], coerce=False)

    # -- conversions -------------------------------------------------------

    def convert(self, ring):
        """Re-coerce every entry into another ring (exact where possible)."""
        return Matrix(ring, self.rows, coerce=True)

    def to_rational(self):
        """Demote a Gaussian matrix with zero imaginary parts to Q."""
        return self.convert(QQ)

    def to_gaussian(self):
        return self.convert(QI)

    def __repr__(self):
        body = "; ".join(
            " ".join(self.ring.format(x) for x in row) for row in self.rows
        )
        return f"Matrix({self.ring.name}, {self.nrows}x{self.ncols}: {body})"
