"""Isotropy group action on matrix-multiplication decompositions.

A sandwiching isotropy is a triple of invertible matrices (U, V, W) acting
on a rank-one term A (x) B (x) C as

    (U^-T A V^T) (x) (V^-T B W^T) (x) (W^-T C U^T)

which leaves the matrix-multiplication tensor fixed, so the image of a
correct algorithm is again a correct algorithm of the same tensor rank.
On the LRP representation the action is carried by Kronecker products:

    L -> L (U^-1 kron V^T),  R -> R (V^-1 kron W^T),  P -> (U kron W^-T) P

with the convention that the left Kronecker factor indexes the slow axis of
the row-major vectorization.

All isotropy arithmetic runs over Q(i) so that complex-to-rational
transport is expressible; determinants are reported, not enforced (the
group-theoretic statement restricts to determinant +-1, but the action is
well defined for any invertible triple).  The S3 factor-permutation part of
the full isotropy group is not implemented.
"""

from __future__ import annotations

from .linalg import Matrix
from .rings import QI, QQ, GaussianRational
from .tensor import LrpDecomposition, MatShape, RankOneTensor

__all__ = [
    "Isotropy",
    "identity_isotropy",
    "act_rank_one",
    "act_lrp",
    "compose",
    "inverse",
    "builtin_isotropy",
    "builtin_isotropy_names",
    "demote_to_rational",
]


class Isotropy:
    """Invertible triple (U, V, W) over Q(i); inverses are precomputed."""

    def __init__(self, U, V, W):
        self.U = U.convert(QI) if U.ring is not QI else U
        self.V = V.convert(QI) if V.ring is not QI else V
        self.W = W.convert(QI) if W.ring is not QI else W
        for name, mat in (("U", self.U), ("V", self.V), ("W", self.W)):
            if mat.nrows != mat.ncols:
                raise ValueError(f"{name} is not square: {mat.shape}")
        try:
            self.U_inv = self.U.inverse()
            self.V_inv = self.V.inverse()
            self.W_inv = self.W.inverse()
        except ValueError as e:
            raise ValueError(f"isotropy matrices must be invertible: {e}") from e

    @property
    def shape(self):
        """The <m,k,n> shape this isotropy acts on."""
        return MatShape(self.U.nrows, self.V.nrows, self.W.nrows)

    def determinants(self):
        return (self.U.det(), self.V.det(), self.W.det())

    def is_unimodular(self):
        one = QI.one
        return all(d == one or d == -one for d in self.determinants())

    def __eq__(self, other):
        if not isinstance(other, Isotropy):
            return NotImplemented
        return self.U == other.U and self.V == other.V and self.W == other.W

    def __repr__(self):
        m, k, n = self.shape
        return f"Isotropy({m}x{m}, {k}x{k}, {n}x{n})"


def identity_isotropy(shape):
    m, k, n = MatShape(*shape).check()
    return Isotropy(
        Matrix.identity(QI, m), Matrix.identity(QI, k), Matrix.identity(QI, n)
    )


def act_rank_one(g, t):
    """Sandwiching action on one term; shapes must conform."""
    m, k, n = g.shape
    a = t.a.convert(QI)
    b = t.b.convert(QI)
    c = t.c.convert(QI)
    if a.shape != (m, k) or b.shape != (k, n) or c.shape != (n, m):
        raise ValueError(
            f"term shapes {a.shape}/{b.shape}/{c.shape} do not conform to {g.shape}"
        )
    ut, vt, wt = g.U.transpose(), g.V.transpose(), g.W.transpose()
    uit, vit, wit = (
        g.U_inv.transpose(),
        g.V_inv.transpose(),
        g.W_inv.transpose(),
    )
    return RankOneTensor(uit @ a @ vt, vit @ b @ wt, wit @ c @ ut)


def act_lrp(g, d):
    """Isotropy action on an LRP representation (exact, over Q(i))."""
    if g.shape != d.shape:
        raise ValueError(f"isotropy shape {g.shape} does not match {d.shape}")
    L = d.L.convert(QI) @ g.U_inv.kron(g.V.transpose())
    R = d.R.convert(QI) @ g.V_inv.kron(g.W.transpose())
    P = g.U.kron(g.W_inv.transpose()) @ d.P.convert(QI)
    return LrpDecomposition(d.shape, L, R, P, name=_acted_name(d))


def _acted_name(d):
    return f"{d.name}*g" if d.name else None


def compose(g1, g2):
    """(U1 U2, V1 V2, W1 W2); acting by the composition equals acting by g2
    then g1."""
    if g1.shape != g2.shape:
        raise ValueError(f"cannot compose isotropies of shapes {g1.shape} and {g2.shape}")
    return Isotropy(g1.U @ g2.U, g1.V @ g2.V, g1.W @ g2.W)


def inverse(g):
    return Isotropy(g.U_inv, g.V_inv, g.W_inv)


def demote_to_rational(d):
    """Drop zero imaginary parts, moving a Gaussian decomposition back to Q.

    Raises ValueError if any entry has a nonzero imaginary part.
    """
    def demoted(mat):
        for row in mat.rows:
            for x in row:
                if isinstance(x, GaussianRational) and not x.is_rational:
                    raise ValueError(f"entry {x} is not rational")
        return mat.convert(QQ)

    return LrpDecomposition(
        d.shape, demoted(d.L), demoted(d.R), demoted(d.P), name=d.name
    )


# ---------------------------------------------------------------------------
# Built-in isotropies
# ---------------------------------------------------------------------------

_ISOTROPY_ASSETS = {
    "example_2x2_complex": "isotropy_2x2_complex",
    "paper_4x4_complexifier": "isotropy_4x4_complexifier",
}

_builtin_cache = {}


def builtin_isotropy_names():
    return sorted(_ISOTROPY_ASSETS)


def builtin_isotropy(name):
    """The two embedded isotropies.

    example_2x2_complex is (diag(1, i), I2, I2), the worked 2x2 example;
    paper_4x4_complexifier is the 4x4 triple (with W = I4) that transports
    the complex-valued 48-product algorithm onto the rationals.
    """
    if name in _builtin_cache:
        return _builtin_cache[name]
    if name not in _ISOTROPY_ASSETS:
        raise ValueError(
            f"unknown isotropy {name!r}; available: {', '.join(builtin_isotropy_names())}"
        )
    from .assets import load_matrix_asset

    prefix = _ISOTROPY_ASSETS[name]
    g = Isotropy(
        load_matrix_asset(f"{prefix}_U.sms", ring=QI, allow_complex=True),
        load_matrix_asset(f"{prefix}_V.sms", ring=QI, allow_complex=True),
        load_matrix_asset(f"{prefix}_W.sms", ring=QI, allow_complex=True),
    )
    _builtin_cache[name] = g
    return g
