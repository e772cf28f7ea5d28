"""Recursive matrix multiplication from verified decompositions.

Two multipliers are provided:

  * ``multiply_recursive``: the classical scheme.  Split both operands into
    a q x q block grid, take the r left/right block combinations given by
    the decomposition's L and R rows, recurse on the r block products and
    recombine through P.
  * ``multiply_alt_basis``: the alternative-basis scheme.  Operands are
    first pushed through a change of basis recursively (16 blocks -> 47
    transformed blocks per level), the core multiplication then uses the
    extremely sparse L_alt/R_alt/P_alt matrices (1, 2 and 3 additions), and
    the inverse basis change is applied on the way out.

Both are exact over exact rings and equal naive multiplication; the float
ring exists for timing and accuracy experiments only.  Linear-combination
stages can run either by direct (sparse) matrix application or through the
embedded straight-line programs; results agree, operation counts differ
(the SLP route is what the complexity accounting assumes).

``count_operations`` evaluates the operation-count recurrences and their
closed forms in exact rational arithmetic; ``benchmark`` measures wall
clock and instrumented element-operation counts, which must reproduce the
recurrence exactly for power-of-four sizes at threshold 1.
"""

from __future__ import annotations

import time
from fractions import Fraction
from typing import NamedTuple

from .linalg import Matrix
from .rings import QQ, CountingRing, ring_from_spec
from .slp import OpCount, count_ops, eval_slp, naive_slp_from_matrix, parse_slp
from .tensor import LrpDecomposition, linear_combination

__all__ = [
    "RecursionConfig",
    "AltBasisAlgorithm",
    "TransformedOperand",
    "StagePrograms",
    "naive_multiply",
    "multiply_recursive",
    "multiply_alt_basis",
    "transform_operand",
    "untransform_operand",
    "count_operations",
    "closed_form_total",
    "benchmark",
    "load_alt_basis_algorithm",
    "load_stage_programs",
    "load_cob_programs",
]


class RecursionConfig(NamedTuple):
    """base_threshold: side length at/below which naive multiplication is
    used.  Inputs whose side does not fit the recursion are zero-padded once
    at entry to the smallest q^j * ceil(side / q^j) with bottom side within
    the threshold."""

    base_threshold: int = 1

    def check(self):
        if self.base_threshold < 1:
            raise ValueError("base_threshold must be >= 1")
        return self


def _padded_side(side, q, threshold):
    if side <= threshold:
        return side, 0
    levels = 1
    while -(-side // q**levels) > threshold:
        levels += 1
    return q**levels * -(-side // q**levels), levels


def naive_multiply(A, B):
    """Cubic reference product; the oracle everything is checked against."""
    if A.ncols != B.nrows:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
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


class _BlockOps:
    """Ring-like adapter so SLP evaluation and linear_combination work on
    matrix blocks; products dispatch to a recursion callback."""

    def __init__(self, multiply=None):
        self._multiply = multiply

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def scale(self, a, c):
        return a.scale(c)

    def mul(self, a, b):
        if self._multiply is None:
            raise ValueError("this stage has no products")
        return self._multiply(a, b)

    @property
    def zero(self):
        raise ValueError("empty linear combination of blocks")


class StagePrograms(NamedTuple):
    """SLPs for the three linear stages of one recursion level, with the
    input/output name orders they are wired by."""

    left: object
    left_inputs: tuple
    left_outputs: tuple
    right: object
    right_inputs: tuple
    right_outputs: tuple
    product: object
    product_inputs: tuple
    product_outputs: tuple


def _default_names(prefix, count):
    return tuple(f"{prefix}{i}" for i in range(count))


def _grid_names(prefix, q):
    return tuple(f"{prefix}{i}{j}" for i in range(1, q + 1) for j in range(1, q + 1))


def stage_programs_from_matrices(d):
    """Naive per-row SLPs for a decomposition's L, R, P stages."""
    m, k, n = d.shape
    a_names = _grid_names("A", m)
    b_names = _grid_names("B", k)
    c_names = _grid_names("C", m)
    l_names = _default_names("l", d.rank)
    r_names = _default_names("r", d.rank)
    p_names = _default_names("p", d.rank)
    return StagePrograms(
        naive_slp_from_matrix(d.L, a_names, l_names), a_names, l_names,
        naive_slp_from_matrix(d.R, b_names, r_names), b_names, r_names,
        naive_slp_from_matrix(d.P, p_names, c_names), p_names, c_names,
    )


def load_stage_programs():
    """The embedded optimized L/R/P listings for the 48-product algorithm."""
    from .assets import read_asset_text

    lp = parse_slp(read_asset_text("4x4x4_48_rational_L.slp"), product_stage=False)
    rp = parse_slp(read_asset_text("4x4x4_48_rational_R.slp"), product_stage=False)
    pp = parse_slp(read_asset_text("4x4x4_48_rational_P.slp"), product_stage=False)
    return StagePrograms(
        lp, _grid_names("A", 4), _default_names("l", 48),
        rp, _grid_names("B", 4), _default_names("r", 48),
        pp, _default_names("p", 48), _grid_names("C", 4),
    )


def multiply_recursive(d, A, B, cfg=None, stages=None):
    """Multiply square matrices through a verified <q,q,q;r> decomposition.

    ``stages`` selects how block combinations are computed: None applies the
    L/R/P matrices directly (sparse, skipping zeros); a StagePrograms runs
    the straight-line programs instead, which is the path whose element
    operation counts match ``count_operations``.
    """
    cfg = (cfg or RecursionConfig()).check()
    m, k, n = d.shape
    if not (m == k == n):
        raise ValueError(f"recursive multiply needs a uniform shape, got {d.shape}")
    if A.nrows != A.ncols or A.shape != B.shape:
        raise ValueError(f"operands must be square and equal-sized: {A.shape}, {B.shape}")
    side = A.nrows
    target, _ = _padded_side(side, m, cfg.base_threshold)
    Ap = A.pad_to(target, target)
    Bp = B.pad_to(target, target)
    Cp = _mul_rec(d, Ap, Bp, cfg, stages)
    return Cp.submatrix(0, side, 0, side)


def _mul_rec(d, A, B, cfg, stages):
    q = d.shape.m
    side = A.nrows
    if side <= cfg.base_threshold or side % q:
        return naive_multiply(A, B)
    ablocks = A.split_blocks(q, q)
    bblocks = B.split_blocks(q, q)
    recurse = lambda x, y: _mul_rec(d, x, y, cfg, stages)
    ops = _BlockOps()
    if stages is None:
        lvals = [linear_combination(ops, ablocks, d.L.row(t)) for t in range(d.rank)]
        rvals = [linear_combination(ops, bblocks, d.R.row(t)) for t in range(d.rank)]
        products = [recurse(lv, rv) for lv, rv in zip(lvals, rvals)]
        cblocks = [
            linear_combination(ops, products, d.P.row(z)) for z in range(q * q)
        ]
    else:
        lenv = eval_slp(stages.left, dict(zip(stages.left_inputs, ablocks)), ops)
        renv = eval_slp(stages.right, dict(zip(stages.right_inputs, bblocks)), ops)
        products = [
            recurse(lenv[ln], renv[rn])
            for ln, rn in zip(stages.left_outputs, stages.right_outputs)
        ]
        cenv = eval_slp(
            stages.product, dict(zip(stages.product_inputs, products)), ops
        )
        cblocks = [cenv[cn] for cn in stages.product_outputs]
    return Matrix.assemble_blocks(cblocks, q, q)


# ---------------------------------------------------------------------------
# Alternative basis
# ---------------------------------------------------------------------------


class AltBasisAlgorithm:
    """The factorized sextuple: L = L_alt CoB_L, R = R_alt CoB_R,
    P = CoB_P P_alt, with the sparse core carrying 1/2/3 additions."""

    def __init__(self, l_alt, cob_l, r_alt, cob_r, p_alt, cob_p, name=None):
        expect = {
            "l_alt": (l_alt, (48, 47)),
            "cob_l": (cob_l, (47, 16)),
            "r_alt": (r_alt, (48, 47)),
            "cob_r": (cob_r, (47, 16)),
            "p_alt": (p_alt, (47, 48)),
            "cob_p": (cob_p, (16, 47)),
        }
        for field, (mat, shape) in expect.items():
            if mat.shape != shape:
                raise ValueError(f"{field} must be {shape}, got {mat.shape}")
        self.l_alt, self.cob_l = l_alt, cob_l
        self.r_alt, self.cob_r = r_alt, cob_r
        self.p_alt, self.cob_p = p_alt, cob_p
        self.name = name

    def validate_against(self, d):
        """The three factorization identities, exactly."""
        return (
            self.l_alt @ self.cob_l == d.L
            and self.r_alt @ self.cob_r == d.R
            and self.cob_p @ self.p_alt == d.P
        )

    def __repr__(self):
        return f"AltBasisAlgorithm({self.name or 'anonymous'})"


_alt_cache = []


def load_alt_basis_algorithm():
    """The embedded alternative-basis variant, validated on first load."""
    if _alt_cache:
        return _alt_cache[0]
    from .assets import load_matrix_asset
    from .tensor import builtin

    alg = AltBasisAlgorithm(
        load_matrix_asset("4x4x4_48_rational-ALT_L.sms"),
        load_matrix_asset("4x4x4_48_rational-CoB_L.sms"),
        load_matrix_asset("4x4x4_48_rational-ALT_R.sms"),
        load_matrix_asset("4x4x4_48_rational-CoB_R.sms"),
        load_matrix_asset("4x4x4_48_rational-ALT_P.sms"),
        load_matrix_asset("4x4x4_48_rational-CoB_P.sms"),
        name="rational_4x4x4_48_alt",
    )
    if not alg.validate_against(builtin("rational_4x4x4_48")):
        raise AssertionError("alternative-basis factorization identities failed")
    _alt_cache.append(alg)
    return alg


def load_cob_programs():
    """The embedded change-of-basis SLPs as (program, inputs, outputs)."""
    from .assets import read_asset_text

    t_names = _default_names("t", 47)
    s_names = _default_names("s", 47)
    out = {}
    out["cob_l"] = (
        parse_slp(read_asset_text("4x4x4_48_rational-CoB_L.slp"), product_stage=False),
        _grid_names("A", 4),
        t_names,
    )
    out["cob_r"] = (
        parse_slp(read_asset_text("4x4x4_48_rational-CoB_R.slp"), product_stage=False),
        _grid_names("B", 4),
        t_names,
    )
    out["cob_p"] = (
        parse_slp(read_asset_text("4x4x4_48_rational-CoB_P.slp"), product_stage=False),
        s_names,
        _grid_names("C", 4),
    )
    return out


class TransformedOperand(NamedTuple):
    """Flat tree of 47^depth leaf blocks of side n / 4^depth."""

    depth: int
    blocks: tuple

    @property
    def element_count(self):
        if not self.blocks:
            return 0
        b = self.blocks[0]
        return len(self.blocks) * b.nrows * b.ncols


def transform_operand(M, cob, depth, program=None):
    """Recursive change of basis: each level maps 16 sub-blocks to 47."""
    return TransformedOperand(depth, tuple(_transform(M, cob, depth, program)))


def _transform(M, cob, depth, program):
    if depth == 0:
        return [M]
    blocks = M.split_blocks(4, 4)
    ops = _BlockOps()
    if program is None:
        combos = [linear_combination(ops, blocks, cob.row(j)) for j in range(cob.nrows)]
    else:
        prog, in_names, out_names = program
        env = eval_slp(prog, dict(zip(in_names, blocks)), ops)
        combos = [env[name] for name in out_names]
    out = []
    for combo in combos:
        out.extend(_transform(combo, cob, depth - 1, program))
    return out


def untransform_operand(tree, cob_p, program=None):
    """Inverse output transform: 47 sub-results back to 16 blocks per level."""
    return _untransform(list(tree.blocks), tree.depth, cob_p, program)


def _untransform(leaves, depth, cob_p, program):
    if depth == 0:
        assert len(leaves) == 1
        return leaves[0]
    stride = len(leaves) // 47
    subs = [
        _untransform(leaves[i * stride : (i + 1) * stride], depth - 1, cob_p, program)
        for i in range(47)
    ]
    ops = _BlockOps()
    if program is None:
        blocks = [linear_combination(ops, subs, cob_p.row(z)) for z in range(16)]
    else:
        prog, in_names, out_names = program
        env = eval_slp(prog, dict(zip(in_names, subs)), ops)
        blocks = [env[name] for name in out_names]
    return Matrix.assemble_blocks(blocks, 4, 4)


def multiply_alt_basis(alg, A, B, cfg=None, use_slp=False):
    """Alternative-basis recursive multiplication (side padded to fit 4^k).

    Requires a ring with an inverse of 2 (the basis-change coefficients
    include /2, /4 and /8).
    """
    cfg = (cfg or RecursionConfig()).check()
    if A.nrows != A.ncols or A.shape != B.shape:
        raise ValueError(f"operands must be square and equal-sized: {A.shape}, {B.shape}")
    ring = A.ring
    try:
        ring.half(ring.one)
    except Exception as e:
        raise ValueError(
            f"ring {ring.name} has no inverse of 2, required by the "
            f"alternative-basis coefficients"
        ) from e
    side = A.nrows
    target, depth = _padded_side(side, 4, cfg.base_threshold)
    Ap = A.pad_to(target, target)
    Bp = B.pad_to(target, target)
    programs = load_cob_programs() if use_slp else {}
    ta = transform_operand(Ap, alg.cob_l, depth, programs.get("cob_l"))
    tb = transform_operand(Bp, alg.cob_r, depth, programs.get("cob_r"))
    core = _core_multiply(alg, list(ta.blocks), list(tb.blocks), depth)
    Cp = _untransform(core, depth, alg.cob_p, programs.get("cob_p"))
    return Cp.submatrix(0, side, 0, side)


def _core_multiply(alg, aleaves, bleaves, depth):
    if depth == 0:
        return [naive_multiply(aleaves[0], bleaves[0])]
    ops = _BlockOps()
    stride = len(aleaves) // 47
    asubs = [aleaves[i * stride : (i + 1) * stride] for i in range(47)]
    bsubs = [bleaves[i * stride : (i + 1) * stride] for i in range(47)]

    def combine_trees(subs, coeffs):
        picked = [(s, c) for s, c in zip(subs, coeffs) if c]
        out = []
        for leaf_idx in range(stride):
            out.append(
                linear_combination(
                    ops, [s[leaf_idx] for s, _ in picked], [c for _, c in picked]
                )
            )
        return out

    products = []
    for t in range(48):
        la = combine_trees(asubs, alg.l_alt.row(t))
        rb = combine_trees(bsubs, alg.r_alt.row(t))
        products.append(_core_multiply(alg, la, rb, depth - 1))
    out = []
    for i in range(47):
        out.extend(combine_trees(products, alg.p_alt.row(i)))
    return out


# ---------------------------------------------------------------------------
# Operation counting
# ---------------------------------------------------------------------------


def _require_power_of_four(n):
    k = 0
    m = n
    while m > 1:
        if m % 4:
            raise ValueError(f"{n} is not a power of 4")
        m //= 4
        k += 1
    return k


def closed_form_total(n):
    """(373/32) n^log4(48) - (341/32) n^2, with n^log4(48) evaluated as 48^k."""
    k = _require_power_of_four(n)
    return Fraction(373, 32) * 48**k - Fraction(341, 32) * 16**k


class PlainCount(NamedTuple):
    ops: OpCount
    closed_form: Fraction


class AltCount(NamedTuple):
    core: OpCount
    cob_costs: dict  # per-operand transform totals at element level
    cob_total: int


def count_operations(scheme, n):
    """Exact operation totals for one full recursion at threshold 1.

    plain_341: T(1) = 1 product, T(n) = 48 T(n/4) + 341 (n/4)^2 element
    additions/shifts per level (307 additions + 34 shifts); asserts the
    closed form (373/32) n^log4(48) - (341/32) n^2 matches exactly.

    alt_core_6: the sparse-core recurrence 48 T(n/4) + 6 (n/4)^2 plus the
    change-of-basis costs, reported separately (CoB cost recurrence
    C(n) = 47 C(n/4) + c (n/4)^2 with c the shipped CoB SLP totals).
    """
    k = _require_power_of_four(n)
    products = 48**k
    weight = sum(48 ** (k - 1 - i) * 16**i for i in range(k))  # sum over levels
    if scheme == "plain_341":
        ops = OpCount(additions=307 * weight, scalar_mults=34 * weight, products=products)
        closed = closed_form_total(n)
        if Fraction(ops.total) != closed:
            raise AssertionError(
                f"recurrence total {ops.total} != closed form {closed} at n={n}"
            )
        return PlainCount(ops, closed)
    if scheme == "alt_core_6":
        core = OpCount(additions=6 * weight, scalar_mults=0, products=products)
        cob_weight = sum(47 ** (k - 1 - i) * 16**i for i in range(k))
        cob = {}
        for key, (prog, _, _) in load_cob_programs().items():
            c = count_ops(prog)
            cob[key] = (c.additions + c.scalar_mults) * cob_weight
        return AltCount(core, cob, sum(cob.values()))
    raise ValueError(f"unknown scheme {scheme!r}; use plain_341 or alt_core_6")


# ---------------------------------------------------------------------------
# Benchmark
# ---------------------------------------------------------------------------


def benchmark(scheme, ring_spec, sizes, threshold=1, seed=0, repetitions=1):
    """Timed, instrumented runs; returns one report dict per size.

    scheme: "naive", "lrp:<builtin name>" or "alt:<builtin name>".  Measured
    element-operation counts come from a CountingRing wrapped around the
    requested ring; correctness is checked against naive multiplication
    (exact rings) or reported as max deviation (floats).
    """
    import random

    from .tensor import builtin

    base = ring_from_spec(ring_spec) if isinstance(ring_spec, str) else ring_spec
    reports = []
    for n in sizes:
        rng = random.Random((seed, n))
        counting = CountingRing(base)
        A = Matrix.random(counting, n, n, rng)
        B = Matrix.random(counting, n, n, rng)
        cfg = RecursionConfig(base_threshold=threshold)
        best = None
        for _ in range(max(1, repetitions)):
            counting.counter.reset()
            t0 = time.perf_counter()
            if scheme == "naive":
                C = naive_multiply(A, B)
            elif scheme.startswith("lrp:"):
                d = builtin(scheme[4:])
                stages = (
                    load_stage_programs()
                    if scheme[4:] == "rational_4x4x4_48"
                    else stage_programs_from_matrices(d)
                )
                C = multiply_recursive(d, A, B, cfg, stages=stages)
            elif scheme.startswith("alt:"):
                alg = builtin(scheme[4:])
                C = multiply_alt_basis(alg, A, B, cfg, use_slp=True)
            else:
                raise ValueError(f"unknown scheme {scheme!r}")
            elapsed = time.perf_counter() - t0
            counts = counting.counter.snapshot()
            if best is None or elapsed < best[0]:
                best = (elapsed, counts, C)
        elapsed, (adds, shifts, prods), C = best
        report = {
            "scheme": scheme,
            "ring": base.name,
            "n": n,
            "threshold": threshold,
            "seconds": elapsed,
            "additions": adds,
            "scalar_mults": shifts,
            "products": prods,
        }
        Abase = Matrix(base, A.rows, coerce=False)
        Bbase = Matrix(base, B.rows, coerce=False)
        want = naive_multiply(Abase, Bbase)
        if base.exact:
            report["exact_match"] = C == want
        else:
            dev = max(
                abs(C[i, j] - want[i, j]) for i in range(n) for j in range(n)
            )
            report["max_deviation"] = dev
        reports.append(report)
    return reports
