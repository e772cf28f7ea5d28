"""Command-line interface.

Subcommands:

  verify   check a decomposition (builtin or SMS files) against the
           matrix-multiplication tensor; prints rank and type polynomial
  orbit    apply an isotropy to a decomposition, write the result
  slp      count | check | run straight-line programs
  mul      multiply random matrices through a chosen scheme and report
           timing and instrumented operation counts
  assets   list or export the embedded data files

Exit status: 0 on success (and verification passing), 1 on a verification
failure (the witness is printed), 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .assets import asset_names, read_asset_text
from .isotropy import (
    Isotropy,
    act_lrp,
    builtin_isotropy,
    builtin_isotropy_names,
    demote_to_rational,
)
from .linalg import Matrix
from .rings import QI, QQ, ring_from_spec
from .sms import SmsMatrix, dumps_sms, read_sms
from .slp import count_ops, eval_slp, parse_slp, verify_linear
from .tensor import (
    LrpDecomposition,
    builtin,
    builtin_names,
    tensor_type,
    verify_mm_tensor,
)


def _read_sms_file(path, allow_complex=False):
    with open(path) as fh:
        return read_sms(fh, allow_complex=allow_complex)


def _infer_shape(L, R, P):
    mk, kn, mn = L.ncols, R.ncols, P.nrows
    mkn2 = mk * kn * mn
    mkn = round(mkn2**0.5)
    if mkn * mkn != mkn2:
        raise ValueError(f"cannot infer a shape from {mk}, {kn}, {mn}")
    m, k, n = mkn // kn, mkn // mn, mkn // mk
    if (m * k, k * n, m * n) != (mk, kn, mn):
        raise ValueError(f"inconsistent dimensions {mk}, {kn}, {mn}")
    return (m, k, n)


def _load_decomposition(args):
    if args.builtin:
        obj = builtin(args.builtin)
        if isinstance(obj, LrpDecomposition):
            return obj
        raise ValueError(f"{args.builtin} is not an LRP decomposition")
    L, R, P = (_read_sms_file(p).to_matrix() for p in args.files)
    shape = tuple(map(int, args.shape.split(","))) if args.shape else _infer_shape(L, R, P)
    return LrpDecomposition(shape, L, R, P, name=str(args.files[0]))


def _name_spec(spec):
    """grid:<prefix>:<q> | seq:<prefix>:<count> | comma,separated,names"""
    if spec.startswith("grid:"):
        _, prefix, q = spec.split(":")
        q = int(q)
        return [f"{prefix}{i}{j}" for i in range(1, q + 1) for j in range(1, q + 1)]
    if spec.startswith("seq:"):
        _, prefix, count = spec.split(":")
        return [f"{prefix}{i}" for i in range(int(count))]
    return [s.strip() for s in spec.split(",") if s.strip()]


def cmd_verify(args):
    d = _load_decomposition(args)
    result = verify_mm_tensor(d)
    if result.ok:
        print(f"rank={d.rank} type={tensor_type(d)}")
        return 0
    print(f"verification FAILED at sextuple={result.witness}")
    return 1


def cmd_orbit(args):
    if args.builtin_isotropy:
        g = builtin_isotropy(args.builtin_isotropy)
    else:
        U, V, W = (
            _read_sms_file(p, allow_complex=True).to_matrix(QI)
            for p in args.isotropy_files
        )
        g = Isotropy(U, V, W)
    d = _load_decomposition(args)
    moved = act_lrp(g, d)
    if args.demote:
        moved = demote_to_rational(moved)
    result = verify_mm_tensor(moved)
    for suffix, mat in (("L", moved.L), ("R", moved.R), ("P", moved.P)):
        path = Path(f"{args.out}_{suffix}.sms")
        path.write_text(dumps_sms(SmsMatrix.from_matrix(mat)))
        print(f"wrote {path}")
    print(f"verified={'true' if result.ok else 'false'} rank={moved.rank}")
    return 0 if result.ok else 1


def cmd_slp_count(args):
    prog = parse_slp(Path(args.file).read_text())
    ops = count_ops(prog)
    print(f"additions={ops.additions} shifts={ops.scalar_mults} products={ops.products}")
    return 0


def cmd_slp_check(args):
    prog = parse_slp(Path(args.file).read_text(), product_stage=False)
    M = _read_sms_file(args.matrix).to_matrix()
    inputs = _name_spec(args.inputs)
    outputs = _name_spec(args.outputs)
    ok, witness = verify_linear(prog, M, inputs, outputs)
    if ok:
        print("linear-check=pass")
        return 0
    j, i, got, want = witness
    print(
        f"linear-check=FAIL input={inputs[j]} output={outputs[i]} got={got} want={want}"
    )
    return 1


def cmd_slp_run(args):
    prog = parse_slp(Path(args.file).read_text())
    ring = ring_from_spec(args.ring)
    env = {}
    for binding in args.set or []:
        name, _, value = binding.partition("=")
        if not _:
            raise ValueError(f"bad --set {binding!r}, expected name=value")
        env[name] = ring.parse(value)
    values = eval_slp(prog, env, ring)
    used = set()
    for st in prog.statements:
        from .slp import _expr_vars

        _expr_vars(st.expr, out := [])
        used.update(out)
    sinks = [t for t in prog.targets if t not in used]
    for name in sinks:
        print(f"{name}={ring.format(values[name])}")
    return 0


def _load_mul_scheme(spec):
    from .fastmm import (
        AltBasisAlgorithm,
        load_alt_basis_algorithm,
        load_stage_programs,
        stage_programs_from_matrices,
    )

    if spec == "naive":
        return ("naive", None, None)
    kind, _, name = spec.partition(":")
    if kind == "lrp":
        if name in builtin_names():
            d = builtin(name)
            stages = (
                load_stage_programs()
                if name == "rational_4x4x4_48"
                else stage_programs_from_matrices(d)
            )
        else:
            L, R, P = (_read_sms_file(f"{name}_{s}.sms").to_matrix() for s in "LRP")
            d = LrpDecomposition(_infer_shape(L, R, P), L, R, P, name=name)
            check = verify_mm_tensor(d)
            if not check.ok:
                raise ValueError(f"decomposition {name} failed verification at {check.witness}")
            stages = stage_programs_from_matrices(d)
        return ("lrp", d, stages)
    if kind == "alt":
        if name in builtin_names():
            return ("alt", builtin(name), None)
        mats = [
            _read_sms_file(f"{name}-ALT_{s}.sms").to_matrix() for s in "LRP"
        ] + [_read_sms_file(f"{name}-CoB_{s}.sms").to_matrix() for s in "LRP"]
        alg = AltBasisAlgorithm(
            mats[0], mats[3], mats[1], mats[4], mats[2], mats[5], name=name
        )
        return ("alt", alg, None)
    raise ValueError(f"unknown scheme {spec!r}; use naive, lrp:<name>, alt:<name>")


def cmd_mul(args):
    import random
    import time

    from .fastmm import (
        RecursionConfig,
        multiply_alt_basis,
        multiply_recursive,
        naive_multiply,
    )
    from .rings import CountingRing

    kind, obj, stages = _load_mul_scheme(args.scheme)
    base = ring_from_spec(args.ring)
    counting = CountingRing(base)
    rng = random.Random(args.seed)
    n = args.size
    A = Matrix.random(counting, n, n, rng)
    B = Matrix.random(counting, n, n, rng)
    cfg = RecursionConfig(base_threshold=args.threshold)
    t0 = time.perf_counter()
    if kind == "naive":
        C = naive_multiply(A, B)
    elif kind == "lrp":
        C = multiply_recursive(obj, A, B, cfg, stages=stages)
    else:
        C = multiply_alt_basis(obj, A, B, cfg, use_slp=True)
    elapsed = time.perf_counter() - t0
    rows = {
        "scheme": args.scheme,
        "ring": base.name,
        "n": n,
        "threshold": args.threshold,
        "seed": args.seed,
        "seconds": f"{elapsed:.6f}",
        "additions": counting.counter.additions,
        "shifts": counting.counter.scalar_mults,
        "products": counting.counter.products,
    }
    status = 0
    if args.check:
        Abase = Matrix(base, A.rows, coerce=False)
        Bbase = Matrix(base, B.rows, coerce=False)
        want = naive_multiply(Abase, Bbase)
        if base.exact:
            ok = C == want
            rows["check"] = "pass" if ok else "FAIL"
            status = 0 if ok else 1
        else:
            dev = max(abs(C[i, j] - want[i, j]) for i in range(n) for j in range(n))
            rows["max_deviation"] = f"{dev:.3e}"
    if args.format == "machine":
        print(" ".join(f"{k}={v}" for k, v in rows.items()))
    else:
        width = max(len(k) for k in rows)
        for k, v in rows.items():
            print(f"{k:<{width}}  {v}")
    return status


def cmd_assets(args):
    if args.action == "list":
        for name in asset_names():
            print(name)
        return 0
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    names = asset_names() if args.all else args.names
    if not names:
        raise ValueError("give asset names or --all")
    for name in names:
        (dest / name).write_text(read_asset_text(name))
        print(f"exported {dest / name}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fmmkit",
        description="Exactly verifiable fast matrix multiplication toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_decomposition_args(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument(
            "--builtin",
            choices=builtin_names(),
            help="embedded decomposition name",
        )
        src.add_argument(
            "--files",
            nargs=3,
            metavar=("L.sms", "R.sms", "P.sms"),
            help="decomposition as three SMS files",
        )
        p.add_argument("--shape", help="m,k,n (inferred when omitted)")

    p = sub.add_parser("verify", help="verify a decomposition")
    add_decomposition_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbit", help="apply an isotropy to a decomposition")
    iso = p.add_mutually_exclusive_group(required=True)
    iso.add_argument("--builtin-isotropy", choices=builtin_isotropy_names())
    iso.add_argument(
        "--isotropy-files", nargs=3, metavar=("U.sms", "V.sms", "W.sms")
    )
    add_decomposition_args(p)
    p.add_argument("--out", required=True, help="output prefix for the SMS triple")
    p.add_argument(
        "--demote",
        action="store_true",
        help="convert the result to the rational ring (fails on complex entries)",
    )
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("slp", help="straight-line program tools")
    slp_sub = p.add_subparsers(dest="slp_command", required=True)
    pc = slp_sub.add_parser("count", help="operation counts")
    pc.add_argument("file")
    pc.set_defaults(func=cmd_slp_count)
    pk = slp_sub.add_parser("check", help="verify a program against a matrix")
    pk.add_argument("file")
    pk.add_argument("--matrix", required=True)
    pk.add_argument("--inputs", required=True, help="grid:A:4 | seq:l:48 | a,b,c")
    pk.add_argument("--outputs", required=True)
    pk.set_defaults(func=cmd_slp_check)
    pr = slp_sub.add_parser("run", help="evaluate a program")
    pr.add_argument("file")
    pr.add_argument("--ring", default="rational")
    pr.add_argument("--set", action="append", metavar="name=value")
    pr.set_defaults(func=cmd_slp_run)

    p = sub.add_parser("mul", help="multiply random matrices and report")
    p.add_argument("--scheme", required=True, help="naive | lrp:<name> | alt:<name>")
    p.add_argument("--ring", default="rational", help="rational | dyadic | mod:<p> | f64")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--threshold", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--check", action="store_true", help="compare against naive")
    p.set_defaults(func=cmd_mul)

    p = sub.add_parser("assets", help="list or export embedded data files")
    p.add_argument("action", choices=("list", "export"))
    p.add_argument("names", nargs="*")
    p.add_argument("--dest", default="assets")
    p.add_argument("--all", action="store_true")
    p.set_defaults(func=cmd_assets)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
