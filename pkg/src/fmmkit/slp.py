"""Straight-line programs over a coefficient ring.

Programs are flat lists of assignments in the textual form

    x16:=A13+A24; r34:=(r44+y48)*2-r24; k85:=(p14-p47)/2;

Statements are static single assignment: every target is assigned exactly
once and every operand is either an input (a name never assigned) or an
earlier target.  Expressions combine variables, integer constants, unary
negation, binary + and -, multiplication/division by constants and, in
product-stage programs only, variable*variable products.

Operation counting follows the convention that reproduces the embedded
listings' stated totals: every binary + or - is one addition (unary
negation is free), every *c or /c with |c| != 1 is one scalar
multiplication (all such constants in the embedded programs are powers of
two, i.e. shifts), and every variable*variable is one product.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .linalg import Matrix

__all__ = [
    "SlpSyntaxError",
    "OpCount",
    "SlpProgram",
    "parse_slp",
    "print_slp",
    "eval_slp",
    "count_ops",
    "verify_linear",
    "naive_slp_from_matrix",
    "run_full_slp_pipeline",
    "PIPELINE_INPUT_NAMES",
]


class SlpSyntaxError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{message}{where}")


# ---------------------------------------------------------------------------
# Expression nodes
# ---------------------------------------------------------------------------


class Var(NamedTuple):
    name: str


class Const(NamedTuple):
    value: Fraction


class Neg(NamedTuple):
    child: object


class Add(NamedTuple):
    left: object
    right: object


class Sub(NamedTuple):
    left: object
    right: object


class MulConst(NamedTuple):
    child: object
    const: Fraction
    const_first: bool  # True for "2*x", False for "x*2"


class DivConst(NamedTuple):
    child: object
    const: Fraction


class Mul(NamedTuple):  # variable * variable, product stages only
    left: object
    right: object


class Statement(NamedTuple):
    target: str
    expr: object


class OpCount(NamedTuple):
    additions: int = 0
    scalar_mults: int = 0
    products: int = 0

    def __add__(self, other):
        return OpCount(
            self.additions + other.additions,
            self.scalar_mults + other.scalar_mults,
            self.products + other.products,
        )

    @property
    def total(self):
        return self.additions + self.scalar_mults + self.products

    def __str__(self):
        return (
            f"additions={self.additions} shifts={self.scalar_mults} "
            f"products={self.products}"
        )


class SlpProgram:
    """Parsed program: ordered statements, input and target name sets."""

    def __init__(self, statements, inputs, targets):
        self.statements = tuple(statements)
        self.inputs = tuple(inputs)  # in order of first appearance
        self.targets = tuple(targets)
        self._target_set = frozenset(targets)

    @property
    def has_products(self):
        return any(_contains_product(st.expr) for st in self.statements)

    def __len__(self):
        return len(self.statements)

    def __repr__(self):
        return (
            f"SlpProgram({len(self.statements)} statements, "
            f"{len(self.inputs)} inputs)"
        )


def _contains_product(e):
    if isinstance(e, Mul):
        return True
    if isinstance(e, (Add, Sub)):
        return _contains_product(e.left) or _contains_product(e.right)
    if isinstance(e, (Neg, MulConst, DivConst)):
        return _contains_product(e.child)
    return False


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

class _Token(NamedTuple):
    kind: str  # IDENT INT ASSIGN OP SEMI
    text: str
    line: int
    col: int


def _lex(text):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch == ":":
            if i + 1 < n and text[i + 1] == "=":
                tokens.append(_Token("ASSIGN", ":=", line, col))
                i += 2
                col += 2
                continue
            raise SlpSyntaxError("expected ':='", line, col)
        if ch in "+-*/();":
            kind = "SEMI" if ch == ";" else "OP"
            tokens.append(_Token(kind, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            tokens.append(_Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise SlpSyntaxError(f"unexpected character {ch!r}", line, col)
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            raise SlpSyntaxError(
                "unexpected end of input",
                last.line if last else 1,
                last.col if last else 1,
            )
        self.pos += 1
        return tok

    def expect(self, kind, text=None):
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise SlpSyntaxError(
                f"expected {text or kind}, found {tok.text!r}", tok.line, tok.col
            )
        return tok

    def parse_program(self):
        statements = []
        while self.peek() is not None:
            target = self.expect("IDENT")
            self.expect("ASSIGN")
            expr = self.parse_expr()
            self.expect("SEMI")
            statements.append((Statement(target.text, expr), target))
        return statements

    def parse_expr(self):
        sign = None
        tok = self.peek()
        if tok and tok.kind == "OP" and tok.text in "+-":
            sign = self.next().text
        node = self.parse_term()
        if sign == "-":
            node = Neg(node)
        while True:
            tok = self.peek()
            if tok and tok.kind == "OP" and tok.text in "+-":
                op = self.next().text
                rhs = self.parse_term()
                node = Add(node, rhs) if op == "+" else Sub(node, rhs)
            else:
                return node

    def parse_term(self):
        node = self.parse_unary()
        while True:
            tok = self.peek()
            if tok and tok.kind == "OP" and tok.text in "*/":
                op = self.next().text
                rhs = self.parse_unary()
                node = self._combine(node, op, rhs, tok)
            else:
                return node

    def _combine(self, lhs, op, rhs, tok):
        if op == "/":
            if not isinstance(rhs, Const):
                raise SlpSyntaxError(
                    "division is only by constants", tok.line, tok.col
                )
            if rhs.value == 0:
                raise SlpSyntaxError("division by zero", tok.line, tok.col)
            if isinstance(lhs, Const):
                return Const(lhs.value / rhs.value)
            return DivConst(lhs, rhs.value)
        if isinstance(lhs, Const) and isinstance(rhs, Const):
            return Const(lhs.value * rhs.value)
        if isinstance(rhs, Const):
            return MulConst(lhs, rhs.value, const_first=False)
        if isinstance(lhs, Const):
            return MulConst(rhs, lhs.value, const_first=True)
        return Mul(lhs, rhs)

    def parse_unary(self):
        tok = self.peek()
        if tok and tok.kind == "OP" and tok.text in "+-":
            self.next()
            child = self.parse_unary()
            if tok.text == "-":
                if isinstance(child, Const):
                    return Const(-child.value)
                return Neg(child)
            return child
        return self.parse_primary()

    def parse_primary(self):
        tok = self.next()
        if tok.kind == "IDENT":
            return Var(tok.text)
        if tok.kind == "INT":
            return Const(Fraction(int(tok.text)))
        if tok.kind == "OP" and tok.text == "(":
            node = self.parse_expr()
            self.expect("OP", ")")
            return node
        raise SlpSyntaxError(f"unexpected token {tok.text!r}", tok.line, tok.col)


def _expr_vars(e, out):
    if isinstance(e, Var):
        out.append(e.name)
    elif isinstance(e, (Add, Sub, Mul)):
        _expr_vars(e.left, out)
        _expr_vars(e.right, out)
    elif isinstance(e, (Neg, MulConst, DivConst)):
        _expr_vars(e.child, out)


def parse_slp(text, product_stage=None):
    """Parse SLP text into an SlpProgram.

    ``product_stage`` True permits variable*variable products, False
    rejects them, None (default) accepts them and records the fact.
    Enforces single assignment and definition-before-use; names never
    assigned anywhere in the program are its inputs.
    """
    raw = _Parser(_lex(text)).parse_program()
    targets = {}
    for st, tok in raw:
        if st.target in targets:
            raise SlpSyntaxError(f"double assignment to {st.target!r}", tok.line, tok.col)
        targets[st.target] = tok
    all_targets = set(targets)
    defined = set()
    inputs = []
    seen_inputs = set()
    for st, tok in raw:
        used = []
        _expr_vars(st.expr, used)
        for name in used:
            if name in all_targets:
                if name not in defined:
                    raise SlpSyntaxError(
                        f"{name!r} used before assignment", tok.line, tok.col
                    )
            elif name not in seen_inputs:
                seen_inputs.add(name)
                inputs.append(name)
        if product_stage is False and _contains_product(st.expr):
            raise SlpSyntaxError(
                "variable*variable product in a non-product program",
                tok.line,
                tok.col,
            )
        defined.add(st.target)
    return SlpProgram([st for st, _ in raw], inputs, [st.target for st, _ in raw])


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC = {"atom": 3, "unary": 2, "mul": 1, "add": 0}


def _fmt(e, parent_prec):
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        s = str(e.value) if e.value.denominator == 1 else f"{e.value.numerator}/{e.value.denominator}"
        return s if e.value >= 0 else f"({s})" if parent_prec > _PREC["add"] else s
    if isinstance(e, Neg):
        inner = _fmt(e.child, _PREC["unary"])
        s = f"-{inner}"
        return f"({s})" if parent_prec > _PREC["add"] else s
    if isinstance(e, Add):
        s = f"{_fmt(e.left, _PREC['add'])}+{_fmt(e.right, _PREC['mul'])}"
        return f"({s})" if parent_prec > _PREC["add"] else s
    if isinstance(e, Sub):
        s = f"{_fmt(e.left, _PREC['add'])}-{_fmt(e.right, _PREC['mul'])}"
        return f"({s})" if parent_prec > _PREC["add"] else s
    if isinstance(e, MulConst):
        c = e.const
        cs = str(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        body = _fmt(e.child, _PREC["mul"] + 1)
        s = f"{cs}*{body}" if e.const_first else f"{body}*{cs}"
        return f"({s})" if parent_prec > _PREC["mul"] else s
    if isinstance(e, DivConst):
        body = _fmt(e.child, _PREC["mul"] + 1)
        s = f"{body}/{e.const}"
        return f"({s})" if parent_prec > _PREC["mul"] else s
    if isinstance(e, Mul):
        s = f"{_fmt(e.left, _PREC['mul'] + 1)}*{_fmt(e.right, _PREC['mul'] + 1)}"
        return f"({s})" if parent_prec > _PREC["mul"] else s
    raise TypeError(f"not an expression: {e!r}")


def print_slp(p, per_line=1):
    """Render back to text; reparsing yields an operationally identical
    program (whitespace and parenthesization may differ from the source)."""
    stmts = [f"{st.target}:={_fmt(st.expr, 0)};" for st in p.statements]
    if per_line <= 1:
        return "\n".join(stmts) + "\n"
    lines = [
        " ".join(stmts[i : i + per_line]) for i in range(0, len(stmts), per_line)
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _eval_expr(e, env, ring):
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Const):
        return ring.scale(ring.one, e.value)
    if isinstance(e, Neg):
        return ring.neg(_eval_expr(e.child, env, ring))
    if isinstance(e, Add):
        return ring.add(_eval_expr(e.left, env, ring), _eval_expr(e.right, env, ring))
    if isinstance(e, Sub):
        return ring.sub(_eval_expr(e.left, env, ring), _eval_expr(e.right, env, ring))
    if isinstance(e, MulConst):
        return ring.scale(_eval_expr(e.child, env, ring), e.const)
    if isinstance(e, DivConst):
        return ring.scale(_eval_expr(e.child, env, ring), Fraction(1, 1) / e.const)
    if isinstance(e, Mul):
        return ring.mul(_eval_expr(e.left, env, ring), _eval_expr(e.right, env, ring))
    raise TypeError(f"not an expression: {e!r}")


def eval_slp(p, env, ring):
    """Run the program; returns the environment including every target.

    ``env`` must cover all of p.inputs with ring elements (or any values the
    ring's operations accept, e.g. matrix blocks under a block adapter).
    """
    missing = [name for name in p.inputs if name not in env]
    if missing:
        raise ValueError(f"missing inputs: {', '.join(missing)}")
    values = dict(env)
    for st in p.statements:
        values[st.target] = _eval_expr(st.expr, values, ring)
    return values


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


def _count_expr(e):
    if isinstance(e, (Var, Const)):
        return OpCount()
    if isinstance(e, Neg):
        return _count_expr(e.child)  # negation is free
    if isinstance(e, (Add, Sub)):
        return _count_expr(e.left) + _count_expr(e.right) + OpCount(additions=1)
    if isinstance(e, MulConst):
        extra = OpCount(scalar_mults=1) if abs(e.const) != 1 else OpCount()
        return _count_expr(e.child) + extra
    if isinstance(e, DivConst):
        extra = OpCount(scalar_mults=1) if abs(e.const) != 1 else OpCount()
        return _count_expr(e.child) + extra
    if isinstance(e, Mul):
        return _count_expr(e.left) + _count_expr(e.right) + OpCount(products=1)
    raise TypeError(f"not an expression: {e!r}")


def count_ops(p):
    total = OpCount()
    for st in p.statements:
        total = total + _count_expr(st.expr)
    return total


# ---------------------------------------------------------------------------
# Linear verification and naive emission
# ---------------------------------------------------------------------------


def verify_linear(p, M, input_order, output_order):
    """Check that the program computes y = M x by basis-vector evaluation.

    Inputs are bound in ``input_order`` (matching M's columns), outputs are
    read in ``output_order`` (matching M's rows).  Returns (ok, witness)
    where witness = (input_index, output_index, got, want) on failure.
    """
    if p.has_products:
        raise ValueError("verify_linear requires a program without products")
    ring = M.ring
    if len(input_order) != M.ncols or len(output_order) != M.nrows:
        raise ValueError(
            f"matrix is {M.nrows}x{M.ncols} but got {len(output_order)} outputs "
            f"and {len(input_order)} inputs"
        )
    unknown = [name for name in p.inputs if name not in set(input_order)]
    if unknown:
        raise ValueError(f"program inputs {unknown} missing from input_order")
    for j, _ in enumerate(input_order):
        env = {
            name: (ring.one if i == j else ring.zero)
            for i, name in enumerate(input_order)
        }
        values = eval_slp(p, env, ring)
        for i, out_name in enumerate(output_order):
            got = values[out_name]
            want = M[i, j]
            if got != want:
                return False, (j, i, got, want)
    return True, None


def naive_slp_from_matrix(M, input_names, output_names):
    """Row-by-row emission: each output is a signed, scaled sum of inputs.

    Costs sum(nnz(row) - 1) additions; entries +-p/q cost one shift per
    nontrivial numerator and denominator (a single shift for the +-1/2^k
    coefficients appearing in the embedded data).  verify_linear holds by
    construction.
    """
    if len(input_names) != M.ncols or len(output_names) != M.nrows:
        raise ValueError("name lists do not match the matrix shape")
    zero = M.ring.zero
    statements = []
    for i in range(M.nrows):
        expr = None
        for j in range(M.ncols):
            c = M[i, j]
            if c == zero:
                continue
            frac = Fraction(str(c)) if not isinstance(c, (int, Fraction)) else Fraction(c)
            piece = Var(input_names[j])
            num, den = abs(frac.numerator), frac.denominator
            if num != 1:
                piece = MulConst(piece, Fraction(num), const_first=False)
            if den != 1:
                piece = DivConst(piece, Fraction(den))
            if expr is None:
                expr = Neg(piece) if frac < 0 else piece
            elif frac < 0:
                expr = Sub(expr, piece)
            else:
                expr = Add(expr, piece)
        if expr is None:
            expr = Const(Fraction(0))
        statements.append(Statement(output_names[i], expr))
    return SlpProgram(statements, list(input_names), list(output_names))


PIPELINE_INPUT_NAMES = {
    "A": tuple(f"A{i}{j}" for i in range(1, 5) for j in range(1, 5)),
    "B": tuple(f"B{i}{j}" for i in range(1, 5) for j in range(1, 5)),
    "C": tuple(f"C{i}{j}" for i in range(1, 5) for j in range(1, 5)),
    "l": tuple(f"l{i}" for i in range(48)),
    "r": tuple(f"r{i}" for i in range(48)),
    "p": tuple(f"p{i}" for i in range(48)),
}


def run_full_slp_pipeline(lp, rp, prodp, pp, A, B):
    """Compose the four-stage 4x4 pipeline on matrices A, B.

    Chains by the fixed names A11..A44 -> l0..l47, B11..B44 -> r0..r47,
    products p0..p47, outputs C11..C44.  The ring is taken from A.
    """
    if A.shape != (4, 4) or B.shape != (4, 4):
        raise ValueError("the embedded pipeline multiplies 4x4 matrices")
    ring = A.ring
    env = {}
    for name, x in zip(PIPELINE_INPUT_NAMES["A"], A.vec()):
        env[name] = x
    lvals = eval_slp(lp, env, ring)
    env = {}
    for name, x in zip(PIPELINE_INPUT_NAMES["B"], B.vec()):
        env[name] = x
    rvals = eval_slp(rp, env, ring)
    env = {}
    for name in PIPELINE_INPUT_NAMES["l"]:
        env[name] = lvals[name]
    for name in PIPELINE_INPUT_NAMES["r"]:
        env[name] = rvals[name]
    pvals = eval_slp(prodp, env, ring)
    env = {name: pvals[name] for name in PIPELINE_INPUT_NAMES["p"]}
    cvals = eval_slp(pp, env, ring)
    out = [cvals[name] for name in PIPELINE_INPUT_NAMES["C"]]
    return Matrix.from_vec(ring, out, 4, 4)
