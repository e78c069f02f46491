"""Line-oriented problem files with exact rational literals.

A file is a ``version`` line, a ``kind`` line, then one ``key value`` line
per field; ``#`` starts a comment.  Values are s-expressions::

    version 1
    kind fenchel
    phi (maxaffine ((1) 0) ((-1) 0))
    psi (indicator (poly 1 (le (-1) -1)))
    A (matrix (1))

Expressions:

* ``(affine (c1 .. cn) c0)``
* ``(maxaffine ((a1 .. an) b) ...)``
* ``(indicator POLY)``
* ``(sum E E)``, ``(max E ...)``, ``(scale t E)``, ``(compose E MATRIX)``

Sets and maps: ``(poly n (le (a..) b) ... (eq (a..) b) ...)``,
``(cone m (gen (g..)) ...)``, ``(matrix (row..) ...)`` and
``(map n_in n_out POLY)``.  Vectors are ``(v1 .. vn)``.  Numbers are
integers or ``p/q``; decimal points are rejected.

Fields per kind (``*`` = repeatable, ``?`` = optional):

* ``fenchel``: ``phi``, ``psi``, ``A?`` (identity by default)
* ``lagrange``: ``phi``, ``psi*`` (one per constraint), ``region?``, ``cone?``, ``point?``
* ``conjugate``: ``f``, ``at*``
* ``coderivative``: ``map``, ``a``, ``b``, ``h``
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .coderivative import SetValuedMap
from .errors import ImproperError, InputError
from .fenchel import FenchelProblem
from .functions import (Affine, ConvexExpr, Indicator, Max, MaxAffine, PreComposeLinear, ScaleNonneg, Sum)
from .geometry import Cone
from .lagrange import ConeProgram
from .linalg import LinearMap
from .polyhedron import Polyhedron
from .rational import fmt, rational

VERSION = 1
KINDS = ("fenchel", "lagrange", "conjugate", "coderivative")

_FIELDS = {
    # kind: {key: (type, repeatable, required)}
    "fenchel": {"phi": ("expr", False, True), "psi": ("expr", False, True), "A": ("matrix", False, False)},
    "lagrange": {"phi": ("expr", False, True), "psi": ("expr", True, True), "region": ("poly", False, False),
                 "cone": ("cone", False, False), "point": ("vector", False, False)},
    "conjugate": {"f": ("expr", False, True), "at": ("vector", True, False)},
    "coderivative": {"map": ("map", False, True), "a": ("vector", False, True), "b": ("vector", False, True),
                     "h": ("vector", False, True)},
}


class ParseError(InputError):
    """A problem-file diagnostic carrying a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message, self.line, self.column = message, line, column


@dataclass
class _Node:
    """An s-expression: ``atom`` for a literal, ``items`` for a list."""

    line: int
    column: int
    atom: str | None = None
    items: list = field(default_factory=list)

    def fail(self, message: str):
        raise ParseError(message, self.line, self.column)


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _read_sexpr(text: str, line: int, start_col: int) -> _Node:
    pos = 0
    stack: list[_Node] = []
    result = None

    def col():
        return start_col + pos

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        tok_col = start_col + m.start(m.lastindex)
        pos = m.end()
        if m.group(1):
            node = _Node(line, tok_col)
            if stack:
                stack[-1].items.append(node)
            elif result is not None:
                raise ParseError("unexpected text after value", line, tok_col)
            stack.append(node)
        elif m.group(2):
            if not stack:
                raise ParseError("unbalanced ')'", line, tok_col)
            node = stack.pop()
            if not stack:
                result = node
        else:
            node = _Node(line, tok_col, atom=m.group(3))
            if stack:
                stack[-1].items.append(node)
            elif result is None:
                result = node
            else:
                raise ParseError("unexpected text after value", line, tok_col)
    if stack:
        raise ParseError("missing ')'", line, col())
    if result is None:
        raise ParseError("missing value", line, col())
    return result


# -- value decoders -----------------------------------------------------------

def _number(node: _Node) -> Fraction:
    if node.atom is None:
        node.fail("expected a number")
    try:
        return rational(node.atom)
    except InputError as exc:
        node.fail(str(exc))


def _integer(node: _Node) -> int:
    q = _number(node)
    if q.denominator != 1 or q < 0:
        node.fail("expected a nonnegative integer")
    return int(q)


def _vector(node: _Node) -> tuple:
    if node.atom is not None:
        node.fail("expected a parenthesized vector")
    return tuple(_number(x) for x in node.items)


def _head(node: _Node, *names):
    if node.atom is not None or not node.items or node.items[0].atom is None:
        node.fail(f"expected ({' | '.join(names)} ...)")
    head = node.items[0].atom
    if head not in names:
        node.items[0].fail(f"unknown form {head!r}; expected one of {', '.join(names)}")
    return head, node.items[1:]


def _matrix(node: _Node) -> LinearMap:
    _, rows = _head(node, "matrix")
    vals = [_vector(r) for r in rows]
    if not vals or any(len(r) != len(vals[0]) for r in vals):
        node.fail("matrix rows must be nonempty and of equal length")
    try:
        return LinearMap.from_rows(vals)
    except InputError as exc:
        node.fail(str(exc))


def _poly(node: _Node) -> Polyhedron:
    _, args = _head(node, "poly")
    if not args:
        node.fail("(poly n ...) needs a dimension")
    n = _integer(args[0])
    ineqs, eqs = [], []
    for row in args[1:]:
        kind, parts = _head(row, "le", "eq")
        if len(parts) != 2:
            row.fail(f"({kind} (a..) b) takes a vector and a number")
        a, b = _vector(parts[0]), _number(parts[1])
        if len(a) != n:
            parts[0].fail(f"row of length {len(a)} in a polyhedron of dimension {n}")
        (ineqs if kind == "le" else eqs).append((a, b))
    return Polyhedron(n, tuple(ineqs), tuple(eqs))


def _cone(node: _Node) -> Cone:
    _, args = _head(node, "cone")
    if not args:
        node.fail("(cone m ...) needs a dimension")
    m = _integer(args[0])
    gens = []
    for g in args[1:]:
        _, parts = _head(g, "gen")
        if len(parts) != 1:
            g.fail("(gen (g..)) takes one vector")
        v = _vector(parts[0])
        if len(v) != m:
            parts[0].fail(f"generator of length {len(v)} for a cone in R^{m}")
        gens.append(v)
    return Cone.from_generators(m, gens)


def _map(node: _Node) -> SetValuedMap:
    _, args = _head(node, "map")
    if len(args) != 3:
        node.fail("(map n_in n_out POLY) takes three arguments")
    n, m, P = _integer(args[0]), _integer(args[1]), _poly(args[2])
    try:
        return SetValuedMap(n, m, P)
    except InputError as exc:
        node.fail(str(exc))


def _expr(node: _Node) -> ConvexExpr:
    head, args = _head(node, "affine", "maxaffine", "indicator", "sum", "max", "scale", "compose")
    try:
        if head == "affine":
            if len(args) != 2:
                node.fail("(affine (c..) c0) takes a vector and a number")
            return Affine(_vector(args[0]), _number(args[1]))
        if head == "maxaffine":
            pieces = []
            for p in args:
                if p.atom is not None or len(p.items) != 2:
                    p.fail("expected a piece ((a..) b)")
                pieces.append((_vector(p.items[0]), _number(p.items[1])))
            return MaxAffine(tuple(pieces))
        if head == "indicator":
            if len(args) != 1:
                node.fail("(indicator POLY) takes one polyhedron")
            return Indicator(_poly(args[0]))
        if head == "sum":
            if len(args) != 2:
                node.fail("(sum E E) takes two expressions")
            return Sum(_expr(args[0]), _expr(args[1]))
        if head == "max":
            return Max(tuple(_expr(a) for a in args))
        if head == "scale":
            if len(args) != 2:
                node.fail("(scale t E) takes a number and an expression")
            return ScaleNonneg(_number(args[0]), _expr(args[1]))
        if len(args) != 2:
            node.fail("(compose E MATRIX) takes an expression and a matrix")
        return PreComposeLinear(_expr(args[0]), _matrix(args[1]))
    except ParseError:
        raise
    except (InputError, ImproperError) as exc:
        node.fail(str(exc))


_DECODERS = {"expr": _expr, "poly": _poly, "cone": _cone, "matrix": _matrix, "map": _map, "vector": _vector}


# -- printing -------------------------------------------------------------------

def _fmt_vec(v) -> str:
    return "(" + " ".join(fmt(x) for x in v) + ")"


def format_poly(P: Polyhedron) -> str:
    rows = [f"(le {_fmt_vec(a)} {fmt(o)})" for a, o in P.ineqs] + [f"(eq {_fmt_vec(a)} {fmt(o)})" for a, o in P.eqs]
    return f"(poly {P.dim}" + "".join(" " + r for r in rows) + ")"


def format_matrix(M: LinearMap) -> str:
    return "(matrix " + " ".join(_fmt_vec(r) for r in M.entries) + ")"


def format_cone(C: Cone) -> str:
    return f"(cone {C.dim}" + "".join(f" (gen {_fmt_vec(g)})" for g in C.generators) + ")"


def format_map(G: SetValuedMap) -> str:
    return f"(map {G.n_in} {G.n_out} {format_poly(G.graph)})"


def format_expr(f: ConvexExpr) -> str:
    if isinstance(f, Affine):
        return f"(affine {_fmt_vec(f.slope)} {fmt(f.offset)})"
    if isinstance(f, MaxAffine):
        return "(maxaffine " + " ".join(f"({_fmt_vec(a)} {fmt(b)})" for a, b in f.pieces) + ")"
    if isinstance(f, Indicator):
        return f"(indicator {format_poly(f.set)})"
    if isinstance(f, Sum):
        return f"(sum {format_expr(f.left)} {format_expr(f.right)})"
    if isinstance(f, Max):
        return "(max " + " ".join(format_expr(c) for c in f.children) + ")"
    if isinstance(f, ScaleNonneg):
        return f"(scale {fmt(f.factor)} {format_expr(f.inner)})"
    if isinstance(f, PreComposeLinear):
        return f"(compose {format_expr(f.inner)} {format_matrix(f.map)})"
    raise InputError(f"cannot print {type(f).__name__}")


_FORMATTERS = {"expr": format_expr, "poly": format_poly, "cone": format_cone, "matrix": format_matrix,
               "map": format_map, "vector": _fmt_vec}


# -- files ------------------------------------------------------------------------

@dataclass(eq=False)
class ProblemFile:
    """A parsed problem: ``fields`` maps keys to decoded values (lists for repeatable keys)."""

    kind: str
    fields: dict
    version: int = VERSION

    def __eq__(self, other):
        # expression nodes compare by identity, so structure is compared through the canonical text
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return format_problem(self) == format_problem(other)

    def problem(self):
        """The in-memory problem object for this file's kind."""
        f = self.fields
        try:
            if self.kind == "fenchel":
                A = f.get("A") or LinearMap.identity(f["phi"].dim)
                return FenchelProblem(f["phi"], f["psi"], A)
            if self.kind == "lagrange":
                region = f.get("region") or Polyhedron.universe(f["phi"].dim)
                return ConeProgram(f["phi"], tuple(f["psi"]), region, f.get("cone"))
            if self.kind == "conjugate":
                return f["f"]
            return f["map"]
        except InputError as exc:
            raise InputError(f"{self.kind} problem: {exc}") from exc


def parse_problem(text: str) -> ProblemFile:
    """Parse and validate a problem file; errors are :class:`ParseError` with line/column."""
    version = kind = None
    kind_line = 1
    values: dict = {}
    where: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        key, _, rest = stripped.partition(" ")
        col0 = line.index(key) + 1
        rest_col = col0 + len(key) + 1 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        if version is None:
            if key != "version":
                raise ParseError("file must start with 'version <n>'", lineno, col0)
            if not rest.isdigit() or int(rest) != VERSION:
                raise ParseError(f"unsupported version {rest!r} (expected {VERSION})", lineno, rest_col)
            version = int(rest)
            continue
        if kind is None:
            if key != "kind":
                raise ParseError("second line must be 'kind <name>'", lineno, col0)
            if rest not in KINDS:
                raise ParseError(f"unknown kind {rest!r}; expected one of {', '.join(KINDS)}", lineno, rest_col)
            kind, kind_line = rest, lineno
            continue
        spec = _FIELDS[kind].get(key)
        if spec is None:
            raise ParseError(f"unknown field {key!r} for kind {kind}", lineno, col0)
        typ, repeat, _ = spec
        if not rest:
            raise ParseError(f"field {key!r} needs a value", lineno, rest_col)
        node = _read_sexpr(rest, lineno, rest_col)
        value = _DECODERS[typ](node)
        where[key] = (lineno, rest_col)
        if repeat:
            values.setdefault(key, []).append(value)
        elif key in values:
            raise ParseError(f"field {key!r} given twice", lineno, col0)
        else:
            values[key] = value
    if version is None or kind is None:
        raise ParseError("missing 'version' or 'kind' header", 1, 1)
    for key, (_, _, required) in _FIELDS[kind].items():
        if required and key not in values:
            raise ParseError(f"missing required field {key!r}", 1, 1)
    pf = ProblemFile(kind, values, version)
    try:
        pf.problem()
    except InputError as exc:
        # cross-field checks (e.g. matrix shape against the functions) point at the last field read
        line, col = max(where.values(), default=(kind_line, 1))
        raise ParseError(str(exc), line, col) from exc
    return pf


def format_problem(pf: ProblemFile) -> str:
    """Canonical text for ``pf``; ``parse_problem(format_problem(p)) == p``."""
    lines = [f"version {pf.version}", f"kind {pf.kind}"]
    for key, (typ, repeat, _) in _FIELDS[pf.kind].items():
        if key not in pf.fields:
            continue
        vals = pf.fields[key] if repeat else [pf.fields[key]]
        lines += [f"{key} {_FORMATTERS[typ](v)}" for v in vals]
    return "\n".join(lines) + "\n"
