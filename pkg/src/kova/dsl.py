"""The ``.kova`` text format for polynomial systems and tensor fields.

System files::

    # comment
    params { a = 1, e = 7/10 }
    weights = [1, 1, 0]        # optional
    degree = 2                 # optional
    x' = a*(y - x*y + x - e*x*z)
    y' = -y - x*y
    z' = x - e*x*z - z

Precedence is ``^`` > unary minus > ``* /`` > ``+ -``; ``^`` takes a
nonnegative integer literal; ``/`` is only allowed by a constant.  Decimal
literals need float mode.

Tensor files hold ``T = <terms>`` with basis factors ``d/dx`` (vectors) and
``dx`` (covectors) joined by ``@`` (or ``⊗``), e.g. ``T = x d/dx @ dy``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (DuplicateEquation, LexicalError, NonPolynomial, ParseError, SyntaxError_,
                     UndeclaredIdentifier)
from .polyalg import Polynomial, VectorField, format_scalar
from .tensorfield import TensorField, TensorType

# -- AST ------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: object                       # int or float literal
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass
class SystemSpec:
    names: tuple
    equations: tuple                    # AST per variable, declaration order
    params: dict = field(default_factory=dict)
    weights: tuple | None = None
    degree: int | None = None
    mode: str = "exact"

    @property
    def n(self):
        return len(self.names)

    def __eq__(self, other):
        return (isinstance(other, SystemSpec) and self.names == other.names
                and self.equations == other.equations and self.params == other.params
                and self.weights == other.weights and self.degree == other.degree
                and self.mode == other.mode)


# -- lexer ------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>\d+\.\d*(?:[eE][-+]?\d+)?|\d*\.\d+(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()\[\]{},=']|@|⊗)
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def pos(self):
        return (self.line, self.col)


def tokenize(text: str, float_mode: bool = False) -> list:
    toks = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        col = i - line_start + 1
        if not m:
            raise LexicalError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "newline":
            toks.append(Token("newline", s, line, col))
            line += 1
            line_start = m.end()
        elif kind == "number":
            if not re.fullmatch(r"\d+", s) and not float_mode:
                raise LexicalError(f"decimal literal {s!r} needs float mode", line, col)
            toks.append(Token("number", s, line, col))
        elif kind in ("ident", "op"):
            toks.append(Token(kind, "@" if s == "⊗" else s, line, col))
        i = m.end()
    toks.append(Token("eof", "", line, i - line_start + 1))
    return toks


def _literal(text: str):
    return int(text) if re.fullmatch(r"\d+", text) else float(text)


# -- parser -------------------------------------------------------------------------


class _Parser:
    def __init__(self, toks, stop_kinds=()):
        self.toks = toks
        self.i = 0
        self.depth = 0
        self.stop_kinds = stop_kinds    # token kinds that end a coefficient (tensor mode)

    def peek(self, k=0):
        j = self.i
        seen = 0
        while True:
            t = self.toks[j]
            if t.kind == "newline" and self.depth > 0:
                j += 1
                continue
            if seen == k:
                return t
            seen += 1
            j += 1

    def next(self):
        while self.toks[self.i].kind == "newline" and self.depth > 0:
            self.i += 1
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text, what=None):
        t = self.next()
        if t.text != text or t.kind not in ("op", "ident"):
            raise SyntaxError_(f"expected {what or repr(text)}, found {t.text or 'end of input'!r}",
                               t.line, t.col)
        return t

    def skip_newlines(self):
        while self.toks[self.i].kind == "newline":
            self.i += 1

    def at(self, text):
        t = self.peek()
        return t.kind == "op" and t.text == text

    # expr := term (('+'|'-') term)*
    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            t = self.next()
            node = BinOp(t.text, node, self.term(), t.pos)
        return node

    # term := unary (('*'|'/') unary)*
    def term(self):
        node = self.unary()
        while (self.at("*") or self.at("/")) and self.peek(1).kind not in self.stop_kinds:
            t = self.next()
            node = BinOp(t.text, node, self.unary(), t.pos)
        return node

    # unary := '-' unary | '+' unary | power
    def unary(self):
        if self.at("-"):
            t = self.next()
            return Neg(self.unary(), t.pos)
        if self.at("+"):
            self.next()
            return self.unary()
        return self.power()

    # power := atom ('^' INT)?
    def power(self):
        base = self.atom()
        if self.at("^"):
            t = self.next()
            e = self.next()
            if e.kind != "number" or not e.text.isdigit():
                raise SyntaxError_("exponent must be a nonnegative integer literal", e.line, e.col)
            return Pow(base, int(e.text), t.pos)
        return base

    def atom(self):
        t = self.next()
        if t.kind == "number":
            return Num(_literal(t.text), t.pos)
        if t.kind == "ident":
            return Var(t.text, t.pos)
        if t.kind == "op" and t.text == "(":
            self.depth += 1
            node = self.expr()
            self.expect(")")
            self.depth -= 1
            return node
        raise SyntaxError_(f"unexpected {t.text or 'end of input'!r}", t.line, t.col)


def _end_of_statement(p: _Parser):
    t = p.next()
    if t.kind not in ("newline", "eof"):
        raise SyntaxError_(f"unexpected {t.text!r} after statement", t.line, t.col)


def _const_value(node, params, float_mode, what):
    poly = to_polynomial(node, {}, params, not float_mode)
    if not poly.is_constant():
        raise SyntaxError_(f"{what} must be a constant", *node.pos)
    return poly.constant_term()


def _int_literal(p: _Parser, what):
    neg = False
    if p.at("-"):
        p.next()
        neg = True
    t = p.next()
    if t.kind != "number" or not t.text.isdigit():
        raise SyntaxError_(f"{what} must be an integer", t.line, t.col)
    return -int(t.text) if neg else int(t.text)


def parse_system(text: str, float_mode: bool = False) -> SystemSpec:
    toks = tokenize(text, float_mode)
    p = _Parser(toks)
    names, eqs, eq_pos = [], [], {}
    params: dict = {}
    weights = degree = None
    while True:
        p.skip_newlines()
        t = p.peek()
        if t.kind == "eof":
            break
        if t.kind != "ident":
            raise SyntaxError_(f"expected a statement, found {t.text!r}", t.line, t.col)
        if t.text == "params" and p.peek(1).text == "{":
            p.next()
            p.expect("{")
            p.depth += 1
            while not p.at("}"):
                nt = p.next()
                if nt.kind != "ident":
                    raise SyntaxError_("expected a parameter name", nt.line, nt.col)
                if nt.text in params:
                    raise DuplicateEquation(f"parameter {nt.text!r} defined twice", nt.line, nt.col)
                p.expect("=")
                node = p.expr()
                params[nt.text] = _const_value(node, params, float_mode, "parameter value")
                if not p.at("}"):
                    p.expect(",", "',' or '}'")
            p.expect("}")
            p.depth -= 1
            _end_of_statement(p)
            continue
        if t.text == "weights" and p.peek(1).text == "=":
            p.next(), p.next()
            p.expect("[")
            p.depth += 1
            ws = [_int_literal(p, "weight")]
            while p.at(","):
                p.next()
                ws.append(_int_literal(p, "weight"))
            p.expect("]")
            p.depth -= 1
            weights = tuple(ws)
            _end_of_statement(p)
            continue
        if t.text == "degree" and p.peek(1).text == "=":
            p.next(), p.next()
            degree = _int_literal(p, "degree")
            _end_of_statement(p)
            continue
        name = p.next()
        p.expect("'", "' after the variable name")
        p.expect("=")
        if name.text in eq_pos:
            raise DuplicateEquation(f"second equation for {name.text!r} (first on line "
                                    f"{eq_pos[name.text][0]})", name.line, name.col)
        eq_pos[name.text] = name.pos
        names.append(name.text)
        eqs.append(p.expr())
        _end_of_statement(p)
    if not names:
        raise SyntaxError_("no equations found", 1, 1)
    for nm in names:
        if nm in params:
            line, col = eq_pos[nm]
            raise DuplicateEquation(f"{nm!r} is both a variable and a parameter", line, col)
    known = set(names) | set(params)
    for node in eqs:
        _check_identifiers(node, known)
    if weights is not None and len(weights) != len(names):
        raise SyntaxError_(f"weights list has {len(weights)} entries for {len(names)} variables",
                           1, 1)
    spec = SystemSpec(tuple(names), tuple(eqs), params, weights, degree,
                      "float" if float_mode else "exact")
    to_vector_field(spec)           # surfaces division-by-variable errors at parse time
    return spec


def _walk(node):
    yield node
    for child in _children(node):
        yield from _walk(child)


def _children(node):
    if isinstance(node, Neg):
        return (node.operand,)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Pow):
        return (node.base,)
    return ()


def _check_identifiers(node, known):
    for sub in _walk(node):
        if isinstance(sub, Var) and sub.name not in known:
            raise UndeclaredIdentifier(f"undeclared identifier {sub.name!r}", *sub.pos)


def to_polynomial(node, index: dict, params: dict, exact: bool = True) -> Polynomial:
    """Evaluate an AST to a polynomial in ``len(index)`` variables."""
    n = len(index)
    if isinstance(node, Num):
        v = node.value
        if exact and isinstance(v, float):
            raise LexicalError("decimal literal needs float mode", *node.pos)
        return Polynomial.constant(n, Fraction(v) if exact else float(v), exact)
    if isinstance(node, Var):
        if node.name in index:
            return Polynomial.variable(n, index[node.name], exact)
        if node.name in params:
            v = params[node.name]
            return Polynomial.constant(n, Fraction(v) if exact else float(v), exact)
        raise UndeclaredIdentifier(f"undeclared identifier {node.name!r}", *node.pos)
    if isinstance(node, Neg):
        return -to_polynomial(node.operand, index, params, exact)
    if isinstance(node, Pow):
        return to_polynomial(node.base, index, params, exact) ** node.exp
    if isinstance(node, BinOp):
        a = to_polynomial(node.left, index, params, exact)
        b = to_polynomial(node.right, index, params, exact)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if not b.is_constant():
                raise NonPolynomial("division by a non-constant expression", *node.pos)
            c = b.constant_term()
            if c == 0:
                raise NonPolynomial("division by zero", *node.pos)
            return a.scale(1 / c)
    raise ParseError(f"unknown node {node!r}")


def to_vector_field(spec: SystemSpec) -> VectorField:
    exact = spec.mode == "exact"
    index = {nm: i for i, nm in enumerate(spec.names)}
    return VectorField([to_polynomial(e, index, spec.params, exact) for e in spec.equations])


# -- printer --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def format_expr(node) -> str:
    if isinstance(node, Num):
        return str(node.value) if isinstance(node.value, int) else repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = format_expr(node.operand)
        return f"-({inner})" if _prec(node.operand) < 3 else f"-{inner}"
    if isinstance(node, Pow):
        base = format_expr(node.base)
        return f"({base})^{node.exp}" if _prec(node.base) < 5 else f"{base}^{node.exp}"
    p = _PREC[node.op]
    left = format_expr(node.left)
    right = format_expr(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def format_system(spec: SystemSpec) -> str:
    lines = []
    if spec.params:
        body = ", ".join(f"{k} = {_fmt_param(v)}" for k, v in spec.params.items())
        lines.append(f"params {{ {body} }}")
    if spec.weights is not None:
        lines.append("weights = [" + ", ".join(str(w) for w in spec.weights) + "]")
    if spec.degree is not None:
        lines.append(f"degree = {spec.degree}")
    for nm, e in zip(spec.names, spec.equations):
        lines.append(f"{nm}' = {format_expr(e)}")
    return "\n".join(lines) + "\n"


def _fmt_param(v):
    return repr(float(v)) if isinstance(v, float) else format_scalar(Fraction(v))


# -- tensors ----------------------------------------------------------------------------


def _mark_basis(toks, names):
    """Rewrite ``d / dX`` into an ``up`` token and ``dX`` into a ``down`` token."""
    declared = set(names)
    out = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if (t.kind == "ident" and t.text == "d" and i + 2 < len(toks) and toks[i + 1].text == "/"
                and toks[i + 2].kind == "ident" and toks[i + 2].text[:1] == "d"
                and toks[i + 2].text[1:] in declared):
            out.append(Token("up", toks[i + 2].text[1:], t.line, t.col))
            i += 3
            continue
        if (t.kind == "ident" and t.text not in declared and t.text[:1] == "d"
                and t.text[1:] in declared):
            out.append(Token("down", t.text[1:], t.line, t.col))
            i += 1
            continue
        out.append(t)
        i += 1
    return out


def parse_tensor(text: str, spec: SystemSpec) -> TensorField:
    """Parse ``T = ...`` against the variables and parameters of ``spec``."""
    float_mode = spec.mode == "float"
    toks = _mark_basis(tokenize(text, float_mode), spec.names)
    p = _Parser(toks, stop_kinds=("up", "down"))
    p.skip_newlines()
    head = p.next()
    if head.kind != "ident":
        raise SyntaxError_("expected 'NAME = ...'", head.line, head.col)
    p.expect("=")
    index = {nm: i for i, nm in enumerate(spec.names)}
    known = set(spec.names) | set(spec.params)
    exact = not float_mode
    n = len(spec.names)
    terms = []
    sign = 1
    if p.at("+") or p.at("-"):
        sign = -1 if p.next().text == "-" else 1
    while True:
        t = p.peek()
        coef = Polynomial.constant(n, 1, exact)
        if t.kind not in ("up", "down"):
            node = p.term()
            _check_identifiers(node, known)
            coef = to_polynomial(node, index, spec.params, exact)
            if p.at("*") and p.peek(1).kind in ("up", "down"):
                p.next()
        ups, downs = [], []
        while p.peek().kind in ("up", "down"):
            b = p.next()
            if b.kind == "up":
                if downs:
                    raise SyntaxError_("vector factors must precede covector factors",
                                       b.line, b.col)
                ups.append(index[b.text])
            else:
                downs.append(index[b.text])
            if p.at("@"):
                p.next()
                if p.peek().kind not in ("up", "down"):
                    nt = p.peek()
                    raise SyntaxError_("expected a basis factor after '@'", nt.line, nt.col)
            else:
                break
        terms.append((tuple(ups), tuple(downs), coef.scale(sign), t))
        nt = p.peek()
        if nt.kind in ("newline", "eof"):
            break
        if not (p.at("+") or p.at("-")):
            raise SyntaxError_(f"unexpected {nt.text!r} in tensor", nt.line, nt.col)
        sign = -1 if p.next().text == "-" else 1
    types = {(len(u), len(d)) for u, d, _, _ in terms}
    if len(types) != 1:
        t = terms[-1][3]
        raise SyntaxError_("terms have different tensor types", t.line, t.col)
    pq = types.pop()
    comps: dict = {}
    for u, d, c, _ in terms:
        key = u + d
        comps[key] = comps[key] + c if key in comps else c
    return TensorField(n, TensorType(*pq), comps, exact)


def format_tensor(T: TensorField, names) -> str:
    return f"T = {T.to_str(names)}\n"


def load_system(path, float_mode: bool = False) -> SystemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read(), float_mode)


def load_tensor(path, spec: SystemSpec) -> TensorField:
    with open(path, encoding="utf-8") as fh:
        return parse_tensor(fh.read(), spec)
