"""Reader and writer for the line-oriented problem-file format.

Abs-normal problems::

    problem ex
    vars t[3]
    switch z[1]
      z1 = t1 - t2
    obj: t1 + t2 - t3
    eq: t1 + t2 - abs(z1)
    ineq: 4*t1 - t3

Complementarity programs carry an ``mpcc`` section listing the pairs and
declare their own variable groups (``vars t[3] u[1] v[1]``); they have no
``switch`` section.  ``#`` starts a comment.  Indices in files are 1-based.
"""

from __future__ import annotations

import re
from typing import Optional

from .errors import DimensionError, ParseError, TriangularityError, UnknownIdentifierError
from .expr import (FUNCTIONS, AbsRef, Add, Const, Div, Func, Mul, Neg, Pow,
                   SmoothFunction, Sub, Var)

__all__ = ["parse_problem", "dump_problem", "format_expr", "parse_expr"]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)
_VARNAME = re.compile(r"^([a-z]+)(\d+)$")
_GROUP_DECL = re.compile(r"^([a-y])\[(\d+)\]$")


class _Scope:
    """What an expression may reference."""

    def __init__(self, groups, n_abs, max_abs=None, allow_abs=True, line=None):
        self.groups = groups              # name -> size
        self.n_abs = n_abs
        self.max_abs = n_abs if max_abs is None else max_abs
        self.allow_abs = allow_abs
        self.line = line


class _ExprParser:
    def __init__(self, text, scope, line=None, col0=0):
        self.text = text
        self.scope = scope
        self.line = line
        self.col0 = col0
        self.toks = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            mt = _TOKEN.match(text, pos)
            if mt is None or mt.end() == pos:
                self._fail(f"unexpected character {text[pos]!r}", pos)
            kind = mt.lastgroup
            start = mt.start(kind)
            self.toks.append((kind, mt.group(kind), start))
            pos = mt.end()
        self.i = 0

    def _fail(self, msg, pos=None, cls=ParseError):
        col = None if pos is None else self.col0 + pos + 1
        raise cls(msg, self.line, col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            self._fail(f"expected {value!r}, found {val!r}" if val else f"expected {value!r}", pos)

    def parse(self):
        if not self.toks:
            self._fail("empty expression", 0)
        node = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            self._fail(f"unexpected token {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            # "-<number>" is a negative literal unless the number is a power base
            nxt = self.toks[self.i + 1][1] if self.i + 1 < len(self.toks) else None
            if self.peek()[0] == "num" and nxt not in ("^", "**"):
                return Const(-float(self.take()[1]))
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            base = Pow(base, self.int_exponent())
        return base

    def int_exponent(self):
        kind, val, pos = self.take()
        sign = 1
        paren = False
        if val == "(":
            paren = True
            kind, val, pos = self.take()
        if val == "-":
            sign = -1
            kind, val, pos = self.take()
        if kind != "num" or not val.isdigit():
            self._fail("exponent must be an integer literal", pos)
        if paren:
            self.expect(")")
        return sign * int(val)

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(val, arg)
            if val == "abs":
                return self.abs_ref(pos)
            return self.variable(val, pos)
        if kind is None:
            self._fail("unexpected end of expression", pos)
        self._fail(f"unexpected token {val!r}", pos)

    def abs_ref(self, pos):
        self.expect("(")
        kind, val, vpos = self.take()
        mt = _VARNAME.match(val or "") if kind == "ident" else None
        if mt is None or mt.group(1) != "z":
            self._fail("abs() accepts only a switching variable z<j>", vpos)
        self.expect(")")
        j = int(mt.group(2))
        sc = self.scope
        if not sc.allow_abs:
            self._fail("abs() is not allowed in the objective", pos)
        if j < 1 or j > sc.n_abs:
            self._fail(f"switching index z{j} outside 1..{sc.n_abs}", vpos, DimensionError)
        if j > sc.max_abs:
            self._fail(f"z{sc.max_abs + 1} may only reference abs(z_j) with j < "
                       f"{sc.max_abs + 1}, found abs(z{j})", vpos, TriangularityError)
        return AbsRef(j - 1)

    def variable(self, name, pos):
        mt = _VARNAME.match(name)
        if mt is None:
            self._fail(f"unknown identifier {name!r}", pos, UnknownIdentifierError)
        group, idx = mt.group(1), int(mt.group(2))
        if group == "z":
            self._fail(f"switching variable {name} may only appear as abs({name})", pos)
        if group not in self.scope.groups:
            self._fail(f"unknown identifier {name!r}", pos, UnknownIdentifierError)
        size = self.scope.groups[group]
        if idx < 1 or idx > size:
            self._fail(f"{name} outside {group}1..{group}{size}", pos, DimensionError)
        return Var(group, idx - 1)


def parse_expr(text, groups, n_abs=0, max_abs=None, allow_abs=True):
    """Parse a single expression; ``groups`` maps group names to sizes."""
    return _ExprParser(text, _Scope(dict(groups), n_abs, max_abs, allow_abs)).parse()


def parse_problem(text: str):
    """Parse a problem file.

    Returns an :class:`~kinkcheck.absnormal.AbsNormalProblem`, or a
    :class:`~kinkcheck.reform.MpccProblem` when an ``mpcc`` section is
    present.
    """
    from .absnormal import AbsNormalProblem
    from .reform import MpccProblem

    name = None
    layout: Optional[list] = None
    s = 0
    switch_line = None
    zdefs = {}
    obj = None
    eqs, ineqs, pairs = [], [], []
    in_switch = in_mpcc = has_mpcc = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        head = body.split(None, 1)[0]

        if head == "problem":
            parts = body.split()
            if len(parts) != 2:
                raise ParseError("expected 'problem <name>'", lineno, indent + 1)
            name = parts[1]
            in_switch = in_mpcc = False
        elif head == "vars":
            if layout is not None:
                raise ParseError("duplicate 'vars' line", lineno, indent + 1)
            layout = []
            for decl in body.split()[1:]:
                mt = _GROUP_DECL.match(decl)
                if mt is None:
                    raise ParseError(f"bad variable declaration {decl!r}", lineno,
                                     indent + body.index(decl) + 1)
                if any(g == mt.group(1) for g, _ in layout):
                    raise ParseError(f"duplicate group {mt.group(1)!r}", lineno)
                layout.append((mt.group(1), int(mt.group(2))))
            if not layout:
                raise ParseError("'vars' declares no variables", lineno, indent + 1)
            in_switch = in_mpcc = False
        elif head == "switch":
            mt = re.match(r"^switch\s+z\[(\d+)\]$", body)
            if mt is None:
                raise ParseError("expected 'switch z[<s>]'", lineno, indent + 1)
            if switch_line is not None:
                raise ParseError("duplicate 'switch' section", lineno, indent + 1)
            s = int(mt.group(1))
            switch_line = lineno
            in_switch, in_mpcc = True, False
        elif body == "mpcc":
            in_mpcc, in_switch, has_mpcc = True, False, True
        elif re.match(r"^z\d+\s*=", body):
            if not in_switch:
                raise ParseError("switching definition outside 'switch' section", lineno,
                                 indent + 1)
            lhs, rhs = body.split("=", 1)
            i = int(lhs.strip()[1:])
            if i < 1 or i > s:
                raise DimensionError(f"z{i} outside z1..z{s}", lineno, indent + 1)
            if i in zdefs:
                raise ParseError(f"z{i} defined twice", lineno, indent + 1)
            zdefs[i] = (rhs, lineno, indent + len(lhs) + 1)
        elif ":" in body and body.split(":", 1)[0].strip() in ("obj", "eq", "ineq", "pair"):
            key, rest = body.split(":", 1)
            key = key.strip()
            col0 = indent + len(key) + 1
            if key == "pair":
                if not in_mpcc:
                    raise ParseError("'pair' outside 'mpcc' section", lineno, indent + 1)
                pairs.append((rest, lineno, col0))
                continue
            in_switch = False
            if in_mpcc:
                raise ParseError(f"'{key}' inside 'mpcc' section", lineno, indent + 1)
            entry = (rest, lineno, col0)
            if key == "obj":
                if obj is not None:
                    raise ParseError("duplicate objective", lineno, indent + 1)
                obj = entry
            elif key == "eq":
                eqs.append(entry)
            else:
                ineqs.append(entry)
        else:
            raise ParseError(f"unrecognized line {body!r}", lineno, indent + 1)

    if layout is None:
        raise ParseError("missing 'vars' line")
    if obj is None:
        raise ParseError("missing objective 'obj:'")
    if name is None:
        name = "unnamed"
    groups = dict(layout)
    if has_mpcc and switch_line is not None:
        raise ParseError("a file may not have both 'switch' and 'mpcc' sections", switch_line)
    missing = [i for i in range(1, s + 1) if i not in zdefs]
    if missing:
        raise DimensionError(f"missing switching definition(s) z{missing[0]}", switch_line)

    def parse_rows(entries, n_abs, allow_abs=True):
        out = []
        for rest, ln, col0 in entries:
            sc = _Scope(groups, n_abs, allow_abs=allow_abs, line=ln)
            out.append(_ExprParser(rest, sc, ln, col0).parse())
        return tuple(out)

    lay = tuple(layout)
    f_row = parse_rows([obj], 0, allow_abs=False)
    f = SmoothFunction(f_row, lay, 0)
    if has_mpcc:
        return MpccProblem(
            name=name, layout=lay, f=f,
            eq=SmoothFunction(parse_rows(eqs, 0), lay, 0),
            ineq=SmoothFunction(parse_rows(ineqs, 0), lay, 0),
            pairs=tuple(_parse_pair(p, groups, layout) for p in pairs),
        )

    zrows = []
    for i in range(1, s + 1):
        rest, ln, col0 = zdefs[i]
        sc = _Scope(groups, s, max_abs=i - 1, line=ln)
        zrows.append(_ExprParser(rest, sc, ln, col0).parse())
    return AbsNormalProblem(
        name=name, layout=lay, f=f,
        cE=SmoothFunction(parse_rows(eqs, s), lay, s),
        cI=SmoothFunction(parse_rows(ineqs, s), lay, s),
        cZ=SmoothFunction(tuple(zrows), lay, s),
    )


def _parse_pair(entry, groups, layout):
    rest, ln, col0 = entry
    parts = rest.split()
    if len(parts) != 2:
        raise ParseError("expected 'pair: <var> <var>'", ln, col0 + 1)
    offsets, k = {}, 0
    for g, size in layout:
        offsets[g] = k
        k += size
    flat = []
    for p in parts:
        mt = _VARNAME.match(p)
        if mt is None or mt.group(1) not in groups:
            raise UnknownIdentifierError(f"unknown identifier {p!r}", ln, col0 + rest.index(p) + 1)
        idx = int(mt.group(2))
        if idx < 1 or idx > groups[mt.group(1)]:
            raise DimensionError(f"{p} outside declared range", ln, col0 + rest.index(p) + 1)
        flat.append(offsets[mt.group(1)] + idx - 1)
    return tuple(flat)


# ---------------------------------------------------------------------------
# writer

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _fmt_num(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _prec(node):
    if isinstance(node, Const):
        return 3 if _fmt_num(node.value).startswith("-") else 5
    return _PREC.get(type(node), 5)


def format_expr(node) -> str:
    """Render an expression so that parsing the text gives ``node`` back."""
    t = type(node)
    if t is Const:
        return _fmt_num(node.value)
    if t is Var:
        return f"{node.group}{node.index + 1}"
    if t is AbsRef:
        return f"abs(z{node.index + 1})"
    if t is Func:
        return f"{node.name}({format_expr(node.arg)})"
    if t is Neg:
        inner = format_expr(node.arg)
        if _prec(node.arg) < 4 or isinstance(node.arg, Const):
            inner = f"({inner})"
        return "-" + inner
    if t is Pow:
        base = format_expr(node.base)
        if _prec(node.base) < 5:
            base = f"({base})"
        k = node.exponent
        return f"{base}^{k}" if k >= 0 else f"{base}^({k})"
    p = _PREC[t]
    left = format_expr(node.left)
    if _prec(node.left) < p:
        left = f"({left})"
    right = format_expr(node.right)
    # the parser is left-associative, so equal precedence on the right needs parens
    if _prec(node.right) <= p:
        right = f"({right})"
    sym = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[t]
    return f"{left} {sym} {right}"


def dump_problem(p) -> str:
    """Serialize an abs-normal or complementarity problem to file text."""
    from .reform import MpccProblem

    lines = [f"problem {p.name}",
             "vars " + " ".join(f"{g}[{n}]" for g, n in p.layout)]
    if isinstance(p, MpccProblem):
        lines.append(f"obj: {format_expr(p.f.rows[0])}")
        lines += [f"eq: {format_expr(r)}" for r in p.eq.rows]
        lines += [f"ineq: {format_expr(r)}" for r in p.ineq.rows]
        names = p.variable_names()
        lines.append("mpcc")
        lines += [f"  pair: {names[a]} {names[b]}" for a, b in p.pairs]
        return "\n".join(lines) + "\n"
    if p.s:
        lines.append(f"switch z[{p.s}]")
        lines += [f"  z{i + 1} = {format_expr(r)}" for i, r in enumerate(p.cZ.rows)]
    lines.append(f"obj: {format_expr(p.f.rows[0])}")
    lines += [f"eq: {format_expr(r)}" for r in p.cE.rows]
    lines += [f"ineq: {format_expr(r)}" for r in p.cI.rows]
    return "\n".join(lines) + "\n"
