"""Expression trees with exact first and second derivatives.

Expressions are immutable trees of frozen dataclasses.  Derivatives are
obtained by forward-mode propagation of second-order jets: every node
evaluates to its value, its gradient and its Hessian with respect to the
stacked input vector ``(x, m)``, where ``x`` are the primal variables and
``m`` the second-argument slots fed with ``|z|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import EvaluationError

__all__ = [
    "Expr", "Const", "Var", "AbsRef", "Neg", "Add", "Sub", "Mul", "Div",
    "Pow", "Func", "FUNCTIONS", "SmoothFunction", "Layout",
    "transform", "abs_refs", "var_refs", "const", "add_all",
]

FUNCTIONS = ("sin", "cos", "exp", "log")


class Expr:
    """Base class of expression nodes (supports ``+ - * /`` for convenience)."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k):
        return Pow(self, int(k))


def _lift(obj):
    if isinstance(obj, Expr):
        return obj
    return Const(float(obj))


@dataclass(frozen=True, eq=True, slots=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True, slots=True)
class Var(Expr):
    """Primal variable ``group[index]`` (0-based index)."""

    group: str
    index: int


@dataclass(frozen=True, eq=True, slots=True)
class AbsRef(Expr):
    """Second-argument slot ``m[index]``, i.e. ``|z_index|`` (0-based)."""

    index: int


@dataclass(frozen=True, eq=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, eq=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


def const(value):
    return Const(float(value))


def add_all(terms: Sequence[Expr]) -> Expr:
    """Left-folded sum; the empty sum is ``Const(0.0)``."""
    if not terms:
        return Const(0.0)
    out = terms[0]
    for term in terms[1:]:
        out = Add(out, term)
    return out


def transform(node: Expr, fn: Callable[[Expr], Optional[Expr]]) -> Expr:
    """Rebuild ``node`` bottom-up; ``fn`` may replace any leaf.

    ``fn`` is called on leaves (``Const``, ``Var``, ``AbsRef``) and returns a
    replacement or ``None`` to keep the leaf.
    """
    if isinstance(node, (Const, Var, AbsRef)):
        new = fn(node)
        return node if new is None else new
    if isinstance(node, Neg):
        return Neg(transform(node.arg, fn))
    if isinstance(node, Func):
        return Func(node.name, transform(node.arg, fn))
    if isinstance(node, Pow):
        return Pow(transform(node.base, fn), node.exponent)
    return type(node)(transform(node.left, fn), transform(node.right, fn))


def _walk(node):
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, (Neg, Func)):
            stack.append(cur.arg)
        elif isinstance(cur, Pow):
            stack.append(cur.base)
        elif isinstance(cur, (Add, Sub, Mul, Div)):
            stack.append(cur.left)
            stack.append(cur.right)


def abs_refs(node: Expr) -> set:
    return {n.index for n in _walk(node) if isinstance(n, AbsRef)}


def var_refs(node: Expr) -> set:
    return {(n.group, n.index) for n in _walk(node) if isinstance(n, Var)}


# ---------------------------------------------------------------------------
# forward-mode jets


class _Jet:
    """Value, gradient and Hessian; ``None`` stands for an exact zero."""

    __slots__ = ("v", "g", "h")

    def __init__(self, v, g=None, h=None):
        self.v = v
        self.g = g
        self.h = h


def _gadd(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _gscale(c, a):
    return None if a is None or c == 0.0 else c * a


def _outer_sym(a, b):
    if a is None or b is None:
        return None
    o = np.outer(a, b)
    return o + o.T


def _chain(x: _Jet, v, d1, d2, order):
    g = _gscale(d1, x.g)
    h = None
    if order >= 2:
        h = _gscale(d1, x.h)
        if x.g is not None and d2 != 0.0:
            h = _gadd(h, d2 * np.outer(x.g, x.g))
    return _Jet(v, g, h)


def _jet(node, ctx, order):
    t = type(node)
    if t is Const:
        return _Jet(node.value)
    if t is Var:
        k = ctx.var_index(node)
        return _Jet(ctx.point[k], ctx.unit(k))
    if t is AbsRef:
        k = ctx.n + node.index
        return _Jet(ctx.point[k], ctx.unit(k))
    if t is Add or t is Sub:
        a = _jet(node.left, ctx, order)
        b = _jet(node.right, ctx, order)
        if t is Sub:
            b = _Jet(-b.v, _gscale(-1.0, b.g), _gscale(-1.0, b.h))
        return _Jet(a.v + b.v, _gadd(a.g, b.g), _gadd(a.h, b.h) if order >= 2 else None)
    if t is Neg:
        a = _jet(node.arg, ctx, order)
        return _Jet(-a.v, _gscale(-1.0, a.g), _gscale(-1.0, a.h))
    if t is Mul:
        a = _jet(node.left, ctx, order)
        b = _jet(node.right, ctx, order)
        return _mul(a, b, order)
    if t is Div:
        a = _jet(node.left, ctx, order)
        b = _jet(node.right, ctx, order)
        if b.v == 0.0:
            raise EvaluationError("division by zero")
        inv = _chain(b, 1.0 / b.v, -1.0 / b.v ** 2, 2.0 / b.v ** 3, order)
        return _mul(a, inv, order)
    if t is Pow:
        a = _jet(node.base, ctx, order)
        k = node.exponent
        if k == 0:
            return _Jet(1.0)
        if k < 0 and a.v == 0.0:
            raise EvaluationError("negative power of zero")
        v = a.v ** k
        d1 = k * a.v ** (k - 1)
        d2 = k * (k - 1) * a.v ** (k - 2) if k != 1 else 0.0
        return _chain(a, v, d1, d2, order)
    if t is Func:
        a = _jet(node.arg, ctx, order)
        x = a.v
        if node.name == "sin":
            s, c = math.sin(x), math.cos(x)
            return _chain(a, s, c, -s, order)
        if node.name == "cos":
            s, c = math.sin(x), math.cos(x)
            return _chain(a, c, -s, -c, order)
        if node.name == "exp":
            e = math.exp(x)
            return _chain(a, e, e, e, order)
        if x <= 0.0:
            raise EvaluationError(f"log of nonpositive value {x!r}")
        return _chain(a, math.log(x), 1.0 / x, -1.0 / x ** 2, order)
    raise TypeError(f"not an expression node: {node!r}")


def _mul(a, b, order):
    g = _gadd(_gscale(a.v, b.g), _gscale(b.v, a.g))
    h = None
    if order >= 2:
        h = _gadd(_gscale(a.v, b.h), _gscale(b.v, a.h))
        h = _gadd(h, _outer_sym(a.g, b.g))
    return _Jet(a.v * b.v, g, h)


def _value(node, ctx):
    t = type(node)
    if t is Const:
        return node.value
    if t is Var:
        return ctx.point[ctx.var_index(node)]
    if t is AbsRef:
        return ctx.point[ctx.n + node.index]
    if t is Add:
        return _value(node.left, ctx) + _value(node.right, ctx)
    if t is Sub:
        return _value(node.left, ctx) - _value(node.right, ctx)
    if t is Mul:
        return _value(node.left, ctx) * _value(node.right, ctx)
    if t is Div:
        den = _value(node.right, ctx)
        if den == 0.0:
            raise EvaluationError("division by zero")
        return _value(node.left, ctx) / den
    if t is Neg:
        return -_value(node.arg, ctx)
    if t is Pow:
        b = _value(node.base, ctx)
        if node.exponent < 0 and b == 0.0:
            raise EvaluationError("negative power of zero")
        return b ** node.exponent if node.exponent != 0 else 1.0
    if t is Func:
        x = _value(node.arg, ctx)
        if node.name == "log":
            if x <= 0.0:
                raise EvaluationError(f"log of nonpositive value {x!r}")
            return math.log(x)
        return getattr(math, node.name)(x)
    raise TypeError(f"not an expression node: {node!r}")


Layout = Tuple[Tuple[str, int], ...]


class _Context:
    __slots__ = ("point", "n", "offsets", "size", "_units")

    def __init__(self, point, n, offsets):
        self.point = point
        self.n = n
        self.offsets = offsets
        self.size = len(point)
        self._units = {}

    def var_index(self, node):
        return self.offsets[node.group] + node.index

    def unit(self, k):
        e = self._units.get(k)
        if e is None:
            e = np.zeros(self.size)
            e[k] = 1.0
            self._units[k] = e
        return e


@dataclass(frozen=True)
class SmoothFunction:
    """Vector-valued smooth map ``(x, m) -> R^dim``.

    ``layout`` names the primal variable groups in order, e.g.
    ``(("t", 3),)`` or ``(("t", 3), ("u", 1), ("v", 1))``; ``n_abs`` is the
    number of second-argument slots.
    """

    rows: Tuple[Expr, ...]
    layout: Layout
    n_abs: int = 0

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return sum(size for _, size in self.layout)

    def _offsets(self):
        out, k = {}, 0
        for name, size in self.layout:
            out[name] = k
            k += size
        return out

    def _context(self, x, m):
        x = np.asarray(x, dtype=float).ravel()
        m = np.zeros(0) if m is None else np.asarray(m, dtype=float).ravel()
        if x.size != self.n or m.size != self.n_abs:
            raise ValueError(
                f"input sizes ({x.size}, {m.size}) do not match ({self.n}, {self.n_abs})")
        return _Context(np.concatenate([x, m]).tolist(), self.n, self._offsets())

    def eval(self, x, m=None) -> np.ndarray:
        ctx = self._context(x, m)
        return np.array([_value(r, ctx) for r in self.rows], dtype=float)

    def eval_row(self, row: int, x, m=None) -> float:
        return _value(self.rows[row], self._context(x, m))

    def jacobian(self, x, m=None):
        """Return ``(d1, d2)``, the partial Jacobians w.r.t. ``x`` and ``m``."""
        _, jac, _ = self.jets(x, m, order=1)
        return jac[:, : self.n], jac[:, self.n:]

    def hessian(self, row: int, x, m=None) -> np.ndarray:
        """Hessian of one output row w.r.t. the stacked input ``(x, m)``."""
        if not 0 <= row < self.dim:
            raise IndexError(f"row {row} out of range for dimension {self.dim}")
        ctx = self._context(x, m)
        jet = _jet(self.rows[row], ctx, 2)
        size = self.n + self.n_abs
        return np.zeros((size, size)) if jet.h is None else 0.5 * (jet.h + jet.h.T)

    def jets(self, x, m=None, order=2):
        """Values, full Jacobian ``[d1 d2]`` and (for order 2) all Hessians."""
        ctx = self._context(x, m)
        size = self.n + self.n_abs
        vals = np.zeros(self.dim)
        jac = np.zeros((self.dim, size))
        hess = np.zeros((self.dim, size, size)) if order >= 2 else None
        for i, row in enumerate(self.rows):
            jet = _jet(row, ctx, order)
            vals[i] = jet.v
            if jet.g is not None:
                jac[i] = jet.g
            if order >= 2 and jet.h is not None:
                hess[i] = 0.5 * (jet.h + jet.h.T)
        return vals, jac, hess

    def weighted_hessian(self, weights, x, m=None) -> np.ndarray:
        """``sum_k weights[k] * hessian(k)``."""
        weights = np.asarray(weights, dtype=float).ravel()
        if weights.size != self.dim:
            raise ValueError(f"expected {self.dim} weights, got {weights.size}")
        size = self.n + self.n_abs
        if self.dim == 0:
            return np.zeros((size, size))
        _, _, hess = self.jets(x, m, order=2)
        return np.tensordot(weights, hess, axes=1)
