"""A small arithmetic expression language for config values and functions.

Expressions use one variable ``t``, numeric literals, ``+ - * / **``,
parentheses, the constants ``pi`` and ``e``, and the functions ``sin cos tan
exp log sqrt abs``. Parsing goes through :mod:`ast` with a node whitelist, so
nothing outside the grammar is ever evaluated.
"""

from __future__ import annotations

import ast
import math
import operator

import numpy as np

from .errors import InputError

__all__ = ["compile_function", "evaluate_number"]

_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _build(node, allow_var: bool):
    if isinstance(node, ast.Expression):
        return _build(node.body, allow_var)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        value = float(node.value)
        return lambda t: value
    if isinstance(node, ast.Name):
        if node.id in _CONSTS:
            value = _CONSTS[node.id]
            return lambda t: value
        if node.id == "t" and allow_var:
            return lambda t: t
        raise InputError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _build(node.left, allow_var), _build(node.right, allow_var)
        return lambda t: op(left(t), right(t))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        op = _UNARY[type(node.op)]
        inner = _build(node.operand, allow_var)
        return lambda t: op(inner(t))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        if len(node.args) != 1 or node.keywords:
            raise InputError(f"{node.func.id}() takes exactly one argument")
        fn = _FUNCS[node.func.id]
        arg = _build(node.args[0], allow_var)
        return lambda t: fn(arg(t))
    raise InputError(f"unsupported syntax: {ast.dump(node)[:60]}")


def _parse(text: str):
    try:
        return ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse expression {text!r}: {exc.msg}") from None


def compile_function(text: str):
    """Vectorized ``t -> value`` for an expression in ``t``."""
    fn = _build(_parse(text), allow_var=True)

    def f(t):
        t = np.asarray(t, dtype=float)
        try:
            with np.errstate(all="ignore"):
                return np.asarray(fn(t), dtype=float) * np.ones_like(t)
        except (ArithmeticError, ValueError) as exc:
            raise InputError(f"cannot evaluate {text.strip()!r}: {exc}") from None

    f.descriptor = text.strip()
    return f


def evaluate_number(text: str) -> float:
    """Value of a constant expression such as ``-cos(0.7*pi)``."""
    fn = _build(_parse(text), allow_var=False)
    try:
        with np.errstate(all="ignore"):
            value = float(fn(None))
    except (ArithmeticError, ValueError) as exc:
        raise InputError(f"cannot evaluate {text.strip()!r}: {exc}") from None
    if not math.isfinite(value):
        raise InputError(f"expression {text!r} is not finite")
    return value
