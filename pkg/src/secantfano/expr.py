"""Tiny arithmetic-expression evaluator used by config files and the CLI.

Only numbers, bound names, parentheses, unary minus and + - * / ** are
accepted, so configs cannot execute arbitrary code.
"""

from __future__ import annotations

import ast
import operator
from fractions import Fraction

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


class ExprError(ValueError):
    pass


def evaluate(text, names: dict):
    """Evaluate ``text`` with the given name bindings.

    Numbers become Fractions; ``^`` is accepted as a synonym for ``**``.
    """
    if isinstance(text, bool):
        raise ExprError("booleans are not numbers")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        raise ExprError(f"floating point value {text!r}; write it as a fraction")
    try:
        tree = ast.parse(str(text).replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"cannot parse {text!r}") from exc
    return _eval(tree.body, names, text)


def _eval(node, names, text):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, int) and not isinstance(node.value, bool):
            return Fraction(node.value)
        raise ExprError(f"unsupported literal {node.value!r} in {text!r}")
    if isinstance(node, ast.Name):
        if node.id not in names:
            raise ExprError(f"unknown name {node.id!r} in {text!r}")
        return names[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval(node.operand, names, text)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, names, text)
        right = _eval(node.right, names, text)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(right, Fraction) and right.denominator == 1):
                raise ExprError(f"exponent must be an integer in {text!r}")
            return left ** int(right)
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ExprError(f"unsupported operator in {text!r}")
        return op(left, right)
    raise ExprError(f"unsupported syntax in {text!r}")
