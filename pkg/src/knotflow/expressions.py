"""Tiny arithmetic grammar for angle-valued command-line arguments.

Accepts numbers, the constant pi, the operators + - * /, unary signs, and
parentheses; nothing else.  Backed by the ast module so no eval of
arbitrary code ever happens.
"""

from __future__ import annotations

import ast
import math

__all__ = ["parse_expression", "parse_tuple"]

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


def _evaluate(node):
    if isinstance(node, ast.Expression):
        return _evaluate(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        value = _evaluate(node.operand)
        return value if isinstance(node.op, ast.UAdd) else -value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_evaluate(node.left), _evaluate(node.right))
    raise ValueError(f"unsupported syntax in expression: {ast.dump(node)}")


def parse_expression(text: str) -> float:
    """Evaluate an expression like \"pi/2\" or \"3*pi/4 - 1\"."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
        return _evaluate(tree)
    except (SyntaxError, ValueError, ZeroDivisionError) as err:
        raise ValueError(f"cannot parse {text!r} as an arithmetic expression") from err


def parse_tuple(text: str, length: int) -> tuple:
    """Parse a comma-separated list of expressions of fixed length."""
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != length:
        raise ValueError(f"expected {length} comma-separated values, got {len(parts)}")
    return tuple(parse_expression(p) for p in parts)
