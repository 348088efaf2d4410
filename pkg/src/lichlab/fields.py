"""Radial scalar fields: constants, closed-form expressions, sampled tables.

Expressions are parsed with :mod:`ast` and evaluated with numpy.  Only a
small whitelist of names is accepted, so configuration files cannot run
arbitrary code.
"""
from __future__ import annotations

import ast
import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

_FUNCS: dict[str, Callable] = {
    "exp": np.exp,
    "log": np.log,
    "pow": np.power,
    "tanh": np.tanh,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
    "max": np.maximum,
    "min": np.minimum,
}
_CONSTS = {"pi": np.pi, "e": np.e}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}

ALLOWED_NAMES = ("r",) + tuple(_FUNCS) + tuple(_CONSTS)


class ExpressionError(ValueError):
    pass


def _check(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ExpressionError("only unary +/- allowed")
        _check(node.operand)
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ExpressionError(f"literal {node.value!r} not allowed")
    elif isinstance(node, ast.Name):
        if node.id != "r" and node.id not in _CONSTS:
            raise ExpressionError(f"unknown name {node.id!r}")
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
            raise ExpressionError("only whitelisted functions may be called")
        if node.keywords:
            raise ExpressionError("keyword arguments not allowed")
        for arg in node.args:
            _check(arg)
    else:
        raise ExpressionError(f"syntax {type(node).__name__} not allowed")


def _eval(node: ast.AST, r: np.ndarray):
    if isinstance(node, ast.Expression):
        return _eval(node.body, r)
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, r), _eval(node.right, r))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, r)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return r if node.id == "r" else _CONSTS[node.id]
    if isinstance(node, ast.Call):
        return _FUNCS[node.func.id](*[_eval(a, r) for a in node.args])
    raise ExpressionError("unreachable")


def parse_expression(text: str) -> ast.Expression:
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    _check(tree)
    return tree


@dataclass(frozen=True)
class RadialField:
    """A scalar function of the radial coordinate.

    Exactly one of ``expr``, ``value`` or the sample arrays is used.
    Sampled fields interpolate linearly and hold their end values outside
    the table.
    """

    expr: str | None = None
    value: float | None = None
    r_samples: np.ndarray | None = field(default=None, repr=False)
    v_samples: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.expr is not None:
            object.__setattr__(self, "_tree", parse_expression(self.expr))

    @classmethod
    def constant(cls, v: float) -> "RadialField":
        return cls(value=float(v), label=repr(float(v)))

    @classmethod
    def from_expression(cls, text: str) -> "RadialField":
        return cls(expr=text, label=text)

    @classmethod
    def from_samples(cls, r, v, label: str = "samples") -> "RadialField":
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("samples must be two equal-length 1-d arrays")
        if np.any(np.diff(r) <= 0):
            raise ValueError("sample radii must be strictly increasing")
        return cls(r_samples=r, v_samples=v, label=label)

    @classmethod
    def from_csv(cls, path: str | Path, column: str | None = None) -> "RadialField":
        path = Path(path)
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        if len(rows) < 3:
            raise ValueError(f"{path}: need a header and at least two rows")
        header = [h.strip() for h in rows[0]]
        if header[0] != "r" or len(header) < 2:
            raise ValueError(f"{path}: header must start with 'r'")
        j = header.index(column) if column else 1
        data = np.array([[float(x) for x in row] for row in rows[1:] if row])
        return cls.from_samples(data[:, 0], data[:, j], label=str(path))

    @classmethod
    def coerce(cls, spec) -> "RadialField":
        """Build a field from a number, expression string, dict or field."""
        if isinstance(spec, RadialField):
            return spec
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            return cls.constant(spec)
        if isinstance(spec, str):
            try:
                return cls.constant(float(spec))
            except ValueError:
                return cls.from_expression(spec)
        if isinstance(spec, dict) and "csv" in spec:
            return cls.from_csv(spec["csv"], spec.get("column"))
        if callable(spec):
            return cls.from_callable(spec)
        raise ValueError(f"cannot interpret field spec {spec!r}")

    @classmethod
    def from_callable(cls, fn: Callable, label: str = "callable") -> "RadialField":
        out = cls(label=label)
        object.__setattr__(out, "_fn", fn)
        return out

    def __call__(self, r):
        r_arr = np.asarray(r, dtype=float)
        if self.value is not None:
            out = np.full(r_arr.shape, self.value)
        elif self.expr is not None:
            with np.errstate(all="ignore"):
                out = np.broadcast_to(_eval(self._tree, r_arr), r_arr.shape).astype(float)
        elif self.r_samples is not None:
            out = np.interp(r_arr, self.r_samples, self.v_samples)
        elif hasattr(self, "_fn"):
            out = np.broadcast_to(np.asarray(self._fn(r_arr), dtype=float), r_arr.shape)
        else:
            raise ValueError("empty field")
        return float(out) if np.ndim(r) == 0 else np.array(out, dtype=float)

    @property
    def is_constant(self) -> bool:
        return self.value is not None

    def tail_limit(self):
        """Symbolic limit at r -> oo for expression fields, else None.

        Returns a float (possibly +-inf) or None when unavailable.
        """
        if self.value is not None:
            return self.value
        if self.expr is None:
            return None
        try:
            import sympy as sp

            r = sp.Symbol("r", positive=True)
            names = {
                "r": r, "exp": sp.exp, "log": sp.log, "pow": sp.Pow, "tanh": sp.tanh,
                "sqrt": sp.sqrt, "sinh": sp.sinh, "cosh": sp.cosh, "sin": sp.sin,
                "cos": sp.cos, "abs": sp.Abs, "max": sp.Max, "min": sp.Min,
                "pi": sp.pi, "e": sp.E,
            }
            expr = sp.sympify(self.expr, locals=names)
            lim = sp.limit(expr, r, sp.oo)
            if lim in (sp.oo, -sp.oo):
                return float(lim)
            if lim.is_real and lim.is_finite:
                return float(lim)
        except Exception:  # sympy gives up on some inputs
            return None
        return None

    def to_spec(self):
        if self.value is not None:
            return self.value
        if self.expr is not None:
            return self.expr
        return self.label
