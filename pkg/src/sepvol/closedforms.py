"""Exact catalog of separability data, plus the quadrature that checks it.

The catalog (``catalog.json``, shipped with the package) records, per
scenario: the box constant ``c``, the piecewise separability function ``S``
when known, its value at the balanced point, exact volumes and
probabilities, and a ``reduction`` block describing which single ratio of
diagonal products the function actually depends on.  Everything numeric is
stored as an expression string in a small arithmetic grammar so that values
round-trip exactly; this module owns the compiler for that grammar, the
loader, evaluators, the ratio-law quadrature used to cross-check stored
volumes, and the three closed-form ratio densities that admit direct
formulas.
"""

from __future__ import annotations

import ast
import importlib.resources
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _series, measure
from .measure import DomainError
from .ppt import canonical_diag
from .scenarios import ScenarioSpec, canonical_json

__all__ = [
    "ArityMismatchError",
    "CatalogEntry",
    "CatalogFormatError",
    "ClosedVolumes",
    "ExpressionError",
    "MissingJacobianError",
    "MissingSError",
    "NotCatalogedError",
    "Piece",
    "PiecewiseS",
    "RatioFactor",
    "Reduction",
    "catalog_lookup",
    "dump_catalog",
    "eval_S",
    "eval_scalar",
    "incomplete_beta",
    "jacobian_1423",
    "jacobian_mu",
    "jacobian_real",
    "load_catalog",
    "ratio_density",
    "ratio_expectation",
    "volume_from_closed",
]


class NotCatalogedError(KeyError):
    """Requested scenario has no catalog entry."""


class ArityMismatchError(ValueError):
    """Evaluation point does not have one coordinate per ratio variable."""


class MissingSError(RuntimeError):
    """The entry records no separability function."""


class MissingJacobianError(RuntimeError):
    """No ratio reduction is declared, so no 1-d marginal density exists."""


class CatalogFormatError(ValueError):
    """catalog.json is malformed."""


class ExpressionError(ValueError):
    """An expression uses syntax outside the catalog grammar."""


# --------------------------------------------------------------------------
# expression grammar
#
# Arithmetic on floats with: + - * / ** (and ^ as a synonym for **), unary
# minus, numeric literals, the constant pi, the variables t and nu1..nu4,
# calls to a fixed function set, comparisons (chained allowed), and the
# boolean connectives and/or for region predicates.  Nothing else parses.

_BIN_OPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}

_CMP_OPS = {
    ast.Lt: lambda a, b: a < b,
    ast.LtE: lambda a, b: a <= b,
    ast.Gt: lambda a, b: a > b,
    ast.GtE: lambda a, b: a >= b,
    ast.Eq: lambda a, b: a == b,
    ast.NotEq: lambda a, b: a != b,
}

_VARIABLES = ("t", "nu1", "nu2", "nu3", "nu4")


def _complete_beta(a: float, b: float) -> float:
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


_FUNCTIONS: dict[str, Callable[..., float]] = {
    "sqrt": math.sqrt,
    "log": math.log,
    "arcsin": math.asin,
    "arccos": math.acos,
    "arcsec": lambda x: math.acos(1.0 / x),
    "arccsc": lambda x: math.asin(1.0 / x),
    "min": min,
    "max": max,
    "ibeta": lambda a, b, x: float(incomplete_beta(a, b, x)),
    "cbeta": _complete_beta,
}


class _Compiled(NamedTuple):
    fn: Callable[[dict], float]
    names: frozenset


def _build(node: ast.AST, names: set) -> Callable[[dict], float]:
    if isinstance(node, ast.Expression):
        return _build(node.body, names)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"literal {node.value!r} is not a number")
        value = float(node.value)
        return lambda env: value
    if isinstance(node, ast.Name):
        ident = node.id
        if ident == "pi":
            return lambda env: math.pi
        if ident not in _VARIABLES:
            raise ExpressionError(f"unknown name {ident!r}")
        names.add(ident)

        def lookup(env, _ident=ident):
            try:
                return env[_ident]
            except KeyError:
                raise ExpressionError(f"variable {_ident!r} is unbound here") from None

        return lookup
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _build(node.operand, names)
        if isinstance(node.op, ast.UAdd):
            return inner
        return lambda env: -inner(env)
    if isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
        op = _BIN_OPS[type(node.op)]
        left = _build(node.left, names)
        right = _build(node.right, names)
        return lambda env: op(left(env), right(env))
    if isinstance(node, ast.Call):
        if node.keywords or not isinstance(node.func, ast.Name):
            raise ExpressionError("only positional calls to named functions")
        try:
            fn = _FUNCTIONS[node.func.id]
        except KeyError:
            raise ExpressionError(f"unknown function {node.func.id!r}") from None
        args = [_build(a, names) for a in node.args]
        return lambda env: fn(*(a(env) for a in args))
    if isinstance(node, ast.Compare):
        if not all(type(op) in _CMP_OPS for op in node.ops):
            raise ExpressionError("unsupported comparison operator")
        first = _build(node.left, names)
        rest = [(_CMP_OPS[type(op)], _build(c, names)) for op, c in zip(node.ops, node.comparators)]

        def chain(env):
            left = first(env)
            for op, right_fn in rest:
                right = right_fn(env)
                if not op(left, right):
                    return False
                left = right
            return True

        return chain
    if isinstance(node, ast.BoolOp):
        parts = [_build(v, names) for v in node.values]
        if isinstance(node.op, ast.And):
            return lambda env: all(p(env) for p in parts)
        return lambda env: any(p(env) for p in parts)
    raise ExpressionError(f"disallowed syntax: {ast.dump(node)[:60]}")


_COMPILE_CACHE: dict[str, _Compiled] = {}


def _compile(src: str) -> _Compiled:
    cached = _COMPILE_CACHE.get(src)
    if cached is not None:
        return cached
    try:
        tree = ast.parse(src.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {src!r}: {exc}") from None
    names: set = set()
    fn = _build(tree, names)
    compiled = _Compiled(fn, frozenset(names))
    _COMPILE_CACHE[src] = compiled
    return compiled


def eval_scalar(expr: str) -> float:
    """Evaluate a closed expression (no free variables) to a float."""
    compiled = _compile(expr)
    if compiled.names:
        raise ExpressionError(f"{expr!r} is not constant; it uses {sorted(compiled.names)}")
    return float(compiled.fn({}))


# --------------------------------------------------------------------------
# incomplete beta

def _betacf(a: float, b: float, x: float) -> float:
    # Lentz-style continued fraction for the regularized incomplete beta.
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 500):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 3e-16:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def _ibeta_scalar(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    total = _complete_beta(a, b)
    if x >= 1.0:
        return total
    front = math.exp(a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return total - front * _betacf(b, a, 1.0 - x) / b


def incomplete_beta(a: float, b: float, x):
    """Unnormalized incomplete beta B_x(a, b) = integral of s^(a-1)(1-s)^(b-1).

    ``a`` and ``b`` must be positive and ``x`` must lie in [0, 1]; ``x`` may
    be an array.  B_1(a, b) is the complete beta function.
    """
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"beta shapes must be positive, got a={a}, b={b}")
    xs = np.asarray(x, dtype=float)
    if np.any(xs < -1e-12) or np.any(xs > 1.0 + 1e-12):
        raise DomainError("incomplete beta argument must lie in [0, 1]")
    if xs.ndim == 0:
        return _ibeta_scalar(a, b, float(xs))
    out = np.array([_ibeta_scalar(a, b, float(v)) for v in xs.ravel()])
    return out.reshape(xs.shape)


# --------------------------------------------------------------------------
# closed-form ratio densities
#
# Each is the exact 1-d marginal density of its ratio variable, scaled so
# that the integral over (0, inf) equals the simplex weight integral for the
# scenario.  The rational-plus-log formulas are 0/0 at the unit point, so a
# band around it is served by the precomputed Taylor rows in _series.

def _patched(nu, direct_fn, coeffs, radius=_series.SWITCH_RADIUS):
    x = np.asarray(nu, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(~(x > 0.0)):
        raise DomainError("ratio argument must be positive")
    u = x - 1.0
    near = np.abs(u) < radius
    safe = np.where(near, 2.0, x)
    with np.errstate(all="ignore"):
        out = np.where(near, _series.horner(coeffs, u), direct_fn(safe))
    return float(out[0]) if scalar else out


# The ninth-power denominator makes the direct real-density formula lose
# roughly nine digits to cancellation near the unit point, so its series
# band is wider than the default handoff.
_REAL_SWITCH = 0.45


def jacobian_real(nu):
    """Ratio density for the fully real two-qubit scenario (integral pi^2/1146880)."""

    def direct(x):
        q = (((x + 16.0) * x + 36.0) * x + 16.0) * x + 1.0
        r = ((5.0 * x + 32.0) * x * x - 32.0) * x - 5.0
        return x**1.5 * (6.0 * q * np.log(x) - 5.0 * r) / (3780.0 * (x - 1.0) ** 9)

    return _patched(nu, direct, _series.RATIO_DENSITY_REAL, radius=_REAL_SWITCH)


def jacobian_mu(mu):
    """The same density pushed through the square-root substitution.

    Useful when only integer powers of the variable should appear in
    integrands; the unit-point value is 1/198450.
    """

    def direct(m):
        m2 = m * m
        q = (((m2 + 16.0) * m2 + 36.0) * m2 + 16.0) * m2 + 1.0
        r = ((5.0 * m2 + 32.0) * m2 * m2 - 32.0) * m2 - 5.0
        return m**4 * (12.0 * q * np.log(m) - 5.0 * r) / (1890.0 * (m2 - 1.0) ** 9)

    return _patched(mu, direct, _series.RATIO_DENSITY_SQRT)


def jacobian_1423(nu):
    """Ratio density for the isolated real cross-pair scenario (integral pi^2/1920)."""

    def direct(x):
        return np.sqrt(x) * (3.0 - 3.0 * x * x + ((x + 4.0) * x + 1.0) * np.log(x)) / (
            30.0 * (x - 1.0) ** 5
        )

    return _patched(nu, direct, _series.RATIO_DENSITY_CROSS)


# --------------------------------------------------------------------------
# catalog model


@dataclass(frozen=True)
class Piece:
    """One branch of a piecewise function: a predicate and a formula.

    ``region`` is None for the catch-all branch; branches are tried in
    order and the first whose region holds is used.
    """

    region: str | None
    expr: str


@dataclass(frozen=True)
class PiecewiseS:
    arity: int
    pieces: tuple[Piece, ...]


@dataclass(frozen=True)
class RatioFactor:
    """One independent ratio in a product reduction, with its own pieces in t."""

    num: tuple[int, int]
    den: tuple[int, int]
    pieces: tuple[Piece, ...]


@dataclass(frozen=True)
class Reduction:
    """How S collapses to ratio variables.

    kind "ratio": S depends on the single ratio prod(d[num]) / prod(d[den])
    of diagonal entries (1-based indices); ``var`` names the variable the
    pieces are written in ("t" or one of nu1..nu4, always numerically equal
    to that ratio).  kind "product": S factors over independent ratios,
    ``scale`` times the product of the per-factor piece functions.
    """

    kind: str
    num: tuple[int, int] | None = None
    den: tuple[int, int] | None = None
    var: str | None = None
    scale: str | None = None
    factors: tuple[RatioFactor, ...] = ()


@dataclass(frozen=True)
class CatalogEntry:
    alias: str
    spec: ScenarioSpec
    cite: str
    c: str
    S: PiecewiseS | None
    S1: str | None
    V_tot: str
    V_sep: str | None
    P: str | None
    reduction: Reduction | None
    approximate: bool
    reported: dict | None

    def scalar(self, field: str) -> float | None:
        """Evaluate one of the expression fields (c, S1, V_tot, V_sep, P)."""
        raw = getattr(self, field)
        if raw is None:
            return None
        return eval_scalar(raw)

    def reported_scalar(self, field: str) -> float | None:
        if not self.reported or field not in self.reported:
            return None
        return eval_scalar(self.reported[field])

    def to_dict(self) -> dict:
        def pieces_out(pieces):
            return [{"region": p.region, "expr": p.expr} for p in pieces]

        s_out = None
        if self.S is not None:
            s_out = {"arity": self.S.arity, "pieces": pieces_out(self.S.pieces)}
        red_out = None
        if self.reduction is not None:
            r = self.reduction
            if r.kind == "ratio":
                red_out = {
                    "kind": "ratio",
                    "num": list(r.num),
                    "den": list(r.den),
                    "var": r.var,
                }
            else:
                red_out = {
                    "kind": "product",
                    "scale": r.scale,
                    "factors": [
                        {"num": list(f.num), "den": list(f.den), "pieces": pieces_out(f.pieces)}
                        for f in r.factors
                    ],
                }
        return {
            "alias": self.alias,
            "scenario": self.spec.to_dict(),
            "cite": self.cite,
            "c": self.c,
            "S": s_out,
            "S1": self.S1,
            "V_tot": self.V_tot,
            "V_sep": self.V_sep,
            "P": self.P,
            "reduction": red_out,
            "approximate": self.approximate,
            "reported": self.reported,
        }


def _pieces_from(raw, where: str) -> tuple[Piece, ...]:
    if not isinstance(raw, list) or not raw:
        raise CatalogFormatError(f"{where}: pieces must be a non-empty list")
    out = []
    for item in raw:
        region = item.get("region")
        expr = item["expr"]
        if region is not None:
            _compile(region)
        _compile(expr)
        out.append(Piece(region=region, expr=expr))
    return tuple(out)


def _entry_from_dict(raw: dict) -> CatalogEntry:
    try:
        spec = ScenarioSpec.from_dict(raw["scenario"])
        alias = raw["alias"]
        s_raw = raw.get("S")
        pw = None
        if s_raw is not None:
            pw = PiecewiseS(
                arity=int(s_raw["arity"]),
                pieces=_pieces_from(s_raw["pieces"], alias),
            )
        red_raw = raw.get("reduction")
        red = None
        if red_raw is not None:
            kind = red_raw["kind"]
            if kind == "ratio":
                red = Reduction(
                    kind="ratio",
                    num=tuple(red_raw["num"]),
                    den=tuple(red_raw["den"]),
                    var=red_raw.get("var"),
                )
            elif kind == "product":
                red = Reduction(
                    kind="product",
                    scale=red_raw.get("scale"),
                    factors=tuple(
                        RatioFactor(
                            num=tuple(f["num"]),
                            den=tuple(f["den"]),
                            pieces=_pieces_from(f["pieces"], alias),
                        )
                        for f in red_raw["factors"]
                    ),
                )
            else:
                raise CatalogFormatError(f"{alias}: unknown reduction kind {kind!r}")
        for field in ("c", "V_tot"):
            _compile(raw[field])
        for field in ("S1", "V_sep", "P"):
            if raw.get(field) is not None:
                _compile(raw[field])
        return CatalogEntry(
            alias=alias,
            spec=spec,
            cite=raw["cite"],
            c=raw["c"],
            S=pw,
            S1=raw.get("S1"),
            V_tot=raw["V_tot"],
            V_sep=raw.get("V_sep"),
            P=raw.get("P"),
            reduction=red,
            approximate=bool(raw.get("approximate", False)),
            reported=raw.get("reported"),
        )
    except (KeyError, TypeError) as exc:
        raise CatalogFormatError(f"bad catalog entry: {exc!r}") from exc


CATALOG_VERSION = "sepvol-catalog/1"


def dump_catalog(entries: Sequence[CatalogEntry]) -> str:
    """Serialize entries to the canonical catalog.json text."""
    payload = {
        "version": CATALOG_VERSION,
        "entries": [e.to_dict() for e in entries],
    }
    return canonical_json(payload)


@lru_cache(maxsize=1)
def _catalog_index():
    text = importlib.resources.files("sepvol").joinpath("catalog.json").read_text("utf-8")
    data = json.loads(text)
    if data.get("version") != CATALOG_VERSION:
        raise CatalogFormatError(f"unsupported catalog version {data.get('version')!r}")
    entries = tuple(_entry_from_dict(item) for item in data["entries"])
    index: dict[str, CatalogEntry] = {}
    for entry in entries:
        if entry.alias in index:
            raise CatalogFormatError(f"duplicate alias {entry.alias!r}")
        index[entry.alias] = entry
    for entry in entries:
        key = entry.spec.to_json()
        if key in index and index[key] is not entry and index[key].spec == entry.spec:
            raise CatalogFormatError(f"duplicate scenario for {entry.alias!r}")
        index[key] = entry
    return entries, index


def load_catalog() -> tuple[CatalogEntry, ...]:
    """All catalog entries, in file order."""
    return _catalog_index()[0]


def catalog_lookup(key) -> CatalogEntry:
    """Find the entry for a scenario (by ScenarioSpec or by alias string)."""
    _, index = _catalog_index()
    if isinstance(key, ScenarioSpec):
        token = key.to_json()
        label = key.to_json()
    elif isinstance(key, str):
        token = key
        label = key
    else:
        raise TypeError(f"expected ScenarioSpec or alias string, got {type(key)!r}")
    try:
        return index[token]
    except KeyError:
        raise NotCatalogedError(f"no catalog entry for {label!r}") from None


# --------------------------------------------------------------------------
# evaluation


def _eval_pieces(pieces: tuple[Piece, ...], env: dict) -> float:
    for piece in pieces:
        if piece.region is None or _compile(piece.region).fn(env):
            return float(_compile(piece.expr).fn(env))
    raise ExpressionError("no piece matched the evaluation point")


def _reduction_value(entry: CatalogEntry, point: np.ndarray) -> float:
    red = entry.reduction
    dd = canonical_diag(entry.spec.split, point)
    num = dd[red.num[0] - 1] * dd[red.num[1] - 1]
    den = dd[red.den[0] - 1] * dd[red.den[1] - 1]
    return float(num / den)


def eval_S(entry: CatalogEntry, nu) -> float:
    """Evaluate the entry's separability function at a ratio point.

    ``nu`` must supply one positive coordinate per ratio variable of the
    scenario's split (a bare float is fine for single-ratio splits).
    """
    if entry.S is None:
        raise MissingSError(f"{entry.alias}: separability function not recorded")
    point = np.atleast_1d(np.asarray(nu, dtype=float))
    if point.shape != (entry.S.arity,):
        raise ArityMismatchError(
            f"{entry.alias}: expected {entry.S.arity} ratio coordinates, got shape {point.shape}"
        )
    if np.any(~(point > 0.0)):
        raise DomainError("ratio coordinates must be positive")
    env = {f"nu{i + 1}": float(v) for i, v in enumerate(point)}
    if entry.reduction is not None and entry.reduction.kind == "ratio":
        env["t"] = _reduction_value(entry, point)
    return _eval_pieces(entry.S.pieces, env)


def _lbeta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def ratio_expectation(
    g: Callable[[float], float],
    shape_num: tuple[float, float],
    shape_den: tuple[float, float],
    *,
    epsabs: float = 1e-11,
    epsrel: float = 1e-11,
) -> float:
    """E[g(R)] for R = (G_a G_b)/(G_c G_d) with independent gamma factors.

    ``shape_num`` holds the numerator shapes (a, b) and ``shape_den`` the
    denominator shapes (c, d); all rates are equal and cancel.  R factors as
    a product of the two independent beta-prime ratios G_a/G_c and G_b/G_d,
    so the expectation is a double integral over the unit square after
    mapping each beta-prime variable through x = u/(1-u).
    """
    from scipy.integrate import dblquad

    a, b = float(shape_num[0]), float(shape_num[1])
    c, d = float(shape_den[0]), float(shape_den[1])
    for shape in (a, b, c, d):
        if shape <= 0.0:
            raise DomainError("gamma shapes must be positive")
    lab = _lbeta(a, c)
    lcd = _lbeta(b, d)

    def integrand(v: float, u: float) -> float:
        x = u / (1.0 - u)
        y = v / (1.0 - v)
        logw = (
            (a - 1.0) * math.log(x)
            - (a + c - 2.0) * math.log1p(x)
            - lab
            + (b - 1.0) * math.log(y)
            - (b + d - 2.0) * math.log1p(y)
            - lcd
        )
        return g(x * y) * math.exp(logw)

    value, _ = dblquad(integrand, 0.0, 1.0, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel)
    return value


def ratio_density(
    shape_num: tuple[float, float],
    shape_den: tuple[float, float],
    r: float,
    *,
    epsabs: float = 1e-14,
    epsrel: float = 1e-11,
) -> float:
    """Density at r of R = (G_a G_b)/(G_c G_d) with independent gamma factors.

    Same ratio law as ratio_expectation; this evaluates its density
    pointwise by integrating out one of the two beta-prime factors.
    Together with the simplex weight total it reproduces each scenario's
    marginal ratio jacobian, including cases with no recorded closed form.
    """
    from scipy.integrate import quad

    a, b = float(shape_num[0]), float(shape_num[1])
    c, d = float(shape_den[0]), float(shape_den[1])
    for shape in (a, b, c, d):
        if shape <= 0.0:
            raise DomainError("gamma shapes must be positive")
    r = float(r)
    if not (r > 0.0) or not math.isfinite(r):
        raise DomainError("ratio argument must be positive and finite")
    lab = _lbeta(a, c)
    lcd = _lbeta(b, d)
    logr = math.log(r)

    def integrand(u: float) -> float:
        if u <= 0.0 or u >= 1.0:
            return 0.0
        x = u / (1.0 - u)
        logx = math.log(x)
        logy = logr - logx
        if logy > 30.0:
            log1py = logy + math.log1p(math.exp(-logy))
        else:
            log1py = math.log1p(math.exp(logy))
        logf = (
            (a - 1.0) * logx
            - (a + c) * math.log1p(x)
            - lab
            + (b - 1.0) * logy
            - (b + d) * log1py
            - lcd
            - logx
            - 2.0 * math.log1p(-u)
        )
        return math.exp(logf)

    peak = math.sqrt(r) / (1.0 + math.sqrt(r))
    value, _ = quad(
        integrand,
        0.0,
        1.0,
        points=[peak],
        limit=200,
        epsabs=epsabs,
        epsrel=epsrel,
    )
    return value


class ClosedVolumes(NamedTuple):
    V_tot: float
    V_sep: float
    P: float


def _constant_value(pw: PiecewiseS) -> float | None:
    if len(pw.pieces) == 1 and pw.pieces[0].region is None:
        compiled = _compile(pw.pieces[0].expr)
        if not compiled.names:
            return float(compiled.fn({}))
    return None


def _piece_function(pieces: tuple[Piece, ...], var: str | None) -> Callable[[float], float]:
    def g(t: float) -> float:
        env = {"t": t}
        if var and var != "t":
            env[var] = t
        return _eval_pieces(pieces, env)

    return g


def volume_from_closed(
    entry: CatalogEntry,
    *,
    epsabs: float = 1e-11,
    epsrel: float = 1e-11,
) -> ClosedVolumes:
    """Integrate the entry's S against its exact ratio law.

    Returns (V_tot, V_sep, P).  V_tot is the exact product of the box
    constant and the simplex weight integral; V_sep comes from quadrature of
    S over the reduction's ratio density (or exactly, for constant S).
    Raises MissingSError when S is unknown and MissingJacobianError when a
    non-constant S has no declared reduction.
    """
    if entry.S is None:
        raise MissingSError(f"{entry.alias}: separability function not recorded")
    c_val = eval_scalar(entry.c)
    dtot = measure.dirichlet_total(entry.spec)
    v_tot = c_val * dtot
    const = _constant_value(entry.S)
    if const is not None:
        return ClosedVolumes(v_tot, const * dtot, const / c_val)
    red = entry.reduction
    if red is None:
        raise MissingJacobianError(
            f"{entry.alias}: no ratio reduction is declared for a non-constant S"
        )
    weights = measure.weight_exponents(entry.spec)
    alphas = weights + 1.0
    if red.kind == "ratio":
        mean_s = ratio_expectation(
            _piece_function(entry.S.pieces, red.var),
            (alphas[red.num[0] - 1], alphas[red.num[1] - 1]),
            (alphas[red.den[0] - 1], alphas[red.den[1] - 1]),
            epsabs=epsabs,
            epsrel=epsrel,
        )
        return ClosedVolumes(v_tot, dtot * mean_s, mean_s / c_val)
    if red.kind == "product":
        prob = 1.0
        for factor in red.factors:
            prob *= ratio_expectation(
                _piece_function(factor.pieces, None),
                (alphas[factor.num[0] - 1], alphas[factor.num[1] - 1]),
                (alphas[factor.den[0] - 1], alphas[factor.den[1] - 1]),
                epsabs=epsabs,
                epsrel=epsrel,
            )
        scale = eval_scalar(red.scale) if red.scale is not None else c_val
        v_sep = dtot * scale * prob
        return ClosedVolumes(v_tot, v_sep, v_sep / v_tot)
    raise CatalogFormatError(f"{entry.alias}: unknown reduction kind {red.kind!r}")
