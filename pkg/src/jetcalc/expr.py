"""Exact polynomial expressions on a jet chart.

An ``Expr`` is a polynomial with rational coefficients in the generators

* ``x^i``            base coordinates,
* ``y^s_J``          jet coordinates (``J`` a sorted tuple),
* ``g(u)``           sin/cos/exp/ln applied to a canonical sub-expression,
* named parameters   (the formal ``t`` of the fibre scaling).

Terms are stored as ``{monomial: Fraction}``; a monomial is a sorted tuple of
``(generator, exponent)`` pairs and a generator is a plain tuple whose first
entry is its kind, so the total order on generators is tuple order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    InvalidIndex,
    NonPolynomialInFibre,
    OrderExceeded,
    UnboundGenerator,
    UnsupportedDivision,
)
from .multiindex import MultiIndex, normalization

BASE, JET, FUNC, PARAM = 0, 1, 2, 3
FUNCTIONS = ("sin", "cos", "exp", "ln")


@dataclass(frozen=True)
class JetSpec:
    n: int
    m: int
    r: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.r < 0:
            raise InvalidIndex(f"invalid jet space n={self.n} m={self.m} r={self.r}")

    def with_order(self, r: int) -> JetSpec:
        return JetSpec(self.n, self.m, r)

    def x(self, i: int) -> Expr:
        if not 1 <= i <= self.n:
            raise InvalidIndex(f"base index {i} outside 1..{self.n}")
        return x(i)

    def y(self, sigma: int, J=()) -> Expr:
        J = jet_index(J)
        if not 1 <= sigma <= self.m:
            raise InvalidIndex(f"fibre index {sigma} outside 1..{self.m}")
        for j in J:
            if not 1 <= j <= self.n:
                raise InvalidIndex(f"base index {j} outside 1..{self.n}")
        if len(J) > self.r:
            raise OrderExceeded(f"jet order {len(J)} exceeds chart order {self.r}")
        return y(sigma, J)


def jet_index(J) -> tuple[int, ...]:
    if isinstance(J, MultiIndex):
        return J.entries
    return tuple(sorted(int(j) for j in J))


def jet_gen(sigma: int, J) -> tuple:
    J = jet_index(J)
    return (JET, len(J), sigma, J)


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for g, e in b:
        merged[g] = merged.get(g, 0) + e
    return tuple(sorted(merged.items()))


def _mono_lower(mono, pos):
    g, e = mono[pos]
    if e == 1:
        return mono[:pos] + mono[pos + 1:]
    return mono[:pos] + ((g, e - 1),) + mono[pos + 1:]


class Expr:
    __slots__ = ("_terms", "_hash", "_order", "_key")

    def __init__(self, terms=None):
        self._terms = {} if terms is None else {m: c for m, c in terms.items() if c}
        self._hash = None
        self._order = None
        self._key = None

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        obj._order = None
        obj._key = None
        return obj

    @classmethod
    def constant(cls, c) -> Expr:
        c = Fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def generator(cls, g) -> Expr:
        return cls._raw({((g, 1),): Fraction(1)})

    # -- inspection ------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def generators(self) -> set:
        return {g for mono in self._terms for g, _ in mono}

    def all_generators(self) -> set:
        """Generators including those inside function arguments."""
        out = set()
        for g in self.generators():
            out.add(g)
            if g[0] == FUNC:
                out |= g[2].all_generators()
        return out

    @property
    def order(self) -> int:
        if self._order is None:
            best = 0
            for g in self.generators():
                if g[0] == JET:
                    best = max(best, g[1])
                elif g[0] == FUNC:
                    best = max(best, g[2].order)
            self._order = best
        return self._order

    def has_fibre(self) -> bool:
        return any(g[0] == JET for g in self.all_generators())

    def has_functions(self) -> bool:
        return any(g[0] == FUNC for g in self.all_generators())

    # -- arithmetic ------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, Fraction)):
            return Expr.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Expr._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Expr._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return Expr._raw({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, Expr):
            return NotImplemented
        if len(other._terms) == 1 and () in other._terms:
            return self * other._terms[()]
        if len(self._terms) == 1 and () in self._terms:
            return other * self._terms[()]
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Expr._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Expr):
            if not other.is_constant():
                raise UnsupportedDivision("division by a non-constant expression")
            other = other.constant_value()
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("division by zero")
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise UnsupportedDivision("only non-negative integer powers are supported")
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison ------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sort_key(self):
        if self._key is None:
            self._key = tuple(sorted(self._terms.items()))
        return self._key

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __bool__(self):
        return bool(self._terms)

    # -- substitution and differentiation ----------------------------------

    def subs(self, mapping) -> Expr:
        """Simultaneous substitution of generators (tuple keys) by expressions."""
        if not mapping:
            return self
        cache = {}

        def image(g):
            if g not in cache:
                if g in mapping:
                    cache[g] = _as_expr(mapping[g])
                elif g[0] == FUNC:
                    cache[g] = func(g[1], g[2].subs(mapping))
                else:
                    cache[g] = None
            return cache[g]

        out = ZERO
        for mono, c in self._terms.items():
            kept = []
            factor = Expr.constant(c)
            for g, e in mono:
                img = image(g)
                if img is None:
                    kept.append((g, e))
                else:
                    factor = factor * img**e
            if kept:
                factor = factor * Expr._raw({tuple(kept): Fraction(1)})
            out = out + factor
        return out

    def diff(self, g) -> Expr:
        """Plain partial derivative with respect to the generator ``g``."""
        return _derive(self, lambda h: _gen_partial(h, g))

    def __repr__(self):
        return f"Expr({render(self)!r})"

    def __str__(self):
        return render(self)


def _as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Expr.constant(value)


ZERO = Expr()
ONE = Expr.constant(1)


def x(i: int) -> Expr:
    return Expr.generator((BASE, i))


def y(sigma: int, J=()) -> Expr:
    return Expr.generator(jet_gen(sigma, J))


def param(name: str = "t") -> Expr:
    return Expr.generator((PARAM, name))


def const(c) -> Expr:
    return Expr.constant(c)


def func(name: str, arg) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name}")
    arg = _as_expr(arg)
    if arg.is_constant():
        v = arg.constant_value()
        if v == 0 and name in ("sin", "exp", "cos"):
            return ZERO if name == "sin" else ONE
        if v == 1 and name == "ln":
            return ZERO
    return Expr.generator((FUNC, name, arg))


def sin(arg):
    return func("sin", arg)


def cos(arg):
    return func("cos", arg)


def exp(arg):
    return func("exp", arg)


def ln(arg):
    return func("ln", arg)


def _derive(e: Expr, gen_derivative) -> Expr:
    """Apply a derivation given by its values on generators."""
    out = {}
    for mono, c in e._terms.items():
        for pos, (g, ex) in enumerate(mono):
            dg = gen_derivative(g)
            if dg is None or not dg._terms:
                continue
            rest = _mono_lower(mono, pos)
            scale = c * ex
            for m2, c2 in dg._terms.items():
                m = _mono_mul(rest, m2)
                v = out.get(m, 0) + scale * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
    return Expr._raw(out)


def _chain(name, arg, darg):
    if darg.is_zero():
        return None
    if name == "sin":
        return func("cos", arg) * darg
    if name == "cos":
        return -func("sin", arg) * darg
    if name == "exp":
        return func("exp", arg) * darg
    raise UnsupportedDivision(f"derivative of ln({render(arg)}) is not polynomial")


def _gen_partial(h, g):
    if h == g:
        return ONE
    if h[0] == FUNC:
        return _chain(h[1], h[2], h[2].diff(g))
    return None


@lru_cache(maxsize=None)
def _gen_total_derivative(g, i, truncate):
    kind = g[0]
    if kind == BASE:
        return ONE if g[1] == i else None
    if kind == JET:
        k, sigma, J = g[1], g[2], g[3]
        if truncate is not None and k >= truncate:
            return None
        return Expr.generator((JET, k + 1, sigma, tuple(sorted(J + (i,)))))
    if kind == FUNC:
        return _chain(g[1], g[2], total_derivative(g[2], i, truncate))
    return None


def partial(e: Expr, sigma: int, J=()) -> Expr:
    """Plain partial derivative with respect to the canonical coordinate y^sigma_J."""
    return e.diff(jet_gen(sigma, J))


def partial_x(e: Expr, i: int) -> Expr:
    return e.diff((BASE, i))


def partial_jet(e: Expr, sigma: int, J=()) -> Expr:
    """Normalized partial: (r_1!...r_n!/|J|!) times the plain partial."""
    J = jet_index(J)
    return partial(e, sigma, J) * normalization(J)


@lru_cache(maxsize=200000)
def total_derivative(e: Expr, i: int, truncate: int | None = None) -> Expr:
    """Formal derivative d_i.

    With ``truncate=p`` only jet coordinates of order below ``p`` are
    differentiated, giving the truncated operator on a chart of order ``p``.
    """
    return _derive(e, lambda g: _gen_total_derivative(g, i, truncate))


def total_derivative_multi(e: Expr, J) -> Expr:
    for i in jet_index(J):
        e = total_derivative(e, i)
    return e


def fibre_degree(mono) -> int:
    return sum(ex for g, ex in mono if g[0] == JET)


def _require_polynomial_in_fibre(e: Expr):
    for g in e.generators():
        if g[0] == FUNC and g[2].has_fibre():
            raise NonPolynomialInFibre(f"{render(Expr.generator(g))} is not polynomial in the fibre coordinates")


def homogeneous_components(e: Expr) -> dict[int, Expr]:
    """Split e by total degree in the jet coordinates."""
    _require_polynomial_in_fibre(e)
    parts = {}
    for mono, c in e._terms.items():
        parts.setdefault(fibre_degree(mono), {})[mono] = c
    return {d: Expr._raw(t) for d, t in sorted(parts.items())}


def scale_fibre(e: Expr, t) -> Expr:
    """Replace every y^s_J by t*y^s_J; ``t`` is a rational or a formal parameter."""
    if isinstance(t, Expr) and not t.is_constant():
        return sum((comp * t**d for d, comp in homogeneous_components(e).items()), ZERO)
    t = t.constant_value() if isinstance(t, Expr) else Fraction(t)
    mapping = {g: Expr.generator(g) * t for g in e.all_generators() if g[0] == JET}
    return e.subs(mapping)


def zero_fibre(e: Expr) -> Expr:
    """Restrict to the zero section: every jet coordinate set to 0."""
    return e.subs({g: ZERO for g in e.all_generators() if g[0] == JET})


# -- evaluation -------------------------------------------------------------

_FLOAT_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "ln": math.log}


def _point_lookup(point):
    table = {}
    for key, value in point.items():
        if isinstance(key, Expr):
            (mono,) = key._terms
            ((key, _),) = mono
        elif isinstance(key, str):
            key = _parse_generator_name(key)
        table[key] = value
    return table


def _parse_generator_name(name):
    from .grammar import parse_generator

    return parse_generator(name)


def evaluate(e: Expr, point):
    """Evaluate at a point given as {generator: value}.

    Keys may be generator tuples, single-generator Exprs or rendered names such
    as ``"y1_[1]"``.  The result is an exact Fraction unless elementary
    functions occur, in which case it is a float.
    """
    table = _point_lookup(point)
    return _evaluate(e, table)


def _evaluate(e, table):
    total = Fraction(0)
    for mono, c in e._terms.items():
        term = c
        for g, ex in mono:
            if g[0] == FUNC:
                val = _FLOAT_FUNCS[g[1]](float(_evaluate(g[2], table)))
            elif g in table:
                val = table[g]
            else:
                raise UnboundGenerator(f"no value for {render(Expr.generator(g))}")
            term = term * val**ex
        total = total + term
    return total


# -- rendering ----------------------------------------------------------------


def render_generator(g) -> str:
    kind = g[0]
    if kind == BASE:
        return f"x{g[1]}"
    if kind == JET:
        _, k, sigma, J = g
        if k == 0:
            return f"y{sigma}"
        return f"y{sigma}_[" + " ".join(map(str, J)) + "]"
    if kind == FUNC:
        return f"{g[1]}({render(g[2])})"
    return str(g[1])


def _render_mono(mono) -> str:
    return "*".join(render_generator(g) + (f"^{ex}" if ex != 1 else "") for g, ex in mono)


def monomial_order(mono):
    return (-sum(ex for _, ex in mono), mono)


def render(e: Expr) -> str:
    if not e._terms:
        return "0"
    pieces = []
    for mono in sorted(e._terms, key=monomial_order):
        c = e._terms[mono]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = _render_mono(mono)
        else:
            body = f"{a}*{_render_mono(mono)}"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def parse(text: str, spec: JetSpec) -> Expr:
    from .grammar import parse_expr

    return parse_expr(text, spec)
