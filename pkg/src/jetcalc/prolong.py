"""Prolongation of evolutions, projectable fields and fibred morphisms.

Base maps of morphisms are restricted to affine maps with a constant
invertible Jacobian, so every prolonged component stays polynomial.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError, OrderExceeded, ShapeError, SingularJacobian, UnsupportedBaseMap
from .expr import BASE, JET, ZERO, Expr, JetSpec, jet_gen, parse, total_derivative, x, y
from .forms import (
    COORDINATE,
    DX,
    DiffForm,
    Evolution,
    VectorField,
    _substitute,
    differential,
    is_dx,
    fibre_of,
    jet_derivatives,
    to_coordinate_basis,
)
from .linalg import determinant, inverse
from .multiindex import enumerate_upto
from .variational import Lagrangian, euler_lagrange


def prolong_evolution(xi: Evolution, r: int) -> dict:
    """{(sigma, J): d_J xi^sigma} for canonical |J| <= r."""
    out = {}
    for sigma, comp in enumerate(xi.components, start=1):
        for J, value in jet_derivatives(comp, xi.spec.n, r).items():
            out[(sigma, J)] = value
    return out


@dataclass(frozen=True)
class ProjectableField:
    spec: JetSpec
    base: tuple
    fibre: tuple

    def __post_init__(self):
        base = tuple(_expr(a) for a in self.base)
        fibre = tuple(_expr(b) for b in self.fibre)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "fibre", fibre)
        if len(base) != self.spec.n or len(fibre) != self.spec.m:
            raise ShapeError(f"need {self.spec.n} base and {self.spec.m} fibre components")
        if any(a.has_fibre() for a in base):
            raise InputError("base components of a projectable field must depend on x only")
        if any(b.order > 0 for b in fibre):
            raise OrderExceeded("fibre components of a projectable field must have order 0")


def prolong_projectable(xi: ProjectableField, r: int) -> dict:
    """b_{Ji} = d_i b_J - y_{Jl} d_i a^l, starting from b_() = b."""
    n = xi.spec.n
    da = {(l, i): total_derivative(a, i) for l, a in enumerate(xi.base, start=1) for i in range(1, n + 1)}
    out = {}
    for sigma, b in enumerate(xi.fibre, start=1):
        out[(sigma, ())] = b
        for J in enumerate_upto(n, r):
            J = J.entries
            if not J:
                continue
            parent, i = J[:-1], J[-1]
            value = total_derivative(out[(sigma, parent)], i)
            for l in range(1, n + 1):
                value = value - y(sigma, parent + (l,)) * da[(l, i)]
            out[(sigma, J)] = value
    return out


def projectable_vector_field(xi: ProjectableField, r: int) -> VectorField:
    """The prolonged field, usable with forms.lie_derivative and interior_product."""
    fibre = {k: v for k, v in prolong_projectable(xi, r).items() if not v.is_zero()}
    base = {i: a for i, a in enumerate(xi.base, start=1) if not a.is_zero()}
    return VectorField(xi.spec.n, xi.spec.m, base, fibre, r)


# -- bundle morphisms ----------------------------------------------------------------


def _expr(value):
    return value if isinstance(value, Expr) else Expr.constant(value)


def _affine_part(f: Expr, n: int):
    """(row of dF/dx^p, constant) for an affine expression in x, else UnsupportedBaseMap."""
    row = [Fraction(0)] * n
    const = Fraction(0)
    for mono, c in f.items():
        if not mono:
            const = c
            continue
        if len(mono) != 1 or mono[0][1] != 1 or mono[0][0][0] != BASE:
            raise UnsupportedBaseMap("base maps must be affine in the base coordinates")
        i = mono[0][0][1]
        if not 1 <= i <= n:
            raise UnsupportedBaseMap(f"base map refers to x{i} outside 1..{n}")
        row[i - 1] = c
    return row, const


@dataclass(frozen=True)
class BundleMorphism:
    """x' = f(x) (affine), y' = F(x, y); both charts share n and m."""

    n: int
    m: int
    base: tuple
    fibre: tuple
    jacobian: tuple = field(init=False)
    Q: tuple = field(init=False)
    det: Fraction = field(init=False)

    def __post_init__(self):
        base = tuple(_expr(f) for f in self.base)
        fibre = tuple(_expr(F) for F in self.fibre)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "fibre", fibre)
        if len(base) != self.n or len(fibre) != self.m:
            raise ShapeError(f"need {self.n} base and {self.m} fibre components")
        rows = [_affine_part(f, self.n)[0] for f in base]
        det = determinant(rows)
        if det == 0:
            raise SingularJacobian("the Jacobian of the base map is singular")
        for F in fibre:
            if F.order > 0:
                raise OrderExceeded("fibre components of a morphism must have order 0")
            for g in F.all_generators():
                if g[0] == JET and not 1 <= g[2] <= self.m or g[0] == BASE and not 1 <= g[1] <= self.n:
                    raise ShapeError("fibre map refers to a coordinate outside the chart")
        object.__setattr__(self, "jacobian", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "Q", tuple(tuple(r) for r in inverse(rows)))
        object.__setattr__(self, "det", det)

    @classmethod
    def identity(cls, n: int, m: int) -> BundleMorphism:
        return cls(n, m, tuple(x(i) for i in range(1, n + 1)), tuple(y(s) for s in range(1, m + 1)))

    def base_substitution(self) -> dict:
        return {(BASE, i): f for i, f in enumerate(self.base, start=1)}


def prolong_morphism(phi: BundleMorphism, r: int) -> dict:
    """{(sigma, J): F_J} with F_{Ji} = Q^l_i d_l F_J, Q the inverse Jacobian."""
    n = phi.n
    out = {}
    for sigma, F in enumerate(phi.fibre, start=1):
        out[(sigma, ())] = F
        for J in enumerate_upto(n, r):
            J = J.entries
            if not J:
                continue
            parent, i = J[:-1], J[-1]
            prev = out[(sigma, parent)]
            value = ZERO
            for l in range(1, n + 1):
                q = phi.Q[l - 1][i - 1]
                if q:
                    value = value + total_derivative(prev, l) * q
            out[(sigma, J)] = value
    return out


def prolonged_substitution(phi: BundleMorphism, r: int) -> dict:
    """Generator map sending target coordinates to their pullbacks by j^r phi."""
    mapping = phi.base_substitution()
    for (sigma, J), value in prolong_morphism(phi, r).items():
        mapping[jet_gen(sigma, J)] = value
    return mapping


def pull_expr(phi: BundleMorphism, e: Expr, r: int | None = None) -> Expr:
    return e.subs(prolonged_substitution(phi, e.order if r is None else r))


def compose(phi: BundleMorphism, psi: BundleMorphism) -> BundleMorphism:
    """phi after psi."""
    if (phi.n, phi.m) != (psi.n, psi.m):
        raise ShapeError("morphisms act on different jet spaces")
    mapping = psi.base_substitution()
    mapping.update({jet_gen(s, ()): F for s, F in enumerate(psi.fibre, start=1)})
    return BundleMorphism(
        phi.n,
        phi.m,
        tuple(f.subs(psi.base_substitution()) for f in phi.base),
        tuple(F.subs(mapping) for F in phi.fibre),
    )


def pullback_form(phi: BundleMorphism, rho: DiffForm) -> DiffForm:
    """(j^r phi)^* rho in the coordinate basis of the source chart."""
    r = rho.spec.r
    mapping = prolonged_substitution(phi, r)
    prolonged = prolong_morphism(phi, r)
    coord = to_coordinate_basis(rho)
    n = phi.n
    images = {}

    def image(s):
        if s not in images:
            if is_dx(s):
                row = phi.jacobian[s[1] - 1]
                images[s] = {DX(p): Expr.constant(row[p - 1]) for p in range(1, n + 1) if row[p - 1]}
            else:
                sigma, J = fibre_of(s)
                images[s] = differential(prolonged[(sigma, J)], n)
        return images[s]

    terms = {w: c.subs(mapping) for w, c in coord.items()}
    return DiffForm.build(rho.spec, rho.degree, COORDINATE, _substitute(terms, image))


def el_naturality_sides(phi: BundleMorphism, lam: Lagrangian):
    """Both sides of E_s(L) = det * (dF^v/dy^s) * (E_v(L') o j phi).

    ``lam`` is read as L' in the target chart; the source Lagrangian is
    L = det * (L' o j^r phi).
    """
    spec = lam.spec
    if (spec.n, spec.m) != (phi.n, phi.m):
        raise ShapeError("Lagrangian and morphism live on different jet spaces")
    r = max(spec.r, lam.L.order)
    source = Lagrangian(spec.with_order(r), pull_expr(phi, lam.L, r) * phi.det)
    lhs = euler_lagrange(source).components
    target = euler_lagrange(Lagrangian(spec.with_order(r), lam.L)).components
    mapping = prolonged_substitution(phi, 2 * r)
    pulled = [t.subs(mapping) for t in target]
    rhs = []
    for sigma in range(1, spec.m + 1):
        total = ZERO
        for nu, F in enumerate(phi.fibre, start=1):
            dF = F.diff(jet_gen(sigma, ()))
            if not dF.is_zero():
                total = total + dF * pulled[nu - 1]
        rhs.append(total * phi.det)
    return list(lhs), rhs


def check_el_naturality(phi: BundleMorphism, lam: Lagrangian) -> bool:
    lhs, rhs = el_naturality_sides(phi, lam)
    return all((a - b).is_zero() for a, b in zip(lhs, rhs))


# -- input files -------------------------------------------------------------------------


def _base_row(row, n, spec):
    if isinstance(row, str):
        return parse(row, spec)
    if isinstance(row, list) and len(row) in (n, n + 1) and all(isinstance(v, (int, str)) for v in row):
        coeffs = [Fraction(v) for v in row]
        total = Expr.constant(coeffs[n] if len(coeffs) > n else 0)
        for p in range(n):
            total = total + x(p + 1) * coeffs[p]
        return total
    raise InputError(f"base row must be an expression or {n} (+1) coefficients, got {row!r}")


def load_morphism(text: str, n: int | None = None, m: int | None = None) -> BundleMorphism:
    """Read {"n": .., "m": .., "base": [...], "fibre": [...]}.

    Base rows are expression strings in x1..xn or coefficient lists
    [a_1, ..., a_n, c] meaning a_p x^p + c.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"morphism file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "base" not in data or "fibre" not in data:
        raise InputError("morphism file needs 'base' and 'fibre' fields")
    n = int(data.get("n", n if n is not None else len(data["base"])))
    m = int(data.get("m", m if m is not None else len(data["fibre"])))
    spec = JetSpec(n, m, 0)
    base = tuple(_base_row(row, n, spec) for row in data["base"])
    fibre = tuple(parse(str(F), spec) for F in data["fibre"])
    return BundleMorphism(n, m, base, fibre)
