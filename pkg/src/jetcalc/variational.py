"""Euler-Lagrange, Lie-Euler and Helmholtz expressions, Tonti-Vainberg
Lagrangians, hyper-Jacobians and variationally trivial Lagrangians.

Sums written over ordered index tuples are evaluated over canonical
multi-indices with ``weight(J)`` as multiplicity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .errors import OrderExceeded, ShapeError, SymmetryError
from .expr import (
    ZERO,
    Expr,
    JetSpec,
    homogeneous_components,
    partial,
    partial_jet,
    render,
    total_derivative,
    y,
)
from .multiindex import MultiIndex, enumerate_upto, levi_civita, permutation_sign, weight


@dataclass(frozen=True)
class Lagrangian:
    spec: JetSpec
    L: Expr

    def __post_init__(self):
        if self.L.order > self.spec.r:
            raise OrderExceeded(f"Lagrangian of order {self.L.order} on a chart of order {self.spec.r}")


@dataclass(frozen=True)
class SourceForm:
    spec: JetSpec
    components: tuple

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Expr) else Expr.constant(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.spec.m:
            raise ShapeError(f"a source form needs {self.spec.m} components, got {len(comps)}")
        for c in comps:
            if c.order > self.spec.r:
                raise OrderExceeded(f"component of order {c.order} on a chart of order {self.spec.r}")

    def __getitem__(self, sigma):
        return self.components[sigma - 1]

    def is_zero(self):
        return all(c.is_zero() for c in self.components)


@dataclass
class HelmholtzTable:
    spec: JetSpec
    entries: dict = field(default_factory=dict)

    def __getitem__(self, key):
        J, sigma, nu = key
        return self.entries[(tuple(J), sigma, nu)]

    def all_zero(self) -> bool:
        return all(v.is_zero() for v in self.entries.values())

    def nonzero(self):
        return {k: v for k, v in self.entries.items() if not v.is_zero()}


def _entries(J):
    return J.entries if isinstance(J, MultiIndex) else tuple(sorted(J))


def _as_expr(L):
    return L.L if isinstance(L, Lagrangian) else L


# -- Euler-Lagrange and Lie-Euler ------------------------------------------------


def euler_lagrange_component(L: Expr, sigma: int, n: int) -> Expr:
    """E_sigma(L) = sum over canonical J of (-1)^|J| d_J (plain dL/dy^sigma_J)."""
    total = ZERO
    for J in enumerate_upto(n, L.order):
        p = partial(L, sigma, J.entries)
        if p.is_zero():
            continue
        for i in J.entries:
            p = total_derivative(p, i)
        total = total + p * (-1) ** len(J)
    return total


def euler_lagrange(lam: Lagrangian) -> SourceForm:
    spec = lam.spec
    comps = tuple(euler_lagrange_component(lam.L, s, spec.n) for s in range(1, spec.m + 1))
    order = max([spec.r * 2] + [c.order for c in comps])
    return SourceForm(spec.with_order(order), comps)


def euler_lagrange_weighted(L: Expr, sigma: int, n: int) -> Expr:
    """Same operator written with normalized partials and weights."""
    total = ZERO
    for J in enumerate_upto(n, L.order):
        p = partial_jet(L, sigma, J.entries) * weight(J)
        for i in J.entries:
            p = total_derivative(p, i)
        total = total + p * (-1) ** len(J)
    return total


def _decompose_one(P, I, top, n):
    """Q^I = sum_J weight(J) (-1)^|J| C(|I|+|J|, |I|) d_J P^{IJ}."""
    total = ZERO
    for J in enumerate_upto(n, top - len(I)):
        IJ = tuple(sorted(I + J.entries))
        value = P.get(IJ)
        if value is None or value.is_zero():
            continue
        for i in J.entries:
            value = total_derivative(value, i)
        coeff = weight(J) * (-1) ** len(J) * comb(len(I) + len(J), len(I))
        total = total + value * coeff
    return total


def lie_euler(lam: Lagrangian, I, sigma: int | None = None):
    """Lie-Euler expressions E^I_sigma(L); all sigma when ``sigma`` is None."""
    I = _entries(I)
    spec = lam.spec
    if len(I) > spec.r:
        raise OrderExceeded(f"|I| = {len(I)} exceeds the order {spec.r}")
    top = max(spec.r, lam.L.order)
    sigmas = range(1, spec.m + 1) if sigma is None else [sigma]
    out = {}
    for s in sigmas:
        P = {J.entries: partial_jet(lam.L, s, J.entries) for J in enumerate_upto(spec.n, top)}
        out[s] = _decompose_one(P, I, top, spec.n)
    return out if sigma is None else out[sigma]


def euler_decompose(P: dict, r: int, n: int) -> dict:
    """Q from P for a total differential operator sum_I (d_I xi^s) P^I_s.

    ``P`` maps ``(sigma, I)`` (I canonical) to expressions; the result has
    the same keys for every |I| <= r.
    """
    sigmas = sorted({s for s, _ in P})
    out = {}
    for s in sigmas:
        table = {tuple(sorted(I)): v for (t, I), v in P.items() if t == s}
        for I in enumerate_upto(n, r):
            out[(s, I.entries)] = _decompose_one(table, I.entries, r, n)
    return out


def divergence_pairing(xi: dict, P: dict, n: int) -> Expr:
    """sum over ordered I of (d_I xi^s) P^I_s, evaluated with weights."""
    total = ZERO
    for (s, I), value in P.items():
        if value.is_zero():
            continue
        dxi = xi[s]
        for i in I:
            dxi = total_derivative(dxi, i)
        total = total + dxi * value * weight(I)
    return total


def divergence_side(xi: dict, Q: dict, n: int) -> Expr:
    """sum over ordered I of d_I (xi^s Q^I_s), evaluated with weights."""
    total = ZERO
    for (s, I), value in Q.items():
        if value.is_zero():
            continue
        term = xi[s] * value
        for i in I:
            term = total_derivative(term, i)
        total = total + term * weight(I)
    return total


# -- Helmholtz conditions ------------------------------------------------------


def helmholtz(T: SourceForm) -> HelmholtzTable:
    """H^J_{s,v} = dnorm^J_v T_s - (-1)^|J| E^J_s(T_v) for all canonical |J| <= order."""
    spec = T.spec
    s_order = max([spec.r] + [c.order for c in T.components])
    table = HelmholtzTable(spec)
    lie = {}
    for nu in range(1, spec.m + 1):
        lam = Lagrangian(spec.with_order(s_order), T[nu])
        P = {}
        for s in range(1, spec.m + 1):
            P[s] = {J.entries: partial_jet(T[nu], s, J.entries) for J in enumerate_upto(spec.n, s_order)}
        lie[nu] = (lam, P)
    for J in enumerate_upto(spec.n, s_order):
        for sigma in range(1, spec.m + 1):
            for nu in range(1, spec.m + 1):
                _, P = lie[nu]
                euler = _decompose_one(P[sigma], J.entries, s_order, spec.n)
                value = partial_jet(T[sigma], nu, J.entries) - euler * (-1) ** len(J)
                table.entries[(J.entries, sigma, nu)] = value
    return table


def is_locally_variational(T: SourceForm) -> bool:
    return helmholtz(T).all_zero()


def tonti_lagrangian(T: SourceForm) -> Lagrangian:
    """L = int_0^1 y^s T_s(x, t y) dt, integrated degree by degree."""
    total = ZERO
    for sigma, comp in enumerate(T.components, start=1):
        for d, part in homogeneous_components(comp).items():
            total = total + y(sigma) * part * Fraction(1, d + 1)
    return Lagrangian(T.spec, total)


def is_variationally_trivial(lam: Lagrangian) -> bool:
    return euler_lagrange(lam).is_zero()


def has_functions(obj) -> bool:
    exprs = obj.components if isinstance(obj, SourceForm) else [_as_expr(obj)]
    return any(e.has_functions() for e in exprs)


# -- hyper-Jacobians ---------------------------------------------------------------


def hyper_jacobian(spec: JetSpec, multis, sigmas, free) -> Expr:
    """eps^{i_1..i_n} prod_l y^{s_l}_{I_l i_l}, the i_{s+1}..i_n fixed to ``free``."""
    multis = [tuple(sorted(I)) for I in multis]
    sigmas = list(sigmas)
    free = tuple(free)
    n, r = spec.n, spec.r
    s = len(multis)
    if len(sigmas) != s:
        raise ShapeError("need one fibre index per multi-index")
    if s > n or len(free) != n - s:
        raise ShapeError(f"need s <= n and n - s = {n - s} free indices, got {len(free)}")
    if any(len(I) != r - 1 for I in multis):
        raise ShapeError(f"hyper-Jacobian multi-indices must have length r - 1 = {r - 1}")
    if any(not 1 <= i <= n for i in free) or any(not 1 <= sg <= spec.m for sg in sigmas):
        raise ShapeError("index out of range")
    total = ZERO
    remaining = [i for i in range(1, n + 1) if i not in free]
    if len(remaining) != s:
        return ZERO
    for perm in itertools.permutations(remaining):
        sign = levi_civita(perm + free)
        term = Expr.constant(sign)
        for I, sg, i in zip(multis, sigmas, perm):
            term = term * y(sg, I + (i,))
        total = total + term
    return total


class HyperJacobianCoeffs:
    """Coefficient family antisymmetric under permutations of (sigma, I) pairs
    and of the free indices.

    Entries are keyed by ``(pairs, free)`` with ``pairs`` a tuple of
    ``(sigma, I)`` and ``free`` a tuple of base indices; each level s carries
    ``span - s`` free indices.  Only canonical arrangements are stored.
    """

    def __init__(self, n: int, m: int, length: int, span: int, entries=None):
        self.n, self.m, self.length, self.span = n, m, length, span
        self._store = {}
        for key, value in (entries or {}).items():
            self.set(*key, value)

    def _canonical(self, pairs, free):
        pairs = tuple((int(sg), tuple(sorted(I))) for sg, I in pairs)
        free = tuple(int(i) for i in free)
        s = len(pairs)
        if s > self.span or len(free) != self.span - s:
            raise ShapeError(f"level {s} needs {self.span - s} free indices, got {len(free)}")
        for sg, I in pairs:
            if not 1 <= sg <= self.m or len(I) != self.length or any(not 1 <= j <= self.n for j in I):
                raise ShapeError(f"bad pair {(sg, I)}")
        if any(not 1 <= i <= self.n for i in free):
            raise ShapeError(f"bad free indices {free}")
        sign = permutation_sign(pairs) * permutation_sign(free)
        return sign, (tuple(sorted(pairs)), tuple(sorted(free)))

    def set(self, pairs, free, value):
        value = value if isinstance(value, Expr) else Expr.constant(value)
        sign, key = self._canonical(pairs, free)
        if sign == 0:
            if not value.is_zero():
                raise SymmetryError(f"repeated pair or index in {pairs}, {free} with nonzero value")
            return
        value = value * sign
        old = self._store.get(key)
        if old is not None and old != value:
            raise SymmetryError(f"conflicting values for {key}")
        if not value.is_zero():
            self._store[key] = value

    def get(self, pairs, free) -> Expr:
        sign, key = self._canonical(pairs, free)
        if sign == 0:
            return ZERO
        value = self._store.get(key)
        return ZERO if value is None else value * sign

    def items(self):
        return self._store.items()

    def max_order(self):
        return max((v.order for v in self._store.values()), default=0)

    def levels(self):
        return range(0, self.span + 1)


def _ordered_pairs(m, n, length, s):
    singles = [(sg, I) for sg in range(1, m + 1) for I in itertools.product(range(1, n + 1), repeat=length)]
    return itertools.product(singles, repeat=s)


def _free_tuples(n, count):
    return [t for t in itertools.permutations(range(1, n + 1), count)]


def _contract(spec, coeff_of, span):
    """sum_s 1/(s!(n-s)!) sum coeff(pairs, free) * hyper-Jacobian(pairs, free)."""
    n, m, r = spec.n, spec.m, spec.r
    total = ZERO
    for s in range(0, min(span, n) + 1):
        scale = Fraction(1, factorial(s) * factorial(n - s))
        for pairs in _ordered_pairs(m, n, r - 1, s):
            for free in _free_tuples(n, n - s):
                c = coeff_of(pairs, free)
                if c.is_zero():
                    continue
                J = hyper_jacobian(spec, [I for _, I in pairs], [sg for sg, _ in pairs], free)
                total = total + c * J * scale
    return total


def trivial_lagrangian_coefficients(A: HyperJacobianCoeffs, r: int):
    """The coefficients of the hyper-Jacobians in the trivial Lagrangian built from A."""
    n = A.n

    def coeff(pairs, free):
        s = len(pairs)
        total = ZERO
        for k, (sg, I) in enumerate(pairs, start=1):
            rest = pairs[: k - 1] + pairs[k:]
            a = A.get(rest, free)
            if not a.is_zero():
                total = total + partial_jet(a, sg, tuple(sorted(I))) * (-1) ** (k - 1)
        for k in range(s + 1, n + 1):
            pos = k - s - 1
            rest = free[:pos] + free[pos + 1:]
            if s > A.span or len(rest) != A.span - s:
                continue
            a = A.get(pairs, rest)
            if not a.is_zero():
                total = total + total_derivative(a, free[pos], r - 1) * (-1) ** (k - 1)
        return total

    return coeff


def trivial_lagrangian_from_coeffs(A: HyperJacobianCoeffs, spec: JetSpec):
    """Variationally trivial Lagrangian on ``spec`` (order r) from A on order r-1.

    Returns (Lagrangian, [V^1, ..., V^n]) with L = d_j V^j.
    """
    n, r = spec.n, spec.r
    if r < 1:
        raise ShapeError("trivial Lagrangians from hyper-Jacobians need r >= 1")
    if (A.n, A.m, A.length, A.span) != (n, spec.m, r - 1, n - 1):
        raise ShapeError("coefficient family does not match the jet space")
    if A.max_order() > r - 1:
        raise OrderExceeded(f"coefficients must have order <= {r - 1}")
    L = _contract(spec, trivial_lagrangian_coefficients(A, r), n)
    V = []
    for j in range(1, n + 1):
        total = ZERO
        for s in range(0, n):
            scale = Fraction(1, factorial(s) * factorial(n - 1 - s))
            for pairs in _ordered_pairs(spec.m, n, r - 1, s):
                for lower in _free_tuples(n, n - 1):
                    eps = levi_civita((j,) + lower)
                    if not eps:
                        continue
                    a = A.get(pairs, lower[s:])
                    if a.is_zero():
                        continue
                    term = a * (eps * scale)
                    for (sg, I), i in zip(pairs, lower[:s]):
                        term = term * y(sg, tuple(I) + (i,))
                    total = total + term
        V.append(total)
    return Lagrangian(spec, L), V


def divergence(V, n) -> Expr:
    return sum((total_derivative(V[j - 1], j) for j in range(1, n + 1)), ZERO)


def check_highest_order_system(lam: Lagrangian) -> bool:
    """S^+_{p_1..p_r j_r} dnorm^{p_1..p_r}_rho dnorm^{j_1..j_r}_sigma L = 0 for all choices.

    The second partials are summed over the two orderings of (rho, sigma).
    For r = 1 this only doubles each equation. For r >= 2 and m >= 2 the
    unsummed blocks need not vanish on hyper-Jacobians, e.g.
    y1_[1 1]*y2_[1 2] - y1_[1 2]*y2_[1 1], which is a total divergence.
    """
    spec = lam.spec
    n, m, r = spec.n, spec.m, spec.r
    if r == 0:
        # no jet variables of order r + 1, the system is empty
        return True
    tops = [J.entries for J in enumerate_upto(n, r) if len(J) == r]
    second = {}
    for rho in range(1, m + 1):
        first = {P: partial_jet(lam.L, rho, P) for P in tops}
        for sigma in range(1, m + 1):
            for P in tops:
                for J in tops:
                    second[(rho, P, sigma, J)] = partial_jet(first[P], sigma, J)
    for rho in range(1, m + 1):
        for sigma in range(1, m + 1):
            for Jp in itertools.combinations_with_replacement(range(1, n + 1), r - 1):
                for K in itertools.combinations_with_replacement(range(1, n + 1), r + 1):
                    total = ZERO
                    for k in sorted(set(K)):
                        rest = list(K)
                        rest.remove(k)
                        J = tuple(sorted(Jp + (k,)))
                        value = second[(rho, tuple(rest), sigma, J)] + second[(sigma, tuple(rest), rho, J)]
                        total = total + value * Fraction(K.count(k), r + 1)
                    if not total.is_zero():
                        return False
    return True


# -- hyper-Jacobian source forms --------------------------------------------------


def hyper_jacobian_source_form(families: dict, spec: JetSpec) -> SourceForm:
    """T_s = sum_level 1/(l!(n-l)!) sum Tcoef_s(pairs, free) * hyper-Jacobian.

    ``families`` maps each sigma to a HyperJacobianCoeffs with span n whose
    multi-indices have length r - 1, r = spec.r.
    """
    comps = []
    for sigma in range(1, spec.m + 1):
        fam = families.get(sigma)
        if fam is None:
            comps.append(ZERO)
            continue
        if (fam.n, fam.m, fam.length, fam.span) != (spec.n, spec.m, spec.r - 1, spec.n):
            raise ShapeError("coefficient family does not match the jet space")
        if fam.max_order() > spec.r - 1:
            raise OrderExceeded(f"coefficients must have order <= {spec.r - 1}")
        comps.append(_contract(spec, fam.get, spec.n))
    return SourceForm(spec, tuple(comps))


def render_source(T: SourceForm) -> list[str]:
    return [f"T{s} = {render(c)}" for s, c in enumerate(T.components, start=1)]
