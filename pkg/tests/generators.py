"""Random objects for property tests, driven by an explicit ``random.Random``."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from jetcalc.expr import ONE, ZERO, Expr, JetSpec, x, y
from jetcalc.errors import SingularJacobian, SymmetryError
from jetcalc.fock import FockShape, FockTensor
from jetcalc.forms import COORDINATE, DX, DY, DiffForm, assemble_structure, sort_word, to_coordinate_basis
from jetcalc.multiindex import enumerate_indices, enumerate_upto
from jetcalc.prolong import BundleMorphism
from jetcalc.variational import HyperJacobianCoeffs


def coefficient(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2, 3]))


def generators(spec: JetSpec, max_order=None, base=True):
    top = spec.r if max_order is None else max_order
    gens = [x(i) for i in range(1, spec.n + 1)] if base else []
    for sigma in range(1, spec.m + 1):
        for J in enumerate_upto(spec.n, top):
            gens.append(y(sigma, J.entries))
    return gens


def polynomial(rng, spec: JetSpec, terms=4, degree=3, max_order=None, base=True) -> Expr:
    gens = generators(spec, max_order, base)
    total = ZERO
    for _ in range(rng.randint(1, terms)):
        mono = Expr.constant(coefficient(rng))
        for _ in range(rng.randint(0, degree)):
            mono = mono * rng.choice(gens)
        total = total + mono
    return total


def fibre_polynomial(rng, spec, terms=4, degree=3):
    """Polynomial with no constant term in the fibre variables (possibly x-dependent)."""
    total = ZERO
    gens = generators(spec, base=False)
    for _ in range(rng.randint(1, terms)):
        mono = Expr.constant(coefficient(rng)) * rng.choice(gens)
        for _ in range(rng.randint(0, degree - 1)):
            mono = mono * rng.choice(gens + [x(i) for i in range(1, spec.n + 1)])
        total = total + mono
    return total


def symbols(spec: JetSpec, max_order=None):
    top = spec.r if max_order is None else max_order
    out = [DX(i) for i in range(1, spec.n + 1)]
    for sigma in range(1, spec.m + 1):
        for J in enumerate_upto(spec.n, top):
            out.append(DY(sigma, J.entries))
    return out


def form(rng, spec: JetSpec, degree: int, terms=3, poly_terms=2, poly_degree=2) -> DiffForm:
    """Random coordinate-basis form on the chart of order spec.r."""
    syms = symbols(spec)
    out = {}
    if degree > len(syms):
        return DiffForm(spec, degree, COORDINATE, {})
    for _ in range(rng.randint(1, terms)):
        word = rng.sample(syms, degree)
        sign, word = sort_word(word)
        if not sign:
            continue
        c = polynomial(rng, spec, poly_terms, poly_degree) * sign
        out[word] = out.get(word, ZERO) + c
    return DiffForm(spec, degree, COORDINATE, out)


def evolution_components(rng, spec, terms=3, degree=2):
    return tuple(polynomial(rng, spec, terms, degree) for _ in range(spec.m))


def tensor(rng, shape: FockShape, density=0.7) -> FockTensor:
    coords = []
    for _ in shape.canonical_positions():
        coords.append(Fraction(rng.randint(-4, 4), rng.choice([1, 2])) if rng.random() < density else 0)
    return FockTensor.from_coords(shape, coords)


def coefficient_family(rng, spec: JetSpec) -> HyperJacobianCoeffs:
    """Random coefficients A on order r - 1 for a trivial Lagrangian of order r."""
    n, m, r = spec.n, spec.m, spec.r
    A = HyperJacobianCoeffs(n, m, r - 1, n - 1)
    lower = spec.with_order(r - 1)
    multis = [I.entries for I in enumerate_indices(n, r - 1)]
    for s in range(0, n):
        for _ in range(2):
            pairs = []
            for _ in range(s):
                pairs.append((rng.randint(1, m), rng.choice(multis)))
            free = rng.sample(range(1, n + 1), n - 1 - s)
            if len(set(pairs)) != len(pairs):
                continue
            try:
                A.set(pairs, free, polynomial(rng, lower, 2, 2))
            except SymmetryError:
                pass
    return A


def structured_form(rng, spec: JetSpec, q: int) -> DiffForm:
    """sum w_J ^ Phi_J + sum dw_I ^ Psi_I with random polynomial coefficients."""
    phi, psi = {}, {}
    for _ in range(2):
        sigma = rng.randint(1, spec.m)
        J = rng.choice(enumerate_upto(spec.n, spec.r - 1)).entries
        phi[(sigma, J)] = form(rng, spec.with_order(spec.r - 1), q - 1, terms=2, poly_terms=2, poly_degree=1)
        phi[(sigma, J)] = DiffForm(spec, q - 1, COORDINATE, phi[(sigma, J)].terms)
    for _ in range(2):
        sigma = rng.randint(1, spec.m)
        I = rng.choice(enumerate_indices(spec.n, spec.r - 1)).entries
        psi[(sigma, I)] = DiffForm(spec, q - 2, COORDINATE, form(rng, spec, q - 2, terms=2).terms)
    return to_coordinate_basis(assemble_structure(spec, phi, psi))


def morphism(rng, n: int, m: int) -> BundleMorphism:
    """Affine base map with a random invertible Jacobian, polynomial fibre map."""
    while True:
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        base = []
        for row in rows:
            f = Expr.constant(rng.randint(-1, 1))
            for p, a in enumerate(row, start=1):
                f = f + x(p) * a
            base.append(f)
        fibre = []
        for s in range(1, m + 1):
            F = y(s) * rng.choice([1, 2, -1, Fraction(1, 2)]) + polynomial(rng, JetSpec(n, m, 0), 2, 1)
            if m > 1:
                F = F + y(m + 1 - s) * rng.randint(-1, 1)
            fibre.append(F)
        try:
            return BundleMorphism(n, m, tuple(base), tuple(fibre))
        except SingularJacobian:
            continue


# -- hypothesis strategies -----------------------------------------------------------


def polynomials(spec, **kwargs):
    return st.randoms(use_true_random=False).map(lambda rng: polynomial(rng, spec, **kwargs))


def forms(spec, degree, **kwargs):
    return st.randoms(use_true_random=False).map(lambda rng: form(rng, spec, degree, **kwargs))


def specs(max_n=2, max_m=2, max_r=2, min_r=0):
    return st.builds(
        JetSpec,
        st.integers(1, max_n),
        st.integers(1, max_m),
        st.integers(min_r, max_r),
    )


__all__ = [
    "ONE",
    "coefficient",
    "coefficient_family",
    "evolution_components",
    "fibre_polynomial",
    "form",
    "forms",
    "morphism",
    "polynomial",
    "polynomials",
    "specs",
    "structured_form",
    "symbols",
    "tensor",
]
