"""Acceptance suite: one PASS/FAIL line per criterion.

Every criterion is exact except the finite-difference cross-check, whose
tolerance is pinned in FD_TOLERANCE.  Random inputs come from fixed seeds.
"""

import itertools
import math
import random
from fractions import Fraction

import pytest

from generators import coefficient_family, form, morphism, polynomial, structured_form, tensor
from jetcalc.expr import ZERO, JetSpec, evaluate, parse, partial_jet, total_derivative
from jetcalc.fock import (
    FockShape,
    annihilate_boson,
    annihilate_fermion,
    apply_B,
    apply_B_chain,
    apply_B_star,
    create_boson,
    create_fermion,
    is_traceless,
    operator_matrix,
    sector_basis,
    trace_decompose,
)
from jetcalc.forms import (
    DiffForm,
    assemble_structure,
    contact_component,
    contact_components,
    contact_homotopy,
    contact_structure_decomposition,
    exterior_derivative,
    horizontalize,
    is_contact,
    pullback,
    wedge,
    zero_section_pullback,
)
from jetcalc.linalg import rank
from jetcalc.multiindex import enumerate_upto
from jetcalc.prolong import check_el_naturality, pullback_form
from jetcalc.variational import (
    Lagrangian,
    check_highest_order_system,
    divergence,
    euler_lagrange,
    helmholtz,
    is_variationally_trivial,
    tonti_lagrangian,
    trivial_lagrangian_from_coeffs,
)

FD_TOLERANCE = 1e-6
FD_POINTS = 64
FD_INTERVAL = (0.0, 0.02)


@pytest.fixture
def report(capsys):
    def emit(name, failures, total):
        status = "PASS" if not failures else "FAIL"
        with capsys.disabled():
            print(f"\n{status} {name}: {total - len(failures)}/{total}" + (f" failing {failures[:5]}" if failures else ""))
        assert not failures, f"{name}: {failures[:5]}"

    return emit


def small_spec(rng, max_r=2):
    return JetSpec(rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, max_r))


def test_el_annihilates_divergences(report):
    rng = random.Random(101)
    failures = []
    for case in range(50):
        spec = small_spec(rng)
        lower = spec.with_order(spec.r - 1)
        V = [polynomial(rng, lower, 3, 3) for _ in range(spec.n)]
        lam = Lagrangian(spec, divergence(V, spec.n))
        if not euler_lagrange(lam).is_zero():
            failures.append(case)
    report("EL annihilates divergences", failures, 50)


def test_helmholtz_of_el(report):
    rng = random.Random(102)
    failures = []
    for case in range(30):
        spec = JetSpec(rng.randint(1, 2), rng.randint(1, 2), 1) if rng.random() < 0.6 else JetSpec(1, 1, 2)
        lam = Lagrangian(spec, polynomial(rng, spec, 3, 3))
        if not helmholtz(euler_lagrange(lam)).all_zero():
            failures.append(case)
    report("Helmholtz of EL vanishes", failures, 30)


def test_tonti_round_trip(report):
    rng = random.Random(103)
    failures = []
    for case in range(20):
        spec = JetSpec(rng.randint(1, 2), rng.randint(1, 2), 1)
        T = euler_lagrange(Lagrangian(spec, polynomial(rng, spec, 3, 3)))
        back = euler_lagrange(tonti_lagrangian(T))
        if any(not (a - b).is_zero() for a, b in zip(back.components, T.components)):
            failures.append(case)
    report("Tonti round trip", failures, 20)


def test_contact_grading(report):
    rng = random.Random(104)
    failures = []
    for case in range(30):
        spec = JetSpec(rng.randint(1, 2), rng.randint(1, 2), rng.randint(0, 2))
        rho = form(rng, spec, rng.randint(0, 3))
        parts = contact_components(rho)
        total = parts[0]
        for p in parts[1:]:
            total = total + p
        mu, nu = form(rng, spec, 1), form(rng, spec, rng.randint(0, 1))
        ok = (
            total == pullback(rho, spec.r + 1)
            and parts[0] == horizontalize(rho)
            and horizontalize(wedge(mu, nu)) == wedge(horizontalize(mu), horizontalize(nu))
        )
        if not ok:
            failures.append(case)
    report("Contact grading", failures, 30)


def _homotopy_sum(rho):
    out = contact_homotopy(exterior_derivative(rho))
    if rho.degree > 0:
        out = out + exterior_derivative(contact_homotopy(rho))
    return out


def test_homotopy_identities(report):
    rng = random.Random(105)
    failures = []
    for case in range(30):
        spec = JetSpec(rng.randint(1, 2), rng.randint(1, 2), 1)
        q = rng.randint(0, 2)
        rho = form(rng, spec, q)
        ok = _homotopy_sum(rho) + zero_section_pullback(rho) == rho
        for k in range(1, q + 1):
            pk = contact_component(rho, k)
            ok = ok and _homotopy_sum(pk) == pk
            ok = ok and contact_component(contact_homotopy(rho), k - 1) == contact_homotopy(pk)
        if not ok:
            failures.append(case)
    report("Homotopy identities", failures, 30)


def test_commutator_suite(report):
    rng = random.Random(106)
    spec = JetSpec(2, 2, 2)
    failures = []
    for case in range(50):
        f = polynomial(rng, spec, 4, 3)
        ok = total_derivative(total_derivative(f, 1), 2) == total_derivative(total_derivative(f, 2), 1)
        for J in enumerate_upto(spec.n, spec.r + 1):
            J = J.entries
            if not J:
                continue
            for sigma, i in itertools.product((1, 2), (1, 2)):
                lhs = partial_jet(total_derivative(f, i), sigma, J) - total_derivative(partial_jet(f, sigma, J), i)
                rhs = ZERO
                for pos, j in enumerate(J):
                    if j == i:
                        rhs = rhs + partial_jet(f, sigma, J[:pos] + J[pos + 1:])
                ok = ok and lhs == rhs * Fraction(1, len(J))
        if not ok:
            failures.append(case)
    report("Commutator suite", failures, 50)


def fock_shapes():
    """Every sector with each degree <= 3 and n <= 3.

    The exception is n = 3 with two bosonic groups.  There the dense arrays
    reach 3^11 entries, so those sectors are capped at total degree <= 3.
    """
    for n in range(1, 4):
        for s in (1, 2):
            for k in range(4):
                for bos in itertools.product(range(4), repeat=s):
                    if n == 3 and s == 2 and k + sum(bos) > 3:
                        continue
                    yield FockShape(n, k, bos)


def test_fock_algebra(report):
    failures, total = [], 0
    for shape in fock_shapes():
        n = shape.n
        for X in sector_basis(shape):
            total += 1
            ok = True
            for l, m in itertools.product(range(1, n + 1), repeat=2):
                delta = X if l == m else X * 0
                ok = ok and annihilate_fermion(l, create_fermion(m, X)) + create_fermion(m, annihilate_fermion(l, X)) == delta
                for a in range(1, len(shape.bosonic) + 1):
                    ok = ok and annihilate_boson(a, l, create_boson(a, m, X)) - create_boson(a, m, annihilate_boson(a, l, X)) == delta
            for a in range(1, len(shape.bosonic) + 1):
                ok = ok and apply_B(a, apply_B(a, X)).is_zero()
                mult = shape.bosonic[a - 1] - shape.k + n
                ok = ok and apply_B(a, apply_B_star(a, X)) + apply_B_star(a, apply_B(a, X)) == X * mult
            if not ok:
                failures.append(shape)
    report("Fock algebra (CCR, CAR, {B,B*}, B^2 = 0)", failures, total)


def test_B1B2_is_injective(report):
    failures = []
    for r1, r2 in itertools.product(range(4), repeat=2):
        shape = FockShape(2, 0, (r1, r2))
        matrix, _ = operator_matrix(lambda t: apply_B_chain(t, 2), shape)
        if rank(matrix) != shape.dimension():
            failures.append((r1, r2))
    report("ker(B1 B2) = 0 on H_{0,r1,r2}, n = 2", failures, 16)


def test_trace_decomposition(report):
    rng = random.Random(109)
    failures = []
    for case in range(30):
        n = rng.randint(2, 3)
        s = rng.randint(1, n - 1)
        k = rng.randint(0, n - s)
        shape = FockShape(n, k, tuple(rng.randint(0, 2) for _ in range(s)))
        X = tensor(rng, shape)
        X0, parts = trace_decompose(X)
        total = X0
        for a, part in enumerate(parts, start=1):
            total = total + apply_B(a, part)
        again, _ = trace_decompose(X)
        ok = is_traceless(X0) and total == X and again == X0
        if not parts[0].shape.null:
            shifted, _ = trace_decompose(X + apply_B(1, tensor(rng, parts[0].shape)))
            ok = ok and shifted == X0
        if not ok:
            failures.append(case)
    report("Trace decomposition", failures, 30)


def test_trivial_lagrangian_construction(report):
    rng = random.Random(110)
    failures = []
    for case in range(20):
        spec = small_spec(rng)
        A = coefficient_family(rng, spec)
        lam, V = trivial_lagrangian_from_coeffs(A, spec)
        ok = (
            (divergence(V, spec.n) - lam.L).is_zero()
            and is_variationally_trivial(Lagrangian(spec.with_order(spec.r + 1), lam.L))
            and check_highest_order_system(lam)
        )
        if not ok:
            failures.append(case)
    report("Trivial-Lagrangian construction", failures, 20)


def test_structure_decomposition(report):
    rng = random.Random(111)
    failures = []
    for case in range(10):
        spec = JetSpec(2, rng.randint(1, 2), rng.randint(1, 2))
        rho = structured_form(rng, spec, 2)
        phi, psi = contact_structure_decomposition(rho)
        if not (is_contact(rho) and assemble_structure(spec, phi, psi) == rho):
            failures.append(case)
    report("Structure decomposition", failures, 10)


def test_naturality(report):
    rng = random.Random(112)
    failures, total = [], 0
    for case in range(10):
        n = 1 + case % 2
        spec = JetSpec(n, 1, 1)
        phi = morphism(rng, n, 1)
        for j in range(5):
            total += 1
            if not check_el_naturality(phi, Lagrangian(spec, polynomial(rng, spec, 3, 2))):
                failures.append((case, j))
        chart = JetSpec(n, 1, 2)
        for J in [J.entries for J in enumerate_upto(n, 1)]:
            total += 1
            if not horizontalize(pullback_form(phi, DiffForm.omega(chart, 1, J))).is_zero():
                failures.append((case, "contact", J))
    report("Naturality and contact pullback", failures, total)


def _sample():
    a, b = FD_INTERVAL
    h = (b - a) / (FD_POINTS - 1)
    xs = [a + i * h for i in range(FD_POINTS)]
    ys = [math.sin(3 * t) + t * t / 2 for t in xs]
    jets = {
        "y1": ys,
        "y1_[1]": [3 * math.cos(3 * t) + t for t in xs],
        "y1_[1 1]": [-9 * math.sin(3 * t) + 1 for t in xs],
    }
    return xs, ys, h, jets


def _action(L, xs, ys, h):
    """Sum of h * L(x_i, y_i, central difference) over interior points."""
    total = 0.0
    for i in range(1, len(xs) - 1):
        slope = (ys[i + 1] - ys[i - 1]) / (2 * h)
        total += h * float(evaluate(L, {"x1": xs[i], "y1": ys[i], "y1_[1]": slope}))
    return total


def test_finite_difference_cross_check(report):
    spec = JetSpec(1, 1, 1)
    xs, ys, h, jets = _sample()
    eps = 1e-6
    failures, total = [], 0
    for text in ("1/2*y1_[1]^2", "1/2*(y1^2 - y1_[1]^2)"):
        L = parse(text, spec)
        (E,) = euler_lagrange(Lagrangian(spec, L)).components
        for j in range(2, len(xs) - 2):
            total += 1
            up, down = list(ys), list(ys)
            up[j] += eps
            down[j] -= eps
            gradient = (_action(L, xs, up, h) - _action(L, xs, down, h)) / (2 * eps * h)
            point = {"x1": xs[j]}
            point.update({name: values[j] for name, values in jets.items()})
            if abs(gradient - float(evaluate(E, point))) > FD_TOLERANCE:
                failures.append((text, j))
    report(f"Finite-difference EL cross-check (tol {FD_TOLERANCE:g})", failures, total)
