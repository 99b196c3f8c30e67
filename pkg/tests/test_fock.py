import itertools
import json
import random
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from generators import tensor
from jetcalc.errors import NotInKernel, ShapeConstraint, SymmetryError
from jetcalc.fock import (
    FockShape,
    FockTensor,
    annihilate_boson,
    annihilate_fermion,
    apply_B,
    apply_B_chain,
    apply_B_star,
    apply_B_via_creation,
    create_boson,
    create_fermion,
    dump_tensor,
    is_traceless,
    load_tensor,
    operator_matrix,
    particle_numbers,
    sector_basis,
    solve_kernel_representation,
    trace_decompose,
)
from jetcalc.linalg import rank


def pairing(X, Y):
    """Fock pairing: componentwise sum weighted by k! r_1! ... r_s!."""
    if X.data is None:
        return Fraction(0)
    w = factorial(X.shape.k)
    for r in X.shape.bosonic:
        w *= factorial(r)
    return w * sum((a * b for a, b in zip(X.data.flat, Y.data.flat)), Fraction(0))


def shapes(max_n=3, max_deg=3, groups=(1, 2)):
    for n in range(1, max_n + 1):
        for s in groups:
            for k in range(0, max_deg + 1):
                for bos in itertools.product(range(max_deg + 1), repeat=s):
                    if k + sum(bos) <= max_deg:
                        yield FockShape(n, k, bos)


def test_vacuum_and_creation():
    vac = FockTensor.vacuum(2)
    e1 = create_fermion(1, vac)
    assert e1.coords() == [1, 0]
    assert create_fermion(1, e1).is_zero()
    assert annihilate_fermion(1, vac).shape.null
    assert particle_numbers(vac) == (0, ())


def test_car_and_ccr_on_bases():
    for shape in shapes(groups=(1,)):
        n = shape.n
        for X in sector_basis(shape):
            for l, m in itertools.product(range(1, n + 1), repeat=2):
                delta = X if l == m else X * 0
                car = annihilate_fermion(l, create_fermion(m, X)) + create_fermion(m, annihilate_fermion(l, X))
                assert car == delta
                ccr = annihilate_boson(1, l, create_boson(1, m, X)) - create_boson(1, m, annihilate_boson(1, l, X))
                assert ccr == delta
                # creators (anti)commute among themselves
                assert (create_fermion(l, create_fermion(m, X)) + create_fermion(m, create_fermion(l, X))).is_zero()
                assert create_boson(1, l, create_boson(1, m, X)) == create_boson(1, m, create_boson(1, l, X))


def test_B_on_scalar_is_delta():
    one = FockTensor.vacuum(2, 1)
    B = apply_B(1, one)
    assert B.shape == FockShape(2, 1, (1,))
    assert B.data[0, 0] == 1 and B.data[1, 1] == 1 and B.data[0, 1] == 0


def test_B_relations_on_bases():
    for shape in shapes(groups=(1, 2)):
        s = len(shape.bosonic)
        for X in sector_basis(shape):
            for a in range(1, s + 1):
                assert apply_B(a, apply_B(a, X)).is_zero()
                mult = shape.bosonic[a - 1] - shape.k + shape.n
                anti = apply_B(a, apply_B_star(a, X)) + apply_B_star(a, apply_B(a, X))
                assert anti == X * mult
                assert apply_B(a, X) == apply_B_via_creation(a, X)
                for b in range(a + 1, s + 1):
                    assert (apply_B(a, apply_B(b, X)) + apply_B(b, apply_B(a, X))).is_zero()


def test_anticommutator_example():
    X = tensor(random.Random(2), FockShape(2, 1, (1,)))
    assert apply_B(1, apply_B_star(1, X)) + apply_B_star(1, apply_B(1, X)) == X * 2


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_B_star_is_adjoint(rng):
    shape = FockShape(rng.randint(2, 3), rng.randint(0, 1), (rng.randint(0, 2),))
    X = tensor(rng, shape)
    Y = tensor(rng, shape.shifted(dk=1, alpha=1, dr=1))
    assert pairing(apply_B(1, X), Y) == pairing(X, apply_B_star(1, Y))


def test_traceless_examples():
    shape = FockShape(2, 1, (1,))
    assert is_traceless(FockTensor(shape, np.array([[1, 0], [0, -1]], dtype=object)))
    assert not is_traceless(apply_B(1, FockTensor.vacuum(2, 1)))
    assert is_traceless(FockTensor.vacuum(2, 1))


def test_B1B2_is_injective():
    for r1, r2 in itertools.product(range(4), repeat=2):
        shape = FockShape(2, 0, (r1, r2))
        matrix, _ = operator_matrix(lambda t: apply_B_chain(t, 2), shape)
        assert rank(matrix) == shape.dimension()


def test_trace_decomposition_examples():
    shape = FockShape(2, 1, (1,))
    delta = apply_B(1, FockTensor.vacuum(2, 1))
    X0, parts = trace_decompose(delta)
    assert X0.is_zero() and parts[0].coords() == [1]
    X0, parts = trace_decompose(FockTensor(shape))
    assert X0.is_zero() and all(p.is_zero() for p in parts)
    traceless = FockTensor(shape, np.array([[0, 1], [0, 0]], dtype=object))
    X0, parts = trace_decompose(traceless)
    assert X0 == traceless and all(p.is_zero() for p in parts)
    with pytest.raises(ShapeConstraint):
        trace_decompose(FockTensor(FockShape(2, 1, (1, 1))))


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_trace_decomposition_properties(rng):
    n = rng.randint(2, 3)
    s = rng.randint(1, 2) if n == 3 else 1
    k = rng.randint(0, n - s)
    shape = FockShape(n, k, tuple(rng.randint(0, 2) for _ in range(s)))
    X = tensor(rng, shape)
    X0, parts = trace_decompose(X)
    assert is_traceless(X0)
    total = X0
    for a, part in enumerate(parts, start=1):
        total = total + apply_B(a, part)
    assert total == X
    Y = tensor(rng, parts[0].shape) if not parts[0].shape.null else parts[0]
    again, _ = trace_decompose(X + apply_B(1, Y))
    assert again == X0


@settings(max_examples=15, deadline=None)
@given(st.randoms(use_true_random=False))
def test_kernel_solver_reconstructs(rng):
    shape = FockShape(rng.randint(2, 3), rng.randint(0, 1), (rng.randint(0, 2),))
    X = apply_B(1, tensor(rng, shape))
    (X1,) = solve_kernel_representation(X, 1)
    assert apply_B(1, X1) == X


def test_kernel_solver_errors():
    X = FockTensor.vacuum(2, 1)
    with pytest.raises(NotInKernel):
        solve_kernel_representation(X, 1)
    zero = FockTensor(FockShape(2, 0, (1, 1)))
    assert all(p.is_zero() for p in solve_kernel_representation(zero, 2))


def test_tensor_file_round_trip():
    text = json.dumps({"n": 2, "k": 2, "bosonic": [1], "entries": [[[2, 1, 1], "3/2"]]})
    X = load_tensor(text)
    assert X.data[0, 1, 0] == Fraction(-3, 2) and X.data[1, 0, 0] == Fraction(3, 2)
    assert load_tensor(json.dumps(dump_tensor(X))) == X
    with pytest.raises(SymmetryError):
        load_tensor(json.dumps({"n": 2, "k": 2, "bosonic": [], "entries": [[[1, 1], 1]]}))
    with pytest.raises(SymmetryError):
        load_tensor(json.dumps({"n": 2, "k": 0, "bosonic": [2], "entries": [[[1, 2], 1], [[2, 1], 2]]}))
