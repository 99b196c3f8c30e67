"""Mixed-symmetry tensors in the Fock sectors H_{k, r_1, ..., r_s}.

A tensor is a dense array of Fractions with ``k`` fermionic axes (fully
antisymmetric) followed by ``s`` groups of bosonic axes (symmetric within each
group).  Sectors with a negative degree are the null space; operators that
would land there return a tensor with ``data = None``.

Conventions:

* creation operators insert the new index in the first slot and project,
  ``(b*_l f) = S^+ (e_l (x) f)``, ``(a*_l f) = S^- (e_l (x) f)``;
* annihilation operators contract the first slot,
  ``(b^l f)^{...} = deg(f) f^{l...}``, ``(a^l f)^{...} = deg(f) f^{l...}``;
* ``B_a = sum_i b*_(a)i a*_i`` and ``B*_a = sum_i a^i b^i_(a)``.

With these, ``{a^l, a*_m} = [b^l, b*_m] = delta`` and
``{B_a, B*_a} = N_a - N_f + n``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import NotInKernel, ShapeConstraint, ShapeError, SymmetryError
from .linalg import MinNormSolver
from .multiindex import permutation_sign


@dataclass(frozen=True)
class FockShape:
    n: int
    k: int
    bosonic: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bosonic", tuple(self.bosonic))
        if self.n < 1:
            raise ShapeError("index range must be >= 1")

    @property
    def null(self) -> bool:
        return self.k < 0 or any(r < 0 for r in self.bosonic)

    @property
    def rank(self) -> int:
        return self.k + sum(self.bosonic)

    @property
    def dims(self) -> tuple:
        return (self.n,) * self.rank

    def group_axes(self, alpha: int) -> list[int]:
        start = self.k + sum(self.bosonic[: alpha - 1])
        return list(range(start, start + self.bosonic[alpha - 1]))

    def shifted(self, dk=0, alpha=None, dr=0) -> FockShape:
        bos = list(self.bosonic)
        if alpha is not None:
            bos[alpha - 1] += dr
        return FockShape(self.n, self.k + dk, tuple(bos))

    def canonical_positions(self) -> list[tuple]:
        """One 0-based position per independent component."""
        if self.null:
            return []
        parts = [list(itertools.combinations(range(self.n), self.k))]
        for r in self.bosonic:
            parts.append(list(itertools.combinations_with_replacement(range(self.n), r)))
        return [sum(choice, ()) for choice in itertools.product(*parts)]

    def orbit(self, pos) -> list[tuple]:
        """All (sign, position) obtained by permuting within the symmetry blocks."""
        k = self.k
        blocks = [pos[:k]]
        offset = k
        for r in self.bosonic:
            blocks.append(pos[offset:offset + r])
            offset += r
        fermion = [(permutation_sign(p), p) for p in set(itertools.permutations(blocks[0]))]
        choices = [fermion] + [[(1, p) for p in set(itertools.permutations(b))] for b in blocks[1:]]
        out = []
        for combo in itertools.product(*choices):
            sign = 1
            full = ()
            for sg, p in combo:
                sign *= sg
                full += p
            out.append((sign, full))
        return out

    def dimension(self) -> int:
        return len(self.canonical_positions())


def _zeros(shape: FockShape):
    return np.full(shape.dims, Fraction(0), dtype=object)


class FockTensor:
    __slots__ = ("shape", "data")

    def __init__(self, shape: FockShape, data=None, validate=True):
        self.shape = shape
        if shape.null:
            self.data = None
            return
        if data is None:
            data = _zeros(shape)
        data = np.asarray(data, dtype=object)
        if data.shape != shape.dims:
            raise ShapeError(f"array shape {data.shape} does not match sector {shape.dims}")
        if validate:
            data = np.vectorize(Fraction, otypes=[object])(data) if data.size else data
            if not _has_symmetry(shape, data):
                raise SymmetryError("tensor lacks the antisymmetry/symmetry of its sector")
        self.data = data

    @classmethod
    def project(cls, shape: FockShape, data) -> FockTensor:
        """Project an arbitrary dense array onto the sector."""
        data = np.asarray(data, dtype=object)
        return cls(shape, _project_sector(shape, data), validate=False)

    @classmethod
    def vacuum(cls, n: int, groups: int = 0) -> FockTensor:
        shape = FockShape(n, 0, (0,) * groups)
        return cls(shape, np.array(Fraction(1), dtype=object))

    @classmethod
    def from_coords(cls, shape: FockShape, coords) -> FockTensor:
        data = _zeros(shape) if not shape.null else None
        for pos, value in zip(shape.canonical_positions(), coords):
            if value:
                for sign, p in shape.orbit(pos):
                    data[p] = Fraction(value) * sign
        return cls(shape, data, validate=False)

    def coords(self) -> list[Fraction]:
        if self.data is None:
            return []
        return [self.data[p] for p in self.shape.canonical_positions()]

    def is_zero(self) -> bool:
        return self.data is None or not any(v != 0 for v in self.data.flat)

    def __add__(self, other):
        if other.shape != self.shape:
            raise ShapeError(f"sectors differ: {self.shape} vs {other.shape}")
        if self.data is None:
            return self
        return FockTensor(self.shape, self.data + other.data, validate=False)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, c):
        if self.data is None:
            return self
        return FockTensor(self.shape, self.data * Fraction(c), validate=False)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, FockTensor) or other.shape != self.shape:
            return False
        if self.data is None:
            return True
        return bool(np.all(self.data == other.data))

    __hash__ = None

    def __repr__(self):
        return f"FockTensor({self.shape}, nonzero={sum(1 for v in (self.data.flat if self.data is not None else []) if v)})"


def _project_sector(shape: FockShape, data):
    """S^- on the fermionic slots and S^+ on each bosonic group.

    Evaluated at canonical positions only, then spread over the orbits.
    """
    group = _block_permutations(shape.k, shape.bosonic)
    out = _zeros(shape)
    for pos in shape.canonical_positions():
        total = Fraction(0)
        for sign, perm in group:
            v = data[tuple(pos[i] for i in perm)]
            if v:
                total += v if sign > 0 else -v
        if total:
            total /= len(group)
            for sg, p in shape.orbit(pos):
                out[p] = total * sg
    return out


@lru_cache(maxsize=None)
def _block_permutations(k: int, bosonic: tuple) -> list[tuple]:
    """(sign, axis permutation) for S_k x S_{r_1} x ... acting blockwise."""
    blocks = [list(range(k))]
    offset = k
    for r in bosonic:
        blocks.append(list(range(offset, offset + r)))
        offset += r
    out = []
    for combo in itertools.product(*(itertools.permutations(b) for b in blocks)):
        out.append((permutation_sign(combo[0]) if k > 1 else 1, sum(combo, ())))
    return out


def _has_symmetry(shape: FockShape, data) -> bool:
    return bool(np.all(_project_sector(shape, data) == data))


def _null(shape: FockShape) -> FockTensor:
    return FockTensor(shape, None, validate=False)


def _result(X: FockTensor, shape: FockShape) -> FockTensor | None:
    """The answer when it is forced to vanish, else None."""
    if shape.null:
        return _null(shape)
    if X.data is None:
        return FockTensor(shape, _zeros(shape), validate=False)
    return None


# -- creation / annihilation --------------------------------------------------


def _payload(X: FockTensor):
    """Data ready to be assigned into a slice (0-d arrays unwrapped)."""
    return X.data if X.data.ndim else X.data[()]


def _insert_first(X: FockTensor, axis: int, l: int, shape: FockShape):
    """Dense array of e_l (x) X with the new index at ``axis``."""
    out = _zeros(shape)
    index = [slice(None)] * shape.rank
    index[axis] = l - 1
    out[tuple(index)] = _payload(X)
    return out


def create_fermion(l: int, X: FockTensor) -> FockTensor:
    shape = X.shape.shifted(dk=1)
    early = _result(X, shape)
    if early is not None:
        return early
    data = _insert_first(X, 0, l, shape)
    return FockTensor(shape, _project_sector(shape, data), validate=False)


def annihilate_fermion(l: int, X: FockTensor) -> FockTensor:
    shape = X.shape.shifted(dk=-1)
    early = _result(X, shape)
    if early is not None:
        return early
    return FockTensor(shape, X.data[l - 1] * X.shape.k, validate=False)


def create_boson(alpha: int, l: int, X: FockTensor) -> FockTensor:
    shape = X.shape.shifted(alpha=alpha, dr=1)
    early = _result(X, shape)
    if early is not None:
        return early
    axes = shape.group_axes(alpha)
    data = _insert_first(X, axes[0], l, shape)
    return FockTensor(shape, _project_sector(shape, data), validate=False)


def annihilate_boson(alpha: int, l: int, X: FockTensor) -> FockTensor:
    shape = X.shape.shifted(alpha=alpha, dr=-1)
    early = _result(X, shape)
    if early is not None:
        return early
    axis = X.shape.group_axes(alpha)[0]
    index = [slice(None)] * X.shape.rank
    index[axis] = l - 1
    return FockTensor(shape, X.data[tuple(index)] * X.shape.bosonic[alpha - 1], validate=False)


# -- B operators ----------------------------------------------------------------


def apply_B(alpha: int, X: FockTensor) -> FockTensor:
    """(B_a X) = S^+ S^- (delta^j_i X) with i the new first fermionic slot and
    j the new first slot of group a."""
    shape = X.shape.shifted(dk=1, alpha=alpha, dr=1)
    early = _result(X, shape)
    if early is not None:
        return early
    out = _zeros(shape)
    jaxis = shape.group_axes(alpha)[0]
    for i in range(shape.n):
        index = [slice(None)] * shape.rank
        index[0] = i
        index[jaxis] = i
        out[tuple(index)] = _payload(X)
    return FockTensor(shape, _project_sector(shape, out), validate=False)


def apply_B_star(alpha: int, X: FockTensor) -> FockTensor:
    """B*_a X = k r_a sum_i X^{i ...}_{(a) i ...}: contraction of the first
    fermionic slot with the first slot of group a."""
    shape = X.shape.shifted(dk=-1, alpha=alpha, dr=-1)
    early = _result(X, shape)
    if early is not None:
        return early
    jaxis = X.shape.group_axes(alpha)[0]
    total = None
    for i in range(shape.n):
        index = [slice(None)] * X.shape.rank
        index[0] = i
        index[jaxis] = i
        part = X.data[tuple(index)]
        total = part if total is None else total + part
    scale = X.shape.k * X.shape.bosonic[alpha - 1]
    return FockTensor(shape, np.asarray(total, dtype=object) * scale, validate=False)


def apply_B_via_creation(alpha: int, X: FockTensor) -> FockTensor:
    """B_a = sum_i b*_(a)i a*_i, composed from the creation operators."""
    total = None
    for i in range(1, X.shape.n + 1):
        term = create_boson(alpha, i, create_fermion(i, X))
        total = term if total is None else total + term
    return total


def number_fermions(X: FockTensor) -> FockTensor:
    return X * X.shape.k


def number_bosons(alpha: int, X: FockTensor) -> FockTensor:
    return X * X.shape.bosonic[alpha - 1]


def particle_numbers(X: FockTensor) -> tuple:
    return X.shape.k, X.shape.bosonic


def is_traceless(X: FockTensor) -> bool:
    return all(apply_B_star(a, X).is_zero() for a in range(1, len(X.shape.bosonic) + 1))


# -- linear maps on sectors -------------------------------------------------------


def operator_matrix(op, source: FockShape) -> tuple[list, FockShape]:
    """Matrix of a linear map in canonical coordinates (rows: target coords)."""
    columns = []
    target = None
    positions = source.canonical_positions()
    for j in range(len(positions)):
        unit = [0] * len(positions)
        unit[j] = 1
        image = op(FockTensor.from_coords(source, unit))
        target = image.shape
        columns.append(image.coords())
    if target is None:
        target = op(FockTensor(source)).shape
    rows = len(target.canonical_positions())
    matrix = [[columns[j][i] for j in range(len(columns))] for i in range(rows)]
    return matrix, target


def gram_weights(shape: FockShape) -> list[int]:
    """Number of dense entries represented by each canonical coordinate."""
    return [len(shape.orbit(p)) for p in shape.canonical_positions()]


@lru_cache(maxsize=None)
def _representation_system(shape: FockShape, s: int):
    sources = [shape.shifted(dk=-1, alpha=a, dr=-1) for a in range(1, s + 1)]
    blocks, weights = [], []
    for a, src in enumerate(sources, start=1):
        if src.null:
            blocks.append([[] for _ in shape.canonical_positions()])
            continue
        mat, _ = operator_matrix(lambda t, a=a: apply_B(a, t), src)
        blocks.append(mat)
        weights.extend(gram_weights(src))
    rows = len(shape.canonical_positions())
    matrix = [sum((blk[i] for blk in blocks), []) for i in range(rows)]
    solver = MinNormSolver(matrix, len(weights), weights)
    return sources, matrix, solver


def _split(sources, vector):
    parts, offset = [], 0
    for src in sources:
        size = len(src.canonical_positions())
        parts.append(FockTensor.from_coords(src, vector[offset:offset + size]) if not src.null else _null(src))
        offset += size
    return parts


def apply_B_chain(X: FockTensor, s: int) -> FockTensor:
    """B_1 B_2 ... B_s X."""
    for alpha in range(s, 0, -1):
        X = apply_B(alpha, X)
    return X


def solve_kernel_representation(X: FockTensor, s: int | None = None) -> list[FockTensor]:
    """Minimum-norm X_1..X_s with sum_a B_a X_a = X, given B_1...B_s X = 0."""
    s = len(X.shape.bosonic) if s is None else s
    if not 1 <= s <= len(X.shape.bosonic):
        raise ShapeError(f"need 1 <= s <= {len(X.shape.bosonic)}")
    residual = apply_B_chain(X, s)
    if not residual.is_zero():
        nonzero = sum(1 for v in residual.data.flat if v)
        raise NotInKernel(f"B_1...B_{s} X != 0 ({nonzero} nonzero components)")
    sources, _, solver = _representation_system(X.shape, s)
    coords = solver.solve(X.coords())
    return _split(sources, coords)


def trace_decompose(X: FockTensor):
    """X = X_0 + sum_a B_a X_a with X_0 traceless (orthogonal projection)."""
    shape = X.shape
    s = len(shape.bosonic)
    if s > shape.n - shape.k:
        raise ShapeConstraint(f"trace decomposition needs s <= n - k (s={s}, n={shape.n}, k={shape.k})")
    if s == 0:
        return X, []
    sources, matrix, solver = _representation_system(shape, s)
    beta = X.coords()
    h = gram_weights(shape)
    cols = solver.ncols
    # normal equations M^T H M c = M^T H beta give the projection onto sum Im B_a
    mt_h = [[matrix[i][j] * h[i] for i in range(len(beta))] for j in range(cols)]
    normal = [[sum((row[i] * matrix[i][j] for i in range(len(beta))), Fraction(0)) for j in range(cols)] for row in mt_h]
    rhs = [sum((row[i] * beta[i] for i in range(len(beta))), Fraction(0)) for row in mt_h]
    c = MinNormSolver(normal, cols).solve(rhs)
    image = [sum((matrix[i][j] * c[j] for j in range(cols)), Fraction(0)) for i in range(len(beta))]
    parts = _split(sources, solver.solve(image))
    x0 = FockTensor.from_coords(shape, [b - v for b, v in zip(beta, image)])
    return x0, parts


# -- file format -------------------------------------------------------------------


def load_tensor(text: str) -> FockTensor:
    """Read ``{"n":..,"k":..,"bosonic":[..],"entries":[[[i1,..],"p/q"],..]}``.

    Indices are 1-based and listed fermionic slots first.  Every entry is
    propagated to its symmetry orbit; conflicting entries are an error.
    """
    spec = json.loads(text)
    shape = FockShape(int(spec["n"]), int(spec["k"]), tuple(int(r) for r in spec.get("bosonic", [])))
    data = _zeros(shape)
    assigned = {}
    for index, value in spec.get("entries", []):
        index = tuple(int(i) - 1 for i in index)
        if len(index) != shape.rank or not all(0 <= i < shape.n for i in index):
            raise ShapeError(f"index {[i + 1 for i in index]} does not fit the sector")
        value = Fraction(str(value))
        own = permutation_sign(index[: shape.k])
        if own == 0:
            if value:
                raise SymmetryError(f"repeated fermionic index in {[i + 1 for i in index]}")
            continue
        for sign, pos in shape.orbit(index):
            v = value * sign * own
            if pos in assigned and assigned[pos] != v:
                raise SymmetryError(f"conflicting entries at {[i + 1 for i in pos]}")
            assigned[pos] = v
            data[pos] = v
    return FockTensor(shape, data, validate=False)


def dump_tensor(X: FockTensor) -> dict:
    entries = []
    for pos in X.shape.canonical_positions():
        v = X.data[pos]
        if v:
            entries.append([[p + 1 for p in pos], str(v)])
    return {"n": X.shape.n, "k": X.shape.k, "bosonic": list(X.shape.bosonic), "entries": entries}


def sector_basis(shape: FockShape) -> list[FockTensor]:
    size = len(shape.canonical_positions())
    basis = []
    for j in range(size):
        unit = [0] * size
        unit[j] = 1
        basis.append(FockTensor.from_coords(shape, unit))
    return basis


def dimension(shape: FockShape) -> int:
    return len(shape.canonical_positions())

