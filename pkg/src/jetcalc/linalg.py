"""Exact linear algebra over the rationals (Gaussian elimination).

Matrices are lists of rows of ``Fraction``.  Only what the rest of the package
needs: rank, inverse, determinant, and a minimum-norm solver for consistent
underdetermined systems.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InconsistentSystem, SingularJacobian

ZERO = Fraction(0)


def to_fractions(rows):
    return [[Fraction(v) for v in row] for row in rows]


def transpose(rows, ncols=None):
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col) if x and y), ZERO) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in a]


def row_reduce(rows, ncols):
    """Reduced row echelon form.  Returns (rref, pivot_columns, row_ops).

    ``row_ops`` is the invertible matrix E with E @ rows = rref.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ops = [[Fraction(int(i == j)) for j in range(nrows)] for i in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        ops[r], ops[p] = ops[p], ops[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        ops[r] = [v * inv for v in ops[r]]
        for i in range(nrows):
            f = m[i][c]
            if i != r and f:
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
                ops[i] = [a - f * b for a, b in zip(ops[i], ops[r])]
        pivots.append(c)
        r += 1
    return m, pivots, ops


def rank(rows, ncols=None):
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return len(row_reduce(rows, ncols)[1])


def determinant(rows):
    m = [list(map(Fraction, r)) for r in rows]
    size = len(m)
    det = Fraction(1)
    for c in range(size):
        p = next((i for i in range(c, size) if m[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, size):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def inverse(rows):
    size = len(rows)
    rref, pivots, ops = row_reduce(to_fractions(rows), size)
    if len(pivots) < size:
        raise SingularJacobian("matrix is singular")
    return ops


class MinNormSolver:
    """Minimum-norm solutions of A c = b for every consistent right-hand side.

    The norm is sum_j weights[j] * c_j**2.  The solution is
    c = W^-1 A^T mu with (A W^-1 A^T) mu = b, so the solver reduces to a fixed
    rational matrix applied to b; it also works for vectors of any ring
    elements supporting + and scalar *, such as symbolic expressions.
    """

    def __init__(self, a, ncols, weights=None):
        self.nrows = len(a)
        self.ncols = ncols
        w = [Fraction(1)] * ncols if weights is None else [Fraction(x) for x in weights]
        at = transpose(a, ncols)
        winv_at = [[v / w[j] for v in at[j]] for j in range(ncols)]
        if ncols:
            gram = matmul(a, winv_at)
        else:
            gram = [[ZERO] * self.nrows for _ in range(self.nrows)]
        rref, pivots, ops = row_reduce(gram, self.nrows)
        self.rank = len(pivots)
        # mu_pivot = (E b)_row for each pivot row, free entries zero
        pick = [[ZERO] * self.nrows for _ in range(self.nrows)]
        for row, col in enumerate(pivots):
            pick[col] = ops[row]
        self.check_rows = [ops[i] for i in range(self.rank, self.nrows)]
        self.operator = matmul(winv_at, pick) if self.nrows else [[] for _ in range(ncols)]

    def residual(self, b):
        """Entries that must vanish for b to be in the column space."""
        return [_dot(row, b) for row in self.check_rows]

    def consistent(self, b):
        return all(_is_zero(v) for v in self.residual(b))

    def solve(self, b):
        if not self.consistent(b):
            raise InconsistentSystem("right-hand side is not in the image")
        return [_dot(row, b) for row in self.operator]


def _dot(row, vec):
    total = None
    for coeff, v in zip(row, vec):
        if not coeff or _is_zero(v):
            continue
        term = v * coeff
        total = term if total is None else total + term
    return ZERO if total is None else total


def _is_zero(v):
    return v == 0
