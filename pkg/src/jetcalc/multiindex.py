"""Canonical multi-indices and the symmetrization projectors.

A multi-index is stored sorted, so ``y_[2 1]`` and ``y_[1 2]`` are the same
coordinate.  Sums written with the summation convention over all ordered index
tuples are evaluated as sums over canonical multi-indices times ``weight(J)``,
the number of distinct orderings of ``J``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod

import numpy as np

from .errors import InvalidIndex


@dataclass(frozen=True, order=True)
class MultiIndex:
    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        if list(self.entries) != sorted(self.entries):
            raise InvalidIndex(f"multi-index entries not sorted: {self.entries}")
        for j in self.entries:
            if not 1 <= j <= self.n:
                raise InvalidIndex(f"index {j} outside 1..{self.n}")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def multiplicities(self) -> tuple[int, ...]:
        counts = Counter(self.entries)
        return tuple(counts.get(i, 0) for i in range(1, self.n + 1))

    def append(self, i: int) -> MultiIndex:
        return canonicalize(self.entries + (i,), self.n)

    def remove(self, i: int) -> MultiIndex:
        entries = list(self.entries)
        entries.remove(i)
        return MultiIndex(tuple(entries), self.n)

    def __str__(self):
        return render(self.entries)


def render(entries) -> str:
    return "[" + " ".join(str(j) for j in entries) + "]"


def canonicalize(seq, n: int) -> MultiIndex:
    seq = tuple(int(j) for j in seq)
    for j in seq:
        if not 1 <= j <= n:
            raise InvalidIndex(f"index {j} outside 1..{n}")
    return MultiIndex(tuple(sorted(seq)), n)


def weight(J) -> int:
    """Number of distinct orderings of J, i.e. |J|! / (r_1! ... r_n!)."""
    entries = J.entries if isinstance(J, MultiIndex) else tuple(J)
    counts = Counter(entries).values()
    return factorial(len(entries)) // prod(factorial(c) for c in counts)


def normalization(J) -> Fraction:
    """The factor r_1!...r_n!/|J|! of the normalized jet partials."""
    return Fraction(1, weight(J))


def enumerate_indices(n: int, k: int) -> list[MultiIndex]:
    """All canonical multi-indices of length k over 1..n, lexicographically."""
    return [MultiIndex(c, n) for c in itertools.combinations_with_replacement(range(1, n + 1), k)]


def enumerate_upto(n: int, k: int) -> list[MultiIndex]:
    return [J for length in range(k + 1) for J in enumerate_indices(n, length)]


def permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


def levi_civita(indices) -> int:
    return permutation_sign(indices)


def _project(arr, slots, signed):
    arr = np.asarray(arr, dtype=object)
    slots = list(slots)
    if len(slots) <= 1:
        return arr.copy()
    total = None
    for perm in itertools.permutations(range(len(slots))):
        axes = list(range(arr.ndim))
        for pos, src in zip(slots, perm):
            axes[pos] = slots[src]
        term = np.transpose(arr, axes)
        if signed and permutation_sign(perm) < 0:
            term = -term
        total = term if total is None else total + term
    scale = Fraction(1, factorial(len(slots)))
    return total * scale


def sym_project(arr, slots):
    """S^+ over the named axes of a dense array."""
    return _project(arr, slots, signed=False)


def antisym_project(arr, slots):
    """S^- over the named axes of a dense array."""
    return _project(arr, slots, signed=True)
