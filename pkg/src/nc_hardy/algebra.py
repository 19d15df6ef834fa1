"""Finite tracial algebras with a block-triangular subdiagonal algebra.

The model: ``M`` is the algebra of n x n complex matrices that are block
diagonal over maximal contiguous runs of equal trace weights (the
*summands*).  The trace is ``tau(x) = sum_i w_i x_ii``, which is tracial on
``M`` because every element of ``M`` commutes with ``diag(w)``.

``H-infinity`` is the set of elements of ``M`` that are block-upper-triangular
with respect to a user supplied partition of the indices into contiguous
*blocks*.  The diagonal ``D`` and the expectation ``Phi`` act on the *cells*:
the common refinement of the blocks and the summands.

Operators are plain ``numpy`` arrays of shape ``(n, n)``; an algebra is
passed alongside them.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError

WEIGHT_SUM_TOL = 1e-12
WEIGHT_TIE_TOL = 1e-12
PATTERN_TOL = 1e-12


def _runs(labels):
    """Contiguous runs of equal labels as (start, stop) pairs."""
    runs = []
    start = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[start]:
            runs.append((start, i))
            start = i
    return tuple(runs)


def _frozen(arr):
    arr.setflags(write=False)
    return arr


def _intervals_from_sizes(sizes):
    out = []
    start = 0
    for size in sizes:
        out.append((start, start + int(size)))
        start += int(size)
    return tuple(out)


@dataclass(frozen=True)
class TracialAlgebra:
    """A finite tracial algebra together with its subdiagonal structure.

    Parameters
    ----------
    weights : sequence of float
        Positive trace weights, summing to 1.  Indices whose weights agree
        (within ``WEIGHT_TIE_TOL``) and are adjacent form one full matrix
        summand of ``M``.
    blocks : sequence of int, optional
        Sizes of the contiguous blocks defining ``H-infinity``.  Defaults to
        singletons (upper-triangular matrices).
    """

    weights: tuple
    blocks: tuple = None
    summands: tuple = field(init=False, repr=False)
    cells: tuple = field(init=False, repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size < 1:
            raise ValueError("an algebra needs at least one index")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("trace weights must be positive and finite")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"trace weights must sum to 1, got {w.sum()!r}")
        n = w.size
        sizes = (1,) * n if self.blocks is None else tuple(int(b) for b in self.blocks)
        if any(b < 1 for b in sizes) or sum(sizes) != n:
            raise ValueError(f"block sizes {sizes} do not partition {n} indices")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "blocks", sizes)

        summand_label = np.zeros(n, dtype=int)
        for i in range(1, n):
            same = abs(w[i] - w[i - 1]) <= WEIGHT_TIE_TOL
            summand_label[i] = summand_label[i - 1] + (0 if same else 1)
        block_label = np.repeat(np.arange(len(sizes)), sizes)
        object.__setattr__(self, "summands", _runs(list(summand_label)))
        object.__setattr__(self, "cells", _runs(list(zip(summand_label, block_label))))

    # -- constructors ---------------------------------------------------

    @classmethod
    def uniform(cls, n, blocks=None):
        """Normalized trace ``Tr/n`` on the full matrix algebra ``M_n``."""
        return cls((1.0 / n,) * n, blocks)

    # -- structure --------------------------------------------------------

    @property
    def n(self):
        return len(self.weights)

    @cached_property
    def w(self):
        return _frozen(np.asarray(self.weights))

    @property
    def block_intervals(self):
        return _intervals_from_sizes(self.blocks)

    @cached_property
    def cell_index(self):
        idx = np.empty(self.n, dtype=int)
        for k, (a, b) in enumerate(self.cells):
            idx[a:b] = k
        return _frozen(idx)

    @cached_property
    def summand_index(self):
        idx = np.empty(self.n, dtype=int)
        for k, (a, b) in enumerate(self.summands):
            idx[a:b] = k
        return _frozen(idx)

    @cached_property
    def member_mask(self):
        """Entries allowed to be nonzero in elements of ``M``."""
        s = self.summand_index
        return _frozen(s[:, None] == s[None, :])

    @cached_property
    def diagonal_mask(self):
        c = self.cell_index
        return _frozen(c[:, None] == c[None, :])

    @cached_property
    def strict_upper_mask(self):
        c = self.cell_index
        return _frozen(c[:, None] < c[None, :])

    @cached_property
    def strict_lower_mask(self):
        c = self.cell_index
        return _frozen(c[:, None] > c[None, :])

    def identity(self):
        return np.eye(self.n, dtype=complex)

    def check(self, x):
        """Return ``x`` as a complex array, raising on a shape mismatch."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.n, self.n):
            raise DimensionMismatchError(
                f"operator of shape {x.shape} does not belong to an algebra of dimension {self.n}"
            )
        return x

    def _zero_outside(self, x, mask):
        x = self.check(x)
        scale = float(np.max(np.abs(x)))
        return bool(np.all(np.abs(x[~mask]) <= PATTERN_TOL * scale))

    # -- operations -------------------------------------------------------

    def trace(self, x):
        """Weighted trace ``sum_i w_i x_ii``."""
        x = self.check(x)
        return complex(np.dot(self.w, np.diagonal(x)))

    def expectation(self, x):
        """The conditional expectation ``Phi`` onto ``D`` (cell mask)."""
        x = self.check(x)
        return np.where(self.diagonal_mask, x, 0)

    def decompose(self, x):
        """Split ``x = a1 + a2^* + d`` with ``a1, a2`` in ``H_0`` and ``d`` in ``D``."""
        x = self.check(x)
        a1 = np.where(self.strict_upper_mask, x, 0)
        a2 = np.where(self.strict_lower_mask, x, 0).conj().T
        d = np.where(self.diagonal_mask, x, 0)
        return a1, a2, d

    def inner(self, x, y):
        """``tau(y^* x)``, the L2 pairing."""
        x = self.check(x)
        y = self.check(y)
        # tau(y^* x) = sum_{i,j} w_j conj(y_ij) x_ij
        return complex(np.sum(np.conj(y) * x * self.w[None, :]))

    def norm2(self, x):
        return float(np.sqrt(max(self.inner(x, x).real, 0.0)))

    def contains(self, x):
        """Membership in ``M`` (zero outside the summand blocks)."""
        return self._zero_outside(x, self.member_mask)

    def is_analytic(self, x):
        """Membership in ``H-infinity``; zero tests use ``PATTERN_TOL`` times max|x|."""
        return self._zero_outside(x, self.member_mask & ~self.strict_lower_mask)

    def is_analytic_zero(self, x):
        """Membership in ``H-infinity_0`` (``Phi(x) = 0``)."""
        return self._zero_outside(x, self.member_mask & self.strict_upper_mask)

    def is_diagonal(self, x):
        """Membership in ``D``."""
        return self._zero_outside(x, self.diagonal_mask)

    def project(self, x):
        """Zero the entries outside ``M``; used by samplers."""
        return np.where(self.member_mask, self.check(x), 0)
