"""Functional calculus and the distribution/rearrangement layer.

Singular value functions are carried as :class:`StepFunction` objects on
``[0, 1)``: each spectral cell of ``|x|`` occupies an interval whose length is
the trace of its spectral projection.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    NotSelfAdjointError,
    SingularOperatorError,
    SpectrumTooCloseToZeroError,
)

TIE_TOL = 1e-10
SELF_ADJOINT_TOL = 1e-10
LOG_GUARD = 1e-12
INVERSE_GUARD = 1e-14


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous non-increasing step function on ``[0, end)``.

    ``values[j]`` is taken on ``[breakpoints[j], breakpoints[j + 1])``, the
    last piece ending at ``end``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    end: float = 1.0

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or b.shape != v.shape or b.size == 0:
            raise ValueError("need one value per breakpoint")
        if b[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if np.any(np.diff(b) <= 0) or b[-1] >= self.end:
            raise ValueError("breakpoints must increase strictly inside [0, end)")
        if np.any(np.diff(v) > 0):
            raise ValueError("values must be non-increasing")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_cells(cls, values, masses, end=1.0, tie_tol=TIE_TOL):
        """Rearrange (value, mass) cells in decreasing order, merging ties.

        Merged cells keep the largest value of the group, so the supremum of
        the function is exact.
        """
        values = np.asarray(values, dtype=float)
        masses = np.asarray(masses, dtype=float)
        order = np.argsort(-values, kind="stable")
        values, masses = values[order], masses[order]
        top = float(values[0]) if values.size else 0.0
        merged_v, merged_m = [], []
        for v, m in zip(values, masses):
            if merged_v and merged_v[-1] - v <= tie_tol * max(abs(top), 1e-300):
                merged_m[-1] += m
            else:
                merged_v.append(float(v))
                merged_m.append(float(m))
        starts = np.concatenate([[0.0], np.cumsum(merged_m)[:-1]])
        keep = starts < end
        return cls(starts[keep], np.asarray(merged_v)[keep], end)

    @property
    def right_ends(self):
        return np.append(self.breakpoints[1:], self.end)

    @property
    def lengths(self):
        return self.right_ends - self.breakpoints

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        return self.values[np.clip(idx, 0, None)]

    def integral(self, alpha=None):
        """``int_0^alpha f(t) dt`` (whole interval when ``alpha`` is None)."""
        if alpha is None:
            alpha = self.end
        covered = np.clip(alpha - self.breakpoints, 0.0, self.lengths)
        return float(np.dot(covered, self.values))

    def partial_integrals(self, points):
        return np.array([self.integral(a) for a in points])

    def power_integral(self, p):
        return float(np.dot(self.lengths, np.abs(self.values) ** p))

    def lp_norm(self, p):
        if p == np.inf:
            return float(self.values[0])
        return self.power_integral(p) ** (1.0 / p)

    def weak_l1(self):
        """``sup_t t f(t)``; on each piece the sup sits at the right end."""
        return float(np.max(self.right_ends * self.values))

    def length_above(self, s):
        """Length of ``{t : f(t) > s}``."""
        return float(np.sum(self.lengths[self.values > s]))

    def __mul__(self, other):
        """Pointwise product (non-increasing when both factors are >= 0)."""
        if not isinstance(other, StepFunction):
            return NotImplemented
        end = min(self.end, other.end)
        pts = np.union1d(self.breakpoints, other.breakpoints)
        pts = pts[pts < end]
        return StepFunction(pts, self(pts) * other(pts), end)


@dataclass(frozen=True)
class SpectralDecomposition:
    """``x = V diag(eigenvalues) V^*`` with the trace mass of every eigenvector."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    masses: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_complex(x):
    return np.asarray(x, dtype=complex)


def _masses(w, vectors):
    return np.real(w @ (np.abs(vectors) ** 2))


def check_self_adjoint(x, tol=SELF_ADJOINT_TOL):
    x = _as_complex(x)
    scale = max(1.0, float(np.max(np.abs(x)))) if x.size else 1.0
    if np.max(np.abs(x - x.conj().T), initial=0.0) > tol * scale:
        raise NotSelfAdjointError("operator is not self-adjoint")
    return (x + x.conj().T) / 2


def eigh(x):
    """Eigen-decomposition of a self-adjoint ``x`` (symmetrized first)."""
    xs = check_self_adjoint(x)
    return np.linalg.eigh(xs)


def spectral_decomposition(alg, x):
    vals, vecs = eigh(x)
    return SpectralDecomposition(vals, vecs, _masses(alg.w, vecs))


def singular_cells(alg, x):
    """Singular values of ``x`` with the trace mass of their eigenvectors of |x|."""
    x = alg.check(x)
    _, s, vh = np.linalg.svd(x)
    return s, _masses(alg.w, vh.conj().T)


def abs_op(x):
    """``|x| = (x^* x)^{1/2}``."""
    x = _as_complex(x)
    _, s, vh = np.linalg.svd(x)
    return (vh.conj().T * s) @ vh


def mu(alg, x):
    """Generalized singular value function of ``x`` as a step function."""
    s, m = singular_cells(alg, x)
    return StepFunction.from_cells(s, m)


def lambda_dist(alg, x, s):
    """Distribution function ``tau(chi_(s, inf)(|x|))``."""
    if s < 0:
        raise ValueError("distribution function needs s >= 0")
    sv, m = singular_cells(alg, x)
    return float(np.sum(m[sv > s]))


def lp_norm(alg, x, p):
    """``tau(|x|^p)^(1/p)``; the operator norm for ``p = inf``.

    For ``0 < p < 1`` this is the usual quasinorm.
    """
    if not p > 0:
        raise ValueError(f"L^p norms need p > 0, got {p}")
    sv, m = singular_cells(alg, x)
    if p == np.inf:
        return float(sv[0]) if sv.size else 0.0
    return float(np.dot(m, sv ** p)) ** (1.0 / p)


def weak_l1_quasinorm(alg, x):
    """``sup_t t mu_t(x)``."""
    return mu(alg, x).weak_l1()


def spectral_projection(x, lo, hi=np.inf, closed="right"):
    """Projection onto the eigenvectors of self-adjoint ``x`` with eigenvalue in an interval.

    ``closed="right"`` selects ``(lo, hi]`` (``(lo, inf)`` when ``hi`` is
    infinite); ``closed="left"`` selects ``[lo, hi)``.
    """
    vals, vecs = eigh(x)
    if closed == "right":
        sel = (vals > lo) & (vals <= hi)
    elif closed == "left":
        sel = (vals >= lo) & (vals < hi)
    else:
        raise ValueError("closed must be 'right' or 'left'")
    v = vecs[:, sel]
    return v @ v.conj().T


def _log_guarded(t):
    lo, hi = float(np.min(t)), float(np.max(t))
    if lo <= 0 or lo < LOG_GUARD * hi:
        raise SpectrumTooCloseToZeroError(
            f"spectrum too close to zero for log: min eigenvalue {lo:.3e}, max {hi:.3e}",
            smallest=lo,
            largest=hi,
        )
    return np.log(t)


def _log_plus(t):
    if np.min(t) < 0:
        raise SpectrumTooCloseToZeroError("log+ needs a positive semidefinite operand", smallest=float(np.min(t)))
    out = np.zeros_like(t)
    pos = t > 1
    out[pos] = np.log(t[pos])
    return out


NAMED_FUNCTIONS = {
    "exp": np.exp,
    "log": _log_guarded,
    "log+": _log_plus,
    "sqrt": lambda t: np.sqrt(np.clip(t, 0, None)),
}


def power(p):
    return lambda t: np.clip(t, 0, None) ** p


def shift_scale(shift=0.0, scale=1.0):
    return lambda t: scale * (t + shift)


def apply_function(x, f):
    """``V f(Lambda) V^*`` for self-adjoint ``x``.

    ``f`` is a name from ``NAMED_FUNCTIONS`` or any vectorized real function,
    e.g. ``power(0.5)``.
    """
    if isinstance(f, str):
        f = NAMED_FUNCTIONS[f]
    vals, vecs = eigh(x)
    return (vecs * f(vals)) @ vecs.conj().T


def expm(x):
    return apply_function(x, "exp")


def logm(x):
    return apply_function(x, "log")


def _is_upper(x):
    return not np.any(np.tril(x, -1))


def inverse(x):
    """Inverse with a conditioning guard; triangular inputs stay triangular."""
    x = _as_complex(x)
    s = np.linalg.svd(x, compute_uv=False)
    if s[-1] == 0 or s[-1] < INVERSE_GUARD * s[0]:
        raise SingularOperatorError(
            f"operator is numerically singular (smallest singular value {s[-1]:.3e})",
            smallest_singular_value=float(s[-1]),
        )
    eye = np.eye(x.shape[0], dtype=complex)
    if _is_upper(x):
        return scipy.linalg.solve_triangular(x, eye, lower=False)
    return np.linalg.solve(x, eye)


def block_upper_inverse(alg, x):
    """Inverse of a block-upper-triangular ``x`` by block back-substitution.

    Pattern-preserving: entries below the cell diagonal of the result are
    exactly zero.
    """
    x = alg.check(x)
    cells = alg.cells
    out = np.zeros_like(x)
    for j, (cj0, cj1) in enumerate(cells):
        for i in range(j, -1, -1):
            ci0, ci1 = cells[i]
            rhs = np.eye(cj1 - cj0, dtype=complex) if i == j else np.zeros((ci1 - ci0, cj1 - cj0), dtype=complex)
            for k in range(i + 1, j + 1):
                ck0, ck1 = cells[k]
                rhs = rhs - x[ci0:ci1, ck0:ck1] @ out[ck0:ck1, cj0:cj1]
            diag = x[ci0:ci1, ci0:ci1]
            try:
                out[ci0:ci1, cj0:cj1] = np.linalg.solve(diag, rhs)
            except np.linalg.LinAlgError as exc:
                raise SingularOperatorError(f"diagonal block {i} is singular") from exc
    return out


def _positive_diagonal_phases(t):
    d = np.diagonal(t)
    phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1)
    return phase


def _rq_single(x):
    r, q = scipy.linalg.rq(x)
    ph = _positive_diagonal_phases(r)
    # r q = (r D*) (D q) with D = diag(phase)
    return r * ph.conj()[None, :], ph[:, None] * q


def _qr_single(x):
    q, r = np.linalg.qr(x)
    ph = _positive_diagonal_phases(r)
    return q * ph[None, :], ph.conj()[:, None] * r


def _factor_by_parts(x, parts, single):
    x = _as_complex(x)
    s = np.linalg.svd(x, compute_uv=False)
    if s[-1] == 0 or s[-1] < INVERSE_GUARD * s[0]:
        raise SingularOperatorError(
            f"cannot factor a singular operator (smallest singular value {s[-1]:.3e})",
            smallest_singular_value=float(s[-1]),
        )
    n = x.shape[0]
    if parts is None:
        parts = ((0, n),)
    first = np.zeros_like(x)
    second = np.zeros_like(x)
    for a, b in parts:
        f, g = single(x[a:b, a:b])
        first[a:b, a:b] = f
        second[a:b, a:b] = g
    return first, second


def rq_factor(x, parts=None):
    """``x = a u`` with ``a`` upper triangular (positive diagonal) and ``u`` unitary.

    ``parts`` lists index intervals factored independently; pass the summands
    of an algebra to keep both factors inside it.  Off-part entries of ``x``
    are then ignored, so ``x`` must be block diagonal over ``parts``.
    """
    return _factor_by_parts(x, parts, _rq_single)


def qr_factor(x, parts=None):
    """``x = u b`` with ``u`` unitary and ``b`` upper triangular (positive diagonal)."""
    return _factor_by_parts(x, parts, _qr_single)


def submajorizes(dominant, other, tol=0.0):
    """True iff ``int_0^a other <= int_0^a dominant`` for every ``a``.

    Both partial integrals are piecewise linear, so comparing them at the
    union of breakpoints (and the right end) suffices.
    """
    end = min(dominant.end, other.end)
    pts = np.union1d(dominant.breakpoints, other.breakpoints)
    pts = np.append(pts[pts < end], end)
    lhs = other.partial_integrals(pts)
    rhs = dominant.partial_integrals(pts)
    return bool(np.all(lhs <= rhs + tol))
