"""The even-exponent constants K_2k and empirical L^p norms of the conjugation."""

from dataclasses import dataclass
from math import comb

import numpy as np

from .conjugation import conjugate
from .sampling import sample_operator
from .spectral import lp_norm

ROOT_TOL = 1e-13


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with coefficients in ascending degree order."""

    coefficients: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in self.coefficients)
        if not c or c[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def cauchy_bound(self):
        c = self.coefficients
        return 1.0 + max(abs(x / c[-1]) for x in c[:-1]) if len(c) > 1 else 1.0


def k2k_polynomial(k):
    """``X^2k - C(2k,2) X^(2k-2) - ... - C(2k,2k-2) X^2 - 2``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    coeffs = [0.0] * (2 * k + 1)
    coeffs[2 * k] = 1.0
    for j in range(1, k):
        coeffs[2 * k - 2 * j] = -float(comb(2 * k, 2 * j))
    coeffs[0] = -2.0
    return Polynomial(tuple(coeffs))


def largest_real_root(poly, tol=ROOT_TOL, scan_points=None):
    """Largest real root by a descending scan from the Cauchy bound, then bisection.

    The scan steps down from ``B = 1 + max|c_i / c_n|`` until the sign of
    ``poly`` differs from its sign at ``B``; the last bracket is bisected until
    its width is below ``tol * max(1, |root|)``.
    """
    bound = poly.cauchy_bound()
    if scan_points is None:
        scan_points = 2048 * max(poly.degree, 1)
    grid = np.linspace(bound, -bound, scan_points + 1)
    top_sign = np.sign(poly(bound))
    hi = lo = None
    for a, b in zip(grid[:-1], grid[1:]):
        if poly(b) == 0:
            return float(b)
        if np.sign(poly(b)) != top_sign:
            hi, lo = a, b
            break
    if hi is None:
        raise ValueError("no sign change found within the Cauchy bracket")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)) or mid in (lo, hi):
            break
        if np.sign(poly(mid)) == top_sign:
            hi = mid
        else:
            lo = mid
    return float(0.5 * (lo + hi))


def k2k_constant(k):
    """``K_2k``: the largest real root of :func:`k2k_polynomial`."""
    return largest_real_root(k2k_polynomial(k))


@dataclass
class NormEstimate:
    """Result of :func:`lp_operator_norm`; ``maximizer`` attains ``value``."""

    value: float
    maximizer: np.ndarray
    mode: str
    p: float


def _transfer_matrix(alg):
    """Matrix of the conjugation in an orthonormal basis of ``L2(M, tau)``.

    The basis is ``E_ij / sqrt(w_j)`` over the entries allowed in ``M``; the
    coordinates of ``x`` are ``x_ij sqrt(w_j)``.
    """
    rows, cols = np.nonzero(alg.member_mask)
    sw = np.sqrt(alg.w)
    out = np.zeros((rows.size, rows.size), dtype=complex)
    for k, (i, j) in enumerate(zip(rows, cols)):
        e = np.zeros((alg.n, alg.n), dtype=complex)
        e[i, j] = 1.0 / sw[j]
        image = conjugate(alg, e)
        out[:, k] = image[rows, cols] * sw[cols]
    return out, rows, cols


def _dual(alg, y, p):
    """Norming element of ``y`` in ``L^p``: ``u |y|^(p-1) / ||y||_p^(p-1)``."""
    u, s, vh = np.linalg.svd(y)
    norm = lp_norm(alg, y, p)
    if norm == 0:
        return np.zeros_like(y)
    return (u * (s / norm) ** (p - 1)) @ vh


def _ascend(alg, a, p, iterations, hermitian):
    q = p / (p - 1.0)
    best, best_a = 0.0, a
    for _ in range(iterations):
        if hermitian:
            a = 0.5 * (a + a.conj().T)
        na = lp_norm(alg, a, p)
        if na == 0:
            break
        a = a / na
        y = conjugate(alg, a)
        ratio = lp_norm(alg, y, p)
        if ratio > best:
            best, best_a = ratio, a
        if ratio == 0:
            break
        # the adjoint of the conjugation for tau(y^* x) is minus itself
        z = -conjugate(alg, _dual(alg, y, p))
        a = _dual(alg, z, q)
    return best, best_a


def lp_operator_norm(alg, p, mode="multistart", restarts=64, iterations=40, rng=None, hermitian=False):
    """Norm of the conjugation on ``L^p(M, tau)``.

    ``mode="exact-l2"`` (``p = 2`` only) returns the spectral norm of the map
    in an orthonormal basis.  ``mode="multistart"`` returns a lower bound:
    the best ratio ``||conj(a)||_p / ||a||_p`` found by a nonlinear power
    iteration (norming-element reweighting) from ``restarts`` random starts.
    Restarts are merged in index order so the result is deterministic given
    ``rng``.
    """
    if p < 1:
        raise ValueError("operator norms are estimated for p >= 1")
    if mode == "exact-l2":
        if p != 2:
            raise ValueError("exact-l2 mode requires p = 2")
        mat, rows, cols = _transfer_matrix(alg)
        if mat.size == 0:
            return NormEstimate(0.0, alg.identity(), mode, p)
        u, s, vh = np.linalg.svd(mat)
        top = np.zeros((alg.n, alg.n), dtype=complex)
        top[rows, cols] = vh[0].conj() / np.sqrt(alg.w)[cols]
        return NormEstimate(float(s[0]), top, mode, p)
    if mode != "multistart":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(rng)
    kind = "self-adjoint" if hermitian else "ginibre"
    best, best_a = 0.0, alg.identity()
    for _ in range(restarts):
        a = sample_operator(alg, kind, rng)
        if p == 1:
            na = lp_norm(alg, a, 1)
            value, cand = (lp_norm(alg, conjugate(alg, a), 1) / na, a / na) if na else (0.0, a)
        else:
            value, cand = _ascend(alg, a, p, iterations, hermitian)
        if value > best:
            best, best_a = value, cand
    return NormEstimate(best, best_a, mode, p)
