"""The conjugation operator, analytic completion, Riesz projection and f_eps."""

import numpy as np

from .errors import NotPositiveError
from .spectral import block_upper_inverse, check_self_adjoint

POSITIVITY_DUST = 1e-10


def conjugate(alg, u):
    """``i u2^* - i u1`` where ``u = u1 + u2^* + d``."""
    u1, u2, _ = alg.decompose(u)
    return 1j * u2.conj().T - 1j * u1


def analytic_completion(alg, u):
    """``u + i conjugate(u)``, which equals ``2 u1 + d`` and lies in H-infinity."""
    u = alg.check(u)
    return u + 1j * conjugate(alg, u)


def riesz_projection(alg, a):
    """``(a + i conjugate(a) + Phi(a)) / 2``: keeps the block-upper part of ``a``."""
    a = alg.check(a)
    return 0.5 * (a + 1j * conjugate(alg, a) + alg.expectation(a))


def clip_positive(u, dust=POSITIVITY_DUST):
    """Symmetrize ``u`` and clip eigenvalues in ``[-dust, 0)`` to zero.

    Raises :class:`NotPositiveError` for anything more negative.
    """
    us = check_self_adjoint(u)
    vals, vecs = np.linalg.eigh(us)
    if vals.size and vals[0] < -dust:
        raise NotPositiveError(f"operator has eigenvalue {vals[0]:.3e} < 0")
    if vals.size and vals[0] >= 0:
        return us
    return (vecs * np.clip(vals, 0, None)) @ vecs.conj().T


def regularize(alg, u, eps, return_parts=False):
    """``f_eps = (eps I + f)(I + eps f)^{-1}`` with ``f = u + i conjugate(u)``.

    ``u`` must be positive semidefinite and ``0 < eps < 1``.  The inverse is
    computed by block back-substitution, so ``f_eps`` has exactly the
    block-upper pattern.  With ``return_parts`` the triple
    ``(f_eps, f, (I + eps f)^{-1})`` is returned.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    u = clip_positive(alg.check(u))
    f = analytic_completion(alg, u)
    eye = alg.identity()
    resolvent = block_upper_inverse(alg, eye + eps * f)
    f_eps = (eps * eye + f) @ resolvent
    if return_parts:
        return f_eps, f, resolvent
    return f_eps
