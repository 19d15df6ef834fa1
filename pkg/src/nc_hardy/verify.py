"""Randomized inequality suites.

Each ``run_*`` function takes a :class:`~nc_hardy.harness.TrialConfig` and
returns a :class:`~nc_hardy.harness.VerificationReport`.  Violations are
collected, never raised.
"""

from functools import lru_cache

import numpy as np

from .conjugation import analytic_completion, conjugate, regularize, riesz_projection
from .constants import k2k_constant
from .harness import TrialConfig, build_report, execute_trial, run_trials
from .sampling import sample_operator
from .spectral import (
    abs_op,
    apply_function,
    inverse,
    lp_norm,
    mu,
    singular_cells,
    spectral_projection,
    submajorizes,
    weak_l1_quasinorm,
)
from .szego import prop3_witness

EPSILONS = (0.5, 0.1, 0.01)
HOLDER_ORDERS = (2, 3, 4)
HOLDER_MAX_EXPONENT = 64.0
COROLLARY_EXPONENTS = (0.25, 0.5, 0.75)


@lru_cache(maxsize=None)
def _K(k):
    return k2k_constant(k)


def _max_abs(x):
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


# -- weak type (1, 1) for the analytic completion ----------------------------


def _weak_type_trial(t):
    alg, cfg = t.alg, t.cfg
    u = sample_operator(alg, "positive", t.rng)
    t.witness["u"] = u
    l1 = lp_norm(alg, u, 1)
    f = analytic_completion(alg, u)
    sv, mass = singular_cells(alg, f)
    lo, hi = cfg.s_log_range
    c = cfg.weak_type_constant
    for s in l1 * np.logspace(lo, hi, cfg.s_count):
        lam = float(np.sum(mass[sv > s]))
        t.check_le("weak_type", lam, c * l1 / s)
        t.metric("grid_constant", s * lam / l1)
    sup = weak_l1_quasinorm(alg, f)
    t.check_le("weak_type_sup", sup, c * l1)
    t.metric("empirical_constant", sup / l1)


def run_weak_type_suite(cfg, threads=None):
    """``lambda_s(u + i conj(u)) <= 4 ||u||_1 / s`` for positive ``u``.

    ``empirical_constant`` is the exact ``sup_s s lambda_s(f) / ||u||_1``
    (the weak-L1 quasinorm), ``grid_constant`` the same sup over the s-grid.
    """
    return build_report("weak-type", cfg, run_trials("weak-type", cfg, _weak_type_trial, threads))


# -- generalized Hoelder and the submajorization behind it ------------------


def _holder_exponents(m, rng):
    while True:
        p = 1.0 / rng.dirichlet(np.ones(m))
        if np.all(p <= HOLDER_MAX_EXPONENT):
            return p


def _holder_trial(t):
    alg = t.alg
    for m in HOLDER_ORDERS:
        p = _holder_exponents(m, t.rng)
        ops = [sample_operator(alg, "ginibre", t.rng) for _ in range(m)]
        prod = ops[0]
        for a in ops[1:]:
            prod = prod @ a
        lhs = abs(alg.trace(prod))
        rhs = float(np.prod([lp_norm(alg, a, pj) for a, pj in zip(ops, p)]))
        t.check_le(f"holder.m={m}", lhs, rhs)
        t.metric(f"max_ratio.m={m}", lhs / rhs)
        if lhs > rhs:
            t.witness.update({f"a{j}": a for j, a in enumerate(ops)})


def run_holder_suite(cfg, threads=None):
    """``|tau(a_1 ... a_m)| <= prod ||a_j||_{p_j}`` with ``sum 1/p_j = 1``, m = 2, 3, 4."""
    return build_report("holder", cfg, run_trials("holder", cfg, _holder_trial, threads))


def _submajorization_trial(t):
    alg = t.alg
    b = sample_operator(alg, "ginibre", t.rng)
    c = sample_operator(alg, "ginibre", t.rng)
    t.witness.update(b=b, c=c)
    dominant = mu(alg, b) * mu(alg, c)
    other = mu(alg, b @ c)
    end = min(dominant.end, other.end)
    pts = np.union1d(dominant.breakpoints, other.breakpoints)
    pts = np.append(pts[pts < end], end)
    excess = float(np.max(other.partial_integrals(pts) - dominant.partial_integrals(pts)))
    t.check_le("submajorization", excess, 0.0)
    tol = t.cfg.tolerance * max(1.0, dominant.integral())
    t.check_le("submajorizes_predicate", 0.0 if submajorizes(dominant, other, tol) else 1.0, 0.0)


def run_submajorization_suite(cfg, threads=None):
    """``mu(bc)`` is submajorized by the pointwise product ``mu(b) mu(c)``."""
    return build_report("submajorization", cfg, run_trials("submajorization", cfg, _submajorization_trial, threads))


# -- trace inequalities and the trace-Jensen witness -------------------------


def _lemma3_trial(t):
    alg = t.alg
    a = sample_operator(alg, "positive", t.rng)
    b = sample_operator(alg, "positive", t.rng)
    vals = np.linalg.eigvalsh(a)
    s = t.rng.uniform(vals[0], vals[-1]) if vals[-1] > vals[0] else vals[0] - 1.0
    proj = spectral_projection(a, s)
    t.witness.update(a=a, b=b, P=proj)
    lhs = alg.trace(proj @ a @ b @ proj).real
    rhs = alg.trace(a @ b).real
    t.check_le("lemma3", lhs, rhs)


def run_lemma3_suite(cfg, threads=None):
    """``tau(P ab P) <= tau(ab)`` for positive ``a, b`` and ``P`` a spectral projection of ``a``."""
    return build_report("lemma3", cfg, run_trials("lemma3", cfg, _lemma3_trial, threads))


def _lemma4_trial(t):
    alg = t.alg
    eye = alg.identity()
    a = sample_operator(alg, "positive", t.rng) + 0.1 * eye
    b = a + sample_operator(alg, "positive", t.rng)
    c = sample_operator(alg, "positive", t.rng)
    t.witness.update(A=a, B=b, C=c)
    lhs = alg.trace(c @ inverse(b)).real
    rhs = alg.trace(c @ inverse(a)).real
    t.check_le("lemma4", lhs, rhs)


def run_lemma4_suite(cfg, threads=None):
    """``tau(C B^{-1}) <= tau(C A^{-1})`` whenever ``0 < A <= B`` and ``C >= 0``."""
    return build_report("lemma4", cfg, run_trials("lemma4", cfg, _lemma4_trial, threads))


def _jensen_trace_trial(t):
    alg = t.alg
    shift = 10.0 ** t.rng.uniform(-3, 0)
    h = sample_operator(alg, "positive", t.rng) + shift * alg.identity()
    t.witness["h"] = h
    lhs = alg.trace(apply_function(h, "log")).real
    rhs = float(np.log(alg.trace(h).real))
    t.check_le("trace_jensen", lhs, rhs, tol=1e-12)
    w = prop3_witness(alg, h)
    t.check_le("witness_equality", abs(w.lhs - w.rhs) / w.lhs, 0.0)
    t.metric("witness_relative_gap", abs(w.lhs - w.rhs) / w.lhs)
    t.metric("witness_trace_g", abs(alg.trace(w.g)))


def run_jensen_trace_suite(cfg, threads=None):
    """``tau(log h) <= log tau(h)`` plus the equality ``tau(h e^g) = exp(tau(log h))``."""
    return build_report("jensen-trace", cfg, run_trials("jensen-trace", cfg, _jensen_trace_trial, threads))


# -- the f_eps regularization ---------------------------------------------------


def _regularization_trial(t):
    alg = t.alg
    eye = alg.identity()
    u = sample_operator(alg, "positive", t.rng)
    t.witness["u"] = u
    d = alg.expectation(u)
    previous = None
    for eps in EPSILONS:
        f_eps, f, resolvent = regularize(alg, u, eps, return_parts=True)
        t.check_le("resolvent_contraction", np.linalg.norm(resolvent, 2), 1.0)
        t.check_le("analytic", 0.0 if alg.is_analytic(f_eps) else 1.0, 0.0)
        re_min = np.linalg.eigvalsh(0.5 * (f_eps + f_eps.conj().T))[0]
        t.check_le("re_lower_bound", eps, re_min)
        diff = f_eps - f
        f2 = f @ f
        for p in (1, 2, 4):
            nd = lp_norm(alg, diff, p)
            t.check_le(f"convergence.p={p}", nd, eps * lp_norm(alg, eye + f2, p))
            # f_eps - f = eps (I - f^2)(I + eps f)^{-1} exactly, hence this sharper bound
            t.check_le(f"convergence_identity.p={p}", nd, eps * lp_norm(alg, eye - f2, p))
        claim = (eps * eye + d) @ np.linalg.inv(eye + eps * d)
        t.check_le("diagonal_regularization", _max_abs(alg.expectation(f_eps) - claim) / max(1.0, _max_abs(claim)), 0.0)
        dist = lp_norm(alg, diff, 2)
        if previous is not None:
            t.metric("distance_increases", 1.0 if dist > previous else 0.0, mode="sum")
        previous = dist


def run_regularization_suite(cfg, threads=None):
    """Items (1)-(4) of the f_eps regularization and ``Phi(f_eps) = Phi(u)_eps``.

    ``distance_increases`` counts eps steps (0.5 -> 0.1 -> 0.01) where
    ``||f_eps - f||_2`` grew; it is data, not a check.
    """
    return build_report("regularization", cfg, run_trials("regularization", cfg, _regularization_trial, threads))


# -- conjugation core and the even-p bounds -------------------------------------


def _even_p_checks(t, u, f):
    alg = t.alg
    for k in (1, 2, 3):
        p = 2 * k
        nu = lp_norm(alg, u, p)
        nut = lp_norm(alg, conjugate(alg, u), p)
        t.check_le(f"self_adjoint.p={p}", nut, _K(k) * nu)
        t.metric(f"self_adjoint_ratio.p={p}", nut / nu)
        nf = lp_norm(alg, f, p)
        nft = lp_norm(alg, conjugate(alg, f), p)
        t.check_le(f"general.p={p}", nft, 2 * _K(k) * nf)
        t.metric(f"general_ratio.p={p}", nft / nf)


def _even_p_trial(t):
    u = sample_operator(t.alg, "self-adjoint", t.rng)
    f = sample_operator(t.alg, "ginibre", t.rng)
    t.witness.update(u=u, f=f)
    _even_p_checks(t, u, f)


def run_even_p_suite(cfg, threads=None):
    """``||conj u||_2k <= K_2k ||u||_2k`` (self-adjoint) and ``<= 2 K_2k`` (general), k = 1, 2, 3."""
    return build_report("even-p", cfg, run_trials("even-p", cfg, _even_p_trial, threads))


def _conjugation_core_trial(t):
    alg = t.alg
    u = sample_operator(alg, "ginibre", t.rng)
    h = sample_operator(alg, "self-adjoint", t.rng)
    v = sample_operator(alg, "self-adjoint", t.rng)
    t.witness.update(u=u, h=h, v=v)
    ut = conjugate(alg, u)
    t.check_le("l2_contraction", alg.norm2(ut), alg.norm2(u))
    off = u - alg.expectation(u)
    t.check_le("l2_isometry_off_diagonal", abs(alg.norm2(conjugate(alg, off)) - alg.norm2(off)), 0.0)
    ht = conjugate(alg, h)
    t.check_le("self_adjoint_preserved", _max_abs(ht - ht.conj().T), 0.0)
    t.check_le("expectation_vanishes", _max_abs(alg.expectation(ut)), 0.0)
    vt = conjugate(alg, v)
    duality = abs(alg.trace(h @ vt) + alg.trace(ht @ v))
    t.check_le("skew_duality", duality, 0.0)
    t.metric("skew_duality_residual", duality / max(1e-300, alg.norm2(h) * alg.norm2(v)))
    r = riesz_projection(alg, u)
    t.check_le("riesz_idempotent", alg.norm2(riesz_projection(alg, r) - r), 0.0)
    t.check_le("riesz_range", 0.0 if alg.is_analytic(r) else 1.0, 0.0)
    t.check_le("riesz_complement", 0.0 if alg.is_analytic_zero((u - r).conj().T) else 1.0, 0.0)
    t.check_le("completion_analytic", 0.0 if alg.is_analytic(analytic_completion(alg, u)) else 1.0, 0.0)
    _even_p_checks(t, h, u)


def run_conjugation_core_suite(cfg, threads=None):
    """Basic conjugation identities, skew duality, Riesz projection and the even-p bounds."""
    return build_report("conjugation-core", cfg, run_trials("conjugation-core", cfg, _conjugation_core_trial, threads))


# -- L log L and the 0 < p < 1 corollary -------------------------------------------


def _dyadic_error(a):
    """Relative error of ``a (chi_[0,1)(a) + sum_k chi_[2^(k-1), 2^k)(a)) = a``."""
    top = float(np.linalg.eigvalsh(a)[-1])
    kmax = max(1, int(np.ceil(np.log2(max(top, 1.0)))) + 1)
    total = spectral_projection(a, 0.0, 1.0, closed="left")
    for k in range(1, kmax + 1):
        total = total + spectral_projection(a, 2.0 ** (k - 1), 2.0**k, closed="left")
    # eigenvalues of a positive operator can come out as -1e-16
    total = total + spectral_projection(a, -np.inf, 0.0, closed="left")
    return _max_abs(a @ total - a) / max(1.0, _max_abs(a))


def _llogl_trial(t):
    alg = t.alg
    scale = 10.0 ** t.rng.uniform(-1, 2)
    a = scale * sample_operator(alg, "ginibre", t.rng)
    t.witness["a"] = a
    mod = abs_op(a)
    entropy = alg.trace(mod @ apply_function(mod, "log+")).real
    ratio = lp_norm(alg, conjugate(alg, a), 1) / (1.0 + entropy)
    t.check_le("finite", 0.0 if np.isfinite(ratio) else 1.0, 0.0)
    t.metric(f"khat.n={t.dim}", ratio)
    t.metric("khat", ratio)
    pos = scale * sample_operator(alg, "positive", t.rng)
    err = _dyadic_error(pos)
    t.check_le("dyadic_reconstruction", err, 0.0, tol=1e-12)
    t.metric("dyadic_error", err)


def run_loglogplus_metric(cfg, threads=None):
    """Report-only ``K_hat = max ||conj a||_1 / (1 + tau(|a| log+ |a|))`` per dimension.

    Only finiteness and the dyadic spectral split are checked.
    """
    return build_report("llogl", cfg, run_trials("llogl", cfg, _llogl_trial, threads))


def _corollary1_trial(t):
    alg = t.alg
    u = sample_operator(alg, "positive", t.rng)
    u = u * t.rng.uniform(1e-3, 1.0) / lp_norm(alg, u, 1)
    t.witness["u"] = u
    l1 = max(lp_norm(alg, u, 1), 1e-12)
    ut = conjugate(alg, u)
    for p in COROLLARY_EXPONENTS:
        ratio = lp_norm(alg, ut, p) / l1
        t.check_le(f"finite.p={p}", 0.0 if np.isfinite(ratio) else 1.0, 0.0)
        t.metric(f"ratio.p={p}", ratio)


def run_corollary1_metric(cfg, threads=None):
    """Report-only ``||conj u||_p / ||u||_1`` for ``p`` in (1/4, 1/2, 3/4) and ``||u||_1 <= 1``."""
    return build_report("corollary1", cfg, run_trials("corollary1", cfg, _corollary1_trial, threads))


SUITES = {
    "conjugation-core": (run_conjugation_core_suite, _conjugation_core_trial),
    "even-p": (run_even_p_suite, _even_p_trial),
    "weak-type": (run_weak_type_suite, _weak_type_trial),
    "regularization": (run_regularization_suite, _regularization_trial),
    "holder": (run_holder_suite, _holder_trial),
    "submajorization": (run_submajorization_suite, _submajorization_trial),
    "lemma3": (run_lemma3_suite, _lemma3_trial),
    "lemma4": (run_lemma4_suite, _lemma4_trial),
    "jensen-trace": (run_jensen_trace_suite, _jensen_trace_trial),
    "llogl": (run_loglogplus_metric, _llogl_trial),
    "corollary1": (run_corollary1_metric, _corollary1_trial),
}


def run_suite(name, cfg, threads=None):
    return SUITES[name][0](cfg, threads)


def replay_trial(name, cfg, index):
    """Re-run one trial standalone; returns its recorded checks."""
    return execute_trial(name, cfg, SUITES[name][1], index).checks


__all__ = ["SUITES", "TrialConfig", "replay_trial", "run_suite"] + [f.__name__ for f, _ in SUITES.values()]
