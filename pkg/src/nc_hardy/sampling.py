"""Seeded random algebras and operator ensembles."""

import numpy as np

from .algebra import TracialAlgebra

KINDS = ("ginibre", "self-adjoint", "positive", "block-upper-invertible", "analytic-zero")
MIN_DIAGONAL_SINGULAR_VALUE = 0.5


def _composition(n, parts, rng):
    """Random sizes ``>= 1`` of ``parts`` contiguous pieces summing to ``n``."""
    cuts = np.sort(rng.choice(np.arange(1, n), size=parts - 1, replace=False)) if parts > 1 else []
    edges = np.concatenate([[0], cuts, [n]]).astype(int)
    return [int(b - a) for a, b in zip(edges[:-1], edges[1:])]


def _random_weights(n, rng):
    # ties are what make M non-commutative, so weights are drawn per summand
    k = int(rng.integers(1, max(1, n // 2) + 1))
    sizes = _composition(n, k, rng)
    mass = rng.dirichlet(np.ones(k))
    w = np.repeat(mass / np.asarray(sizes), sizes)
    return w / w.sum(), sizes


def _sizes_to_edges(sizes):
    return set(np.cumsum(sizes)[:-1].tolist())


def random_algebra(n, rng, block_spec="random", weight_spec="random"):
    """Sample a :class:`TracialAlgebra` of dimension ``n``.

    ``block_spec`` is ``"singletons"``, ``"random"`` or ``"fixed:K"``;
    ``weight_spec`` is ``"uniform"`` or ``"random"``.  With random blocks and
    ``n >= 2`` the result always has a nonzero strictly-upper part in ``M``.
    """
    rng = np.random.default_rng(rng)
    if weight_spec == "uniform":
        w, summand_sizes = np.full(n, 1.0 / n), [n]
    elif weight_spec == "random":
        w, summand_sizes = _random_weights(n, rng)
    else:
        raise ValueError(f"unknown weight spec {weight_spec!r}")

    if block_spec == "singletons":
        blocks = [1] * n
    elif block_spec.startswith("fixed:"):
        size = int(block_spec.split(":", 1)[1])
        if size < 1:
            raise ValueError("fixed block size must be >= 1")
        blocks = [size] * (n // size) + ([n % size] if n % size else [])
    elif block_spec == "random":
        edges = {i for i in range(1, n) if rng.random() < 0.5}
        summand_edges = _sizes_to_edges(summand_sizes)
        start = 0
        big = max(range(len(summand_sizes)), key=lambda k: summand_sizes[k])
        for k, size in enumerate(summand_sizes):
            inner = {e for e in edges if start < e < start + size}
            if k == big and size >= 2 and not inner:
                edges.add(start + int(rng.integers(1, size)))
            start += size
        edges |= summand_edges
        blocks = [b - a for a, b in zip([0] + sorted(edges), sorted(edges) + [n])]
    else:
        raise ValueError(f"unknown block spec {block_spec!r}")
    return TracialAlgebra(tuple(w), tuple(blocks))


def ginibre(n, rng):
    """i.i.d. standard complex Gaussian entries (E|z|^2 = 1)."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def sample_operator(alg, kind, rng):
    """Draw an element of ``M`` from one of the ensembles in ``KINDS``."""
    rng = np.random.default_rng(rng)
    g = alg.project(ginibre(alg.n, rng))
    if kind == "ginibre":
        return g
    if kind == "self-adjoint":
        return 0.5 * (g + g.conj().T)
    if kind == "positive":
        return g.conj().T @ g
    if kind == "analytic-zero":
        return np.where(alg.strict_upper_mask, g, 0)
    if kind == "block-upper-invertible":
        a = np.where(alg.strict_lower_mask, 0, g)
        for c0, c1 in alg.cells:
            u, s, vh = np.linalg.svd(a[c0:c1, c0:c1])
            a[c0:c1, c0:c1] = (u * np.maximum(s, MIN_DIAGONAL_SINGULAR_VALUE)) @ vh
        return a
    raise ValueError(f"unknown operator kind {kind!r}")
