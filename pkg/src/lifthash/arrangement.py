"""Region counting for hyperplane arrangements in low dimension.

A family of hyperplanes cuts space into open regions; each region gets its
own bit code, so the region count bounds how finely the hash discretizes
space. Families forced through the origin create far fewer regions than
families with free offsets: for m planes in general position in dimension d
the counts are 2 * sum_{i<d} C(m-1, i) versus sum_{i<=d} C(m, i), i.e.
O(m^(d-1)) versus O(m^d) as m grows. The exact counter verifies these
finite closed forms directly.
"""

from __future__ import annotations

from math import comb

import numpy as np
from scipy.optimize import linprog

from .core import Hyperplane

# A sign-vector cell counts as nonempty when some point satisfies every
# strict inequality with at least this margin.
_FEASIBLE_MARGIN = 1e-9

_EXACT_MAX_DIM = 3
_EXACT_MAX_PLANES = 20


def central_region_count(bits: int, dim: int) -> int:
    """Closed-form region count for m generic hyperplanes through the origin."""
    if bits == 0:
        return 1
    return 2 * sum(comb(bits - 1, i) for i in range(dim))


def offset_region_count(bits: int, dim: int) -> int:
    """Closed-form region count for m generic hyperplanes with free offsets."""
    return sum(comb(bits, i) for i in range(dim + 1))


def _stack(planes: list[Hyperplane], dim: int) -> tuple[np.ndarray, np.ndarray]:
    for i, p in enumerate(planes):
        if p.dim != dim:
            raise ValueError(f"plane {i} has dimension {p.dim}, expected {dim}")
    normals = np.stack([p.normal for p in planes])
    offsets = np.array([p.offset for p in planes])
    return normals, offsets


def _max_margin_point(
    normals: np.ndarray, offsets: np.ndarray, signs: np.ndarray
) -> tuple[np.ndarray, float]:
    """Solve for the point maximizing min_i signs_i*(n_i.x + b_i), capped at 1.

    The LP is always feasible (t is unbounded below), so the sign-vector
    cell is nonempty exactly when the returned margin is positive.
    """
    m, d = normals.shape
    A = np.hstack([-signs[:, None] * normals, np.ones((m, 1))])
    b = signs * offsets
    res = linprog(
        c=[0.0] * d + [-1.0],
        A_ub=A,
        b_ub=b,
        bounds=[(None, None)] * d + [(None, 1.0)],
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"feasibility LP failed with status {res.status}")
    return res.x[:d], float(-res.fun)


def count_regions_exact(planes: list[Hyperplane], dim: int) -> int:
    """Exact number of regions the planes cut dimension-``dim`` space into.

    Enumerates the realizable sign vectors incrementally: plane by plane,
    each surviving sign prefix is extended to the side containing its
    witness point for free, and the opposite side is kept only if an LP
    finds an interior point for it. This visits O(regions * m) candidates
    instead of all 2^m sign vectors.

    Supports dim in {1, 2, 3} and at most 20 planes.
    """
    if dim not in (1, 2, 3):
        raise ValueError("exact counting supports dim in {1, 2, 3}")
    if len(planes) > _EXACT_MAX_PLANES:
        raise ValueError(f"exact counting supports at most {_EXACT_MAX_PLANES} planes")
    if not planes:
        return 1
    normals, offsets = _stack(planes, dim)

    # (witness point, sign prefix) per live cell
    cells: list[tuple[np.ndarray, list[float]]] = [(np.zeros(dim), [])]
    for i in range(len(planes)):
        new_cells = []
        for witness, signs in cells:
            value = float(normals[i] @ witness) + offsets[i]
            for s in (1.0, -1.0):
                if s * value > _FEASIBLE_MARGIN:
                    new_cells.append((witness, signs + [s]))
                    continue
                trial = np.array(signs + [s])
                point, margin = _max_margin_point(
                    normals[: i + 1], offsets[: i + 1], trial
                )
                if margin > _FEASIBLE_MARGIN:
                    new_cells.append((point, signs + [s]))
        cells = new_cells
    return len(cells)


def count_regions_sampled(
    planes: list[Hyperplane],
    dim: int,
    n_samples: int,
    sample_radius: float,
    rng_seed: int,
) -> int:
    """Lower bound on the region count by probing random points.

    Counts distinct sign vectors among ``n_samples`` points drawn uniformly
    from the ball of ``sample_radius``. Directions and radii come from two
    separate derived streams, so the first n points are the same for any
    larger n: the bound is monotone nondecreasing in ``n_samples`` at a
    fixed seed.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if sample_radius <= 0:
        raise ValueError("sample_radius must be positive")
    if not planes:
        return 1
    normals, offsets = _stack(planes, dim)

    dir_rng = np.random.default_rng(np.random.SeedSequence(rng_seed, spawn_key=(0,)))
    rad_rng = np.random.default_rng(np.random.SeedSequence(rng_seed, spawn_key=(1,)))
    G = dir_rng.standard_normal((n_samples, dim))
    norms = np.linalg.norm(G, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = sample_radius * rad_rng.random(n_samples) ** (1.0 / dim)
    points = G / norms * radii[:, None]

    bits = (points @ normals.T + offsets > 0).astype(np.uint8)
    packed = np.packbits(bits, axis=1)
    return int(np.unique(packed, axis=0).shape[0])
