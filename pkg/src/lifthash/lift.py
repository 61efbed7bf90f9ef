"""The lift embedding: trade hyperplane offsets for one extra dimension.

Data in an N-dimensional space V is embedded at the z = 1 slice of an
(N+1)-dimensional space W via x -> (x, 1). A hyperplane through the origin
of W with normal (n, w) meets that slice exactly where n . x + w = 0, i.e.
it acts on V as a hyperplane with offset w. Any procedure that only knows
how to produce origin-crossing hyperplanes can therefore be run in W and
its output converted back to offset hyperplanes in V.

Sampling convention: each lifted normal is drawn i.i.d. standard normal in
all N+1 components and then divided by the norm of its first N components,
so the direction part is exactly unit length. Plane i is generated from its
own PCG64 stream, seeded with SeedSequence(seed, spawn_key=(i,)), so the
i-th plane is reproducible regardless of how many planes are requested and
planes may be generated in parallel.
"""

from __future__ import annotations

import logging
import warnings
from typing import Callable, Sequence

import numpy as np

from .core import DEGENERATE_NORM_TOL, Hyperplane, LiftedHyperplane

logger = logging.getLogger(__name__)

# An origin learner maps a point set (n, d) to unit normals (m, d) of
# hyperplanes through the origin.
OriginLearner = Callable[[np.ndarray], np.ndarray]


def lift_point(x) -> np.ndarray:
    """Embed x one dimension up by appending a trailing component equal to 1.

    Accepts a single vector or a batch (the 1 is appended along the last
    axis). The embedding is injective and preserves pairwise L2 distances.
    """
    X = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains non-finite components")
    ones = np.ones(X.shape[:-1] + (1,), dtype=np.float64)
    return np.concatenate([X, ones], axis=-1)


def _plane_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_lifted(dim_v: int, count: int, rng_seed: int) -> list[LiftedHyperplane]:
    """Draw ``count`` random origin-crossing hyperplanes in the lifted space.

    Each normal has all dim_v + 1 components sampled from the standard
    normal distribution, then every component is divided by the L2 norm of
    the first dim_v components. Seen in V, the directions are uniform on the
    sphere and the offsets are z / ||g|| for independent standard normals
    z, g (close to standard normal only when dim_v is small; see README).

    Degenerate draws (direction norm below 1e-12) are redrawn from the same
    per-plane stream; redraws are counted and logged.
    """
    if dim_v < 1:
        raise ValueError("dim_v must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    planes = []
    redraws = 0
    for i in range(count):
        rng = _plane_rng(rng_seed, i)
        while True:
            raw = rng.standard_normal(dim_v + 1)
            norm = np.linalg.norm(raw[:-1])
            if norm >= DEGENERATE_NORM_TOL:
                break
            redraws += 1
        planes.append(LiftedHyperplane(lifted_normal=raw / norm))
    if redraws:
        logger.info("sample_lifted: %d degenerate draw(s) redrawn", redraws)
    return planes


def unlift_hyperplane(h: LiftedHyperplane) -> Hyperplane:
    """Convert a lifted origin-crossing hyperplane to an offset hyperplane in V.

    The direction is re-normalized defensively even though the stored
    convention already makes it unit: scaling (n, w) jointly by a positive
    constant does not change the side function.
    """
    v = h.lifted_normal
    norm = np.linalg.norm(v[:-1])
    if norm < DEGENERATE_NORM_TOL:
        raise ValueError(
            "normal is parallel to the added axis: the plane does not cross the z=1 slice"
        )
    return Hyperplane(normal=v[:-1] / norm, offset=float(v[-1]) / norm)


def lift_learner(
    origin_learner: OriginLearner, learning_data
) -> list[Hyperplane]:
    """Run an origin-only hyperplane learner one dimension up and unlift.

    The learner is any callable taking a point set (rows are points) and
    returning a matrix or sequence of unit normals in the same space. The
    learning data is embedded at z = 1, the learner runs in dimension N+1,
    and every returned plane is converted to an offset hyperplane in V.
    Planes parallel to the added axis never cross the z = 1 slice; they are
    skipped with a warning rather than an error, since a learner may
    legitimately produce one.
    """
    lifted = lift_point(np.atleast_2d(np.asarray(learning_data, dtype=np.float64)))
    normals = np.atleast_2d(np.asarray(origin_learner(lifted), dtype=np.float64))
    if normals.size and normals.shape[1] != lifted.shape[1]:
        raise ValueError(
            f"learner returned normals of dimension {normals.shape[1]}, "
            f"expected {lifted.shape[1]}"
        )
    planes = []
    skipped = 0
    for raw in normals:
        if np.linalg.norm(raw[:-1]) < DEGENERATE_NORM_TOL:
            skipped += 1
            continue
        planes.append(unlift_hyperplane(LiftedHyperplane.from_raw(raw)))
    if skipped:
        warnings.warn(
            f"skipped {skipped} hyperplane(s) parallel to the added axis",
            stacklevel=2,
        )
    return planes


def sample_offset_planes(dim_v: int, count: int, rng_seed: int) -> list[Hyperplane]:
    """Random offset hyperplanes in V: the lift-and-unlift of sample_lifted."""
    return [unlift_hyperplane(h) for h in sample_lifted(dim_v, count, rng_seed)]


def sample_origin_planes(dim_v: int, count: int, rng_seed: int) -> list[Hyperplane]:
    """Random origin-crossing hyperplanes in V (uniform directions, offset 0).

    Uses the same per-plane stream splitting as sample_lifted: plane i draws
    dim_v standard normal components and is normalized to unit length.
    """
    if dim_v < 1:
        raise ValueError("dim_v must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    planes = []
    for i in range(count):
        rng = _plane_rng(rng_seed, i)
        while True:
            raw = rng.standard_normal(dim_v)
            norm = np.linalg.norm(raw)
            if norm >= DEGENERATE_NORM_TOL:
                break
        planes.append(Hyperplane(normal=raw / norm, offset=0.0))
    return planes
