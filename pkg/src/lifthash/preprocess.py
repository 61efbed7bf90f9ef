"""Feature normalization and PCA projection.

The pipeline fits on the learning split only: each component is centered to
mean 0 and scaled to standard deviation 1 (population convention), then the
data is projected onto the leading principal directions. The projected
dimension is the smallest k whose eigenvalues reach the requested cumulative
contribution of the total variance (default 80%).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Components whose standard deviation is below this (relative to the mean
# magnitude) are treated as constant.
_CONSTANT_STD_TOL = 1e-12

_ORTHONORMAL_TOL = 1e-8


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class PreprocessParams:
    """Fitted normalization and projection state.

    Attributes
    ----------
    mean : (d,) per-component mean of the learning split
    scale : (d,) per-component standard deviation, strictly positive
    eigenvalues : (d,) full spectrum of the covariance of the normalized
        learning data, sorted descending, non-negative
    basis : (k, d) retained principal directions, orthonormal rows
    """

    mean: np.ndarray
    scale: np.ndarray
    eigenvalues: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        mean = _readonly(np.atleast_1d(self.mean))
        scale = _readonly(np.atleast_1d(self.scale))
        eigenvalues = _readonly(np.atleast_1d(self.eigenvalues))
        basis = _readonly(np.atleast_2d(self.basis))
        d = mean.shape[0]
        if scale.shape != (d,) or eigenvalues.shape != (d,) or basis.shape[1] != d:
            raise ValueError("inconsistent parameter shapes")
        if not (basis.shape[0] >= 1 and basis.shape[0] <= d):
            raise ValueError("basis must retain between 1 and d directions")
        if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(scale)):
            raise ValueError("non-finite normalization parameters")
        if np.any(scale <= 0):
            raise ValueError("scale components must be strictly positive")
        if np.any(eigenvalues < 0) or np.any(np.diff(eigenvalues) > 0):
            raise ValueError("eigenvalues must be non-negative and sorted descending")
        gram = basis @ basis.T
        if not np.allclose(gram, np.eye(basis.shape[0]), atol=_ORTHONORMAL_TOL):
            raise ValueError("basis rows must be orthonormal")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "basis", basis)

    @property
    def input_dim(self) -> int:
        return self.mean.shape[0]

    @property
    def output_dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "PreprocessParams":
        """Pass-through parameters: zero mean, unit scale, full identity basis."""
        return cls(
            mean=np.zeros(dim),
            scale=np.ones(dim),
            eigenvalues=np.ones(dim),
            basis=np.eye(dim),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PreprocessParams):
            return NotImplemented
        return (
            np.array_equal(self.mean, other.mean)
            and np.array_equal(self.scale, other.scale)
            and np.array_equal(self.eigenvalues, other.eigenvalues)
            and np.array_equal(self.basis, other.basis)
        )


def fit(
    learning_data,
    contribution: float = 0.80,
    allow_constant: bool = False,
) -> PreprocessParams:
    """Fit normalization and PCA on the learning split.

    Normalization precedes PCA. The covariance of the normalized data uses
    the 1/n (population) convention, so its diagonal is exactly 1 and the
    eigenvalues sum to the input dimension; this makes the projected
    per-direction variances equal the retained eigenvalues exactly.

    The retained dimension k is the smallest k such that the k leading
    eigenvalues account for at least ``contribution`` of the total.

    Constant components are rejected unless ``allow_constant`` is set, in
    which case their scale is substituted with 1 (the normalized component
    is then identically zero).
    """
    X = np.asarray(learning_data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("learning data must be a 2-D array of shape (n, d)")
    n, d = X.shape
    if n < 2:
        raise ValueError("need at least 2 learning vectors")
    if not np.all(np.isfinite(X)):
        raise ValueError("learning data contains non-finite values")
    if not 0.0 < contribution <= 1.0:
        raise ValueError("contribution must be in (0, 1]")

    mean = X.mean(axis=0)
    std = np.sqrt(((X - mean) ** 2).mean(axis=0))
    constant = std <= _CONSTANT_STD_TOL * np.maximum(1.0, np.abs(mean))
    if np.any(constant):
        if not allow_constant:
            cols = np.flatnonzero(constant)
            raise ValueError(
                f"component(s) {cols.tolist()} have zero variance; "
                "drop them or pass allow_constant=True to keep them with scale 1"
            )
        std = np.where(constant, 1.0, std)
    if np.all(constant):
        raise ValueError("all components are constant; nothing to project")

    Z = (X - mean) / std
    cov = (Z.T @ Z) / n
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(-eigvals, kind="stable")
    eigvals = np.clip(eigvals[order], 0.0, None)
    directions = eigvecs[:, order].T

    # Deterministic sign: the largest-magnitude component of each direction
    # is made positive.
    lead = np.argmax(np.abs(directions), axis=1)
    flip = directions[np.arange(d), lead] < 0
    directions[flip] *= -1.0

    total = eigvals.sum()
    if total <= 0:
        raise ValueError("degenerate spectrum: total variance is zero")
    cum = np.minimum(np.cumsum(eigvals) / total, 1.0)
    cum[-1] = 1.0
    k = int(np.searchsorted(cum, contribution, side="left")) + 1

    return PreprocessParams(
        mean=mean, scale=std, eigenvalues=eigvals, basis=directions[:k]
    )


def transform(params: PreprocessParams, x) -> np.ndarray:
    """Project raw vectors into the retained principal subspace.

    Accepts a single (d,) vector or an (n, d) batch; returns the projected
    (k,) vector or (n, k) batch.
    """
    X = np.asarray(x, dtype=np.float64)
    if X.ndim not in (1, 2):
        raise ValueError("expected a vector or a 2-D batch")
    if X.shape[-1] != params.input_dim:
        raise ValueError(
            f"dimension mismatch: got {X.shape[-1]}, params expect {params.input_dim}"
        )
    Z = (X - params.mean) / params.scale
    if X.ndim == 1:
        return params.basis @ Z
    return Z @ params.basis.T


def eigenvalue_ratio(params: PreprocessParams) -> float:
    """Ratio of the largest retained eigenvalue to the smallest retained one.

    A value near 1 means the projected data is close to spherical; large
    values mean strongly elliptical data, for which standard-normal offsets
    are a poor match to the data spread.
    """
    k = params.output_dim
    last = params.eigenvalues[k - 1]
    if last <= 0:
        raise ValueError(f"eigenvalue {k} is zero; ratio undefined")
    return float(params.eigenvalues[0] / last)
