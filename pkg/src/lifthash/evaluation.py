"""Retrieval evaluation: split datasets, auto-labeling, and search metrics.

A labeled dataset carries three mutually disjoint splits (learn, database,
query). For a query, the top k = ceil(acquisition * |database|) items by
Hamming distance are retrieved and compared against label information,
which is either an integer label per element (-1 = unlabeled) or a
pairwise same-label relation built from the smallest L2 distances.

Metrics per query: precision is the same-label fraction of the retrieved
set; recall is the retrieved fraction of all same-label database items; a
query errs when it retrieves no same-label item at all. Queries that have
no same-label database item to begin with are excluded from the recall and
error-rate averages (precision still counts them) and reported separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .core import HashModel
from .hashing import encode_words, top_k_many

SPLIT_LEARN = 0
SPLIT_DATABASE = 1
SPLIT_QUERY = 2
SPLIT_NAMES = ("learn", "database", "query")


def split_codes(names) -> np.ndarray:
    """Map an iterable of split names to the internal int8 codes."""
    try:
        return np.array([SPLIT_NAMES.index(str(s)) for s in names], dtype=np.int8)
    except ValueError:
        bad = next(s for s in names if str(s) not in SPLIT_NAMES)
        raise ValueError(
            f"unknown split {bad!r}; expected one of {SPLIT_NAMES}"
        ) from None


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Vectors with integer labels and a per-element split designation."""

    vectors: np.ndarray
    labels: np.ndarray
    split: np.ndarray

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        split = np.asarray(self.split, dtype=np.int8)
        if vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D array")
        n = vectors.shape[0]
        if labels.shape != (n,) or split.shape != (n,):
            raise ValueError("labels and split must have one entry per vector")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors contain non-finite values")
        if not np.all((split >= SPLIT_LEARN) & (split <= SPLIT_QUERY)):
            raise ValueError("split codes must be 0 (learn), 1 (database) or 2 (query)")
        for a in (vectors, labels, split):
            a.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "split", split)

    @classmethod
    def build(cls, vectors, labels=None, split=None) -> "LabeledDataset":
        """Assemble a dataset; missing labels become -1, missing split 'database'."""
        vectors = np.asarray(vectors, dtype=np.float64)
        n = vectors.shape[0]
        if labels is None:
            labels = np.full(n, -1, dtype=np.int64)
        if split is None:
            split = np.full(n, SPLIT_DATABASE, dtype=np.int8)
        elif len(split) and isinstance(next(iter(split)), str):
            split = split_codes(split)
        return cls(vectors=vectors, labels=np.asarray(labels), split=np.asarray(split))

    def indices_of(self, code: int) -> np.ndarray:
        return np.flatnonzero(self.split == code)

    @property
    def has_labels(self) -> bool:
        return bool(np.any(self.labels >= 0))


@dataclass(frozen=True)
class EvalReport:
    """Search-quality metrics for one model at one acquisition rate."""

    bit_count: int
    acquisition: float
    k: int
    precision: float
    recall: float | None
    error_rate: float | None
    n_database: int
    n_queries: int
    n_queries_without_matches: int
    label_source: str
    pearson_l2_hamming: float | None = None

    CSV_HEADER = "bits,acquisition,precision,recall,error_rate"

    def csv_row(self) -> str:
        cells = [
            str(self.bit_count),
            repr(float(self.acquisition)),
            repr(float(self.precision)),
            "" if self.recall is None else repr(float(self.recall)),
            "" if self.error_rate is None else repr(float(self.error_rate)),
        ]
        return ",".join(cells)

    def to_text(self) -> str:
        lines = [
            f"bits: {self.bit_count}",
            f"acquisition: {self.acquisition!r} (k={self.k})",
            f"database size: {self.n_database}",
            f"queries: {self.n_queries} "
            f"({self.n_queries_without_matches} without same-label items, "
            "excluded from recall/error rate)",
            f"label source: {self.label_source}",
            f"precision: {float(self.precision)!r}",
            f"recall: {'n/a' if self.recall is None else repr(float(self.recall))}",
            "error rate: "
            + ("n/a" if self.error_rate is None else repr(float(self.error_rate))),
        ]
        if self.pearson_l2_hamming is not None:
            lines.append(f"pearson(l2, hamming): {float(self.pearson_l2_hamming)!r}")
        return "\n".join(lines)


def auto_label_pairs(data, top_fraction: float) -> set[tuple[int, int]]:
    """Mark the closest top_fraction of all point pairs as same-label.

    Computes all n(n-1)/2 Euclidean distances, sorts them ascending (ties
    broken by index order), and returns the first floor(top_fraction * total)
    unordered index pairs. The relation is symmetric by construction and is
    deliberately not closed transitively: chaining nearest pairs would merge
    nearly everything at small fractions.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 vectors")
    if not 0.0 < top_fraction <= 1.0:
        raise ValueError("top_fraction must be in (0, 1]")
    n = X.shape[0]
    total = n * (n - 1) // 2
    count = math.floor(top_fraction * total)
    dists = pdist(X)
    order = np.argsort(dists, kind="stable")[:count]
    ii, jj = np.triu_indices(n, k=1)
    return {(int(ii[t]), int(jj[t])) for t in order}


def _relation_lookup(relation: set[tuple[int, int]]):
    norm = {(min(i, j), max(i, j)) for i, j in relation}

    def same(a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in norm

    return same


def evaluate(
    model: HashModel,
    dataset: LabeledDataset,
    acquisition: float,
    same_label_relation: set[tuple[int, int]] | None = None,
    label_source: str | None = None,
    threads: int = 1,
) -> EvalReport:
    """Score Hamming retrieval of the database split from the query split.

    ``same_label_relation``, when given, overrides integer labels: pairs are
    same-label exactly when their (dataset-global) index pair is in the
    relation. Deterministic: no randomness is involved.
    """
    if not 0.0 < acquisition <= 1.0:
        raise ValueError("acquisition must be in (0, 1]")
    db_idx = dataset.indices_of(SPLIT_DATABASE)
    q_idx = dataset.indices_of(SPLIT_QUERY)
    if db_idx.size == 0 or q_idx.size == 0:
        raise ValueError("need non-empty database and query splits")
    if same_label_relation is None and not dataset.has_labels:
        raise ValueError(
            "dataset has no labels; pass a same-label relation or label the data"
        )

    k = math.ceil(acquisition * db_idx.size)
    db_words = encode_words(model, dataset.vectors[db_idx])
    q_words = encode_words(model, dataset.vectors[q_idx])
    retrieved, _ = top_k_many(q_words, db_words, k, threads=threads)

    if same_label_relation is not None:
        same = _relation_lookup(same_label_relation)
        labels = None
    else:
        labels = dataset.labels

    precisions = []
    recalls = []
    errors = []
    excluded = 0
    for qi, gq in enumerate(q_idx):
        if labels is not None:
            lab = labels[gq]
            same_mask = (
                (labels[db_idx] == lab) if lab >= 0
                else np.zeros(db_idx.size, dtype=bool)
            )
        else:
            same_mask = np.fromiter(
                (same(int(gq), int(g)) for g in db_idx), dtype=bool, count=db_idx.size
            )
        n_same = int(same_mask.sum())
        n_hit = int(same_mask[retrieved[qi]].sum())
        precisions.append(n_hit / k)
        if n_same == 0:
            excluded += 1
            continue
        recalls.append(n_hit / n_same)
        errors.append(1.0 if n_hit == 0 else 0.0)

    included = len(recalls)
    return EvalReport(
        bit_count=model.bit_count,
        acquisition=float(acquisition),
        k=k,
        precision=float(np.mean(precisions)),
        recall=float(np.mean(recalls)) if included else None,
        error_rate=float(np.mean(errors)) if included else None,
        n_database=int(db_idx.size),
        n_queries=int(q_idx.size),
        n_queries_without_matches=excluded,
        label_source=label_source
        or ("pair relation" if same_label_relation is not None else "dataset labels"),
    )


def correlate(
    model: HashModel, data, n_pairs: int, rng_seed: int
) -> tuple[float, list[tuple[float, int]]]:
    """Pearson correlation between L2 and Hamming distances on random pairs.

    Pairs are sampled uniformly (with replacement across pairs, never a
    point with itself). L2 distances are measured in the model's projected
    space, the same space the hyperplanes cut. Returns the correlation plus
    the raw (l2, hamming) scatter for plotting.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 data vectors")
    if n_pairs < 2:
        raise ValueError("n_pairs must be >= 2")
    n = X.shape[0]
    rng = np.random.default_rng(rng_seed)
    i = rng.integers(0, n, size=n_pairs)
    j = rng.integers(0, n, size=n_pairs)
    clash = i == j
    while np.any(clash):
        j[clash] = rng.integers(0, n, size=int(clash.sum()))
        clash = i == j

    Y = np.atleast_2d(model.project(X))
    words = encode_words(model, X)
    l2 = np.linalg.norm(Y[i] - Y[j], axis=1)
    ham = np.bitwise_count(words[i] ^ words[j]).sum(axis=1).astype(np.int64)

    if np.all(l2 == l2[0]):
        raise ValueError("degenerate sample: all L2 distances identical")
    if np.all(ham == ham[0]):
        raise ValueError("degenerate sample: all Hamming distances identical")
    pearson = float(np.corrcoef(l2, ham.astype(np.float64))[0, 1])
    return pearson, list(zip(l2.tolist(), ham.tolist()))
