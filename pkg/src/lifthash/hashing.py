"""Encoding vectors into packed codes and exact linear-scan retrieval.

Search is an exhaustive Hamming ranking over packed 64-bit words using the
hardware popcount (np.bitwise_count); no index structures. Ties at the k-th
distance are cut strictly at k items, broken by ascending database index.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import BitCode, HashModel, as_vector


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack an (n, m) 0/1 matrix into (n, ceil(m/64)) little-endian words."""
    n, m = bits.shape
    n_words = (m + 63) // 64
    byts = np.zeros((n, n_words * 8), dtype=np.uint8)
    if m:
        packed = np.packbits(bits, axis=1, bitorder="little")
        byts[:, : packed.shape[1]] = packed
    return byts.view("<u8")


def encode_words(model: HashModel, data) -> np.ndarray:
    """Encode a batch of raw vectors into an (n, words) packed code matrix."""
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a 2-D batch of raw vectors")
    if X.shape[0] == 0:
        return np.zeros((0, (model.bit_count + 63) // 64), dtype=np.uint64)
    finite = np.isfinite(X).all(axis=1)
    if not finite.all():
        bad = int(np.flatnonzero(~finite)[0])
        raise ValueError(f"vector {bad}: non-finite components")
    Y = model.project(X)
    bits = (Y @ model.normal_matrix.T + model.offset_vector > 0).astype(np.uint8)
    return _pack_rows(bits)


def encode(model: HashModel, raw) -> BitCode:
    """Encode one raw vector: bit i is the side test of hyperplane i."""
    v = as_vector(raw, dim=model.raw_dim)
    y = model.project(v)
    bits = (model.normal_matrix @ y + model.offset_vector > 0).astype(np.uint8)
    return BitCode.from_bits(bits)


def encode_all(model: HashModel, dataset) -> list[BitCode]:
    """Element-wise encode of a dataset, order-preserving."""
    X = np.asarray(dataset, dtype=np.float64)
    if X.size == 0:
        return []
    words = encode_words(model, np.atleast_2d(X))
    m = model.bit_count
    return [BitCode(words=row, width=m) for row in words]


def _stack_codes(codes: list[BitCode]) -> tuple[np.ndarray, int]:
    widths = {c.width for c in codes}
    if len(widths) > 1:
        raise ValueError(f"codes have mixed widths: {sorted(widths)}")
    width = widths.pop() if widths else 0
    return np.stack([c.words for c in codes]), width


def hamming_to_many(query_words: np.ndarray, db_words: np.ndarray) -> np.ndarray:
    """Hamming distances from one packed code to many (popcount of XOR)."""
    return np.bitwise_count(db_words ^ query_words).sum(axis=1).astype(np.int64)


def search(
    query_code: BitCode, db_codes: list[BitCode], k: int
) -> list[tuple[int, int]]:
    """Exact top-k database entries by Hamming distance to the query.

    Returns (index, distance) pairs sorted by ascending distance, ties by
    ascending index.
    """
    if not db_codes:
        raise ValueError("database is empty")
    if not 1 <= k <= len(db_codes):
        raise ValueError(f"k={k} out of range [1, {len(db_codes)}]")
    db_words, width = _stack_codes(db_codes)
    if width != query_code.width:
        raise ValueError(f"incompatible code widths: {query_code.width} != {width}")
    dists = hamming_to_many(query_code.words, db_words)
    order = np.argsort(dists, kind="stable")[:k]
    return [(int(i), int(dists[i])) for i in order]


def l2_search(query, db, k: int) -> list[tuple[int, float]]:
    """Exact top-k database entries by Euclidean distance (same tie rule)."""
    D = np.asarray(db, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] == 0:
        raise ValueError("database must be a non-empty 2-D array")
    q = as_vector(query, dim=D.shape[1])
    if not 1 <= k <= D.shape[0]:
        raise ValueError(f"k={k} out of range [1, {D.shape[0]}]")
    dists = np.linalg.norm(D - q, axis=1)
    order = np.argsort(dists, kind="stable")[:k]
    return [(int(i), float(dists[i])) for i in order]


def top_k_many(
    query_words: np.ndarray, db_words: np.ndarray, k: int, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Top-k Hamming search for a batch of queries against one database.

    Returns (indices, distances), each of shape (n_queries, k). The result
    is independent of ``threads``: queries are partitioned into chunks and
    each chunk's ranking is computed exactly as in the serial path.
    """
    n_q = query_words.shape[0]
    n_db = db_words.shape[0]
    if not 1 <= k <= n_db:
        raise ValueError(f"k={k} out of range [1, {n_db}]")
    indices = np.empty((n_q, k), dtype=np.int64)
    distances = np.empty((n_q, k), dtype=np.int64)

    def run(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            d = hamming_to_many(query_words[i], db_words)
            order = np.argsort(d, kind="stable")[:k]
            indices[i] = order
            distances[i] = d[order]

    threads = max(1, int(threads))
    if threads == 1 or n_q < 2:
        run(0, n_q)
    else:
        chunk = (n_q + threads - 1) // threads
        spans = [(lo, min(lo + chunk, n_q)) for lo in range(0, n_q, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda s: run(*s), spans))
    return indices, distances
