"""Domain types for offset-hyperplane hashing and the bit-code primitives.

Vectors are plain 1-D float64 numpy arrays (2-D arrays for batches). A
hyperplane is stored as a unit normal n plus a scalar offset b, describing
the set {x : n.x + b = 0}. Bit codes are packed little-endian into 64-bit
words: bit i of a code lives in word i // 64 at bit position i % 64, and
unused trailing bits of the last word are zero. All types are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .preprocess import PreprocessParams, transform

UNIT_NORM_TOL = 1e-9

# Below this, a direction is considered degenerate (not normalizable).
DEGENERATE_NORM_TOL = 1e-12


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate a 1-D finite float64 vector, optionally of a fixed dimension."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ValueError("expected a 1-D vector with at least one component")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains non-finite components")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: got {v.shape[0]}, expected {dim}")
    return v


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """A hyperplane {x : normal . x + offset = 0} with unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = as_vector(self.normal)
        offset = float(self.offset)
        if not np.isfinite(offset):
            raise ValueError("offset must be finite")
        if abs(np.linalg.norm(normal) - 1.0) > UNIT_NORM_TOL:
            raise ValueError("normal must have unit L2 norm (tolerance 1e-9)")
        object.__setattr__(self, "normal", _frozen(normal))
        object.__setattr__(self, "offset", offset)

    @classmethod
    def from_direction(cls, direction, offset: float) -> "Hyperplane":
        """Build from an unnormalized (direction, offset) pair.

        Scales both jointly by 1/||direction||, which leaves the plane (and
        the sign of direction . x + offset) unchanged.
        """
        d = as_vector(direction)
        norm = np.linalg.norm(d)
        if norm < DEGENERATE_NORM_TOL:
            raise ValueError("direction has (near-)zero norm")
        return cls(normal=d / norm, offset=float(offset) / norm)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hyperplane):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.normal, other.normal)


@dataclass(frozen=True, eq=False)
class LiftedHyperplane:
    """An origin-crossing hyperplane in the lifted space, one dimension up.

    The stored normal is (n, w) with n of dimension N and a trailing scalar
    w; the convention is that the first N components form a unit vector, so
    the plane restricted to the z = 1 slice reads n . x + w = 0.
    """

    lifted_normal: np.ndarray

    def __post_init__(self):
        v = as_vector(self.lifted_normal)
        if v.shape[0] < 2:
            raise ValueError("lifted normal needs at least 2 components")
        if abs(np.linalg.norm(v[:-1]) - 1.0) > UNIT_NORM_TOL:
            raise ValueError(
                "first N components of a lifted normal must form a unit vector"
            )
        object.__setattr__(self, "lifted_normal", _frozen(v))

    @classmethod
    def from_raw(cls, raw) -> "LiftedHyperplane":
        """Normalize a raw (N+1)-vector so its first N components are unit."""
        v = as_vector(raw)
        if v.shape[0] < 2:
            raise ValueError("lifted normal needs at least 2 components")
        norm = np.linalg.norm(v[:-1])
        if norm < DEGENERATE_NORM_TOL:
            raise ValueError("normal is parallel to the added axis")
        return cls(lifted_normal=v / norm)

    @property
    def data_dim(self) -> int:
        """Dimension N of the underlying data space."""
        return self.lifted_normal.shape[0] - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, LiftedHyperplane):
            return NotImplemented
        return np.array_equal(self.lifted_normal, other.lifted_normal)


def pack_bits(bits) -> np.ndarray:
    """Pack a 0/1 sequence into little-endian uint64 words.

    Bit i goes to word i // 64, position i % 64; trailing bits are zero.
    """
    b = np.asarray(bits, dtype=np.uint8)
    if b.ndim != 1:
        raise ValueError("expected a flat bit sequence")
    n_words = (b.shape[0] + 63) // 64
    buf = np.zeros(n_words * 8, dtype=np.uint8)
    packed = np.packbits(b, bitorder="little")
    buf[: packed.shape[0]] = packed
    return buf.view("<u8")


def unpack_bits(words: np.ndarray, width: int) -> np.ndarray:
    """Inverse of pack_bits: recover the first ``width`` bits as uint8."""
    byts = np.asarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(byts, bitorder="little")[:width]


@dataclass(frozen=True, eq=False)
class BitCode:
    """A packed binary code of ``width`` bits (one bit per hyperplane)."""

    words: np.ndarray
    width: int

    def __post_init__(self):
        words = np.asarray(self.words, dtype=np.uint64)
        width = int(self.width)
        if width < 0:
            raise ValueError("width must be non-negative")
        if words.ndim != 1 or words.shape[0] != (width + 63) // 64:
            raise ValueError("word count does not match width")
        if width % 64 and words.shape[0]:
            tail = int(words[-1]) >> (width % 64)
            if tail:
                raise ValueError("unused trailing bits must be zero")
        words = words.copy()
        words.flags.writeable = False
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "width", width)

    @classmethod
    def from_bits(cls, bits) -> "BitCode":
        b = np.asarray(bits, dtype=np.uint8)
        return cls(words=pack_bits(b), width=b.shape[0])

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.width)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitCode):
            return NotImplemented
        return self.width == other.width and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.width, self.words.tobytes()))


def hamming_distance(a: BitCode, b: BitCode) -> int:
    """Number of bit positions where two equal-width codes differ."""
    if a.width != b.width:
        raise ValueError(f"incompatible code widths: {a.width} != {b.width}")
    return int(np.bitwise_count(a.words ^ b.words).sum())


def side_of(h: Hyperplane, x) -> int:
    """Which side of the hyperplane a point falls on: 1 if n.x + b > 0 else 0.

    Points exactly on the plane map to 0 (fixed boundary rule; the event has
    measure zero but determinism requires a convention).
    """
    v = as_vector(x, dim=h.dim)
    return 1 if float(h.normal @ v) + h.offset > 0 else 0


@dataclass(frozen=True, eq=False)
class HashModel:
    """An ordered hyperplane family plus the preprocessing that feeds it.

    Encoding a raw vector is a pure function of (model, vector): the vector
    is run through ``preprocess`` (identity when None) and each hyperplane
    contributes one bit via its side test, in list order.
    """

    hyperplanes: tuple[Hyperplane, ...]
    preprocess: PreprocessParams | None = None
    seed: int = 0

    def __post_init__(self):
        planes = tuple(self.hyperplanes)
        dims = {p.dim for p in planes}
        if len(dims) > 1:
            raise ValueError("all hyperplanes must share one dimension")
        if self.preprocess is not None and dims and dims != {self.preprocess.output_dim}:
            raise ValueError(
                "hyperplane dimension does not match preprocess output dimension"
            )
        object.__setattr__(self, "hyperplanes", planes)
        object.__setattr__(self, "seed", int(self.seed))
        if planes:
            normals = _frozen(np.stack([p.normal for p in planes]))
            offsets = _frozen(np.array([p.offset for p in planes]))
        else:
            dim = self.preprocess.output_dim if self.preprocess is not None else 0
            normals = _frozen(np.zeros((0, dim)))
            offsets = _frozen(np.zeros(0))
        object.__setattr__(self, "_normals", normals)
        object.__setattr__(self, "_offsets", offsets)

    @property
    def bit_count(self) -> int:
        return len(self.hyperplanes)

    @property
    def plane_dim(self) -> int:
        """Dimension of the space the hyperplanes live in."""
        return self._normals.shape[1]

    @property
    def raw_dim(self) -> int:
        """Dimension of raw input vectors accepted by encode."""
        if self.preprocess is not None:
            return self.preprocess.input_dim
        return self.plane_dim

    @property
    def normal_matrix(self) -> np.ndarray:
        """All normals stacked as an (m, dim) matrix."""
        return self._normals

    @property
    def offset_vector(self) -> np.ndarray:
        """All offsets as an (m,) vector."""
        return self._offsets

    def project(self, x) -> np.ndarray:
        """Apply the model's preprocessing to raw input (identity when unset)."""
        if self.preprocess is None:
            X = np.asarray(x, dtype=np.float64)
            if X.shape[-1] != self.plane_dim:
                raise ValueError(
                    f"dimension mismatch: got {X.shape[-1]}, expected {self.plane_dim}"
                )
            return X
        return transform(self.preprocess, x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HashModel):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.preprocess == other.preprocess
            and self.hyperplanes == other.hyperplanes
        )
