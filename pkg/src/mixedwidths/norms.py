"""Mixed-norm arithmetic on block matrices, with exact exponent algebra.

A vector in R^N (N = s*b) is treated as an s x b matrix whose columns are
the blocks of the mixed norm: an inner norm over each column, an outer
norm over the b column norms.  Norm exponents are carried as exact
rational reciprocals, so quantities like (1/q - 1/p)_+ are computed
without floating-point cancellation; floats only enter in final powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Exponent",
    "BlockShape",
    "BlockMatrix",
    "MixedNormParams",
    "pos_part",
    "recip_gap",
    "float_pow",
    "ceil_power",
    "lq_norm",
    "mixed_norm",
    "block_norm_vector",
    "d0_mixed",
    "normalized",
    "sample_ball",
    "extreme_points_inf1",
]


@dataclass(frozen=True)
class Exponent:
    """A norm exponent p in [1, inf], stored as the exact reciprocal 1/p.

    recip = 0 encodes p = inf and recip = 1 encodes p = 1.  Instances
    compare by the value of p, so inf is the largest exponent.
    """

    recip: Fraction

    def __post_init__(self):
        if not isinstance(self.recip, Fraction):
            object.__setattr__(self, "recip", Fraction(self.recip))
        if not (0 <= self.recip <= 1):
            raise ValueError(f"reciprocal exponent {self.recip} outside [0, 1]")

    @classmethod
    def of(cls, value) -> "Exponent":
        """Build from p itself: int, Fraction, float('inf'), or a string
        such as "2", "3/2", "inf"."""
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinity", "oo"):
                return cls(Fraction(0))
            try:
                value = Fraction(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"cannot parse exponent {text!r}") from exc
        if isinstance(value, float):
            if math.isinf(value):
                return cls(Fraction(0))
            value = Fraction(value)
        value = Fraction(value)
        if value < 1:
            raise ValueError(f"exponent {value} must be >= 1")
        return cls(1 / value)

    @property
    def is_inf(self) -> bool:
        return self.recip == 0

    @property
    def value(self):
        """The exponent p as a Fraction, or math.inf."""
        return math.inf if self.is_inf else 1 / self.recip

    def __str__(self) -> str:
        return "inf" if self.is_inf else str(self.value)

    # ordering is by the exponent value, i.e. the reverse of the reciprocal
    def __lt__(self, other: "Exponent") -> bool:
        return self.recip > other.recip

    def __le__(self, other: "Exponent") -> bool:
        return self.recip >= other.recip

    def __gt__(self, other: "Exponent") -> bool:
        return self.recip < other.recip

    def __ge__(self, other: "Exponent") -> bool:
        return self.recip <= other.recip


Exponent.ONE = Exponent(Fraction(1))
Exponent.TWO = Exponent(Fraction(1, 2))
Exponent.INF = Exponent(Fraction(0))


def pos_part(x: Fraction) -> Fraction:
    return x if x > 0 else Fraction(0)


def recip_gap(q: Exponent, p: Exponent) -> Fraction:
    """(1/q - 1/p)_+ as an exact rational."""
    return pos_part(q.recip - p.recip)


def float_pow(base, exponent: Fraction) -> float:
    """base**exponent with the conventions 0**0 = 1 and 0**positive = 0."""
    if exponent == 0:
        return 1.0
    base = float(base)
    if base == 0.0:
        return 0.0
    return base ** float(exponent)


def ceil_power(n: int, exponent: Fraction) -> int:
    """Least integer k with k >= n**exponent, decided in integer arithmetic.

    Plain float powers round values like 256**(1/8) to just above 2.0,
    which would push a ceiling to 3; here k is verified exactly via
    k**den >= n**num.
    """
    if n < 1:
        raise ValueError("base must be a positive integer")
    if exponent <= 0:
        return 1
    num, den = exponent.numerator, exponent.denominator
    target = n**num
    k = max(1, int(round(float(n) ** float(exponent))))
    while k**den < target:
        k += 1
    while k > 1 and (k - 1) ** den >= target:
        k -= 1
    return k


@dataclass(frozen=True)
class BlockShape:
    """Grid of b blocks (columns), each of size s (rows); n = s*b."""

    s: int
    b: int

    def __post_init__(self):
        if self.s < 1 or self.b < 1:
            raise ValueError(f"block shape {self.s}x{self.b} must be positive")

    @property
    def n(self) -> int:
        return self.s * self.b


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """Dense s x b matrix stored flat with each column block contiguous.

    entries[j*s + i] is coordinate i of block j, so entry (i, j) of the
    matrix view.
    """

    shape: BlockShape
    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 1 or arr.size != self.shape.n:
            raise ValueError(
                f"expected {self.shape.n} entries, got array of shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def zeros(cls, shape: BlockShape) -> "BlockMatrix":
        return cls(shape, np.zeros(shape.n))

    @classmethod
    def from_matrix(cls, arr) -> "BlockMatrix":
        """Build from an s x b array with columns as blocks."""
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        s, b = arr.shape
        return cls(BlockShape(s, b), arr.T.reshape(-1))

    @classmethod
    def one_column(cls, shape: BlockShape, j: int, values) -> "BlockMatrix":
        """Matrix supported in column j with the given block values."""
        values = np.asarray(values, dtype=float)
        if values.shape != (shape.s,):
            raise ValueError(f"column values must have length {shape.s}")
        if not 0 <= j < shape.b:
            raise ValueError(f"column {j} outside [0, {shape.b})")
        flat = np.zeros(shape.n)
        flat[j * shape.s : (j + 1) * shape.s] = values
        return cls(shape, flat)

    def block(self, j: int) -> np.ndarray:
        return self.entries[j * self.shape.s : (j + 1) * self.shape.s]

    def as_matrix(self) -> np.ndarray:
        return self.entries.reshape(self.shape.b, self.shape.s).T

    def columns_kept(self, columns) -> "BlockMatrix":
        """Copy with every column outside the given set zeroed."""
        keep = np.zeros(self.shape.b, dtype=bool)
        for j in columns:
            keep[j] = True
        mask = np.repeat(keep, self.shape.s)
        return BlockMatrix(self.shape, np.where(mask, self.entries, 0.0))

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BlockMatrix(self.shape, self.entries + other.entries)

    def __sub__(self, other: "BlockMatrix") -> "BlockMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BlockMatrix(self.shape, self.entries - other.entries)

    def __mul__(self, c: float) -> "BlockMatrix":
        return BlockMatrix(self.shape, self.entries * float(c))

    __rmul__ = __mul__

    def to_json_dict(self) -> dict:
        return {
            "s": self.shape.s,
            "b": self.shape.b,
            "entries": [float(v) for v in self.entries],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BlockMatrix":
        return cls(BlockShape(int(data["s"]), int(data["b"])), np.asarray(data["entries"], dtype=float))


@dataclass(frozen=True)
class MixedNormParams:
    """Inner exponent q1 (within blocks) and outer exponent q2 (across blocks)."""

    q1: Exponent
    q2: Exponent

    @classmethod
    def of(cls, params) -> "MixedNormParams":
        if isinstance(params, MixedNormParams):
            return params
        q1, q2 = params
        return cls(Exponent.of(q1), Exponent.of(q2))


def lq_norm(v, q: Exponent) -> float:
    """(sum |v_k|^q)^(1/q); max |v_k| for q = inf; 0 for the zero vector."""
    q = Exponent.of(q)
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector must be finite")
    a = np.abs(v).ravel()
    if a.size == 0:
        return 0.0
    m = float(a.max())
    if m == 0.0:
        return 0.0
    if q.is_inf:
        return m
    qf = float(q.value)
    if qf == 1.0:
        return float(a.sum())
    # scale by the max so large exponents cannot overflow
    return m * float(((a / m) ** qf).sum()) ** (1.0 / qf)


def block_norm_vector(x: BlockMatrix, q1: Exponent) -> np.ndarray:
    """Vector of per-block inner norms, length b."""
    q1 = Exponent.of(q1)
    a = np.abs(x.entries.reshape(x.shape.b, x.shape.s))
    if q1.is_inf:
        return a.max(axis=1)
    qf = float(q1.value)
    if qf == 1.0:
        return a.sum(axis=1)
    m = a.max(axis=1)
    out = np.zeros_like(m)
    nz = m > 0
    if nz.any():
        scaled = a[nz] / m[nz, None]
        out[nz] = m[nz] * ((scaled**qf).sum(axis=1)) ** (1.0 / qf)
    return out


def mixed_norm(x: BlockMatrix, params) -> float:
    """Outer norm of the vector of inner block norms."""
    params = MixedNormParams.of(params)
    return lq_norm(block_norm_vector(x, params.q1), params.q2)


def d0_mixed(shape: BlockShape, p1, p2, q1, q2) -> float:
    """Largest target norm over the unit ball: s^(1/q1-1/p1)_+ * b^(1/q2-1/p2)_+.

    Exponents are exact rationals; each factor is a single float power.
    """
    p1, p2, q1, q2 = (Exponent.of(e) for e in (p1, p2, q1, q2))
    return float_pow(shape.s, recip_gap(q1, p1)) * float_pow(shape.b, recip_gap(q2, p2))


def normalized(x: BlockMatrix, p1, p2) -> BlockMatrix:
    """Scale x to unit mixed norm; the zero matrix is rejected."""
    norm = mixed_norm(x, (p1, p2))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero matrix")
    return BlockMatrix(x.shape, x.entries / norm)


def _symmetric_power_sample(rng: np.random.Generator, p: Exponent, size) -> np.ndarray:
    """Draw from the symmetric density proportional to exp(-|t|^p).

    For p = inf this degenerates to the uniform distribution on [-1, 1].
    Normalizing such a vector gives a uniform point on the p-sphere.
    """
    signs = rng.integers(0, 2, size=size) * 2 - 1
    if p.is_inf:
        mag = rng.uniform(0.0, 1.0, size=size)
    else:
        pf = float(p.value)
        mag = rng.gamma(1.0 / pf, 1.0, size=size) ** (1.0 / pf)
    return signs * mag


def sample_ball(shape: BlockShape, p1, p2, seed: int, count: int) -> list[BlockMatrix]:
    """Deterministic points of the unit ball of the (p1, p2) mixed norm.

    Every second sample (even indices) sits on the unit sphere; the rest
    are scaled into the interior.  Membership, not exact uniformity, is
    the contract.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    p1, p2 = Exponent.of(p1), Exponent.of(p2)
    rng = np.random.default_rng(seed)
    out = []
    for idx in range(count):
        blocks = _symmetric_power_sample(rng, p1, (shape.b, shape.s))
        inner = np.array([lq_norm(row, p1) for row in blocks])
        if not (inner > 0).all():  # pragma: no cover - probability zero
            blocks += 1e-9
            inner = np.array([lq_norm(row, p1) for row in blocks])
        blocks = blocks / inner[:, None]
        weights = np.abs(_symmetric_power_sample(rng, p2, shape.b))
        wnorm = lq_norm(weights, p2)
        if wnorm == 0.0:  # pragma: no cover - probability zero
            weights = np.ones(shape.b)
            wnorm = lq_norm(weights, p2)
        weights = weights / wnorm
        flat = (blocks * weights[:, None]).reshape(-1)
        if idx % 2 == 1:
            flat = flat * float(rng.uniform()) ** (1.0 / shape.n)
        out.append(BlockMatrix(shape, flat))
    return out


def extreme_points_inf1(shape: BlockShape, seed: int, count: int) -> list[BlockMatrix]:
    """Extreme points of the (inf, 1) unit ball: one column of +-1 entries."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        j = int(rng.integers(0, shape.b))
        signs = rng.integers(0, 2, size=shape.s) * 2 - 1
        out.append(BlockMatrix.one_column(shape, j, signs.astype(float)))
    return out
