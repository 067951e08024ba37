"""Synthetic multifractal measures, monofractal baselines, and surrogates.

The deterministic cascade generators come with exact analytic spectra
(see :mod:`mfdma.spectrum`), which makes them the reference inputs for
validating the estimators in :mod:`mfdma.dma1d` and :mod:`mfdma.dma2d`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "Series",
    "Surface",
    "CascadeSpec1D",
    "CascadeSpec2D",
    "binomial_measure_1d",
    "cascade_measure_2d",
    "gaussian_noise",
    "shuffle_surrogate",
]

# Memory guards: 2^30 doubles is 8 GiB, 4^12 doubles is 128 MiB.
MAX_LEVELS_1D = 30
MAX_LEVELS_2D = 12


@dataclass(frozen=True)
class Series:
    """A one-dimensional real signal x(t), t = 1..N.

    Values are coerced to a float64 array and must all be finite.
    Analysis entry points additionally require N >= 4.
    """

    values: np.ndarray
    name: str | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValidationError(f"series must be one-dimensional, got shape {v.shape}")
        if v.size == 0:
            raise ValidationError("series is empty")
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise ValidationError(f"series contains a non-finite value at index {bad}")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class Surface:
    """A two-dimensional real field X(i1, i2) of shape N1 x N2.

    Analysis entry points additionally require N1, N2 >= 4.
    """

    values: np.ndarray
    name: str | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValidationError(f"surface must be two-dimensional, got shape {v.shape}")
        if v.size == 0:
            raise ValidationError("surface is empty")
        if not np.all(np.isfinite(v)):
            raise ValidationError("surface contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True)
class CascadeSpec1D:
    """Parameters of the deterministic binomial cascade.

    At every refinement step the mass of a segment is split between its
    left child (fraction ``p1``) and right child (fraction ``1 - p1``).
    After ``levels`` steps the result has 2**levels entries.
    """

    p1: float
    levels: int

    def __post_init__(self):
        if not 0.0 < self.p1 < 1.0:
            raise ValidationError(f"p1 must lie strictly inside (0, 1), got {self.p1}")
        if self.levels <= 0:
            raise ValidationError(f"levels must be a positive integer, got {self.levels}")
        if self.levels > MAX_LEVELS_1D:
            raise ValidationError(
                f"levels={self.levels} exceeds the memory guard of {MAX_LEVELS_1D}"
            )

    @property
    def p2(self) -> float:
        return 1.0 - self.p1


@dataclass(frozen=True)
class CascadeSpec2D:
    """Parameters of the deterministic four-way square cascade.

    ``weights`` are the mass fractions assigned to the four quadrants in
    row-major order (top-left, top-right, bottom-left, bottom-right) and
    must sum to one.  The output is a 2**levels square matrix.
    """

    weights: tuple[float, float, float, float]
    levels: int

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != 4:
            raise ValidationError(f"expected exactly four weights, got {len(w)}")
        if any(x < 0 for x in w):
            raise ValidationError(f"weights must be nonnegative, got {w}")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValidationError(f"weights must sum to 1 within 1e-12, got sum {sum(w)!r}")
        if self.levels <= 0:
            raise ValidationError(f"levels must be a positive integer, got {self.levels}")
        if self.levels > MAX_LEVELS_2D:
            raise ValidationError(
                f"levels={self.levels} exceeds the memory guard of {MAX_LEVELS_2D}"
            )
        object.__setattr__(self, "weights", w)


def binomial_measure_1d(spec: CascadeSpec1D) -> Series:
    """Generate the deterministic binomial measure of length 2**levels.

    Starting from total mass 1, each segment repeatedly hands fraction
    ``p1`` to its left half and ``1 - p1`` to its right half.  The
    construction is deterministic, so repeated calls are bitwise equal.
    """
    split = np.array([spec.p1, spec.p2])
    measure = np.array([1.0])
    for _ in range(spec.levels):
        measure = np.kron(measure, split)
    return Series(measure, name=f"binomial(p1={spec.p1:g}, levels={spec.levels})")


def cascade_measure_2d(spec: CascadeSpec2D) -> Surface:
    """Generate the deterministic 2**levels square cascade measure.

    Each cell splits into four quadrants weighted (top-left, top-right,
    bottom-left, bottom-right) by ``spec.weights``, recursively.
    """
    split = np.array(spec.weights).reshape(2, 2)
    measure = np.array([[1.0]])
    for _ in range(spec.levels):
        measure = np.kron(measure, split)
    return Surface(measure, name=f"cascade2d(weights={spec.weights}, levels={spec.levels})")


def gaussian_noise(length: int, seed: int) -> Series:
    """Draw i.i.d. standard normal noise; the same seed gives the same draw."""
    if length < 16:
        raise ValidationError(f"noise length must be at least 16, got {length}")
    rng = np.random.default_rng(seed)
    return Series(rng.standard_normal(length), name=f"gaussian(length={length}, seed={seed})")


def shuffle_surrogate(series, seed: int):
    """Return a uniformly random permutation of the input values.

    The permutation is a seeded Fisher-Yates shuffle, so the multiset of
    values is preserved exactly and the draw is reproducible.  Accepts a
    :class:`Series` or a plain array and returns the same kind.
    """
    rng = np.random.default_rng(seed)
    if isinstance(series, Series):
        shuffled = rng.permutation(series.values)
        tag = f"{series.name} [shuffled seed={seed}]" if series.name else None
        return Series(shuffled, name=tag)
    values = np.asarray(series, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValidationError("surrogate input must be a non-empty one-dimensional array")
    return rng.permutation(values)
