"""Channels with affine-subspace outputs over F_2^m: dimension laws,
normalized capacity, noise sampling, and the erasure transfer function of the
per-symbol detector node (with a brute-force oracle)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from .gf2 import (
    ENUM_MAX_AMBIENT,
    BitVec,
    SubspaceBasis,
    enumerate_subspaces,
    gbinom,
    intersect,
    random_bits,
    rref_bits,
    sample_subspace,
    zero_coordinate_mask,
)

CHANNEL_KINDS = ("w", "cd", "bd")
_PROB_TOL = 1e-12


@dataclass(frozen=True)
class DimensionDistribution:
    """Law p_0..p_m of the noise-subspace dimension for m-bit symbols."""

    m: int
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if len(self.probs) != self.m + 1:
            raise ValueError(
                f"need {self.m + 1} probabilities, got {len(self.probs)}"
            )
        for p in self.probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
        if abs(sum(self.probs) - 1.0) > _PROB_TOL:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")

    def mean_dimension(self) -> float:
        return sum(d * p for d, p in enumerate(self.probs))


@dataclass(frozen=True)
class ChannelFamily:
    """One of the channel families "w", "cd", "bd" over m-bit symbols.

    `parameter` is the fixed noise dimension for kind "w" and the erasure-like
    parameter in [0, 1] for "cd"/"bd".
    """

    kind: str
    m: int
    parameter: float

    def __post_init__(self) -> None:
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"kind must be one of {CHANNEL_KINDS}, got {self.kind!r}")
        if not 1 <= self.m <= 64:
            raise ValueError(f"m must be in 1..64, got {self.m}")
        if self.kind == "w":
            if self.parameter != int(self.parameter) or not 0 <= self.parameter <= self.m:
                raise ValueError(
                    f"kind 'w' needs an integer dimension in 0..{self.m}, got {self.parameter}"
                )
        elif not 0.0 <= self.parameter <= 1.0:
            raise ValueError(f"parameter must be in [0, 1], got {self.parameter}")

    @classmethod
    def fixed(cls, m: int, w: int) -> "ChannelFamily":
        return cls("w", m, w)

    @classmethod
    def concentrated(cls, m: int, eps: float) -> "ChannelFamily":
        return cls("cd", m, eps)

    @classmethod
    def binomial(cls, m: int, eps: float) -> "ChannelFamily":
        return cls("bd", m, eps)


def dimension_distribution(family: ChannelFamily) -> DimensionDistribution:
    """Dimension law of the family: a point mass for "w", mass split between
    floor(eps*m) and floor(eps*m)+1 for "cd", binomial(m, eps) for "bd"."""
    m = family.m
    p = [0.0] * (m + 1)
    if family.kind == "w":
        p[int(family.parameter)] = 1.0
    elif family.kind == "cd":
        x = family.parameter * m
        d0 = int(math.floor(x))
        if d0 >= m:
            p[m] = 1.0
        else:
            frac = x - d0
            p[d0] = 1.0 - frac
            p[d0 + 1] = frac
    else:
        eps = family.parameter
        for d in range(m + 1):
            p[d] = math.comb(m, d) * eps**d * (1.0 - eps) ** (m - d)
    return DimensionDistribution(m, tuple(p))


def capacity(dist: DimensionDistribution) -> float:
    """Normalized capacity per input bit: 1 - E[dim(V)]/m."""
    return 1.0 - dist.mean_dimension() / dist.m


def sample_noise(dist: DimensionDistribution, rng) -> tuple[SubspaceBasis, BitVec]:
    """Draw one channel noise realization: d ~ probs, V uniform among
    d-dimensional subspaces, z uniform over the elements of V."""
    d = int(rng.choice(dist.m + 1, p=dist.probs))
    v = sample_subspace(dist.m, d, rng)
    z = 0
    if d:
        combo = random_bits(rng, d)
        for i, b in enumerate(v.row_bits()):
            if (combo >> i) & 1:
                z ^= b
    return v, BitVec(dist.m, z)


@lru_cache(maxsize=None)
def _erasure_kernel(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """c[i][j]: probability the outgoing message is erased given the unknown
    support has dimension i and the noise subspace dimension j.

    Averages the subspace-intersection law over the dimension k of the
    intersection; the k-th term carries the exact count of k-subspaces whose
    first coordinate is not identically zero. All arithmetic is exact.
    """
    c = [[Fraction(0)] * (m + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(m + 1):
            tot = 0
            for k in range(max(0, i + j - m), min(i, j) + 1):
                tot += (
                    2 ** ((i - k) * (j - k))
                    * (gbinom(i, k) - gbinom(i - 1, k))
                    * gbinom(m - i, j - k)
                )
            c[i][j] = Fraction(tot, gbinom(m, j))
    return tuple(tuple(row) for row in c)


@lru_cache(maxsize=None)
def _mixture_poly_matrix(m: int) -> np.ndarray:
    """K[j, r]: coefficient of z^r in the transfer function for unit mass at
    noise dimension j; exact rationals converted to float once."""
    c = _erasure_kernel(m)
    n = m - 1
    K = [[Fraction(0)] * m for _ in range(m + 1)]
    for j in range(m + 1):
        for t in range(m):  # t erased companions -> unknown support dim t+1
            w = math.comb(n, t)
            for u in range(n - t + 1):
                K[j][t + u] += w * math.comb(n - t, u) * (-1) ** u * c[t + 1][j]
    return np.array([[float(x) for x in row] for row in K])


def transfer_poly(dist: DimensionDistribution) -> np.ndarray:
    """Ascending z-polynomial coefficients of the transfer function."""
    return np.asarray(dist.probs) @ _mixture_poly_matrix(dist.m)


def transfer_f(dist: DimensionDistribution, z: float) -> float:
    """Erasure probability of the detector-to-bit message when each of the
    m-1 companion bits is independently erased with probability z."""
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z must be in [0, 1], got {z}")
    val = float(npoly.polyval(z, transfer_poly(dist)))
    return min(max(val, 0.0), 1.0)


def transfer_f_oracle(dist: DimensionDistribution, z: float) -> float:
    """Exhaustive-expectation evaluation of the transfer function.

    Sums over every noise subspace of every dimension and every erasure
    pattern of the m-1 companion positions; the first position is erased iff
    the intersection of the noise subspace with the span of the unknown unit
    vectors touches coordinate 0. Uses only enumeration and intersection
    primitives, never the kernel composition behind transfer_f. m <= 4.
    """
    m = dist.m
    if m > ENUM_MAX_AMBIENT:
        raise ValueError(f"oracle capped at m <= {ENUM_MAX_AMBIENT}, got {m}")
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z must be in [0, 1], got {z}")
    total = 0.0
    for d, pd in enumerate(dist.probs):
        if pd == 0.0:
            continue
        subs = enumerate_subspaces(m, d)
        w_sub = pd / len(subs)
        for v in subs:
            for pattern in range(1 << (m - 1)):
                n_er = pattern.bit_count()
                w_pat = z**n_er * (1.0 - z) ** (m - 1 - n_er)
                if w_pat == 0.0:
                    continue
                ex_rows = [1] + [
                    1 << t for t in range(1, m) if (pattern >> (t - 1)) & 1
                ]
                va = intersect(rref_bits(ex_rows, m), v)
                if zero_coordinate_mask(va).bit(0) == 0:
                    total += w_sub * w_pat
    return total
