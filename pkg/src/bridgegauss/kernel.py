"""Gauss-Weierstrass kernel, bridge densities and their Gaussian moments.

All kernels are evaluated in log-space and exponentiated at the end, since
ratios of tiny Gaussians occur everywhere downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array, optionally checking its length."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise DomainError(f"a point must be a 1-D vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DomainError(f"expected a point in R^{dim}, got length {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("point coordinates must be finite")
    return arr


@dataclass(frozen=True)
class BridgeSpec:
    """Time horizon ``t`` with start ``x`` and end ``y`` of a bridge."""

    t: float
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.t) and self.t > 0):
            raise DomainError(f"bridge horizon must be positive, got t={self.t}")
        x = as_point(self.x)
        y = as_point(self.y, x.shape[0])
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def reversed(self) -> "BridgeSpec":
        return BridgeSpec(self.t, self.y, self.x)


@dataclass(frozen=True)
class BlockSplit:
    d1: int
    d2: int

    def __post_init__(self):
        if self.d1 < 1 or self.d2 < 1:
            raise DomainError("block dimensions must be positive")

    @property
    def dim(self) -> int:
        return self.d1 + self.d2

    def split(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.dim:
            raise DomainError(f"split {self.d1}+{self.d2} does not match dimension {z.shape[-1]}")
        return z[..., : self.d1], z[..., self.d1 :]


def log_heat_kernel(t, x, y) -> float:
    t = float(t)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    x = as_point(x)
    y = as_point(y, x.shape[0])
    d = x.shape[0]
    r2 = float(np.sum((y - x) ** 2))
    return -0.5 * d * np.log(4.0 * np.pi * t) - r2 / (4.0 * t)


def heat_kernel(t, x, y) -> float:
    """g(t, x, y) = (4 pi t)^(-d/2) exp(-|y - x|^2 / (4t))."""
    return float(np.exp(log_heat_kernel(t, x, y)))


def _check_s(s, t):
    if not (0.0 < s < t):
        raise DomainError(f"bridge time s must lie in (0, t) = (0, {t}), got {s}")


def log_bridge_density(s: float, spec: BridgeSpec, z) -> float:
    _check_s(s, spec.t)
    z = as_point(z, spec.dim)
    return (
        log_heat_kernel(s, spec.x, z)
        + log_heat_kernel(spec.t - s, z, spec.y)
        - log_heat_kernel(spec.t, spec.x, spec.y)
    )


def bridge_density(s: float, spec: BridgeSpec, z) -> float:
    """Normalised density g(s,x,z) g(t-s,z,y) / g(t,x,y) of the bridge at time s.

    Evaluated in the equivalent Gaussian form ceiling * exp(-q) with q >= 0, so
    the pointwise ceiling holds exactly in floating point.
    """
    z = as_point(z, spec.dim)
    mean, var = bridge_moments(s, spec)
    q = float(np.sum((z - mean) ** 2)) / (2.0 * var)
    return bridge_density_bound(s, spec.t, spec.dim) * math.exp(-q)


def bridge_density_bound(s: float, t: float, d: int) -> float:
    """Pointwise ceiling (4 pi)^(-d/2) [(t-s)s/t]^(-d/2) of the bridge density."""
    _check_s(s, t)
    return float((4.0 * np.pi * (t - s) * s / t) ** (-0.5 * d))


def bridge_moments(s: float, spec: BridgeSpec) -> tuple[np.ndarray, float]:
    """Mean ((t-s)x + s y)/t and per-coordinate variance 2 s (t-s)/t."""
    _check_s(s, spec.t)
    t = spec.t
    mean = ((t - s) * spec.x + s * spec.y) / t
    return mean, 2.0 * s * (t - s) / t


def factorized_bridge_density(s: float, spec: BridgeSpec, split: BlockSplit, z) -> float:
    """Bridge density as the product of the two block bridge densities."""
    if split.dim != spec.dim:
        raise DomainError(f"split {split.d1}+{split.d2} inconsistent with d={spec.dim}")
    z = as_point(z, spec.dim)
    (x1, x2), (y1, y2), (z1, z2) = split.split(spec.x), split.split(spec.y), split.split(z)
    first = log_bridge_density(s, BridgeSpec(spec.t, x1, y1), z1)
    second = log_bridge_density(s, BridgeSpec(spec.t, x2, y2), z2)
    return float(np.exp(first + second))
