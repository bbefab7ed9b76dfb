"""Region-quality metrics, framed as costs to minimize.

Two families: the conventional volume/fraction metric (squared
residuals against a target volume and target tumor fraction, with a
Gaussian score form kept for the argmax/argmin equivalence), and the
leaky metric, which rewards tumor fractions above the target at a
reduced slope and penalizes per-axis deviation from the target size so
cubes beat oblongs of equal volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _check_target(target_mm):
    if len(target_mm) != 3 or any(t <= 0 for t in target_mm):
        raise ValueError(f"target size must be three positive mm values, got {target_mm}")


@dataclass(frozen=True)
class ConventionalParams:
    """Parameters of the conventional metric.

    sigma_r and sigma_f only enter the Gaussian score form; the cost
    form uses lambda1 as an independent weight.
    """

    target_mm: tuple[float, float, float] = (20.0, 20.0, 20.0)
    f_target: float = 0.9
    lambda1: float = 1e-6
    sigma_r: float = 1000.0
    sigma_f: float = 1.0

    def __post_init__(self):
        _check_target(self.target_mm)
        if not 0.0 <= self.f_target <= 1.0:
            raise ValueError(f"f_target must be in [0, 1], got {self.f_target}")
        if self.lambda1 < 0:
            raise ValueError(f"lambda1 must be non-negative, got {self.lambda1}")
        if self.sigma_r <= 0 or self.sigma_f <= 0:
            raise ValueError("sigma_r and sigma_f must be positive")


@dataclass(frozen=True)
class ProposedParams:
    """Parameters of the leaky per-axis metric."""

    target_mm: tuple[float, float, float] = (20.0, 20.0, 20.0)
    f_target: float = 0.9
    lambda2: float = 0.01
    beta: float = 0.1

    def __post_init__(self):
        _check_target(self.target_mm)
        if not 0.0 <= self.f_target <= 1.0:
            raise ValueError(f"f_target must be in [0, 1], got {self.f_target}")
        if self.lambda2 < 0:
            raise ValueError(f"lambda2 must be non-negative, got {self.lambda2}")
        if self.beta <= 0:
            raise ValueError(f"leaky factor beta must be positive, got {self.beta}")


MetricParams = ConventionalParams | ProposedParams


@dataclass(frozen=True)
class RegionEval:
    tumor_sum: int
    volume_mm3: float
    fraction: float
    cost: float


def leaky(s: float, beta: float) -> float:
    """Identity for s >= 0, slope beta for s < 0."""
    return s if s >= 0 else beta * s


def _fraction(tumor_sum, size_mm, voxel_volume_mm3):
    volume = size_mm[0] * size_mm[1] * size_mm[2]
    return tumor_sum * voxel_volume_mm3 / volume


def conventional_cost(tumor_sum, size_mm, p: ConventionalParams, voxel_volume_mm3=1.0) -> float:
    """Squared fraction residual plus weighted squared volume residual. Lower is better."""
    frac = _fraction(tumor_sum, size_mm, voxel_volume_mm3)
    lx, ly, lz = p.target_mm
    dv = size_mm[0] * size_mm[1] * size_mm[2] - lx * ly * lz
    df = frac - p.f_target
    # explicit products, not **2: keeps scalar and array paths bit-equal
    return df * df + p.lambda1 * (dv * dv)


def conventional_score(tumor_sum, size_mm, p: ConventionalParams, voxel_volume_mm3=1.0) -> float:
    """Product of the two Gaussian factors. Higher is better; always in (0, 1].

    Maximizing this is equivalent to minimizing conventional_cost when
    lambda1 = sigma_f^2 / sigma_r^2.
    """
    frac = _fraction(tumor_sum, size_mm, voxel_volume_mm3)
    lx, ly, lz = p.target_mm
    dv = size_mm[0] * size_mm[1] * size_mm[2] - lx * ly * lz
    return math.exp(-0.5 * (dv / p.sigma_r) ** 2) * math.exp(-0.5 * ((frac - p.f_target) / p.sigma_f) ** 2)


def proposed_cost(tumor_sum, size_mm, p: ProposedParams, voxel_volume_mm3=1.0) -> float:
    """Leaky fraction shortfall plus per-axis size deviation. Lower is better.

    Fractions above f_target make the first term negative (rewarded at
    slope beta), so more tumor never hurts at a fixed size.
    """
    frac = _fraction(tumor_sum, size_mm, voxel_volume_mm3)
    lx, ly, lz = p.target_mm
    shape = abs(size_mm[0] - lx) + abs(size_mm[1] - ly) + abs(size_mm[2] - lz)
    return leaky(p.f_target - frac, p.beta) + p.lambda2 * shape


def region_cost(tumor_sum, size_mm, params: MetricParams, voxel_volume_mm3=1.0) -> float:
    if isinstance(params, ConventionalParams):
        return conventional_cost(tumor_sum, size_mm, params, voxel_volume_mm3)
    if isinstance(params, ProposedParams):
        return proposed_cost(tumor_sum, size_mm, params, voxel_volume_mm3)
    raise TypeError(f"unsupported metric params: {type(params).__name__}")


def region_costs_array(sums: np.ndarray, size_mm, params: MetricParams, voxel_volume_mm3=1.0) -> np.ndarray:
    """Vectorized region_cost over an array of tumor sums.

    Kept term-for-term identical to the scalar forms so both produce
    bit-equal float64 results for the same inputs.
    """
    volume = size_mm[0] * size_mm[1] * size_mm[2]
    frac = sums.astype(np.float64) * voxel_volume_mm3 / volume
    if isinstance(params, ConventionalParams):
        lx, ly, lz = params.target_mm
        dv = volume - lx * ly * lz
        df = frac - params.f_target
        return df * df + params.lambda1 * (dv * dv)
    if isinstance(params, ProposedParams):
        lx, ly, lz = params.target_mm
        shape = abs(size_mm[0] - lx) + abs(size_mm[1] - ly) + abs(size_mm[2] - lz)
        s = params.f_target - frac
        return np.where(s >= 0, s, params.beta * s) + params.lambda2 * shape
    raise TypeError(f"unsupported metric params: {type(params).__name__}")


def evaluate_region(tumor_sum, size_mm, params: MetricParams, voxel_volume_mm3=1.0) -> RegionEval:
    volume = size_mm[0] * size_mm[1] * size_mm[2]
    return RegionEval(
        tumor_sum=int(tumor_sum),
        volume_mm3=volume,
        fraction=_fraction(tumor_sum, size_mm, voxel_volume_mm3),
        cost=region_cost(tumor_sum, size_mm, params, voxel_volume_mm3),
    )
