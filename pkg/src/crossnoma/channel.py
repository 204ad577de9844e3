"""Blockage, beamforming, path loss and fading models for one link."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True, slots=True)
class BlockageParams:
    """Exponential blockage model: P(LOS at range r) = exp(-beta * r)."""

    beta: float  # 1/m

    def __post_init__(self) -> None:
        if not (self.beta >= 0.0):
            raise ValueError("beta must be >= 0")


@dataclass(frozen=True, slots=True)
class BeamParams:
    """Two-level sector beam pattern plus the carrier used for the
    one-meter reference path loss."""

    g_max: float  # linear gain inside the half-power beamwidth
    g_min: float  # linear gain elsewhere
    phi: float  # half-power beamwidth, radians
    carrier_freq: float  # Hz

    def __post_init__(self) -> None:
        if not (self.g_min > 0.0 and self.g_max >= self.g_min):
            raise ValueError("require g_max >= g_min > 0")
        if not (0.0 < self.phi < 2.0 * math.pi):
            raise ValueError("phi must lie in (0, 2*pi)")
        if not (self.carrier_freq > 0.0):
            raise ValueError("carrier_freq must be positive")


@dataclass(frozen=True, slots=True)
class FadingParams:
    """Nakagami-m link fading (power gain is gamma distributed).

    The shape parameters are restricted to integers: the closed-form outage
    expressions rely on the finite exponential-sum form of the gamma CCDF,
    which only exists for integer m.
    """

    m_los: int
    m_nlos: int
    mu: float  # average received power, linear

    def __post_init__(self) -> None:
        if not (isinstance(self.m_los, int) and isinstance(self.m_nlos, int)):
            raise ValueError("integer Nakagami parameter required")
        if self.m_los < 1 or self.m_nlos < 1:
            raise ValueError("Nakagami m must be >= 1")
        if not (self.mu > 0.0):
            raise ValueError("mu must be positive")

    def m_for(self, los: bool) -> int:
        return self.m_los if los else self.m_nlos


@dataclass(frozen=True, slots=True)
class PathLossParams:
    """Power-law path loss exponents per link class.

    Exponents must exceed 1 or the vertical-road interference integral
    diverges.
    """

    alpha_los: float
    alpha_nlos: float

    def __post_init__(self) -> None:
        if not (self.alpha_los > 1.0):
            raise ValueError("alpha_los must exceed 1 (interference integral diverges)")
        if not (self.alpha_nlos >= self.alpha_los):
            raise ValueError("alpha_nlos must be >= alpha_los")

    def alpha_for(self, los: bool) -> float:
        return self.alpha_los if los else self.alpha_nlos


def los_probability(r: float, b: BlockageParams) -> float:
    """Probability that a link of length r is line of sight."""
    if r < 0.0:
        raise ValueError("distance must be >= 0")
    return math.exp(-b.beta * r)


def directional_gain(omega: float, b: BeamParams) -> float:
    """Sector antenna gain at offset omega from boresight.

    The boundary |omega| = phi/2 is inside the main lobe.
    """
    wrapped = math.remainder(omega, 2.0 * math.pi)
    return b.g_max if abs(wrapped) <= 0.5 * b.phi else b.g_min


def upsilon(b: BeamParams) -> float:
    """Link-budget constant: aligned beam gain times one-meter path loss.

    Both ends point at each other, so the equivalent gain is g_max squared.
    """
    wavelength = SPEED_OF_LIGHT / b.carrier_freq
    return b.g_max**2 * wavelength**2 / (4.0 * math.pi) ** 2


def path_loss(r: float, alpha: float) -> float:
    """Power attenuation r**(-alpha). Zero distance is a hard error."""
    if r <= 0.0:
        raise ValueError("path loss undefined at r <= 0")
    return r ** (-alpha)


def sample_link_power_fading(m: int, mu: float, rng: np.random.Generator) -> float:
    """One draw of the link power gain: Gamma(shape=m, scale=mu/m)."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError("integer Nakagami parameter required")
    if not (mu > 0.0):
        raise ValueError("mu must be positive")
    return float(rng.gamma(shape=float(m), scale=mu / m))


def sample_interferer_power_fading(rng: np.random.Generator, size=None):
    """Interferer power gain: unit-mean exponential (Rayleigh amplitude)."""
    return rng.exponential(1.0, size=size)


def gamma_ccdf(m: int, mu: float, x: float) -> float:
    """Upper tail of the Gamma(m, mu/m) power-fading distribution.

    Uses the finite sum exp(-m*x/mu) * sum_{k<m} (m*x/mu)^k / k!, valid for
    integer m only.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError("integer Nakagami parameter required")
    if x < 0.0:
        raise ValueError("x must be >= 0")
    if not (mu > 0.0):
        raise ValueError("mu must be positive")
    z = m * x / mu
    total = 1.0
    term = 1.0
    for k in range(1, m):
        term *= z / k
        total += term
    return math.exp(-z) * total
