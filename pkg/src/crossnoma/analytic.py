"""Closed-form outage side: SIR thresholds, success kernels, outage formulas.

The per-hop success probability is an expectation of the gamma-fading CCDF
over the aggregate interference, which expands into Laplace-transform
derivatives. Two kernel variants are shipped:

* ``kernel_factorized`` keeps the per-class factorization of that
  expectation (a product over LOS/NLOS interferer classes). The
  factorization is exact only for unit Nakagami shape.
* ``kernel_exact`` expands the derivative of the full four-component
  transform product with no cross-class factorization and is the default
  everywhere a number is trusted.

Both evaluate the transforms of the gain-free interference at the argument
m * psi * r**alpha / mu: the link-budget constant scales signal and
interference alike, so it cancels from every SIR and from the final
probabilities (the tests pin this down against the simulator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

from .channel import los_probability, upsilon
from .geometry import ROAD_X, ROAD_Y, NodePolar, to_polar
from .laplace import laplace_taylor
from .taylor import TaylorScalar

if TYPE_CHECKING:  # pragma: no cover
    from .config import ScenarioConfig

SCHEME_NOMA = "noma"
SCHEME_OMA = "oma"


@dataclass(frozen=True, slots=True)
class NomaParams:
    """Power allocation coefficients and target rates of the two flows."""

    a1: float
    a2: float
    rate1: float
    rate2: float

    def __post_init__(self) -> None:
        if abs(self.a1 + self.a2 - 1.0) > 1e-12:
            raise ValueError("a1 + a2 must equal 1")
        if not (self.a1 >= self.a2 > 0.0):
            raise ValueError("require a1 >= a2 > 0")
        if not (self.rate1 > 0.0 and self.rate2 > 0.0):
            raise ValueError("target rates must be positive")


@dataclass(frozen=True, slots=True)
class SirThresholds:
    """Decoding thresholds and the derived fading-CCDF arguments.

    When theta1 reaches a1/a2 the strong-flow SIR can never clear its
    threshold regardless of fading, so psi1/psi_max carry no number and
    `degenerate` marks the regime (outage is identically one).
    """

    theta1: float
    theta2: float
    psi1: float | None
    psi2: float
    psi_max: float | None
    degenerate: bool


def threshold(rate: float, scheme: str = SCHEME_NOMA) -> float:
    """Decoding SIR threshold for a target rate.

    The cooperative scheme spends two slots per delivery; orthogonal access
    spends four, which squares the rate penalty in the exponent.
    """
    if rate <= 0.0:
        raise ValueError("rate must be positive")
    if scheme == SCHEME_NOMA:
        return 2.0 ** (2.0 * rate) - 1.0
    if scheme == SCHEME_OMA:
        return 2.0 ** (4.0 * rate) - 1.0
    raise ValueError(f"unknown scheme {scheme!r}")


def psi_values(n: NomaParams) -> SirThresholds:
    """Thresholds and CCDF arguments for a NOMA parameter set."""
    theta1 = threshold(n.rate1)
    theta2 = threshold(n.rate2)
    psi2 = theta2 / n.a2
    if theta1 >= n.a1 / n.a2:
        return SirThresholds(theta1, theta2, None, psi2, None, True)
    psi1 = theta1 / (n.a1 - theta1 * n.a2)
    return SirThresholds(theta1, theta2, psi1, psi2, max(psi1, psi2), False)


@dataclass(frozen=True, slots=True)
class InterferenceEnv:
    """What a receiver sees: its polar position plus the four processes."""

    receiver: NodePolar
    p: float
    lambda_x_los: float
    lambda_x_nlos: float
    lambda_y_los: float
    lambda_y_nlos: float
    alpha_los: float
    alpha_nlos: float

    def component(self, road: str, los: bool) -> tuple[float, float]:
        """(intensity, exponent) of one (road, class) process."""
        alpha = self.alpha_los if los else self.alpha_nlos
        if road == ROAD_X:
            lam = self.lambda_x_los if los else self.lambda_x_nlos
        else:
            lam = self.lambda_y_los if los else self.lambda_y_nlos
        return lam, alpha


def interference_env(cfg: "ScenarioConfig", receiver: NodePolar) -> InterferenceEnv:
    from .config import effective_ppp  # local import avoids a cycle

    ppp = effective_ppp(cfg)
    return InterferenceEnv(
        receiver=receiver,
        p=ppp.p,
        lambda_x_los=ppp.lambda_x_los,
        lambda_x_nlos=ppp.lambda_x_nlos,
        lambda_y_los=ppp.lambda_y_los,
        lambda_y_nlos=ppp.lambda_y_nlos,
        alpha_los=cfg.path.alpha_los,
        alpha_nlos=cfg.path.alpha_nlos,
    )


def _eval_argument(m_z: int, psi: float, mu: float, r_link: float, alpha_z: float, ups: float) -> float:
    """Laplace evaluation point for one link.

    The model-facing argument is m*psi / (mu * r**-alpha * ups); the
    transforms are of gain-free interference, so the gain constant cancels
    and the effective point is m * psi * r**alpha / mu.
    """
    omega = m_z * psi / (mu * r_link ** (-alpha_z) * ups)
    return omega * ups


def _component_taylor(env: InterferenceEnv, order: int, s: float, road: str, los: bool) -> TaylorScalar:
    lam, alpha = env.component(road, los)
    return laplace_taylor(order, s, env.p, lam, alpha, env.receiver, road)


def kernel_exact(
    m_z: int,
    psi: float,
    mu: float,
    r_link: float,
    alpha_z: float,
    ups: float,
    env: InterferenceEnv,
) -> float:
    """Per-link success probability against the full interference sum.

    success = sum_{k<m} (-s)^k * c_k where c_k are the Taylor coefficients
    of the product of all four component transforms at s.
    """
    s = _eval_argument(m_z, psi, mu, r_link, alpha_z, ups)
    order = m_z - 1
    prod = TaylorScalar.constant(1.0, order)
    for road in (ROAD_X, ROAD_Y):
        for los in (True, False):
            prod = prod * _component_taylor(env, order, s, road, los)
    acc = 0.0
    power = 1.0
    for k in range(m_z):
        acc += power * prod.coeffs[k]
        power *= -s
    return min(max(acc, 0.0), 1.0)


def kernel_factorized(
    m_z: int,
    psi: float,
    mu: float,
    r_link: float,
    alpha_z: float,
    ups: float,
    env: InterferenceEnv,
) -> float:
    """Per-link success kernel with the per-class product factorization.

    Within one class the two roads combine exactly through the binomial sum
    of cross derivatives; across classes the CCDF polynomial is factorized,
    which is an approximation for m >= 2 (exact at m = 1).
    """
    s = _eval_argument(m_z, psi, mu, r_link, alpha_z, ups)
    order = m_z - 1
    result = 1.0
    for los in (True, False):
        dx = [_component_taylor(env, order, s, ROAD_X, los).derivative(j) for j in range(m_z)]
        dy = [_component_taylor(env, order, s, ROAD_Y, los).derivative(j) for j in range(m_z)]
        class_sum = 0.0
        for k in range(m_z):
            inner = 0.0
            for n in range(k + 1):
                inner += math.comb(k, n) * dx[k - n] * dy[n]
            class_sum += (-s) ** k / math.factorial(k) * inner
        result *= min(max(class_sum, 0.0), 1.0)
    return result


KERNELS: dict[str, Callable[..., float]] = {
    "paper": kernel_factorized,
    "exact": kernel_exact,
}


def _resolve_kernel(kernel) -> Callable[..., float]:
    if callable(kernel):
        return kernel
    try:
        return KERNELS[kernel]
    except KeyError:
        raise ValueError(f"unknown kernel {kernel!r}, expected 'paper' or 'exact'") from None


def hop_success(
    cfg: "ScenarioConfig",
    r_link: float,
    receiver: NodePolar,
    psi: float,
    kernel="exact",
) -> float:
    """Blockage-mixed success probability of one decode-and-forward hop."""
    from .config import link_weights

    kern = _resolve_kernel(kernel)
    w_los, w_nlos = link_weights(cfg, r_link)
    env = interference_env(cfg, receiver)
    ups = upsilon(cfg.beam)
    total = 0.0
    for los, weight in ((True, w_los), (False, w_nlos)):
        if weight == 0.0:
            continue
        m_z = cfg.fading.m_for(los)
        alpha_z = cfg.path.alpha_for(los)
        total += weight * kern(m_z, psi, cfg.fading.mu, r_link, alpha_z, ups, env)
    return total


def outage_o1(cfg: "ScenarioConfig", kernel="exact") -> float:
    """Outage probability of the strong flow (source, relay, first user)."""
    th = psi_values(cfg.noma)
    if th.degenerate:
        return 1.0
    first = hop_success(cfg, cfg.r_sr, to_polar(cfg.r), th.psi1, kernel)
    second = hop_success(cfg, cfg.r_rd1, to_polar(cfg.d1), th.psi1, kernel)
    return 1.0 - first * second


def outage_o2(cfg: "ScenarioConfig", kernel="exact") -> float:
    """Outage probability of the weak flow (needs both messages decoded)."""
    th = psi_values(cfg.noma)
    if th.degenerate:
        return 1.0
    first = hop_success(cfg, cfg.r_sr, to_polar(cfg.r), th.psi_max, kernel)
    second = hop_success(cfg, cfg.r_rd2, to_polar(cfg.d2), th.psi_max, kernel)
    return 1.0 - first * second


def outage_oma(cfg: "ScenarioConfig", destination: str, kernel="exact") -> float:
    """Orthogonal baseline: dedicated slots, full power, squared rate cost."""
    if destination == "D1":
        rate, pos, r_link = cfg.noma.rate1, cfg.d1, cfg.r_rd1
    elif destination == "D2":
        rate, pos, r_link = cfg.noma.rate2, cfg.d2, cfg.r_rd2
    else:
        raise ValueError(f"unknown destination {destination!r}, expected 'D1' or 'D2'")
    theta = threshold(rate, SCHEME_OMA)
    first = hop_success(cfg, cfg.r_sr, to_polar(cfg.r), theta, kernel)
    second = hop_success(cfg, r_link, to_polar(pos), theta, kernel)
    return 1.0 - first * second
