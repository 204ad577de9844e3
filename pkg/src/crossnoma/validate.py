"""Fast self-checks of the numeric core, runnable from the CLI."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy.integrate import quad

from .analytic import kernel_exact, kernel_factorized, outage_o1, outage_o2, psi_values
from .channel import BlockageParams, gamma_ccdf, los_probability
from .config import ScenarioConfig, build_config
from .geometry import NodePolar, Position, distance, from_polar, to_polar
from .laplace import (
    laplace_closed,
    laplace_derivative_bracket_power,
    laplace_quadrature,
    laplace_taylor,
)


def _check_polar_roundtrip() -> tuple[bool, str]:
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(500):
        p = Position(*rng.uniform(-1e4, 1e4, size=2))
        q = from_polar(to_polar(p))
        worst = max(worst, distance(p, q))
    return worst < 1e-9, f"worst round-trip error {worst:.2e} m"


def _check_blockage_closure() -> tuple[bool, str]:
    b = BlockageParams(9.5e-3)
    worst = 0.0
    for r in np.linspace(0.0, 500.0, 51):
        total = los_probability(r, b) + (1.0 - los_probability(r, b))
        worst = max(worst, abs(total - 1.0))
    return worst == 0.0, f"worst closure error {worst:.1e}"


def _check_gamma_ccdf_identity() -> tuple[bool, str]:
    rng = np.random.default_rng(2)
    worst = 0.0
    for m in (1, 2, 3, 4):
        for x in rng.uniform(0.01, 5.0, size=20):
            direct = gamma_ccdf(m, 1.0, float(x))
            tail, _ = quad(
                lambda t: t ** (m - 1) * math.exp(-t),
                m * x,
                math.inf,
                epsabs=1e-14,
                epsrel=1e-13,
            )
            oracle = tail / math.gamma(m)
            worst = max(worst, abs(direct - oracle) / oracle)
    return worst <= 1e-10, f"worst relative error {worst:.1e}"


def _check_closed_vs_quadrature() -> tuple[bool, str]:
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(12):
        s = float(rng.uniform(0.5, 5e4))
        node = NodePolar(float(rng.uniform(0.0, 200.0)), float(rng.uniform(0.0, 2 * math.pi)))
        for road in ("X", "Y"):
            a = laplace_closed(s, 1.0, 1e-3, node, road)
            b = laplace_quadrature(s, 1.0, 1e-3, 2.0, node, road)
            worst = max(worst, abs(a - b) / a)
    return worst <= 1e-6, f"worst relative error {worst:.1e}"


def _check_quartic_exponent_oracle() -> tuple[bool, str]:
    # At unit argument and an on-road receiver the exponent integral is the
    # classic quartic integral pi*sqrt(2)/2.
    value = laplace_quadrature(1.0, 1.0, 0.01, 4.0, NodePolar(0.0, 0.0), "X")
    oracle = math.exp(-0.01 * math.pi * math.sqrt(2.0) / 2.0)
    err = abs(value - oracle) / oracle
    return err <= 1e-8, f"relative error {err:.1e}"


def random_responsive_transform(rng: np.random.Generator) -> tuple:
    """A random transform configuration where finite differences resolve.

    The perpendicular offset is kept below s**(1/alpha): past that the
    transform is flat to machine precision and a difference quotient
    measures only quadrature noise, not the derivative.
    """
    s = float(rng.uniform(2e3, 3e4))
    lam = float(rng.uniform(5e-3, 5e-2))
    alpha = float(rng.choice([2.0, 4.0]))
    offset = float(rng.uniform(0.0, s ** (1.0 / alpha)))
    road = "X" if rng.random() < 0.5 else "Y"
    node = NodePolar(offset, math.pi / 2.0 if road == "X" else 0.0)
    return s, lam, alpha, node, road


def _check_taylor_vs_differences() -> tuple[bool, str]:
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(10):
        s, lam, alpha, node, road = random_responsive_transform(rng)
        tay = laplace_taylor(2, s, 1.0, lam, alpha, node, road)

        def f(x: float) -> float:
            return laplace_quadrature(x, 1.0, lam, alpha, node, road)

        # Larger step for the second difference: cancellation eats a
        # tiny-step estimate alive.
        h1 = 1e-5 * s
        h2 = 2e-3 * s
        d1 = (f(s + h1) - f(s - h1)) / (2.0 * h1)
        d2 = (f(s + h2) - 2.0 * f(s) + f(s - h2)) / h2**2
        worst = max(worst, abs(tay.derivative(1) - d1) / abs(d1))
        worst = max(worst, abs(tay.derivative(2) - d2) / abs(d2))
    return worst <= 1e-4, f"worst relative error {worst:.1e}"


def _check_first_derivative_bracket() -> tuple[bool, str]:
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(10):
        s = float(rng.uniform(100.0, 5e4))
        lam = float(rng.uniform(1e-4, 5e-3))
        node = NodePolar(float(rng.uniform(0.0, 150.0)), float(rng.uniform(0.0, 2 * math.pi)))
        road = "X" if rng.random() < 0.5 else "Y"
        tay = laplace_taylor(1, s, 1.0, lam, 2.0, node, road)
        bracket = laplace_derivative_bracket_power(1, s, 1.0, lam, node, road)
        worst = max(worst, abs(tay.derivative(1) - bracket) / abs(bracket))
    return worst <= 1e-10, f"worst relative error {worst:.1e}"


def _random_cfg(rng: np.random.Generator) -> ScenarioConfig:
    lam = {
        "lambda_x_los": float(rng.uniform(1e-4, 3e-3)),
        "lambda_x_nlos": float(rng.uniform(1e-4, 3e-3)),
        "lambda_y_los": float(rng.uniform(1e-4, 3e-3)),
        "lambda_y_nlos": float(rng.uniform(1e-4, 3e-3)),
    }
    return build_config(lam)


def _check_kernel_equivalence_m1() -> tuple[bool, str]:
    from .analytic import interference_env
    from .channel import upsilon

    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(10):
        cfg = _random_cfg(rng)
        env = interference_env(cfg, to_polar(cfg.r))
        psi = float(rng.uniform(0.5, 20.0))
        r_link = float(rng.uniform(10.0, 120.0))
        ups = upsilon(cfg.beam)
        a = kernel_factorized(1, psi, 1.0, r_link, 2.0, ups, env)
        b = kernel_exact(1, psi, 1.0, r_link, 2.0, ups, env)
        worst = max(worst, abs(a - b))
    return worst <= 1e-12, f"worst absolute gap {worst:.1e}"


def _check_laplace_bounds() -> tuple[bool, str]:
    node = NodePolar(50.0, 0.3)
    values = [laplace_closed(s, 1.0, 1e-3, node, "X") for s in np.linspace(0.0, 5e4, 40)]
    in_range = all(0.0 < v <= 1.0 for v in values)
    decreasing = all(a > b for a, b in zip(values, values[1:]))
    ok = in_range and values[0] == 1.0 and decreasing
    return ok, "0 < L <= 1, L(0) = 1, strictly decreasing in s"


def _check_degenerate_regime() -> tuple[bool, str]:
    cfg = build_config({"rate1": 1.2})  # theta1 = 4.28 > a1/a2 = 4
    ok = outage_o1(cfg) == 1.0 and outage_o2(cfg) == 1.0
    th = psi_values(cfg.noma)
    ok = ok and th.degenerate and th.psi1 is None
    zero = build_config(
        {k: 0.0 for k in ("lambda_x_los", "lambda_x_nlos", "lambda_y_los", "lambda_y_nlos")}
    )
    ok = ok and outage_o1(zero) == 0.0 and outage_o2(zero) == 0.0
    return ok, "outage exactly 1 when infeasible, exactly 0 with no interferers"


CHECKS = (
    ("polar round-trip", _check_polar_roundtrip),
    ("blockage closure", _check_blockage_closure),
    ("gamma ccdf finite sum vs quadrature", _check_gamma_ccdf_identity),
    ("closed form vs quadrature (exponent 2)", _check_closed_vs_quadrature),
    ("quartic exponent oracle", _check_quartic_exponent_oracle),
    ("taylor derivatives vs finite differences", _check_taylor_vs_differences),
    ("first derivative bracket form", _check_first_derivative_bracket),
    ("kernel equivalence at m = 1", _check_kernel_equivalence_m1),
    ("laplace bounds and monotonicity", _check_laplace_bounds),
    ("degenerate and interference-free regimes", _check_degenerate_regime),
)


def run_validation(print_fn=print) -> bool:
    """Run every self-check; returns True when all pass."""
    all_ok = True
    for name, check in CHECKS:
        ok, detail = check()
        all_ok = all_ok and ok
        print_fn(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return all_ok
