"""Lieb-Robinson truncation errors, radius selection and budget splitting.

The single-site truncation error of evolving an observable only inside its
radius-L graph ball for time T under couplings bounded by g on a
degree-Delta graph is

    sqrt(2/pi) * |A| * ||O_A|| * (4 g T (Delta - 1) / L)^L / sqrt(L).

``min_radius`` scans L upward (the expression is not monotone below
L ~ 4gT(Delta-1)) and returns the first radius whose n-site total fits the
budget while the worst-case ball size stays under the qubit cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleError


@dataclass(frozen=True)
class ErrorBudget:
    """How the total tolerance delta is split across pipeline stages.

    The strip contraction here is exact, so its share is pinned to zero and
    the whole budget goes to lightcone truncation and propagator error.
    """

    delta_total: float
    eps_lr_total: float
    eps_cs_total: float
    eps_ssc: float
    per_site_lr: float
    per_site_cs: float


def split_budget(delta: float, n_sites: int, lr_fraction: float = 0.5) -> ErrorBudget:
    """Allocate delta across truncation and propagator error, ssc share 0."""
    if delta <= 0:
        raise ValueError("total error budget must be positive")
    if n_sites < 1:
        raise ValueError("need at least one site")
    if not 0 < lr_fraction < 1:
        raise ValueError("lr_fraction must lie strictly between 0 and 1")
    lr = delta * lr_fraction
    cs = delta - lr
    return ErrorBudget(
        delta_total=delta,
        eps_lr_total=lr,
        eps_cs_total=cs,
        eps_ssc=0.0,
        per_site_lr=lr / n_sites,
        per_site_cs=cs / n_sites,
    )


def lr_error(radius: int, horizon: float, g: float, degree: int,
             region_size: int = 1, obs_norm: float = 1.0) -> float:
    """Single-region lightcone truncation error bound.

    Defined as 0 for non-positive horizons (zero-time evolution is exactly
    local) and for degree <= 1, where a radius-1 ball already saturates the
    connected component.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if horizon <= 0 or g <= 0 or degree <= 1:
        return 0.0
    x = 4.0 * g * horizon * (degree - 1)
    log_value = radius * (math.log(x) - math.log(radius)) - 0.5 * math.log(radius)
    try:
        value = math.exp(log_value)
    except OverflowError:
        return math.inf
    return math.sqrt(2.0 / math.pi) * region_size * obs_norm * value


def max_ball_size(radius: int) -> int:
    """Worst-case (boundary-free) site count of a radius-L graph ball."""
    return 2 * radius * radius + 2 * radius + 1


def min_radius(horizon: float, g: float, degree: int, n_sites: int,
               lr_budget: float, m_cap: int) -> int:
    """Smallest radius whose n-site truncation total fits the budget.

    Every candidate up to the cap-limited maximum is checked because the
    error expression can rise before it falls.
    """
    if lr_budget <= 0:
        raise ValueError("lightcone budget must be positive")
    max_l = 0
    while max_ball_size(max_l + 1) <= m_cap:
        max_l += 1
    if max_l < 1:
        raise InfeasibleError(
            "infeasible: increase delta, decrease T, or raise the qubit cap "
            f"(cap {m_cap} does not even admit radius 1)")
    for radius in range(1, max_l + 1):
        if n_sites * lr_error(radius, horizon, g, degree) <= lr_budget:
            return radius
    raise InfeasibleError(
        "infeasible: increase delta, decrease T, or raise the qubit cap "
        f"(no radius up to {max_l} meets the budget {lr_budget:g})")
