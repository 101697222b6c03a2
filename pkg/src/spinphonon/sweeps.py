"""Parameter sweeps over temperature, phonon cutoff, and coupling scale.

Each sweep returns one T1 series per requested perturbative order, with
``math.inf`` marking points where nothing relaxes. The coupling-scale
sweep exploits that order-2k rates carry the global multiplier as an
exact factor lambda**(2k), and the crossover finder locates the scale at
which the two- and three-phonon rates coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .core import Lineshape, Model, restrict_bath, with_coupling_scale
from .dynamics import (
    RateGenerator,
    assemble_generator,
    extract_t1,
    order_generator_matrices,
    slowest_decay,
)
from .rates import rate_at_order


@dataclass(frozen=True, eq=False)
class SweepSeries:
    """T1 (seconds) per order along one strictly increasing axis."""

    axis: np.ndarray
    t1_per_order: dict[int, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ax = np.array(self.axis, dtype=float)
        if ax.ndim != 1 or ax.size == 0:
            raise ValueError("axis must be a non-empty 1-d list")
        if ax.size > 1 and np.any(np.diff(ax) <= 0.0):
            raise ValueError("axis must be strictly increasing")
        series = {}
        for order, values in self.t1_per_order.items():
            v = np.array(values, dtype=float)
            if v.shape != ax.shape:
                raise ValueError("every series must match the axis length")
            v.setflags(write=False)
            series[int(order)] = v
        ax.setflags(write=False)
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "t1_per_order", series)


class PowerLawFit(NamedTuple):
    """Log-log slope and root-mean-square residual of the fit."""

    exponent: float
    residual: float


def _t1_of_matrix(matrix: np.ndarray, order: int) -> float:
    return extract_t1(RateGenerator(matrix=matrix, orders=(order,)))


def _model_tag(model: Model) -> dict:
    return {
        "n_states": model.system.n_states,
        "n_modes": model.bath.n_modes,
        "coupling_scale": model.couplings.scale,
    }


def sweep_temperature(
    model: Model,
    temperatures: Sequence[float],
    orders: Iterable[int] = (2, 4, 6),
    shape: Lineshape = Lineshape(),
    threads: int = 1,
) -> SweepSeries:
    """T1 versus temperature, one series per requested order."""
    temps = np.asarray(temperatures, dtype=float)
    if np.any(temps <= 0.0):
        raise ValueError("temperatures must be positive")
    orders = tuple(sorted(set(orders)))
    series = {k: [] for k in orders}
    for t in temps:
        mats = order_generator_matrices(model, float(t), shape, orders, threads)
        for k in orders:
            series[k].append(_t1_of_matrix(mats[k], k))
    return SweepSeries(
        axis=temps,
        t1_per_order={k: np.array(v) for k, v in series.items()},
        metadata={"sweep": "temperature", "sigma": shape.sigma, "eta": shape.eta,
                  "orders": orders, "model": _model_tag(model)},
    )


def sweep_cutoff(
    model: Model,
    cutoffs: Sequence[float],
    order: int,
    temperature: float,
    shape: Lineshape = Lineshape(),
    threads: int = 1,
) -> SweepSeries:
    """T1 versus the phonon high-energy cutoff, at a single order.

    Each point restricts the bath to modes at or below the cutoff; a
    cutoff below the lowest mode leaves nothing to relax through and
    yields the infinite-T1 sentinel.
    """
    cuts = np.asarray(cutoffs, dtype=float)
    values = []
    for omega_c in cuts:
        sub = restrict_bath(model, float(omega_c))
        if sub.bath.n_modes == 0:
            values.append(math.inf)
            continue
        mats = order_generator_matrices(sub, temperature, shape, (order,), threads)
        values.append(_t1_of_matrix(mats[order], order))
    return SweepSeries(
        axis=cuts,
        t1_per_order={order: np.array(values)},
        metadata={"sweep": "cutoff", "sigma": shape.sigma, "eta": shape.eta,
                  "orders": (order,), "temperature": temperature,
                  "model": _model_tag(model)},
    )


def sweep_lambda(
    model: Model,
    scales: Sequence[float],
    orders: Iterable[int] = (4, 6),
    temperature: float = 300.0,
    shape: Lineshape = Lineshape(),
    threads: int = 1,
) -> SweepSeries:
    """T1 versus the homogeneous coupling multiplier, per order."""
    lams = np.asarray(scales, dtype=float)
    if np.any(lams <= 0.0):
        raise ValueError("coupling scales must be positive")
    orders = tuple(sorted(set(orders)))
    series = {k: [] for k in orders}
    for lam in lams:
        scaled = with_coupling_scale(model, float(lam))
        mats = order_generator_matrices(scaled, temperature, shape, orders, threads)
        for k in orders:
            series[k].append(_t1_of_matrix(mats[k], k))
    return SweepSeries(
        axis=lams,
        t1_per_order={k: np.array(v) for k, v in series.items()},
        metadata={"sweep": "lambda", "sigma": shape.sigma, "eta": shape.eta,
                  "orders": orders, "temperature": temperature,
                  "model": _model_tag(model)},
    )


def crossover_scale(rate4: float, rate6: float) -> float:
    """Closed-form scale at which lambda**4 r4 = lambda**6 r6."""
    if not (rate4 > 0.0 and rate6 > 0.0):
        raise ValueError("both rates must be positive")
    return math.sqrt(rate4 / rate6)


def _order_rate_metric(
    model: Model, order: int, temperature: float, shape: Lineshape, threads: int
) -> float:
    """Total rate compared between orders: the (1, 0) transition rate for a
    two-level model, the slowest decay rate 1/T1 otherwise."""
    system, bath, couplings = model
    if system.n_states == 2:
        return rate_at_order(
            order, 1, 0, system, bath, couplings, temperature, shape, threads=threads
        ).total
    gen = assemble_generator(model, temperature, shape, (order,), threads)
    return slowest_decay(gen).rate


def find_crossover(
    model: Model,
    temperature: float,
    shape: Lineshape = Lineshape(),
    bracket: tuple[float, float] = (1e-2, 1e4),
    threads: int = 1,
    rel_tol: float = 1e-6,
) -> float | None:
    """Coupling scale at which the three-phonon rate overtakes the two-phonon one.

    Bisects log(r6(lambda) / r4(lambda)) over the bracket, evaluating both
    rates at each trial scale, and converges to the requested relative
    tolerance on lambda. The exact-scaling closed form sqrt(r4(1)/r6(1))
    serves as the convergence check. Returns None when the bracket does
    not contain a crossover.
    """
    lo, hi = bracket
    if not (0.0 < lo < hi):
        raise ValueError("bracket must satisfy 0 < lo < hi")

    def log_ratio(lam: float) -> float:
        scaled = with_coupling_scale(model, lam)
        r4 = _order_rate_metric(scaled, 4, temperature, shape, threads)
        r6 = _order_rate_metric(scaled, 6, temperature, shape, threads)
        if not (r4 > 0.0 and r6 > 0.0):
            raise ValueError("two- and three-phonon rates must both be nonzero")
        return math.log(r6) - math.log(r4)

    f_lo = log_ratio(lo)
    f_hi = log_ratio(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        return None

    # bisect in log-space for uniform relative resolution
    u_lo, u_hi = math.log(lo), math.log(hi)
    while u_hi - u_lo > 0.5 * rel_tol:
        u_mid = 0.5 * (u_lo + u_hi)
        f_mid = log_ratio(math.exp(u_mid))
        if f_mid == 0.0:
            u_lo = u_hi = u_mid
            break
        if (f_mid > 0.0) == (f_lo > 0.0):
            u_lo = u_mid
            f_lo = f_mid
        else:
            u_hi = u_mid
    lam = math.exp(0.5 * (u_lo + u_hi))

    base = with_coupling_scale(model, 1.0)
    closed = crossover_scale(
        _order_rate_metric(base, 4, temperature, shape, threads),
        _order_rate_metric(base, 6, temperature, shape, threads),
    )
    if abs(lam - closed) > 10.0 * rel_tol * closed:
        raise RuntimeError(
            f"bisection result {lam:.9g} disagrees with the exact-scaling "
            f"value {closed:.9g}"
        )
    return lam


def fit_power_law(axis: Sequence[float], values: Sequence[float]) -> PowerLawFit:
    """Least-squares slope of log(values) versus log(axis).

    Requires at least four strictly positive, finite points.
    """
    x = np.asarray(axis, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("axis and values must be 1-d and the same length")
    if x.size < 4:
        raise ValueError("a power-law fit needs at least 4 points")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("power-law fits require positive data")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("power-law fits require finite data")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return PowerLawFit(float(slope), float(np.sqrt(np.mean(resid**2))))


def high_temperature_mask(
    temperatures: Sequence[float], max_mode_frequency: float
) -> np.ndarray:
    """True where k_B T >= 2 * max mode frequency, the power-law fit window."""
    from .core import BOLTZMANN_CM_PER_K

    t = np.asarray(temperatures, dtype=float)
    return BOLTZMANN_CM_PER_K * t >= 2.0 * max_mode_frequency
