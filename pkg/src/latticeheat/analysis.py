"""Empirical verification harness for the decay and large-time theorems.

Every check reduces to a ``DecayReport``: a (t, value) series with a
least-squares slope on log-log axes.  Proven rates are asserted by the
test suite at the slope level only, since the theorems leave their
constants unspecified.  A point enters a fit only if its certified
numerical error is below value / 100, so truncation noise cannot
contaminate slopes near vanishing profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernel import (
    LatticeSequence,
    add_sequences,
    discrete_laplacian,
    forward_difference,
    heat_kernel,
    lp_norm,
)
from .solver import ForcingSpec, convolve, duhamel

__all__ = [
    "DecayReport",
    "fit_loglog",
    "kernel_decay",
    "l2_optimality",
    "large_time_profile",
    "fourier_symbol_check",
    "higher_difference_decay",
    "dyadic_grid",
]

KERNEL_QUANTITIES = ("G", "grad", "laplacian")


@dataclass(frozen=True)
class DecayReport:
    """A (t, value) series with its fitted log-log slope."""

    label: str
    pairs: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    max_residual: float
    t_range: tuple[float, float]
    dropped: tuple[tuple[float, float], ...] = ()
    extras: dict = field(default_factory=dict)


def dyadic_grid(t_min: float = 16.0, t_max: float = 1024.0) -> list[float]:
    """Times t_min, 2 t_min, ... up to t_max inclusive."""
    grid = []
    t = t_min
    while t <= t_max * (1.0 + 1e-12):
        grid.append(t)
        t *= 2.0
    return grid


def fit_loglog(pairs, label: str, dropped=(), extras=None) -> DecayReport:
    """Unweighted least squares of log(value) on log(t)."""
    pairs = tuple((float(t), float(v)) for t, v in pairs)
    if len(pairs) < 2:
        raise ValueError("need at least two points to fit a slope")
    if any(t2 <= t1 for (t1, _), (t2, _) in zip(pairs, pairs[1:])):
        raise ValueError("pairs must be sorted by strictly increasing t")
    if any(v <= 0.0 for _, v in pairs):
        raise ValueError("all values must be positive for a log-log fit")
    log_t = np.log([t for t, _ in pairs])
    log_v = np.log([v for _, v in pairs])
    slope, intercept = np.polyfit(log_t, log_v, 1)
    residuals = log_v - (slope * log_t + intercept)
    return DecayReport(
        label=label,
        pairs=pairs,
        slope=float(slope),
        intercept=float(intercept),
        max_residual=float(np.max(np.abs(residuals))),
        t_range=(pairs[0][0], pairs[-1][0]),
        dropped=tuple(dropped),
        extras=extras or {},
    )


def _gate(points, label: str, extras=None) -> DecayReport:
    kept = [(t, v) for t, v, err in points if v > 0.0 and err < v / 100.0]
    dropped = [(t, v) for t, v, err in points if not (v > 0.0 and err < v / 100.0)]
    if len(kept) < 2:
        raise ValueError(f"{label}: fewer than two points survived error gating")
    return fit_loglog(kept, label, dropped=dropped, extras=extras)


def _kernel_quantity(t: float, quantity: str, eps: float) -> tuple[LatticeSequence, float]:
    kernel = heat_kernel(t, eps)
    seq = kernel.to_sequence()
    if quantity == "G":
        return seq, kernel.tail_mass
    if quantity == "grad":
        return forward_difference(seq), 2.0 * kernel.tail_mass
    if quantity == "laplacian":
        return discrete_laplacian(seq), 4.0 * kernel.tail_mass
    raise ValueError(f"quantity must be one of {KERNEL_QUANTITIES}, got {quantity!r}")


def kernel_decay(p: float, quantity: str, t_grid, eps: float = 1e-12) -> DecayReport:
    """Decay of ||quantity of G(t, .)||_p on the time grid.

    Proven exponents: -(1/2)(1 - 1/p) for the kernel, an extra -1/2 per
    difference order up to the Laplacian.
    """
    t_grid = sorted(t_grid)
    if len(t_grid) < 6:
        raise ValueError("need at least six grid points for a stable slope")
    points = []
    for t in t_grid:
        seq, err = _kernel_quantity(t, quantity, eps)
        value = lp_norm(seq, p)
        if value == 0.0:
            raise ArithmeticError(f"norm underflowed to zero at t={t}")
        points.append((t, value, err))
    return _gate(points, label=f"kernel-decay[{quantity}, p={p}]")


def l2_optimality(f: LatticeSequence, t_grid, eps: float = 1e-12) -> DecayReport:
    """Slope of ||u_f(t)||_2 for data with nonzero mass; rate -1/4 is sharp.

    ``extras`` carries the sandwich ratios: ``ratio_lower`` is
    t^{1/4} ||u_f||_2 / |sum f| (stays above a fixed c > 0) and
    ``ratio_upper`` is t^{1/4} ||u_f||_2 / ||f||_1 (stays bounded).
    """
    mass = f.mass()
    if abs(mass) <= 1e-14:
        raise ValueError("l2 optimality requires nonzero total mass")
    f_l1 = math.fsum(abs(v) for v in f.values)
    t_grid = sorted(t_grid)
    points = []
    lower, upper = [], []
    for t in t_grid:
        kernel = heat_kernel(t, eps)
        u = convolve(kernel.to_sequence(), f)
        value = lp_norm(u, 2.0)
        err = kernel.tail_mass * f_l1
        points.append((t, value, err))
        lower.append(value * t**0.25 / abs(mass))
        upper.append(value * t**0.25 / f_l1)
    extras = {"ratio_lower": tuple(lower), "ratio_upper": tuple(upper)}
    return _gate(points, label="l2-optimality", extras=extras)


def large_time_profile(
    f: LatticeSequence | None,
    g: ForcingSpec | None,
    p: float,
    t_grid,
    eps: float = 1e-12,
) -> DecayReport:
    """Scaled distance t^{(1/2)(1 - 1/p)} ||u - M G(t, .)||_p over the grid.

    Exactly one of ``f`` (homogeneous profile, needs nonzero mass) or ``g``
    (forced profile, needs gamma > 1) must be given.  The reference M G
    shares the window of u so the difference is index-aligned.
    """
    if (f is None) == (g is None):
        raise ValueError("give exactly one of f or g")
    weight = lambda t: t ** (0.5 * (1.0 - (0.0 if p == math.inf else 1.0 / p)))
    t_grid = sorted(t_grid)
    points = []
    if f is not None:
        m = f.mass()
        if abs(m) <= 1e-14:
            raise ValueError("homogeneous profile requires nonzero mass")
        f_l1 = math.fsum(abs(v) for v in f.values)
        for t in t_grid:
            kernel = heat_kernel(t, eps)
            seq = kernel.to_sequence()
            u = convolve(seq, f)
            diff = add_sequences(u, seq, 1.0, -m)
            value = weight(t) * lp_norm(diff, p)
            err = weight(t) * kernel.tail_mass * (f_l1 + abs(m))
            points.append((t, value, err))
        label = f"large-time[u_f, p={p}]"
    else:
        if g.kind != "separable" or g.gamma <= 1.0:
            raise ValueError("forced profile requires separable forcing with gamma > 1")
        spatial_mass = g.spatial.mass()
        m = g.amplitude * spatial_mass / (g.gamma - 1.0)
        for t in t_grid:
            snap = duhamel(g, t, eps=max(1e-8, eps))
            kernel = heat_kernel(t, eps)
            diff = add_sequences(snap.u, kernel.to_sequence(), 1.0, -m)
            value = weight(t) * lp_norm(diff, p)
            err = weight(t) * (snap.quad_error + snap.trunc_error + kernel.tail_mass * abs(m))
            points.append((t, value, err))
        label = f"large-time[u_g, p={p}]"
    report = _gate(points, label=label)
    values = [v for _, v in report.pairs]
    monotone = all(b <= a for a, b in zip(values[1:], values[2:]))
    report.extras["monotone_from_second"] = monotone
    report.extras["first_value"] = values[0]
    report.extras["last_value"] = values[-1]
    return report


def fourier_symbol_check(t: float, grid_size: int = 64, eps: float = 1e-12) -> float:
    """Max grid error of the transform of G(t, .) against exp(-4 t sin^2(theta/2)).

    The transform is the direct cosine sum over the window; the imaginary
    part vanishes by symmetry.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    kernel = heat_kernel(t, eps)
    n = np.arange(1, kernel.window + 1)
    worst = 0.0
    for j in range(grid_size):
        theta = -math.pi + 2.0 * math.pi * (j + 1) / grid_size
        transform = kernel.values[0] + 2.0 * math.fsum(kernel.values[1:] * np.cos(n * theta))
        symbol = math.exp(-4.0 * t * math.sin(theta / 2.0) ** 2)
        worst = max(worst, abs(transform - symbol))
    return worst


def higher_difference_decay(order: int, p: float, t_grid, eps: float = 1e-12) -> DecayReport:
    """Decay of the order-times iterated forward difference of the kernel.

    Orders 1 and 2 reproduce proven rates; for order >= 3 the rate
    -(1/2)(1 - 1/p) - order/2 is an open conjecture and the report is
    flagged experimental.
    """
    if not (1 <= order <= 6):
        raise ValueError("order must lie in 1..6")
    t_grid = sorted(t_grid)
    points = []
    for t in t_grid:
        kernel = heat_kernel(t, eps)
        seq = kernel.to_sequence()
        for _ in range(order):
            seq = forward_difference(seq)
        value = lp_norm(seq, p)
        points.append((t, value, 2.0**order * kernel.tail_mass))
    extras = {"experimental": order >= 3, "order": order}
    return _gate(points, label=f"difference-decay[order={order}, p={p}]", extras=extras)
