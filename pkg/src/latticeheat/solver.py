"""Mild solutions of the forced lattice heat equation.

u(t, n) = (G(t, .) * f)(n) + int_0^t (G(t - s, .) * g(s, .))(n) ds.

The homogeneous part is a windowed discrete convolution with the kernel
slice; the Duhamel part is adaptive composite Simpson over [0, t] on the
vector-valued integrand, with the error budget split evenly between
quadrature and kernel truncation.  Near s = t the kernel collapses to a
near-delta but the integrand stays bounded by ||g(s, .)||_1, so the
endpoint needs no special treatment beyond the exact identity W_0 = id.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .kernel import LatticeSequence, add_sequences, heat_kernel, read_sequence_csv

__all__ = [
    "ForcingSpec",
    "SolutionSnapshot",
    "convolve",
    "evolve",
    "duhamel",
    "solve",
    "conserved_quantities",
    "QuadratureBudgetError",
]

_MAX_INTEGRAND_EVALS = 40000
_MAX_DEPTH = 30


class QuadratureBudgetError(ArithmeticError):
    """Adaptive quadrature could not meet the requested tolerance."""


@dataclass(frozen=True)
class ForcingSpec:
    """Forcing term g(t, n).

    ``separable`` means g(t, n) = amplitude * (1 + t)^(-gamma) * spatial(n),
    the certified path.  ``tabulated`` accepts arbitrary time samples on a
    grid, integrated by trapezoid with a reported (not certified) error.
    """

    kind: str
    spatial: LatticeSequence | None = None
    gamma: float = 0.0
    amplitude: float = 0.0
    times: tuple[float, ...] = ()
    samples: tuple[LatticeSequence, ...] = ()

    @staticmethod
    def none() -> "ForcingSpec":
        return ForcingSpec(kind="none")

    @staticmethod
    def separable(spatial: LatticeSequence, gamma: float, amplitude: float) -> "ForcingSpec":
        if gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {gamma!r}")
        return ForcingSpec(kind="separable", spatial=spatial, gamma=gamma, amplitude=amplitude)

    @staticmethod
    def tabulated(times, samples) -> "ForcingSpec":
        times = tuple(float(t) for t in times)
        samples = tuple(samples)
        if len(times) != len(samples) or len(times) < 2:
            raise ValueError("tabulated forcing needs matching times and samples, at least two")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("tabulated times must be strictly increasing")
        return ForcingSpec(kind="tabulated", times=times, samples=samples)

    @staticmethod
    def from_json(path) -> "ForcingSpec":
        """Load ``{"kind":"separable","spatial":"<csv>","gamma":...,"amplitude":...}``."""
        path = Path(path)
        spec = json.loads(path.read_text(encoding="utf-8"))
        kind = spec.get("kind")
        if kind == "none":
            return ForcingSpec.none()
        if kind != "separable":
            raise ValueError(f"unsupported forcing kind in {path}: {kind!r}")
        spatial_path = Path(spec["spatial"])
        if not spatial_path.is_absolute():
            spatial_path = path.parent / spatial_path
        spatial = read_sequence_csv(spatial_path)
        return ForcingSpec.separable(spatial, float(spec["gamma"]), float(spec["amplitude"]))

    def temporal(self, s: float) -> float:
        if self.kind != "separable":
            raise ValueError("temporal profile defined for separable forcing only")
        return self.amplitude * (1.0 + s) ** (-self.gamma)

    def l1_time_integral(self, t: float) -> float:
        """int_0^t ||g(s, .)||_1 ds in closed form (separable family)."""
        if self.kind != "separable":
            raise ValueError("closed-form time integral defined for separable forcing only")
        spatial_mass = math.fsum(abs(v) for v in self.spatial.values)
        if self.gamma == 1.0:
            profile = math.log1p(t)
        else:
            profile = ((1.0 + t) ** (1.0 - self.gamma) - 1.0) / (1.0 - self.gamma)
        return abs(self.amplitude) * spatial_mass * profile


@dataclass(frozen=True)
class SolutionSnapshot:
    """Windowed solution at time t with certified l^1 error bounds."""

    t: float
    u: LatticeSequence
    quad_error: float
    trunc_error: float


def convolve(a: LatticeSequence, b: LatticeSequence) -> LatticeSequence:
    """Direct discrete convolution over the joint support, compensated per point."""
    la, lb = len(a.values), len(b.values)
    if la > lb:
        a, b = b, a
        la, lb = lb, la
    if la == 1:
        return LatticeSequence(a.offset + b.offset, a.values[0] * b.values)
    out = np.zeros(la + lb - 1)
    av = a.values
    bv = b.values
    for i in range(len(out)):
        j_lo = max(0, i - lb + 1)
        j_hi = min(la - 1, i)
        out[i] = math.fsum(av[j] * bv[i - j] for j in range(j_lo, j_hi + 1))
    return LatticeSequence(a.offset + b.offset, out)


def evolve(f: LatticeSequence, t: float, eps: float = 1e-12) -> SolutionSnapshot:
    """Homogeneous evolution u_f(t, .) = G(t, .) * f with certified truncation."""
    if t == 0.0:
        return SolutionSnapshot(t=0.0, u=f, quad_error=0.0, trunc_error=0.0)
    kernel = heat_kernel(t, eps)
    u = convolve(kernel.to_sequence(), f)
    f_mass = math.fsum(abs(v) for v in f.values)
    return SolutionSnapshot(t=t, u=u, quad_error=0.0, trunc_error=kernel.tail_mass * f_mass)


def _simpson(a: float, b: float, fa: np.ndarray, fm: np.ndarray, fb: np.ndarray) -> np.ndarray:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive_simpson(fun, a: float, b: float, tol: float):
    evals = [0]

    def ev(s: float) -> np.ndarray:
        evals[0] += 1
        if evals[0] > _MAX_INTEGRAND_EVALS:
            raise QuadratureBudgetError(
                f"quadrature budget of {_MAX_INTEGRAND_EVALS} integrand evaluations exhausted"
            )
        return fun(s)

    def recurse(lo, hi, flo, fmid, fhi, whole, local_tol, depth):
        mid = 0.5 * (lo + hi)
        fl = ev(0.5 * (lo + mid))
        fr = ev(0.5 * (mid + hi))
        left = _simpson(lo, mid, flo, fl, fmid)
        right = _simpson(mid, hi, fmid, fr, fhi)
        delta = left + right - whole
        err = float(np.sum(np.abs(delta))) / 15.0
        if err <= local_tol or depth >= _MAX_DEPTH:
            if depth >= _MAX_DEPTH and err > local_tol:
                raise QuadratureBudgetError(
                    f"subdivision depth {_MAX_DEPTH} reached with local error {err:.3g} > {local_tol:.3g}"
                )
            return left + right + delta / 15.0, err
        li, le = recurse(lo, mid, flo, fl, fmid, left, local_tol / 2.0, depth + 1)
        ri, re = recurse(mid, hi, fmid, fr, fhi, right, local_tol / 2.0, depth + 1)
        return li + ri, le + re

    fa, fm, fb = ev(a), ev(0.5 * (a + b)), ev(b)
    whole = _simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def duhamel(g: ForcingSpec, t: float, eps: float = 1e-10) -> SolutionSnapshot:
    """Forced part int_0^t (W_{t-s} g(s, .)) ds of the mild solution."""
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t!r}")
    if g.kind == "none":
        return SolutionSnapshot(t=t, u=LatticeSequence(0, np.array([0.0])), quad_error=0.0, trunc_error=0.0)
    if g.kind == "tabulated":
        return _duhamel_tabulated(g, t)
    if g.kind != "separable":
        raise ValueError(f"unknown forcing kind {g.kind!r}")
    if g.gamma <= 0.0:
        raise ValueError("separable forcing requires gamma > 0")

    if g.amplitude == 0.0:
        return SolutionSnapshot(t=t, u=LatticeSequence(0, np.array([0.0])), quad_error=0.0, trunc_error=0.0)

    g_l1 = g.l1_time_integral(t)
    kernel_eps = min(1e-12, 0.5 * eps / max(g_l1, 1e-300))
    kernel_eps = max(kernel_eps, 1e-16)
    trunc_error = kernel_eps * g_l1

    top = heat_kernel(t, kernel_eps)
    width = top.window + 2
    lo = g.spatial.offset - width
    length = len(g.spatial.values) + 2 * width
    cache: dict[float, LatticeSequence] = {}

    def integrand(s: float) -> np.ndarray:
        out = np.zeros(length)
        if s >= t:
            conv = g.spatial
        else:
            key = round(t - s, 12)
            seq = cache.get(key)
            if seq is None:
                ks = heat_kernel(t - s, kernel_eps)
                if ks.window > width:
                    raise AssertionError("kernel window exceeded the precomputed frame")
                seq = ks.to_sequence()
                cache[key] = seq
            conv = convolve(seq, g.spatial)
        out[conv.offset - lo : conv.offset - lo + len(conv.values)] = conv.values
        return g.temporal(s) * out

    integral, quad_error = _adaptive_simpson(integrand, 0.0, t, 0.5 * eps)
    u = LatticeSequence(lo, integral, name="u_g")
    return SolutionSnapshot(t=t, u=u, quad_error=quad_error, trunc_error=trunc_error)


def _duhamel_tabulated(g: ForcingSpec, t: float) -> SolutionSnapshot:
    """Trapezoid rule on the forcing time grid; error reported, not certified."""
    kernel_eps = 1e-12
    nodes = [s for s in g.times if s <= t]
    if not nodes or nodes[-1] < t:
        nodes.append(t)

    def sample(s: float) -> LatticeSequence:
        for ts, seq in zip(g.times, g.samples):
            if ts >= s:
                return seq
        return g.samples[-1]

    terms: list[tuple[float, LatticeSequence]] = []
    trunc = 0.0
    for s in nodes:
        gs = sample(s)
        if s >= t:
            terms.append((s, gs))
        else:
            ks = heat_kernel(t - s, kernel_eps)
            terms.append((s, convolve(ks.to_sequence(), gs)))
            trunc += kernel_eps * math.fsum(abs(v) for v in gs.values)
    acc = LatticeSequence(0, np.array([0.0]))
    quad = 0.0
    for (s0, v0), (s1, v1) in zip(terms, terms[1:]):
        h = s1 - s0
        acc = add_sequences(acc, add_sequences(v0, v1), 1.0, 0.5 * h)
        quad += 0.5 * h * abs(math.fsum(v1.values) - math.fsum(v0.values))
    return SolutionSnapshot(t=t, u=acc, quad_error=quad, trunc_error=trunc)


def solve(f: LatticeSequence, g: ForcingSpec, t: float, eps: float = 1e-10) -> SolutionSnapshot:
    """Full mild solution u = u_f + u_g; certified error fields add."""
    if g.kind == "none":
        return evolve(f, t, eps)
    hom = evolve(f, t, eps / 2.0)
    forced = duhamel(g, t, eps / 2.0)
    u = add_sequences(hom.u, forced.u)
    return SolutionSnapshot(
        t=t,
        u=u,
        quad_error=hom.quad_error + forced.quad_error,
        trunc_error=hom.trunc_error + forced.trunc_error,
    )


def conserved_quantities(s: SolutionSnapshot) -> tuple[float, float, float]:
    """(mass, first moment, second moment) of the snapshot window."""
    return (s.u.mass(), s.u.moment(1), s.u.moment(2))
