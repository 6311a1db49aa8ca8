"""Gaussian wave packets built from the improper eigenfunctions, and the rebound delay they show.

The packet is ``psi(x, t) = int dk c(k) u_k(x) exp(-i hbar k^2 t / 2m)`` with
``c(k) = |c(k)| exp(i k x_start)``, which puts the incoming packet at
``x_start`` when ``t = 0`` so that it reaches the junction at
``t0 = x_start m / (hbar k_peak)``. The constant ``U0 / hbar`` in the
frequency is a global phase and is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import airy as _scipy_airy

from . import stepexp, steplinear
from .stepexp import StepExpParams
from .steplinear import StepLinearParams

Potential = StepLinearParams | StepExpParams


class GridResolutionError(ValueError):
    """The x, k or t grid cannot resolve the packet."""


class DelayFitError(ArithmeticError):
    pass


@dataclass(frozen=True)
class InfiniteWall:
    """Hard wall at ``x = 0``: ``delta = pi`` for every ``k``, so no delay."""

    m: float = 1.0
    hbar: float = 1.0


@dataclass(frozen=True)
class WavePacketSpec:
    k_peak: float
    sigma_k: float
    x_start: float
    k_grid: tuple[float, float, int] | None = None
    gamma: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.k_peak > 0 and self.sigma_k > 0 and self.x_start > 0):
            raise ValueError("k_peak, sigma_k and x_start must be positive")

    @property
    def grid(self) -> tuple[float, float, int]:
        if self.k_grid is not None:
            return self.k_grid
        # |c| falls below 1e-12 of its peak beyond 10.6 sigma_k
        half = 11.0 * self.sigma_k
        # trapezoid aliases repeat every 2 pi / dk in x; keep them beyond the traced region
        reach = 4.0 * (self.x_start + 15.0 / self.sigma_k)
        n = int(max(256, math.ceil(2.0 * half * reach / (2.0 * math.pi)) + 1))
        return (self.k_peak - half, self.k_peak + half, n)

    def ks(self) -> np.ndarray:
        lo, hi, n = self.grid
        return np.linspace(lo, hi, n)

    def coefficients(self, k: np.ndarray) -> np.ndarray:
        """``c(k)``, normalised so that ``int |c|^2 dk = 1``."""
        amp = (2.0 * math.pi * self.sigma_k ** 2) ** -0.25 * np.exp(-((k - self.k_peak) ** 2) / (4.0 * self.sigma_k ** 2))
        phase = k * self.x_start if self.gamma is None else self.gamma(k)
        return amp * np.exp(1j * phase)

    def check(self) -> None:
        lo, hi, n = self.grid
        if lo <= 0:
            raise GridResolutionError("k grid must stay above the threshold (k_min > 0)")
        if (hi - lo) / (n - 1) > self.sigma_k / 8.0:
            raise GridResolutionError("k grid must put at least 32 points within 2 sigma_k of the peak")
        edge = np.exp(-((np.array([lo, hi]) - self.k_peak) ** 2) / (4.0 * self.sigma_k ** 2))
        if np.any(edge > 1e-12):
            raise GridResolutionError("packet amplitude is not negligible at the k-grid ends")


@dataclass
class PacketTrace:
    times: np.ndarray
    centroid: np.ndarray
    tau_measured: float = math.nan
    tau_predicted: float = math.nan
    tau_averaged: float = math.nan
    slope: float = math.nan
    t0: float = math.nan
    fit_residual: float = math.nan
    fit_start: float = 0.0
    k_peak: float = math.nan
    mass: float = 1.0
    hbar: float = 1.0


def _units(potential) -> tuple[float, float]:
    return potential.m, potential.hbar


def reflection_factors(potential, k: np.ndarray) -> np.ndarray:
    """``exp(i delta(k))`` on the k grid."""
    if isinstance(potential, InfiniteWall):
        return -np.ones(k.shape, dtype=complex)
    if isinstance(potential, StepLinearParams):
        beta = potential.beta0 + (k / potential.alpha) ** 2
        a, ap = steplinear._ai(beta)
        kk = k
        return (1j * kk * a - potential.alpha * ap) / (1j * kk * a + potential.alpha * ap)
    if isinstance(potential, StepExpParams):
        beta = potential.beta0 + (2.0 * potential.sigma * k) ** 2
        return np.array([stepexp.reflection_factor(potential, b) for b in beta])
    raise TypeError(f"unsupported potential {type(potential).__name__}")


def _left_linear(potential: StepLinearParams, k: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``Pi(k) Ai(-alpha x - beta(k)) / sqrt(2 pi)`` on an (x, k) mesh with ``x <= 0``.

    Bulk evaluation on a mesh goes through ``scipy.special.airy``; the
    library's own Airy kernel is the reference for every scalar quantity.
    """
    al = potential.alpha
    beta = potential.beta0 + (k / al) ** 2
    a, ap, _, _ = _scipy_airy(-beta)
    Pi = 2.0 / (a + al * ap / (1j * k))
    mesh, _, _, _ = _scipy_airy(-al * x[:, None] - beta[None, :])
    return mesh * Pi[None, :] / math.sqrt(2.0 * math.pi)


def evolve(potential, spec: WavePacketSpec, x_grid, t_grid, include_left: bool = False) -> np.ndarray:
    """``psi(x, t)`` as an array of shape ``(len(t_grid), len(x_grid))``.

    Points with ``x <= 0`` are filled only when ``include_left`` is set and
    the potential is step-linear; otherwise they are left at zero.
    """
    spec.check()
    x = np.asarray(x_grid, dtype=float)
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    k = spec.ks()
    lo, hi, n = spec.grid
    if x.size > 1 and np.max(np.diff(x)) > 1.0 / (8.0 * hi):
        raise GridResolutionError(f"x spacing must be below 1/(8 k_max) = {1.0 / (8.0 * hi):.4g}")
    m, hbar = _units(potential)
    wk = np.full(n, (hi - lo) / (n - 1))
    wk[0] = wk[-1] = 0.5 * wk[0]
    c = spec.coefficients(k) * wk
    R = reflection_factors(potential, k)
    right = x > 0
    xr = x[right]
    inc = np.exp(-1j * np.outer(xr, k))
    ref = np.exp(1j * np.outer(xr, k)) * R[None, :]
    u_right = (inc + ref) / math.sqrt(2.0 * math.pi)
    u_left = None
    if include_left and np.any(~right):
        if not isinstance(potential, StepLinearParams):
            raise NotImplementedError("left-region field is only tabulated for the step-linear potential")
        u_left = _left_linear(potential, k, x[~right])
    omega = hbar * k * k / (2.0 * m)
    psi = np.zeros((t.size, x.size), dtype=complex)
    for i, ti in enumerate(t):
        ck = c * np.exp(-1j * omega * ti)
        psi[i, right] = u_right @ ck
        if u_left is not None:
            psi[i, ~right] = u_left @ ck
    return psi


def predicted_delay(potential, k_peak: float) -> float:
    """``(m / hbar k) d delta / dk`` at ``k_peak``, in time units of the potential's own."""
    if isinstance(potential, InfiniteWall):
        return 0.0
    if isinstance(potential, StepLinearParams):
        beta = potential.beta0 + (k_peak / potential.alpha) ** 2
        return float(steplinear.delay_curve(potential, beta)) * potential.time_unit
    beta = potential.beta0 + (2.0 * potential.sigma * k_peak) ** 2
    return float(stepexp.delay_curve(potential, beta)) * potential.time_unit


def averaged_delay(potential, spec: WavePacketSpec) -> float:
    """``(m / hbar k_peak) <d delta / dk>`` over ``|c(k)|^2``.

    This is what the centroid fit measures exactly; it differs from
    :func:`predicted_delay` by a packet-width bias of order ``sigma_k^2``.
    """
    if isinstance(potential, InfiniteWall):
        return 0.0
    k = spec.ks()
    w = np.abs(spec.coefficients(k)) ** 2
    if isinstance(potential, StepLinearParams):
        beta = potential.beta0 + (k / potential.alpha) ** 2
        tau = np.asarray(steplinear.delay_curve(potential, beta))
    else:
        beta = potential.beta0 + (2.0 * potential.sigma * k) ** 2
        tau = np.asarray(stepexp.delay_curve(potential, beta))
    # d delta/dk = (d delta/d beta)(d beta/dk) and d beta/dk is proportional to k
    return float(np.sum(w * tau * k) / np.sum(w) / spec.k_peak * potential.time_unit)


def _x_cut(potential) -> float:
    if isinstance(potential, StepLinearParams):
        return 2.0 / potential.alpha
    if isinstance(potential, StepExpParams):
        return 2.0 * potential.sigma
    return 0.0


def trace(potential, spec: WavePacketSpec, n_times: int = 121, crossings: float = 6.0) -> PacketTrace:
    """Centroid of ``|psi|^2`` over ``x > x_cut`` from ``t = 0`` well past the bounce.

    The run extends ``crossings`` packet-width transit times beyond the
    return of the reflected packet to ``x_start``.
    """
    m, hbar = _units(potential)
    v = hbar * spec.k_peak / m
    width = 1.0 / (2.0 * spec.sigma_k)
    t0 = spec.x_start / v
    tau = predicted_delay(potential, spec.k_peak)
    t_end = 2.0 * t0 + max(tau, 0.0) + crossings * 2.0 * width / v
    x_max = spec.x_start + (crossings * 2.0 + 12.0) * width
    lo, hi, _ = spec.grid
    n_x = int(math.ceil(x_max * 8.0 * hi * 1.25)) + 1
    x = np.linspace(_x_cut(potential), x_max, n_x)
    times = np.linspace(0.0, t_end, n_times)
    psi = evolve(potential, spec, x, times)
    rho = np.abs(psi) ** 2
    mass = np.trapezoid(rho, x, axis=1)
    centroid = np.trapezoid(rho * x, x, axis=1) / mass
    out = PacketTrace(
        times=times,
        centroid=centroid,
        tau_predicted=tau,
        tau_averaged=averaged_delay(potential, spec),
        t0=t0,
        k_peak=spec.k_peak,
        mass=m,
        hbar=hbar,
    )
    # the reflected packet is clear of the junction once its trailing edge passes 8 widths
    out.fit_start = t0 + max(tau, 0.0) + (8.0 * width + _x_cut(potential)) / v
    return out


def measure_delay(tr: PacketTrace, max_residual: float = 1e-3) -> float:
    """Fit ``x = a t + b`` to the late centroid; ``tau = -b / a - t0``.

    Stores the slope, the fit residual and ``tau_measured`` on the trace.
    """
    sel = tr.times >= tr.fit_start
    if sel.sum() < 5:
        raise DelayFitError("trace does not extend far enough beyond the bounce")
    a, b = np.polyfit(tr.times[sel], tr.centroid[sel], 1)
    resid = tr.centroid[sel] - (a * tr.times[sel] + b)
    scale = np.ptp(tr.centroid[sel])
    tr.fit_residual = float(np.sqrt(np.mean(resid ** 2)) / scale)
    if tr.fit_residual > max_residual:
        raise DelayFitError(f"late centroid is not affine (relative residual {tr.fit_residual:.2e})")
    tr.slope = float(a)
    tr.tau_measured = float(-b / a - tr.t0)
    return tr.tau_measured


def packet_for_beta(potential, beta_peak: float, width_ratio: float = 0.01, lead: float = 8.0) -> WavePacketSpec:
    """Packet peaked at dimensionless energy ``beta_peak`` with ``sigma_k = width_ratio k``.

    It starts ``lead`` spatial widths out so the incoming tail does not
    touch the junction at ``t = 0``.
    """
    if isinstance(potential, StepLinearParams):
        k = potential.alpha * math.sqrt(beta_peak - potential.beta0)
    elif isinstance(potential, StepExpParams):
        k = math.sqrt(beta_peak - potential.beta0) / (2.0 * potential.sigma)
    else:
        raise TypeError("beta is not defined for this potential")
    sk = width_ratio * k
    return WavePacketSpec(k_peak=k, sigma_k=sk, x_start=lead / (2.0 * sk))


__all__ = [
    "DelayFitError",
    "GridResolutionError",
    "InfiniteWall",
    "PacketTrace",
    "WavePacketSpec",
    "averaged_delay",
    "evolve",
    "measure_delay",
    "packet_for_beta",
    "predicted_delay",
    "reflection_factors",
    "trace",
]
