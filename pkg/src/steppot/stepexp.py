"""Step-exponential potential: ``U(x) = kappa (exp(-x/sigma) - 1)`` for ``x <= 0``, ``U0`` beyond.

Dimensionless variables: ``alpha^2 = 8 m kappa sigma^2 / hbar^2``,
``beta = 8 m (E + kappa) sigma^2 / hbar^2`` and ``beta0`` the same map of
``U0``. Left of the junction the solution is ``K_{i sqrt(beta)}(z)`` with
``z = alpha exp(-x / 2 sigma)``. Delays are in units of ``8 m sigma^2 / hbar``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .common import (
    BoundState,
    DelaySample,
    Resonance,
    ScatteringState,
    ThresholdError,
    as_array,
    find_peaks,
    nearest,
    scan_roots,
    unwrapped_phase,
)
from .specfun import (
    ASYMPTOTIC_BETA_MIN,
    BesselUnderflowWarning,
    bessel_k_imag,
    bessel_k_imag_all,
    bessel_k_imag_dx,
    bessel_k_imag_zeros_below,
    lambert_w,
)

THRESHOLD_GAP = 1e-8


@dataclass(frozen=True)
class StepExpParams:
    kappa: float
    sigma: float
    U0: float
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("kappa", "sigma", "U0", "m", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")

    @classmethod
    def from_dimensionless(
        cls, beta0: float, alpha: float = 1.0, sigma: float = 1.0, m: float = 1.0, hbar: float = 1.0
    ):
        if not beta0 > alpha ** 2:
            raise ValueError(f"beta0 must exceed alpha^2 = {alpha ** 2}")
        unit = hbar ** 2 / (8.0 * m * sigma ** 2)
        kappa = alpha ** 2 * unit
        return cls(kappa=kappa, sigma=sigma, U0=beta0 * unit - kappa, m=m, hbar=hbar)

    @property
    def _scale(self) -> float:
        return 8.0 * self.m * self.sigma ** 2 / self.hbar ** 2

    @property
    def alpha(self) -> float:
        return math.sqrt(self._scale * self.kappa)

    @property
    def beta0(self) -> float:
        return self._scale * (self.U0 + self.kappa)

    @property
    def time_unit(self) -> float:
        return 8.0 * self.m * self.sigma ** 2 / self.hbar

    def beta(self, energy):
        return self._scale * (np.asarray(energy) + self.kappa)

    def energy(self, beta):
        return np.asarray(beta) / self._scale - self.kappa

    def k(self, beta):
        """Flat-side wave number; ``(2 sigma k)^2 = |beta - beta0|``."""
        return np.sqrt(np.abs(np.asarray(beta) - self.beta0)) / (2.0 * self.sigma)

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, self.kappa * np.expm1(-np.minimum(x, 0.0) / self.sigma), self.U0)


def _kk(alpha: float, beta: float, scaled: bool = True):
    v = bessel_k_imag_all(float(beta), alpha, scaled=scaled)
    return v["K"], v["Kx"], v["Kb"], v["Kxb"]


def level_condition(params: StepExpParams, beta: float) -> float:
    """``K' - (sqrt(b0 - b) / alpha) K`` at ``z = alpha``, up to a positive factor."""
    k, kx, _, _ = _kk(params.alpha, beta)
    return kx - math.sqrt(params.beta0 - beta) / params.alpha * k


def level_curves(params: StepExpParams, betas):
    """``K'/K`` and ``sqrt(b0 - b)/alpha`` on a grid, for the graphical construction."""
    lhs = []
    for b in np.asarray(betas, dtype=float):
        k, kx, _, _ = _kk(params.alpha, b)
        lhs.append(kx / k if k != 0 else math.nan)
    betas = np.asarray(betas, dtype=float)
    return np.array(lhs), np.sqrt(np.clip(params.beta0 - betas, 0.0, None)) / params.alpha


def zero_spacing(beta: float, alpha: float) -> float:
    """Local distance between consecutive zeros of ``K_{i sqrt(b)}(alpha)`` in ``b``."""
    rb = math.sqrt(beta)
    return 2.0 * math.pi * rb / max(math.log(2.0 * rb / alpha), 0.5)


def _norm(params: StepExpParams, beta: float) -> float:
    # int_alpha^inf K^2 dz / z = alpha (K K'_b - K_b K'), the beta-derivative of the cross Wronskian
    k, kx, kb, kxb = _kk(params.alpha, beta, scaled=False)
    left = 2.0 * params.sigma * params.alpha * (k * kxb - kb * kx)
    right = k * k / (2.0 * float(params.k(beta)))
    return math.sqrt(left + right)


def bound_states(params: StepExpParams, n_max: int | None = None) -> list[BoundState]:
    """Bound states on ``(alpha^2, beta0)``, lowest first."""
    al, b0 = params.alpha, params.beta0

    def step(b):
        return zero_spacing(b, al) / 8.0

    roots = scan_roots(lambda b: level_condition(params, b), al * al, b0, step, xtol=1e-12, max_roots=n_max)
    out = []
    for i, r in enumerate(roots):
        norm = _norm(params, r)
        k, kx, _, _ = _kk(al, r, scaled=False)
        kk = float(params.k(r))
        out.append(
            BoundState(
                n=i + 1,
                beta=r,
                energy=float(params.energy(r)),
                k=kk,
                C=1.0 / norm,
                F=k / norm,
                norm=norm,
                residual=abs(al * kx / (2.0 * params.sigma) - kk * k) / norm,
            )
        )
    return out


def well_zero_asymptotic(n: int, alpha: float) -> float:
    """Large-n zero of ``K_{i sqrt(b)}(alpha)`` in ``b`` through Lambert W.

    Solves ``-sqrt(b) + sqrt(b) log(2 sqrt(b) / alpha) = n pi`` exactly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return alpha ** 2 * math.e ** 2 / 4.0 * math.exp(2.0 * lambert_w(2.0 * n * math.pi / (alpha * math.e)))


def well_zero_log_form(n: int, alpha: float) -> float:
    """Cruder ``n^2 pi^2 / log^2(2 n pi / (alpha e))`` form of the same zeros."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n * math.pi) ** 2 / math.log(2.0 * n * math.pi / (alpha * math.e)) ** 2


def well_zero_refined(n: int, alpha: float) -> float:
    """Root of the full large-order phase ``alpha^2/(4 sqrt b) - sqrt b + sqrt b log(2 sqrt b/alpha) + pi/4 = n pi``.

    Keeps the two terms the Lambert-W form drops; noticeably closer to the
    exact zeros at moderate ``n``.
    """
    from scipy.optimize import brentq

    def g(rb):
        return alpha ** 2 / (4.0 * rb) - rb + rb * math.log(2.0 * rb / alpha) + math.pi / 4.0 - n * math.pi

    lo = math.sqrt(well_zero_asymptotic(max(n - 1, 1), alpha)) * 0.5
    lo = max(lo, alpha * math.e / 2.0)
    hi = math.sqrt(well_zero_asymptotic(n, alpha)) * 1.5
    while g(hi) < 0:
        hi *= 2.0
    return brentq(g, lo, hi, xtol=1e-14) ** 2


def level_spacing_asymptotic(n: int, alpha: float) -> float:
    """``2 n pi^2 / log^2(2 n pi / (alpha e))``, the n-derivative of :func:`well_zero_log_form`.

    Inherits the slow convergence of the log form; see :func:`level_spacing_local`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * n * math.pi ** 2 / math.log(2.0 * n * math.pi / (alpha * math.e)) ** 2


def level_spacing_local(beta: float, alpha: float) -> float:
    """``2 pi sqrt(b) / log(2 sqrt(b) / alpha)``, zero spacing near ``b`` from the phase derivative."""
    rb = math.sqrt(beta)
    return 2.0 * math.pi * rb / math.log(2.0 * rb / alpha)


def _check_continuum(params: StepExpParams, beta, gap: float = 0.0):
    arr, _ = as_array(beta)
    if np.any(arr - params.beta0 <= gap):
        raise ThresholdError(
            f"beta must exceed beta0 = {params.beta0} by more than {gap}; got min {arr.min()}"
        )
    return arr


def _ratio_parts(params: StepExpParams, b: float):
    k, kx, kb, kxb = _kk(params.alpha, b)
    return k, kx, kb, kxb, math.sqrt(b - params.beta0)


def phase_shift(params: StepExpParams, beta):
    """Continuous phase shift ``2 arctan[alpha K' / (sqrt(b - b0) K)]``.

    Lifted by ``2 pi`` at each zero of ``K_{i sqrt(b)}(alpha)`` above ``beta0``.
    """
    arr = _check_continuum(params, beta)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr)
    zeros = np.asarray(bessel_k_imag_zeros_below(float(flat.max()), params.alpha))
    base = int(np.searchsorted(zeros, params.beta0, side="right"))
    out = []
    for b in flat:
        k, kx, _, _, s = _ratio_parts(params, float(b))
        p = math.pi if k == 0.0 else 2.0 * math.atan(params.alpha * kx / (s * k))
        crossings = int(np.searchsorted(zeros, b, side="right")) - base
        out.append(unwrapped_phase(p, crossings))
    return out[0] if scalar else np.array(out)


def reflection_factor(params: StepExpParams, beta: float) -> complex:
    k, kx, _, _, s = _ratio_parts(params, float(beta))
    a = params.alpha
    return (1j * s * k - a * kx) / (1j * s * k + a * kx)


def delay_curve(params: StepExpParams, beta) -> np.ndarray:
    """``d delta / d beta``, i.e. the delay in units of ``8 m sigma^2 / hbar``.

    ``2 alpha [s (K'_b K - K' K_b) - K K' / (2 s)] / (s^2 K^2 + alpha^2 K'^2)``
    with ``s = sqrt(b - b0)``; finite at the zeros of ``K`` and ``K'``.
    """
    arr = _check_continuum(params, beta, THRESHOLD_GAP)
    a = params.alpha
    out = np.empty(arr.shape)
    flat = out.reshape(-1)
    for i, b in enumerate(np.atleast_1d(arr).ravel()):
        k, kx, kb, kxb, s = _ratio_parts(params, float(b))
        num = s * (kxb * k - kx * kb) - k * kx / (2.0 * s)
        flat[i] = 2.0 * a * num / (s * s * k * k + a * a * kx * kx)
    return out if arr.ndim else float(out)


def classical_delay(beta, alpha: float):
    """Time a classical particle spends left of the junction, units ``8 m sigma^2 / hbar``."""
    b = np.asarray(beta, dtype=float)
    return np.arctanh(np.sqrt(1.0 - alpha ** 2 / b)) / np.sqrt(b)


def classical_delay_asymptotic(beta, alpha: float):
    """Large-beta form ``log(2 sqrt(b) / alpha) / sqrt(b)``."""
    b = np.asarray(beta, dtype=float)
    return np.log(2.0 * np.sqrt(b) / alpha) / np.sqrt(b)


def delay(params: StepExpParams, beta: float) -> DelaySample:
    tau = float(delay_curve(params, float(beta)))
    return DelaySample(beta=float(beta), tau=tau, tau_classical=float(classical_delay(beta, params.alpha)))


def delay_asymptotic_ratio(beta: float, alpha: float) -> tuple[float, float]:
    """Large-beta forms of ``K'/K`` and ``d/dbeta log(K'/K)`` at argument ``alpha``.

    Returns ``(ratio, log_derivative)``. Raises ``ZeroDivisionError`` on a
    pole of the cotangent.
    """
    if beta < ASYMPTOTIC_BETA_MIN:
        raise ValueError(f"asymptotic forms need beta >= {ASYMPTOTIC_BETA_MIN}")
    rb = math.sqrt(beta)
    lg = math.log(2.0 * rb / alpha)
    phase = -rb + rb * lg + math.pi / 4.0
    sn = math.sin(phase)
    s2 = math.sin(2.0 * phase)
    if sn == 0.0 or s2 == 0.0:
        raise ZeroDivisionError(f"cotangent pole at beta = {beta}")
    ratio = -(rb / alpha) * math.cos(phase) / sn
    dlog = 1.0 / (2.0 * beta) - lg / (rb * s2)
    return ratio, dlog


def resonances(params: StepExpParams, beta_max: float, n_grid: int | None = None) -> list[Resonance]:
    """Peaks of the delay above the classical value, paired with the nearest zero of ``K'``."""
    b0, a = params.beta0, params.alpha
    if beta_max <= b0:
        raise ValueError("beta_max must exceed beta0")
    if n_grid is None:
        n_grid = int(max(200, 20 * (beta_max - b0)))
    lo = b0 + 1e-4 * max(1.0, beta_max - b0)
    peaks = find_peaks(
        lambda b: np.atleast_1d(delay_curve(params, b)), lambda b: classical_delay(b, a), lo, beta_max, n_grid
    )
    etas = list(bessel_k_imag_zeros_below(beta_max + zero_spacing(beta_max, a), a, "Kprime"))
    out = []
    for center, height, excess, width in peaks:
        j, eta = nearest(etas, center)
        out.append(Resonance(beta_center=center, eta_n=eta, n=j + 1, height=height, excess=excess, width=width))
    return out


def _left_k(params: StepExpParams, beta: float, x: np.ndarray):
    """``K`` and ``dK/dz`` at ``z = alpha exp(-x / 2 sigma)`` for ``x <= 0``."""
    s = math.sqrt(beta)
    z = params.alpha * np.exp(-np.minimum(x, 0.0) / (2.0 * params.sigma))
    # deep inside the barrier K underflows; zero is the right value there
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BesselUnderflowWarning)
        k = np.array([bessel_k_imag(s, zi) for zi in z.ravel()]).reshape(z.shape)
        kz = np.array([bessel_k_imag_dx(s, zi) for zi in z.ravel()]).reshape(z.shape)
    return z, k, kz


def scattering_state(params: StepExpParams, beta: float) -> ScatteringState:
    beta = float(_check_continuum(params, float(beta)))
    k, kx, _, _ = _kk(params.alpha, beta, scaled=False)
    kk = float(params.k(beta))
    Pi = 2.0 / (k + params.alpha * kx / (2j * kk * params.sigma))
    factor = reflection_factor(params, beta)
    delta = phase_shift(params, beta)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        right = np.exp(-1j * kk * x) + factor * np.exp(1j * kk * x)
        left = np.zeros(x.shape, dtype=complex)
        mask = x <= 0
        if np.any(mask):
            _, kv, _ = _left_k(params, beta, x[mask])
            left[mask] = Pi * kv
        return np.where(mask, left, right) / math.sqrt(2.0 * math.pi)

    return ScatteringState(k=kk, beta=beta, delta=delta, Pi=Pi, phase_factor=factor, evaluate=evaluate)


def eigenfunction(params: StepExpParams, state: BoundState | ScatteringState, x):
    """Bound or scattering eigenfunction at physical positions ``x``."""
    if isinstance(state, ScatteringState):
        return state(x)
    x = np.asarray(x, dtype=float)
    out = state.F * np.exp(-state.k * np.maximum(x, 0.0))
    mask = x <= 0
    if np.any(mask):
        _, kv, _ = _left_k(params, state.beta, x[mask])
        out = np.where(mask, 0.0, out)
        out[mask] = state.C * kv
    return out.astype(complex)


def eigenfunction_derivative(params: StepExpParams, state: BoundState | ScatteringState, x):
    """x-derivative of :func:`eigenfunction`; ``dz/dx = -z / 2 sigma`` on the left."""
    x = np.asarray(x, dtype=float)
    mask = x <= 0
    out = np.zeros(x.shape, dtype=complex)
    if isinstance(state, ScatteringState):
        kk = state.k
        out = (-1j * kk * np.exp(-1j * kk * x) + 1j * kk * state.phase_factor * np.exp(1j * kk * x)) / math.sqrt(
            2.0 * math.pi
        )
        amp = state.Pi / math.sqrt(2.0 * math.pi)
    else:
        out = (-state.k * state.F * np.exp(-state.k * np.maximum(x, 0.0))).astype(complex)
        amp = state.C
    if np.any(mask):
        z, _, kz = _left_k(params, state.beta, x[mask])
        out[mask] = -amp * kz * z / (2.0 * params.sigma)
    return out


__all__ = [
    "StepExpParams",
    "THRESHOLD_GAP",
    "bound_states",
    "classical_delay",
    "classical_delay_asymptotic",
    "delay",
    "delay_asymptotic_ratio",
    "delay_curve",
    "eigenfunction",
    "eigenfunction_derivative",
    "level_condition",
    "level_curves",
    "level_spacing_asymptotic",
    "level_spacing_local",
    "phase_shift",
    "reflection_factor",
    "resonances",
    "scattering_state",
    "well_zero_asymptotic",
    "well_zero_log_form",
    "well_zero_refined",
    "zero_spacing",
]
