"""Step-linear potential: ``U(x) = -M x`` for ``x <= 0`` and ``U0`` for ``x > 0``.

With ``alpha = (2 m M / hbar^2)^(1/3)`` and ``beta = alpha E / M`` the left
solution is ``Ai(-alpha x - beta)``. Delays are returned in units of
``alpha hbar / M``.
"""

from __future__ import annotations

import math
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
from .specfun import airy_ai, airy_zero, airy_zero_count

THRESHOLD_GAP = 1e-8


@dataclass(frozen=True)
class StepLinearParams:
    M: float
    U0: float
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("M", "U0", "m", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")

    @classmethod
    def from_dimensionless(cls, beta0: float, alpha: float = 1.0, m: float = 1.0, hbar: float = 1.0):
        """Parameters with a given step height ``beta0`` and inverse length ``alpha``."""
        M = alpha ** 3 * hbar ** 2 / (2.0 * m)
        return cls(M=M, U0=beta0 * M / alpha, m=m, hbar=hbar)

    @property
    def alpha(self) -> float:
        return (2.0 * self.m * self.M / self.hbar ** 2) ** (1.0 / 3.0)

    @property
    def beta0(self) -> float:
        return self.alpha * self.U0 / self.M

    @property
    def time_unit(self) -> float:
        return self.alpha * self.hbar / self.M

    def beta(self, energy):
        return self.alpha * np.asarray(energy) / self.M

    def energy(self, beta):
        return self.M * np.asarray(beta) / self.alpha

    def k(self, beta):
        """Wave number on the flat side, ``hbar k = sqrt(2 m |E - U0|)``."""
        return self.alpha * np.sqrt(np.abs(np.asarray(beta) - self.beta0))

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, -self.M * x, self.U0)


def _ai(beta):
    """``Ai(-beta)`` and ``Ai'(-beta)``."""
    return airy_ai(-np.asarray(beta, dtype=float))


def level_condition(params: StepLinearParams, beta):
    """``Ai'(-b) - sqrt(b0 - b) Ai(-b)``; zero exactly at the bound states."""
    a, ap = _ai(beta)
    return ap - np.sqrt(params.beta0 - np.asarray(beta)) * a


def level_curves(params: StepLinearParams, betas):
    """Both sides of the bound-state condition for a graphical solution."""
    betas = np.asarray(betas, dtype=float)
    a, ap = _ai(betas)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = ap / a
    return lhs, np.sqrt(np.clip(params.beta0 - betas, 0.0, None))


def _norm(params: StepLinearParams, beta: float) -> float:
    """L2 norm of the bound state with unit left amplitude.

    Uses ``int_z^inf Ai^2 = Ai'(z)^2 - z Ai(z)^2`` on the barrier side.
    """
    a, ap = (float(v) for v in _ai(beta))
    kk = float(params.k(beta))
    left = (ap ** 2 + beta * a ** 2) / params.alpha
    right = a ** 2 / (2.0 * kk)
    return math.sqrt(left + right)


def _bound_state(params: StepLinearParams, n: int, beta: float) -> BoundState:
    norm = _norm(params, beta)
    a, ap = (float(v) for v in _ai(beta))
    resid = abs(ap / a - math.sqrt(params.beta0 - beta))
    return BoundState(
        n=n,
        beta=beta,
        energy=float(params.energy(beta)),
        k=float(params.k(beta)),
        C=1.0 / norm,
        F=a / norm,
        norm=norm,
        residual=resid,
    )


def bound_states(params: StepLinearParams, n_max: int | None = None) -> list[BoundState]:
    """Bound states ordered by energy; all of them, or the lowest ``n_max``."""
    b0 = params.beta0

    def f(b):
        return float(level_condition(params, b))

    def step(b):
        n = max(1, airy_zero_count(b))
        spacing = (8.0 / (3.0 * n)) ** (1.0 / 3.0) * math.pi ** (2.0 / 3.0)
        return min(0.1, 0.5 * spacing)

    roots = scan_roots(f, 0.0, b0, step, xtol=1e-13, max_roots=n_max)
    return [_bound_state(params, i + 1, r) for i, r in enumerate(roots)]


def level_spacing_asymptotic(n: int) -> float:
    """Large-n spacing of the zeros of Ai(-b): ``(8 / 3n)^(1/3) pi^(2/3)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (8.0 / (3.0 * n)) ** (1.0 / 3.0) * math.pi ** (2.0 / 3.0)


def _check_continuum(params: StepLinearParams, beta, gap: float = 0.0):
    arr, _ = as_array(beta)
    if np.any(arr - params.beta0 <= gap):
        raise ThresholdError(
            f"beta must exceed beta0 = {params.beta0} by more than {gap}; got min {arr.min()}"
        )
    return arr


def _principal_phase(s, a, ap):
    """``2 arctan(Ai'/(s Ai))`` with the limit ``pi`` where Ai vanishes."""
    with np.errstate(divide="ignore", invalid="ignore"):
        p = 2.0 * np.arctan(ap / (s * a))
    return np.where(a == 0.0, math.pi, p)


def phase_shift(params: StepLinearParams, beta):
    """Reflection phase shift ``delta(beta)`` on its continuous branch.

    The principal value ``2 arctan[Ai'(-b) / (sqrt(b - b0) Ai(-b))]`` is
    lifted by ``2 pi`` at every zero of ``Ai(-b)`` above the threshold, so
    ``delta`` starts in ``(-pi, pi]`` at ``b0`` and increases with the
    accumulated delay.
    """
    arr = _check_continuum(params, beta)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    a, ap = _ai(arr)
    s = np.sqrt(arr - params.beta0)
    p = _principal_phase(s, a, ap)
    base = airy_zero_count(params.beta0)
    out = np.array([unwrapped_phase(pi_, airy_zero_count(b) - base) for pi_, b in zip(p, arr)])
    return float(out[0]) if scalar else out


def reflection_factor(params: StepLinearParams, beta) -> complex:
    """``e^{i delta}`` from the matching conditions, as a complex ratio."""
    a, ap = (float(v) for v in _ai(beta))
    kk = float(params.k(beta))
    al = params.alpha
    return (1j * kk * a - al * ap) / (1j * kk * a + al * ap)


def delay_curve(params: StepLinearParams, beta) -> np.ndarray:
    """Delay ``tau(beta)`` in units of ``alpha hbar / M``.

    Rational form free of Ai and Ai' denominators:
    ``2 s [b A^2 + A'^2 - A A' / (2 s^2)] / (s^2 A^2 + A'^2)``, ``s^2 = b - b0``.
    """
    arr = _check_continuum(params, beta, THRESHOLD_GAP)
    a, ap = _ai(arr)
    s2 = arr - params.beta0
    s = np.sqrt(s2)
    num = arr * a * a + ap * ap - a * ap / (2.0 * s2)
    den = s2 * a * a + ap * ap
    return 2.0 * s * num / den


def classical_delay(beta):
    """Time spent at ``x < 0`` by a classical particle, units of ``alpha hbar / M``."""
    return 2.0 * np.sqrt(np.asarray(beta, dtype=float))


def delay(params: StepLinearParams, beta: float) -> DelaySample:
    tau = float(delay_curve(params, float(beta)))
    return DelaySample(beta=float(beta), tau=tau, tau_classical=float(classical_delay(beta)))


def resonances(params: StepLinearParams, beta_max: float, n_grid: int | None = None) -> list[Resonance]:
    """Peaks of ``tau`` above the classical delay between ``beta0`` and ``beta_max``.

    Each is paired with the nearest zero ``eta_n`` of ``Ai'(-b)``.
    """
    b0 = params.beta0
    if beta_max <= b0:
        raise ValueError("beta_max must exceed beta0")
    if n_grid is None:
        n_grid = int(max(400, 400 * (beta_max - b0)))
    lo = b0 + 1e-4 * max(1.0, beta_max - b0)
    peaks = find_peaks(lambda b: delay_curve(params, b), classical_delay, lo, beta_max, n_grid)
    n_eta = airy_zero_count(beta_max + 2.0, "AiPrime") + 1
    etas = [airy_zero(j, "AiPrime") for j in range(1, n_eta + 1)]
    out = []
    for center, height, excess, width in peaks:
        j, eta = nearest(etas, center)
        out.append(Resonance(beta_center=center, eta_n=eta, n=j + 1, height=height, excess=excess, width=width))
    return out


def scattering_state(params: StepLinearParams, beta: float) -> ScatteringState:
    beta = float(_check_continuum(params, float(beta)))
    a, ap = (float(v) for v in _ai(beta))
    kk = float(params.k(beta))
    al = params.alpha
    Pi = 2.0 / (a + al * ap / (1j * kk))
    factor = reflection_factor(params, beta)
    delta = phase_shift(params, beta)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        left = np.minimum(x, 0.0)
        ai, _ = airy_ai(-al * left - beta)
        right = np.exp(-1j * kk * x) + factor * np.exp(1j * kk * x)
        return np.where(x <= 0, Pi * ai, right) / math.sqrt(2.0 * math.pi)

    return ScatteringState(k=kk, beta=beta, delta=delta, Pi=Pi, phase_factor=factor, evaluate=evaluate)


def eigenfunction(params: StepLinearParams, state: BoundState | ScatteringState, x):
    """Evaluate a bound or scattering eigenfunction at ``x`` (physical length)."""
    if isinstance(state, ScatteringState):
        return state(x)
    x = np.asarray(x, dtype=float)
    ai, _ = airy_ai(-params.alpha * np.minimum(x, 0.0) - state.beta)
    right = state.F * np.exp(-state.k * np.maximum(x, 0.0))
    return np.where(x <= 0, state.C * ai, right).astype(complex)


def eigenfunction_derivative(params: StepLinearParams, state: BoundState | ScatteringState, x):
    """Analytic x-derivative of :func:`eigenfunction` on either side of the junction."""
    x = np.asarray(x, dtype=float)
    al = params.alpha
    _, aip = airy_ai(-al * np.minimum(x, 0.0) - state.beta)
    if isinstance(state, ScatteringState):
        kk = state.k
        right = -1j * kk * np.exp(-1j * kk * x) + 1j * kk * state.phase_factor * np.exp(1j * kk * x)
        return np.where(x <= 0, -al * state.Pi * aip, right) / math.sqrt(2.0 * math.pi)
    right = -state.k * state.F * np.exp(-state.k * np.maximum(x, 0.0))
    return np.where(x <= 0, -al * state.C * aip, right).astype(complex)
