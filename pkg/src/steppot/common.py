"""State containers and numerical helpers shared by the two step potentials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar


class ThresholdError(ValueError):
    """Energy too close to (or below) the step height for a scattering quantity."""


class RootFindingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BoundState:
    """Normalised bound state below the step.

    ``C`` multiplies the left (barrier) solution, ``F`` the decaying
    exponential ``exp(-k x)`` on the right; ``norm`` is the L2 norm of the
    eigenfunction with the left amplitude set to 1.
    """

    n: int
    beta: float
    energy: float
    k: float
    C: float
    F: float
    norm: float
    residual: float = 0.0


@dataclass(frozen=True)
class ScatteringState:
    """Improper eigenfunction above the step, normalised in k.

    Right of the junction ``u = (exp(-ikx) + exp(ikx + i delta)) / sqrt(2 pi)``;
    left of it ``u = Pi * f(x) / sqrt(2 pi)`` with ``f`` the decaying
    barrier solution.
    """

    k: float
    beta: float
    delta: float
    Pi: complex
    phase_factor: complex
    evaluate: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def __call__(self, x):
        return self.evaluate(x)


@dataclass(frozen=True)
class DelaySample:
    beta: float
    tau: float
    tau_classical: float


@dataclass(frozen=True)
class Resonance:
    beta_center: float
    eta_n: float
    n: int
    height: float
    excess: float
    width: float


def scan_roots(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    step: Callable[[float], float],
    tail: float = 0.05,
    xtol: float = 1e-12,
    max_roots: int | None = None,
) -> list[float]:
    """All sign changes of ``f`` on ``(lo, hi)``, refined by Brent's method.

    The grid uses ``step(x)`` away from ``hi``; the last ``tail`` fraction of
    the interval is covered geometrically towards ``hi`` so roots crowding
    the threshold are not skipped.
    """
    if hi <= lo:
        return []
    cut = hi - tail * (hi - lo)
    gap = hi - cut

    def points():
        x = lo + 1e-12 * max(1.0, abs(lo))
        yield x
        while True:
            x = x + step(x)
            if x >= cut:
                break
            yield x
        for y in hi - gap * 0.5 ** np.arange(0, 40):
            if y > x:
                yield float(y)

    roots: list[float] = []
    grid = points()
    prev_x = next(grid)
    prev_f = f(prev_x)
    for x in grid:
        if max_roots is not None and len(roots) >= max_roots:
            break
        cur = f(x)
        if prev_f == 0.0:
            roots.append(prev_x)
        elif prev_f * cur < 0:
            try:
                roots.append(brentq(f, prev_x, x, xtol=xtol, rtol=1e-15))
            except (ValueError, RuntimeError) as exc:
                raise RootFindingError(f"root refinement failed in [{prev_x}, {x}]: {exc}") from exc
        prev_x, prev_f = x, cur
    return roots


def unwrapped_phase(principal: float, n_crossings: int) -> float:
    """Continuous phase shift from its principal value ``2 arctan(.)`` in (-pi, pi]."""
    return principal + 2.0 * math.pi * n_crossings


def find_peaks(
    tau: Callable[[np.ndarray], np.ndarray],
    baseline: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    n_grid: int,
) -> list[tuple[float, float, float, float]]:
    """Local maxima of ``tau`` above ``baseline`` on ``(lo, hi)``.

    Returns ``(center, height, excess, fwhm)`` per peak; the width is the full
    width at half of the excess over the baseline, NaN when a half-height
    crossing falls outside ``(lo, hi)``.
    """
    betas = np.linspace(lo, hi, n_grid)
    t = tau(betas)
    excess = t - baseline(betas)
    peaks = []
    for i in range(1, n_grid - 1):
        if not (t[i] > t[i - 1] and t[i] >= t[i + 1] and excess[i] > 0):
            continue
        res = minimize_scalar(
            lambda b: -float(tau(np.array([b]))[0]),
            bounds=(betas[i - 1], betas[i + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        center = float(res.x)
        height = float(-res.fun)
        ex = height - float(baseline(np.array([center]))[0])
        half = 0.5 * ex

        def g(b):
            return float(tau(np.array([b]))[0] - baseline(np.array([b]))[0]) - half

        left = right = math.nan
        j = i
        while j > 0 and excess[j] > half:
            j -= 1
        if excess[j] <= half:
            left = brentq(g, betas[j], center)
        j = i
        while j < n_grid - 1 and excess[j] > half:
            j += 1
        if excess[j] <= half:
            right = brentq(g, center, betas[j])
        peaks.append((center, height, ex, right - left))
    return peaks


def as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def nearest(values: Sequence[float], x: float) -> tuple[int, float]:
    i = int(np.argmin(np.abs(np.asarray(values) - x)))
    return i, float(values[i])
