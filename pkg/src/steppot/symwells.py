"""Symmetric confining wells ``M |x|`` and ``kappa (exp(|x| / sigma) - 1)``.

Even levels sit at the zeros of the derivative of the decaying solution at
the origin, odd levels at the zeros of the solution itself. The two
families interlace, so the merged list alternates parity from an even
ground state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .specfun import (
    BesselUnderflowWarning,
    airy_ai,
    airy_zero,
    bessel_k_imag,
    bessel_k_imag_all,
    bessel_k_imag_dx,
    bessel_k_imag_zeros,
)

Parity = Literal["even", "odd"]


@dataclass(frozen=True)
class WellLevel:
    """One level of a symmetric well.

    ``alpha`` is the inverse length of the linear well or the dimensionless
    ``sqrt(8 m kappa sigma^2) / hbar`` of the exponential one; ``scale`` is the
    length that turns ``x`` into the dimensionless coordinate.
    """

    n: int
    parity: Parity
    beta: float
    energy: float
    kind: Literal["linear", "exponential"] = "linear"
    alpha: float = 1.0
    scale: float = 1.0
    norm: float = 1.0


def _merge(even: list[float], odd: list[float], n_max: int) -> list[tuple[str, float]]:
    pairs = [("even", b) for b in even] + [("odd", b) for b in odd]
    pairs.sort(key=lambda p: p[1])
    return pairs[:n_max]


def linear_well_levels(M: float, m: float = 1.0, hbar: float = 1.0, n_max: int = 10) -> list[WellLevel]:
    """Lowest ``n_max`` levels of ``U(x) = M |x|``; ``beta = alpha E / M``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if not (M > 0 and m > 0 and hbar > 0):
        raise ValueError("M, m and hbar must be positive")
    alpha = (2.0 * m * M / hbar ** 2) ** (1.0 / 3.0)
    half = n_max // 2 + 1
    even = [airy_zero(j, "AiPrime") for j in range(1, half + 1)]
    odd = [airy_zero(j, "Ai") for j in range(1, half + 1)]
    out = []
    for n, (parity, b) in enumerate(_merge(even, odd, n_max)):
        a, ap = (float(v) for v in airy_ai(-b))
        # int_0^inf Ai(y - b)^2 dy = Ai'(-b)^2 + b Ai(-b)^2, doubled for both halves
        norm = math.sqrt(2.0 * (ap * ap + b * a * a) / alpha)
        out.append(WellLevel(n, parity, b, M * b / alpha, "linear", alpha, 1.0 / alpha, norm))
    return out


def exp_well_levels(
    kappa: float, sigma: float, m: float = 1.0, hbar: float = 1.0, n_max: int = 10
) -> list[WellLevel]:
    """Lowest ``n_max`` levels of ``kappa (exp(|x|/sigma) - 1)``.

    ``E = hbar^2 beta / (8 m sigma^2) - kappa``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if not (kappa > 0 and sigma > 0 and m > 0 and hbar > 0):
        raise ValueError("kappa, sigma, m and hbar must be positive")
    unit = hbar ** 2 / (8.0 * m * sigma ** 2)
    alpha = math.sqrt(kappa / unit)
    half = n_max // 2 + 1
    even = list(bessel_k_imag_zeros(half, alpha, "Kprime"))
    odd = list(bessel_k_imag_zeros(half, alpha, "K"))
    out = []
    for n, (parity, b) in enumerate(_merge(even, odd, n_max)):
        v = bessel_k_imag_all(b, alpha)
        half_norm = 2.0 * sigma * alpha * (v["K"] * v["Kxb"] - v["Kb"] * v["Kx"])
        norm = math.sqrt(2.0 * half_norm)
        out.append(WellLevel(n, parity, b, unit * b - kappa, "exponential", alpha, 2.0 * sigma, norm))
    return out


def _decaying(level: WellLevel, y: np.ndarray):
    """Decaying solution and its derivative in the dimensionless coordinate ``y >= 0``."""
    if level.kind == "linear":
        a, ap = airy_ai(y - level.beta)
        return np.asarray(a, dtype=float), np.asarray(ap, dtype=float)
    s = math.sqrt(level.beta)
    z = level.alpha * np.exp(y)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BesselUnderflowWarning)
        k = np.array([bessel_k_imag(s, zi) for zi in z.ravel()]).reshape(z.shape)
        kz = np.array([bessel_k_imag_dx(s, zi) for zi in z.ravel()]).reshape(z.shape)
    return k, kz * z


def well_eigenfunction(level: WellLevel, x) -> np.ndarray:
    """Normalised eigenfunction of ``level`` at physical positions ``x``."""
    x = np.asarray(x, dtype=float)
    u, _ = _decaying(level, np.abs(x) / level.scale)
    if level.parity == "odd":
        u = np.sign(x) * u
    return u / level.norm


def well_eigenfunction_derivative(level: WellLevel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _, du = _decaying(level, np.abs(x) / level.scale)
    du = du / level.scale
    if level.parity == "even":
        du = np.sign(x) * du
    return du / level.norm


__all__ = [
    "WellLevel",
    "exp_well_levels",
    "linear_well_levels",
    "well_eigenfunction",
    "well_eigenfunction_derivative",
]
