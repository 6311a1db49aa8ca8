"""Special-function kernel.

Airy functions (Maclaurin series, large-argument expansions, contour
integrals), modified Bessel functions of imaginary order ``K_{is}(x)`` with
their argument and order derivatives, the principal Lambert W branch, and
zero finders for all of them.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "AiryPair",
    "AsymptoticCoefficients",
    "ContourPath",
    "Leg",
    "AiryOverflowError",
    "ContourConvergenceError",
    "BesselUnderflowWarning",
    "AI0",
    "AIP0",
    "BI0",
    "BIP0",
    "airy",
    "airy_ai",
    "airy_asymptotic_negative",
    "asymptotic_coefficients",
    "contour_path",
    "airy_contour",
    "bessel_k_imag",
    "bessel_k_imag_dx",
    "bessel_k_imag_with_error",
    "bessel_k_imag_ds",
    "bessel_k_imag_dbeta",
    "bessel_k_imag_all",
    "bessel_k_real_order",
    "bessel_k_imag_asymptotic",
    "bessel_k_imag_phase",
    "bessel_k_imag_zero",
    "bessel_k_imag_zeros",
    "bessel_k_imag_zeros_below",
    "airy_zero_count",
    "lambert_w",
    "airy_zero",
    "airy_zero_approx",
]

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
BI0 = math.sqrt(3.0) * AI0
BIP0 = -math.sqrt(3.0) * AIP0

# regime seams for airy(); see README for the accuracy study behind them
SERIES_MIN = -5.0
SERIES_MAX = 3.0
ASYMPTOTIC_POS = 8.0
ASYMPTOTIC_NEG = -8.0

_LOG_MAX = 709.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


class AiryOverflowError(OverflowError):
    """Bi(x) or Bi'(x) is not representable in double precision."""


class ContourConvergenceError(ArithmeticError):
    """Doubling the quadrature order moved a contour integral too far."""


class BesselUnderflowWarning(RuntimeWarning):
    """K_{is}(x) is below the smallest representable double and returned as 0."""


# ---------------------------------------------------------------------------
# Airy functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AiryPair:
    """Ai, Ai', Bi, Bi' at one real point, tagged with the regime used."""

    x: float
    ai: float
    ai_prime: float
    bi: float
    bi_prime: float
    method: str

    @property
    def wronskian(self) -> float:
        return self.ai * self.bi_prime - self.ai_prime * self.bi


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Coefficients of the oscillatory expansions of Ai(-b) and Ai'(-b).

    ``c[k] = Gamma(3k + 1/2) / (54^k k! Gamma(k + 1/2))`` and
    ``d[k] = -(6k + 1)/(6k - 1) c[k]``.
    """

    c: tuple[float, ...]
    d: tuple[float, ...]
    order: int


@lru_cache(maxsize=None)
def asymptotic_coefficients(order: int = 40) -> AsymptoticCoefficients:
    if order < 1:
        raise ValueError("order must be >= 1")
    c = []
    for k in range(order):
        # log form keeps large k finite
        lg = math.lgamma(3 * k + 0.5) - k * math.log(54.0) - math.lgamma(k + 1) - math.lgamma(k + 0.5)
        c.append(math.exp(lg))
    d = [-(6 * k + 1) / (6 * k - 1) * ck for k, ck in enumerate(c)]
    return AsymptoticCoefficients(c=tuple(c), d=tuple(d), order=order)


def _series(x: np.ndarray):
    """Maclaurin series for Ai, Ai', Bi, Bi'.

    ``Ai = c1 f - c2 g`` and ``Bi = sqrt(3) (c1 f + c2 g)`` with
    ``f = sum a_k x^{3k}``, ``g = sum b_k x^{3k+1}``.
    """
    x = np.asarray(x, dtype=float)
    x3 = x ** 3
    f = np.ones_like(x)
    g = x.copy()
    fp = np.zeros_like(x)
    gp = np.ones_like(x)
    tf = np.ones_like(x)
    tg = x.copy()
    tfp = x * x / 2.0  # 3 a_1 x^2
    tgp = np.ones_like(x)
    for k in range(1, 80):
        tf = tf * x3 / ((3 * k - 1) * (3 * k))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        tgp = tgp * x3 / ((3 * k - 2) * (3 * k))
        if k > 1:
            tfp = tfp * x3 / ((3 * k - 3) * (3 * k - 1))
        f += tf
        g += tg
        fp += tfp
        gp += tgp
        small = 1e-18 * (np.abs(f) + np.abs(g) + 1.0)
        if np.all(np.abs(tf) + np.abs(tg) + np.abs(tfp) + np.abs(tgp) < small):
            break
    c1, c2 = AI0, -AIP0
    s3 = math.sqrt(3.0)
    return (c1 * f - c2 * g, c1 * fp - c2 * gp, s3 * (c1 * f + c2 * g), s3 * (c1 * fp + c2 * gp))


def _sum_to_smallest(terms: Iterable[float]) -> float:
    """Sum an asymptotic series, stopping before the terms start to grow."""
    total = 0.0
    prev = math.inf
    for t in terms:
        if abs(t) > prev:
            break
        total += t
        prev = abs(t)
        if prev < 1e-17 * abs(total):
            break
    return total


def _asymptotic_negative_full(beta: float):
    """Ai, Ai', Bi, Bi' at -beta for large beta, each series cut at its smallest term."""
    co = asymptotic_coefficients()
    zeta = 2.0 * beta ** 1.5 / 3.0
    n = co.order // 2
    ce = _sum_to_smallest((-1) ** k * co.c[2 * k] / zeta ** (2 * k) for k in range(n))
    codd = _sum_to_smallest((-1) ** k * co.c[2 * k + 1] / zeta ** (2 * k + 1) for k in range(n))
    de = _sum_to_smallest((-1) ** k * co.d[2 * k] / zeta ** (2 * k) for k in range(n))
    dodd = _sum_to_smallest((-1) ** k * co.d[2 * k + 1] / zeta ** (2 * k + 1) for k in range(n))
    sp, cp = math.sin(zeta + math.pi / 4), math.cos(zeta + math.pi / 4)
    pre = 1.0 / (math.sqrt(math.pi) * beta ** 0.25)
    prep = beta ** 0.25 / math.sqrt(math.pi)
    ai = pre * (sp * ce - cp * codd)
    aip = -prep * (cp * de + sp * dodd)
    bi = pre * (cp * ce + sp * codd)
    bip = prep * (sp * de - cp * dodd)
    return ai, aip, bi, bip


def _asymptotic_positive_full(x: float, want_bi: bool):
    co = asymptotic_coefficients()
    zeta = 2.0 * x ** 1.5 / 3.0
    u_alt = _sum_to_smallest((-1) ** k * co.c[k] / zeta ** k for k in range(co.order))
    v_alt = _sum_to_smallest((-1) ** k * co.d[k] / zeta ** k for k in range(co.order))
    q = x ** 0.25
    ai = math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * q) * u_alt
    aip = -q * math.exp(-zeta) / (2.0 * math.sqrt(math.pi)) * v_alt
    if not want_bi:
        return ai, aip, math.nan, math.nan
    if zeta > _LOG_MAX:
        raise AiryOverflowError(f"Bi({x}) overflows double precision")
    u = _sum_to_smallest(co.c[k] / zeta ** k for k in range(co.order))
    v = _sum_to_smallest(co.d[k] / zeta ** k for k in range(co.order))
    bi = math.exp(zeta) / (math.sqrt(math.pi) * q) * u
    bip = q * math.exp(zeta) / math.sqrt(math.pi) * v
    return ai, aip, bi, bip


def airy_asymptotic_negative(beta: float, n_terms: int) -> tuple[float, float]:
    """Truncated oscillatory expansions of Ai(-beta) and Ai'(-beta).

    ``n_terms`` is the number of terms kept in each of the even and odd
    sums, so ``n_terms=1`` keeps ``c_0, c_1`` (``d_0, d_1``).
    """
    if not beta >= 1.0:
        raise ValueError("expansion is only used for beta >= 1")
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    co = asymptotic_coefficients(max(40, 2 * n_terms + 2))
    zeta = 2.0 * beta ** 1.5 / 3.0
    ce = sum((-1) ** k * co.c[2 * k] / zeta ** (2 * k) for k in range(n_terms))
    codd = sum((-1) ** k * co.c[2 * k + 1] / zeta ** (2 * k + 1) for k in range(n_terms))
    de = sum((-1) ** k * co.d[2 * k] / zeta ** (2 * k) for k in range(n_terms))
    dodd = sum((-1) ** k * co.d[2 * k + 1] / zeta ** (2 * k + 1) for k in range(n_terms))
    sp, cp = math.sin(zeta + math.pi / 4), math.cos(zeta + math.pi / 4)
    ai = (sp * ce - cp * codd) / (math.sqrt(math.pi) * beta ** 0.25)
    aip = -(beta ** 0.25) / math.sqrt(math.pi) * (cp * de + sp * dodd)
    return ai, aip


# ---------------------------------------------------------------------------
# Contour integrals for the Airy equation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Leg:
    """One straight piece of a contour.

    A finite leg runs from ``start`` to ``end``. A ray leaves ``start`` in
    direction ``direction``; ``outward=False`` means it is traversed from
    infinity towards ``start``.
    """

    start: complex
    end: complex | None = None
    direction: complex | None = None
    outward: bool = True

    @property
    def is_ray(self) -> bool:
        return self.end is None


@dataclass(frozen=True)
class ContourPath:
    label: str
    legs: tuple[Leg, ...]
    truncation_radius: float = math.inf

    def asymptotic_phases(self) -> list[float]:
        """Phases of the unbounded legs, measured as the path recedes to infinity."""
        return [math.atan2(leg.direction.imag, leg.direction.real) for leg in self.legs if leg.is_ray]


_E_UP = complex(math.cos(math.pi / 3), math.sin(math.pi / 3))
_E_DOWN = _E_UP.conjugate()


def contour_path(label: str, w: float) -> ContourPath:
    """Saddle-adapted representative of one of the three Airy path classes.

    ``w = beta + y`` is the coefficient of ``t`` in the exponent
    ``t^3/3 + w t``. Gamma1 runs from -inf to inf*e^{i pi/3}, Gamma2 from
    inf*e^{-i pi/3} to -inf, Gamma3 from inf*e^{-i pi/3} to inf*e^{i pi/3}.
    """
    if w >= 0:
        b = math.sqrt(w)
        lo, hi = complex(0, -b), complex(0, b)
        left = 0j
    else:
        a = math.sqrt(-w)
        lo = hi = complex(a, 0)
        left = complex(-a, 0)
    if label == "Gamma1":
        legs = [Leg(left, direction=-1 + 0j, outward=False)]
        if left != hi:
            legs.append(Leg(left, end=hi))
        legs.append(Leg(hi, direction=_E_UP))
    elif label == "Gamma2":
        legs = [Leg(lo, direction=_E_DOWN, outward=False)]
        if lo != left:
            legs.append(Leg(lo, end=left))
        legs.append(Leg(left, direction=-1 + 0j))
    elif label == "Gamma3":
        legs = [Leg(lo, direction=_E_DOWN, outward=False)]
        if lo != hi:
            legs.append(Leg(lo, end=hi))
        legs.append(Leg(hi, direction=_E_UP))
    else:
        raise ValueError(f"unknown Airy contour {label!r}")
    return ContourPath(label=label, legs=tuple(legs))


def _airy_exponent(t, w):
    return t ** 3 / 3.0 + w * t


def _ray_length(start: complex, d: complex, w: float, drop: float = 46.0) -> float:
    """Radius beyond which the integrand is ``e^{-drop}`` below its leg maximum."""
    r = np.linspace(0.0, 1.0, 65)
    scale = 1.0
    while True:
        re = np.real(_airy_exponent(start + r * scale * d, w))
        if re[-1] < re.max() - drop and re[-1] < re[-2]:
            break
        scale *= 2.0
    keep = np.nonzero(re >= re.max() - drop)[0][-1]
    return float(r[min(keep + 1, r.size - 1)] * scale)


def _panels(length: float, freq: float, n_quad: int) -> int:
    return max(1, int(math.ceil(n_quad / 24)), int(math.ceil(length * freq / math.pi)), int(math.ceil(length / 0.5)))


def _leg_nodes(leg: Leg, w: float, n_quad: int):
    """Points, oriented weights and the length of the leg actually integrated."""
    if leg.is_ray:
        d = leg.direction
        length = _ray_length(leg.start, d, w)
        a, b = leg.start, leg.start + length * d
    else:
        a, b = leg.start, leg.end
        length = abs(b - a)
    d = (b - a) / length if length > 0 else 1.0
    probe = a + np.linspace(0, 1, 33) * (b - a)
    freq = float(np.max(np.abs(probe ** 2 + w)))
    npan = _panels(length, freq, n_quad)
    edges = np.linspace(0.0, length, npan + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    r = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
    wt = 0.5 * (hi - lo) * _GL_WEIGHTS
    t = (a + r * d).ravel()
    wts = (wt * d).ravel()
    if leg.is_ray and not leg.outward:
        wts = -wts
    return t, wts, length


def _contour_moments(path: ContourPath, w: float, n_quad: int, powers: Sequence[int] = (0,)):
    """Integrals of ``t^p exp(t^3/3 + w t)`` along the path for each p."""
    out = np.zeros(len(powers), dtype=complex)
    for leg in path.legs:
        t, wts, _ = _leg_nodes(leg, w, n_quad)
        e = np.exp(_airy_exponent(t, w)) * wts
        for i, p in enumerate(powers):
            out[i] += np.sum(e * t ** p) if p else np.sum(e)
    return out


def airy_contour(y: float, beta: float, path: ContourPath | str, n_quad: int = 64, tol: float = 1e-11) -> complex:
    """Contour-integral solution ``int exp(t^3/3 + (beta + y) t) dt`` of the Airy equation.

    ``(E(Gamma1) + E(Gamma2)) / (2 pi i)`` equals ``Ai(-y - beta)`` and
    ``(E(Gamma1) - E(Gamma2)) / (2 pi)`` equals ``Bi(-y - beta)``.
    """
    if n_quad < 64:
        raise ValueError("n_quad must be >= 64")
    w = float(beta) + float(y)
    if isinstance(path, str):
        path = contour_path(path, w)
    if path.label not in ("Gamma1", "Gamma2", "Gamma3"):
        raise ValueError("airy_contour takes an Airy path")
    with np.errstate(over="ignore", invalid="ignore"):
        coarse = _contour_moments(path, w, n_quad)[0]
        fine = _contour_moments(path, w, 2 * n_quad)[0]
    if not (cmath.isfinite(coarse) and cmath.isfinite(fine)):
        raise ContourConvergenceError(f"contour integrand overflows at beta + y = {w}")
    scale = max(abs(fine), 1.0)
    if abs(fine - coarse) > tol * scale:
        raise ContourConvergenceError(
            f"contour quadrature not converged: |E(2n) - E(n)| = {abs(fine - coarse):.3e}"
        )
    return complex(fine)


def _airy_by_contour(x: float, want_bi: bool = True):
    w = -x
    e0, e1 = _contour_moments(contour_path("Gamma1", w), w, 96, powers=(0, 1))
    # d/dx of exp(t^3/3 - x t) brings down -t
    ai = e0.imag / math.pi
    aip = -e1.imag / math.pi
    if not want_bi:
        return ai, aip, math.nan, math.nan
    return ai, aip, e0.real / math.pi, -e1.real / math.pi


def airy(x: float, want: Iterable[str] = ("Ai", "Ai'", "Bi", "Bi'")) -> AiryPair:
    """Ai, Ai', Bi, Bi' at real ``x``.

    Regimes: Maclaurin series on [-5, 3]; contour integrals through the
    saddle points on (3, 8) and (-8, -5); large-argument expansions
    beyond. Raises :class:`AiryOverflowError` if Bi is requested where it
    overflows; unrequested overflowing members come back as NaN.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    want = set(want)
    want_bi = bool(want & {"Bi", "Bi'", "Bi′"})
    if SERIES_MIN <= x <= SERIES_MAX:
        vals = [float(v[0]) for v in _series(np.array([x]))]
        return AiryPair(x, vals[0], vals[1], vals[2], vals[3], "series")
    if x <= ASYMPTOTIC_NEG:
        ai, aip, bi, bip = _asymptotic_negative_full(-x)
        return AiryPair(x, ai, aip, bi, bip, "asymptotic_negative")
    if x >= ASYMPTOTIC_POS:
        overflow = 2.0 * x ** 1.5 / 3.0 > _LOG_MAX
        ai, aip, bi, bip = _asymptotic_positive_full(x, want_bi or not overflow)
        return AiryPair(x, ai, aip, bi, bip, "asymptotic_positive")
    ai, aip, bi, bip = _airy_by_contour(x)
    return AiryPair(x, ai, aip, bi, bip, "contour")


def airy_ai(x) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised Ai(x), Ai'(x) over an array of real points."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    ser = (flat >= SERIES_MIN) & (flat <= SERIES_MAX)
    if ser.any():
        a, ap, _, _ = _series(flat[ser])
        ai[ser], aip[ser] = a, ap
    for i in np.nonzero(~ser)[0]:
        xi = flat[i]
        if xi <= ASYMPTOTIC_NEG:
            a, ap, _, _ = _asymptotic_negative_full(-xi)
        elif xi >= ASYMPTOTIC_POS:
            if 2.0 * xi ** 1.5 / 3.0 > 745.0:
                a = ap = 0.0
            else:
                a, ap, _, _ = _asymptotic_positive_full(xi, False)
        else:
            a, ap, _, _ = _airy_by_contour(xi, want_bi=False)
        ai[i], aip[i] = a, ap
    return ai.reshape(x.shape), aip.reshape(x.shape)


# ---------------------------------------------------------------------------
# Modified Bessel functions of imaginary order
# ---------------------------------------------------------------------------


def _check_bessel_args(s: float, x: float) -> None:
    if not (math.isfinite(s) and math.isfinite(x)):
        raise ValueError("order and argument must be finite")
    if x <= 0:
        raise ValueError("argument must be positive")


def _k_line(s: float, x: float, want: Sequence[str]):
    """Integrals of ``K_{is}(x)`` and friends along a horizontal contour.

    ``K_{is}(x) = (1/2) int_R exp(-x cosh t + i s t) dt``; the line is lifted
    to ``Im t = theta`` (through the saddle when ``s < x``, otherwise close
    to ``pi/2``) so the integrand magnitude never exceeds the result by
    more than a factor of order e. Returns (values, log_scale): each true
    value is ``values[j] * exp(log_scale)``.
    """
    s = abs(s)
    if s < x:
        theta = math.asin(s / x)
    else:
        theta = math.pi / 2
    eps = min(0.6, 2.0 / s) if s > 0 else 0.6
    theta = min(theta, math.pi / 2 - eps)
    c, sn = math.cos(theta), math.sin(theta)
    top = math.acosh(1.0 + 60.0 / (x * c))

    def phase(u):
        return s * u + x * sn * np.sinh(u)

    # panel edges equidistributed in accumulated phase plus arc length
    total = phase(top) / math.pi + top / 0.5
    npan = max(4, int(math.ceil(total)))
    u = np.linspace(0.0, top, 16 * npan + 1)
    cum = phase(u) / math.pi + u / 0.5
    edges = np.interp(np.linspace(0.0, cum[-1], npan + 1), cum, u)
    lo, hi = edges[:-1, None], edges[1:, None]
    uu = (0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)).ravel()
    ww = (0.5 * (hi - lo) * _GL_WEIGHTS).ravel()
    t = uu + 1j * theta
    log_scale = -x * c - s * theta
    ch = np.cosh(t)
    e = np.exp(-x * ch + 1j * s * t - log_scale) * ww
    out = {}
    for name in want:
        if name == "K":
            out[name] = np.sum(e).real
        elif name == "Kx":
            out[name] = -np.sum(ch * e).real
        elif name == "Ks":
            out[name] = np.sum(1j * t * e).real
        elif name == "Kxs":
            out[name] = -np.sum(1j * t * ch * e).real
        elif name == "Kss":
            out[name] = -np.sum(t * t * e).real
        elif name == "Kxx":
            out[name] = np.sum(ch * ch * e).real
    return out, log_scale


def _k_real_axis_small_order(s: float, x: float):
    """d/dbeta of K and K' on the real axis for tiny s, using sin(st)/s = t sinc."""
    top = math.acosh(1.0 + 60.0 / x)
    npan = max(4, int(math.ceil(top / 0.25)))
    edges = np.linspace(0.0, top, npan + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    t = (0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)).ravel()
    w = (0.5 * (hi - lo) * _GL_WEIGHTS).ravel()
    e = np.exp(-x * (np.cosh(t) - 1.0)) * w
    sinc = t * np.sinc(s * t / math.pi)  # sin(st)/s
    # dK/dbeta = (1/2s) dK/ds with dK/ds = -int t e sin(st)
    kb = -0.5 * np.sum(t * sinc * e)
    kxb = 0.5 * np.sum(t * np.cosh(t) * sinc * e)
    return kb, kxb, -x


def _rescale(value: float, log_scale: float, what: str) -> float:
    if value == 0.0:
        return 0.0
    lv = log_scale + math.log(abs(value))
    if lv < -745.0:
        warnings.warn(
            f"{what} underflows (log|value| = {lv:.1f}); returning 0", BesselUnderflowWarning, stacklevel=3
        )
        return 0.0
    return value * math.exp(log_scale)


def bessel_k_imag(s: float, x: float) -> float:
    """``K_{is}(x) = int_0^inf exp(-x cosh t) cos(s t) dt``."""
    _check_bessel_args(s, x)
    vals, ls = _k_line(s, x, ("K",))
    return _rescale(vals["K"], ls, f"K_i{s}({x})")


def bessel_k_imag_with_error(s: float, x: float) -> tuple[float, float]:
    """``K_{is}(x)`` with a rounding-error estimate.

    The contour keeps the integrand below about ``e`` times ``exp(log_scale)``,
    so cancellation costs at most a few ulps of that scale per unit length.
    """
    _check_bessel_args(s, x)
    vals, ls = _k_line(s, x, ("K",))
    value = _rescale(vals["K"], ls, f"K_i{s}({x})")
    length = math.acosh(1.0 + 60.0 / x) + 1.0
    return value, 4.0 * np.finfo(float).eps * math.e * length * math.exp(max(ls, -745.0))


def bessel_k_imag_dx(s: float, x: float) -> float:
    """Derivative of ``K_{is}(x)`` with respect to ``x``."""
    _check_bessel_args(s, x)
    vals, ls = _k_line(s, x, ("Kx",))
    return _rescale(vals["Kx"], ls, f"K'_i{s}({x})")


def bessel_k_imag_ds(s: float, x: float) -> float:
    """Derivative of ``K_{is}(x)`` with respect to the order parameter ``s``."""
    _check_bessel_args(s, x)
    vals, ls = _k_line(s, x, ("Ks",))
    return math.copysign(1.0, s) * _rescale(vals["Ks"], ls, "dK/ds")


def bessel_k_imag_dbeta(beta: float, x: float) -> float:
    """``d/dbeta K_{i sqrt(beta)}(x)``; finite as ``beta -> 0+``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return bessel_k_imag_all(beta, x)["Kb"]


@lru_cache(maxsize=1 << 16)
def _k_all_cached(beta: float, x: float):
    s = math.sqrt(beta)
    vals, ls = _k_line(s, x, ("K", "Kx", "Ks", "Kxs"))
    if s < 1e-3:
        kb, kxb, ls2 = _k_real_axis_small_order(s, x)
        kb, kxb = kb * math.exp(ls2 - ls), kxb * math.exp(ls2 - ls)
    else:
        kb = vals["Ks"] / (2.0 * s)
        kxb = vals["Kxs"] / (2.0 * s)
    return vals["K"], vals["Kx"], kb, kxb, ls


def bessel_k_imag_all(beta: float, x: float, scaled: bool = False) -> dict:
    """``K``, ``K'`` and their beta-derivatives for order ``i sqrt(beta)``.

    Keys ``K``, ``Kx``, ``Kb``, ``Kxb``. With ``scaled=True`` the common
    factor ``exp(log_scale)`` is left out and returned under ``log_scale``;
    ratios such as ``K'/K`` do not need it.
    """
    if not beta >= 0:
        raise ValueError("beta must be non-negative")
    _check_bessel_args(math.sqrt(beta), x)
    if beta == 0:
        beta = 1e-300
    k, kx, kb, kxb, ls = _k_all_cached(float(beta), float(x))
    if scaled:
        return {"K": k, "Kx": kx, "Kb": kb, "Kxb": kxb, "log_scale": ls}
    f = math.exp(ls) if ls > -745.0 else 0.0
    return {"K": k * f, "Kx": kx * f, "Kb": kb * f, "Kxb": kxb * f, "log_scale": 0.0}


def bessel_k_real_order(nu: float, z: float, n_panels: int = 200) -> float:
    """``K_nu(z)`` for real ``nu > -1/2`` from the ``sinh(t)^{2 nu}`` kernel.

    ``K_nu(z) = sqrt(pi) (z/2)^nu / Gamma(nu + 1/2) int_0^inf exp(-z cosh t) sinh(t)^{2nu} dt``.
    Used to cross-check the cosine-transform route at real order.
    """
    if nu <= -0.5:
        raise ValueError("nu must exceed -1/2")
    top = math.acosh(1.0 + 80.0 / z)
    # t^(2 nu) endpoint behaviour: grade panels towards 0
    edges = top * np.linspace(0.0, 1.0, n_panels + 1) ** 2
    lo, hi = edges[:-1, None], edges[1:, None]
    t = (0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)).ravel()
    w = (0.5 * (hi - lo) * _GL_WEIGHTS).ravel()
    integral = np.sum(w * np.exp(-z * np.cosh(t)) * np.sinh(t) ** (2 * nu))
    return float(math.sqrt(math.pi) * (z / 2.0) ** nu / math.gamma(nu + 0.5) * integral)


def bessel_k_imag_phase(beta: float, alpha: float) -> float:
    """Phase of the sine factor in the large-order form of ``K_{i sqrt(beta)}(alpha)``."""
    rb = math.sqrt(beta)
    return alpha ** 2 / (4.0 * rb) - rb + rb * math.log(2.0 * rb / alpha) + math.pi / 4.0


ASYMPTOTIC_BETA_MIN = 25.0


def bessel_k_imag_asymptotic(beta: float, alpha: float) -> float:
    """Leading large-order approximation of ``K_{i sqrt(beta)}(alpha)``."""
    if beta < ASYMPTOTIC_BETA_MIN:
        raise ValueError(f"asymptotic form needs beta >= {ASYMPTOTIC_BETA_MIN}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    rb = math.sqrt(beta)
    return math.sqrt(2.0 * math.pi / rb) * math.exp(-math.pi * rb / 2.0) * math.sin(bessel_k_imag_phase(beta, alpha))


def bessel_k_imag_zero(n: int, alpha: float, which: str = "K") -> float:
    """n-th positive ``beta`` with ``K_{i sqrt(beta)}(alpha) = 0`` (or ``K' = 0``)."""
    return bessel_k_imag_zeros(n, alpha, which)[n - 1]


class _KZeroTable:
    """Zeros of K_{is}(alpha) or its x-derivative in s, found by an extendable scan.

    All zeros lie at ``s > alpha`` (and, for the derivative, beyond the
    first turning point), where the large-order phase advances by about
    ``pi`` between neighbours; the scan step is an eighth of that spacing.
    """

    def __init__(self, alpha: float, key: str):
        self.alpha = alpha
        self.key = key
        self.s = 0.0
        self.f = self._f(0.0)
        self.roots: list[float] = []

    def _f(self, s: float) -> float:
        vals, _ = _k_line(s, self.alpha, (self.key,))
        return vals[self.key]

    def _advance(self) -> None:
        s = self.s
        step = 0.125 * math.pi / max(math.log(2.0 * max(s, self.alpha) / self.alpha), 0.5)
        s_next = s + step
        cur = self._f(s_next)
        if self.f == 0.0:
            self.roots.append(s)
        elif self.f * cur < 0:
            self.roots.append(brentq(self._f, s, s_next, xtol=1e-14, rtol=1e-15))
        self.s, self.f = s_next, cur

    def first(self, n: int) -> list[float]:
        while len(self.roots) < n:
            self._advance()
        return self.roots[:n]

    def below(self, s_max: float) -> list[float]:
        while self.s < s_max:
            self._advance()
        return [r for r in self.roots if r < s_max]


_K_TABLES: dict[tuple[float, str], _KZeroTable] = {}


def _k_table(alpha: float, which: str) -> _KZeroTable:
    key = {"K": "K", "Kprime": "Kx", "K'": "Kx"}.get(which)
    if key is None:
        raise ValueError(f"unknown zero family {which!r}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    tab = _K_TABLES.get((float(alpha), key))
    if tab is None:
        tab = _K_TABLES[(float(alpha), key)] = _KZeroTable(float(alpha), key)
    return tab


def bessel_k_imag_zeros(n_max: int, alpha: float, which: str = "K") -> tuple[float, ...]:
    """First ``n_max`` zeros in ``beta`` of ``K_{i sqrt(beta)}(alpha)`` (``which="K"``) or of ``K'``."""
    if n_max < 1:
        raise ValueError("n must be >= 1")
    return tuple(r * r for r in _k_table(alpha, which).first(n_max))


def bessel_k_imag_zeros_below(beta: float, alpha: float, which: str = "K") -> tuple[float, ...]:
    """All zeros in ``beta`` below ``beta`` of ``K_{i sqrt(beta)}(alpha)`` or of ``K'``."""
    if beta <= 0:
        return ()
    return tuple(r * r for r in _k_table(alpha, which).below(math.sqrt(beta)))


# ---------------------------------------------------------------------------
# Lambert W and zeros
# ---------------------------------------------------------------------------


def lambert_w(x: float) -> float:
    """Principal branch of ``W`` for ``x >= 0`` by Halley iteration."""
    x = float(x)
    if not x >= 0:
        raise ValueError("lambert_w is only defined here for x >= 0")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return math.inf
    w = math.log1p(x)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 1e-14 * max(1.0, abs(w)):
            break
    return w


def _ai_neg(beta: float) -> float:
    return airy(-beta, want=("Ai",)).ai


def _aip_neg(beta: float) -> float:
    return airy(-beta, want=("Ai'",)).ai_prime


def airy_zero_approx(n: int, order: int = 1) -> float:
    """Approximate n-th zero of Ai(-b) from ``T(t_n)``, ``t_n = 3 pi (4n - 1)/8``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    t = 3.0 * math.pi * (4 * n - 1) / 8.0
    corr = [1.0, 5.0 / (48.0 * t ** 2), -5.0 / (36.0 * t ** 4)]
    return t ** (2.0 / 3.0) * sum(corr[:order])


def _airy_prime_zero_seed(n: int) -> float:
    t = 3.0 * math.pi * (4 * n - 3) / 8.0
    return t ** (2.0 / 3.0) * (1.0 - 7.0 / (48.0 * t ** 2) + 35.0 / (288.0 * t ** 4))


@lru_cache(maxsize=1024)
def airy_zero(n: int, which: str = "Ai") -> float:
    """n-th positive root ``b`` of ``Ai(-b) = 0`` or ``Ai'(-b) = 0``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if which == "Ai":
        f, seed = _ai_neg, airy_zero_approx(n, 3)
    elif which in ("AiPrime", "Ai'"):
        f, seed = _aip_neg, _airy_prime_zero_seed(n)
    else:
        raise ValueError(f"unknown zero family {which!r}")
    quarter = 0.25 * (8.0 / (3.0 * n)) ** (1.0 / 3.0) * math.pi ** (2.0 / 3.0)
    a, b = seed - 0.5 * quarter, seed + 0.5 * quarter
    a = max(a, 1e-6)
    fa, fb = f(a), f(b)
    while fa * fb > 0:
        a, b = max(a - quarter, 1e-6), b + quarter
        fa, fb = f(a), f(b)
    return brentq(f, a, b, xtol=1e-13, rtol=1e-15)


def airy_zero_count(beta: float, which: str = "Ai") -> int:
    """Number of zeros of ``Ai(-b)`` (or ``Ai'(-b)``) with ``0 < b < beta``."""
    if beta <= 0:
        return 0
    shift = 0.25 if which == "Ai" else 0.75
    n = max(0, int((2.0 / 3.0) * beta ** 1.5 / math.pi + shift))
    while airy_zero(n + 1, which) < beta:
        n += 1
    while n > 0 and airy_zero(n, which) >= beta:
        n -= 1
    return n
