"""Independent oracles: Numerov shooting for ``u'' = (V(x) - E) u`` and finite differences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.optimize import brentq

from .common import RootFindingError


@dataclass(frozen=True)
class NumerovProblem:
    """Dirichlet eigenproblem ``u'' = (V - E) u`` on ``domain``.

    With ``parity`` set, the potential is taken to be symmetric about
    ``domain[0]`` and the left condition is ``u' = 0`` (even) or ``u = 0``
    (odd) there, so a kink of ``V`` at the centre never enters the stencil.
    """

    potential: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float]
    n_points: int
    energy_bracket: tuple[float, float]
    parity: Literal["even", "odd"] | None = None

    def __post_init__(self):
        a, b = self.domain
        if not b > a:
            raise ValueError("domain must be increasing")
        if self.n_points < 2000:
            raise ValueError("n_points must be at least 2000")
        lo, hi = self.energy_bracket
        if not hi > lo:
            raise ValueError("energy bracket must be increasing")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], self.n_points)


def _even_start(problem: NumerovProblem, energies: np.ndarray, h: float, substeps: int = 64):
    """Value at the first grid node for ``u(0) = 1, u'(0) = 0`` by classical RK4."""
    x0 = problem.domain[0]
    dt = h / substeps
    u = np.ones_like(energies)
    du = np.zeros_like(energies)

    def acc(x, u):
        return (float(problem.potential(np.array([x]))[0]) - energies) * u

    x = x0
    for _ in range(substeps):
        k1u, k1v = du, acc(x, u)
        k2u, k2v = du + 0.5 * dt * k1v, acc(x + 0.5 * dt, u + 0.5 * dt * k1u)
        k3u, k3v = du + 0.5 * dt * k2v, acc(x + 0.5 * dt, u + 0.5 * dt * k2u)
        k4u, k4v = du + dt * k3v, acc(x + dt, u + dt * k3u)
        u = u + dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        du = du + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        x += dt
    return u


def _march(g: np.ndarray, u0: np.ndarray, u1: np.ndarray, steps: int):
    """Numerov in summed form from nodes 0, 1 up to node ``steps``.

    With ``g = h^2 (V - E) / 12`` and ``y = (1 - g) u`` the scheme reads
    ``y[i+1] - 2 y[i] + y[i-1] = 12 g[i] u[i]``; accumulating the first
    difference keeps the small curvature term out of a coefficient near 2,
    where it would lose about ``eps / (k h)^2`` to rounding.

    Returns ``u[steps-1], u[steps]`` and the sign changes on nodes ``1..steps``.
    The running solution is rescaled by positive factors only.
    """
    prev, cur = u0.copy(), u1.copy()
    y = (1.0 - g[1]) * cur
    d = y - (1.0 - g[0]) * prev
    nodes = ((prev * cur < 0) | ((cur == 0) & (prev != 0))).astype(int)
    for i in range(1, steps):
        d = d + 12.0 * g[i] * cur
        y = y + d
        nxt = y / (1.0 - g[i + 1])
        nodes += nxt * cur < 0
        prev, cur = cur, nxt
        if i % 256 == 0:
            big = np.maximum(np.abs(cur), np.abs(prev))
            big = np.where(big > 1e100, big, 1.0)
            prev, cur, y, d = prev / big, cur / big, y / big, d / big
    return prev, cur, nodes


def _g(problem: NumerovProblem, energies: np.ndarray):
    x = problem.grid
    h = x[1] - x[0]
    V = np.asarray(problem.potential(x), dtype=float)
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    return h, h * h / 12.0 * (V[:, None] - E[None, :]), E


def _outward(problem: NumerovProblem, energies: np.ndarray, stop: int | None = None):
    """From the left end; ``(u[stop-1], u[stop], nodes on (x_left, x_stop])`` per energy."""
    h, g, E = _g(problem, energies)
    stop = problem.n_points - 1 if stop is None else stop
    if problem.parity == "even":
        u0, u1 = np.ones_like(E), _even_start(problem, E, h)
    else:
        u0, u1 = np.zeros_like(E), np.full_like(E, h)
    return _march(g, u0, u1, stop)


def _inward(problem: NumerovProblem, energies: np.ndarray, stop: int):
    """From the right end down to node ``stop``; returns ``(u[stop], u[stop+1])``."""
    h, g, E = _g(problem, energies)
    n = problem.n_points
    after, at, _ = _march(g[::-1], np.zeros_like(E), np.full_like(E, h), n - 1 - stop)
    return at, after


def node_count(problem: NumerovProblem, energies) -> np.ndarray:
    """Number of levels below each energy (Sturm count of the outward solution)."""
    return _outward(problem, np.asarray(energies, dtype=float))[2]


def _turning_index(problem: NumerovProblem, energy: float) -> int:
    x = problem.grid
    V = np.asarray(problem.potential(x), dtype=float)
    allowed = np.nonzero(V < energy)[0]
    if allowed.size == 0 or allowed[-1] >= len(x) - 3:
        # no right turning point: any interior node works, the middle is best conditioned
        return len(x) // 2
    return int(max(allowed[-1], 2))


def mismatch(problem: NumerovProblem, energy: float, match: int) -> float:
    """Normalised discrete Wronskian of the outward and inward solutions at node ``match``."""
    l0, l1, _ = _outward(problem, np.array([energy]), stop=match + 1)
    r0, r1 = _inward(problem, np.array([energy]), stop=match)
    l0, l1, r0, r1 = float(l0[0]), float(l1[0]), float(r0[0]), float(r1[0])
    return (l1 * r0 - l0 * r1) / (math.hypot(l0, l1) * math.hypot(r0, r1))


def numerov_eigenvalues(problem: NumerovProblem, n_levels: int, n_scan: int = 128) -> list[float]:
    """Lowest ``n_levels`` eigenvalues inside ``problem.energy_bracket``.

    Node counts on an energy grid isolate each level in its own interval
    (splitting intervals that hold several); Brent's method on the matching
    mismatch then refines it to about 1e-12 relative.
    """
    lo, hi = problem.energy_bracket
    grid = np.linspace(lo, hi, n_scan)
    counts = node_count(problem, grid)
    base = int(counts[0])
    brackets: dict[int, tuple[float, float]] = {}
    pending = [(grid[i], grid[i + 1], int(counts[i]), int(counts[i + 1])) for i in range(n_scan - 1)]
    while pending:
        a, b, ca, cb = pending.pop()
        if cb == ca:
            continue
        if cb - ca == 1:
            brackets[ca] = (a, b)
            continue
        if b - a < 1e-13 * max(1.0, abs(b)):
            raise RootFindingError(f"levels {ca}..{cb} unresolved near E = {a}")
        sub = np.linspace(a, b, 9)
        sc = node_count(problem, sub)
        sc[0], sc[-1] = ca, cb
        pending.extend((sub[i], sub[i + 1], int(sc[i]), int(sc[i + 1])) for i in range(8))
    wanted = [base + j for j in range(n_levels)]
    missing = [j for j in wanted if j not in brackets]
    if missing:
        raise RootFindingError(f"bracket exhausted: only {len(wanted) - len(missing)} of {n_levels} levels found")
    out = []
    for j in wanted:
        a, b = brackets[j]
        match = _turning_index(problem, 0.5 * (a + b))
        fa, fb = mismatch(problem, a, match), mismatch(problem, b, match)
        if fa * fb > 0:
            raise RootFindingError(f"no sign change of the matching function for level {j}")
        out.append(brentq(lambda e: mismatch(problem, e, match), a, b, xtol=1e-13, rtol=1e-13))
    return out


def linear_well_problem(parity: Literal["even", "odd"], beta_max: float, n_points: int = 20000) -> NumerovProblem:
    """Half-line problem for ``u'' = (|y| - beta) u`` up to ``beta_max``."""
    return NumerovProblem(lambda y: np.abs(y), (0.0, beta_max + 14.0), n_points, (0.0, beta_max), parity)


def exp_well_problem(
    parity: Literal["even", "odd"], alpha: float, beta_max: float, n_points: int = 20000
) -> NumerovProblem:
    """Half-line problem for ``u'' = (alpha^2 exp(2|xi|) - beta) u`` up to ``beta_max``."""
    top = math.log((math.sqrt(beta_max) + 30.0) / alpha)
    return NumerovProblem(
        lambda xi: alpha ** 2 * np.exp(2.0 * np.abs(xi)), (0.0, top), n_points, (alpha ** 2, beta_max), parity
    )


@dataclass(frozen=True)
class Derivative:
    value: float
    error: float


def fd_derivative(f: Callable[[float], float], x: float, h: float) -> Derivative:
    """Five-point central difference at steps ``h`` and ``h/2``, Richardson-combined.

    ``error`` is the difference between the extrapolated and the finer plain
    estimate, a conservative bound on the truncation error.
    """

    def five(step):
        vals = [f(x + k * step) for k in (-2, -1, 1, 2)]
        if any(math.isnan(v) for v in vals):
            raise FloatingPointError(f"NaN in finite-difference stencil around x = {x}")
        return (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * step)

    d1, d2 = five(h), five(0.5 * h)
    value = (16.0 * d2 - d1) / 15.0
    return Derivative(value=value, error=abs(value - d2))


__all__ = [
    "Derivative",
    "NumerovProblem",
    "exp_well_problem",
    "fd_derivative",
    "linear_well_problem",
    "mismatch",
    "node_count",
    "numerov_eigenvalues",
]
