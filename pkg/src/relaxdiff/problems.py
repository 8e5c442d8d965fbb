"""Test problems and convergence measurement.

Two references with closed-form solutions: the linear heat equation with a
single decaying Fourier mode on the periodic unit interval, and the
porous-medium equation p(u) = u^m with its self-similar compactly
supported source solution, evaluated on a Dirichlet-0 domain sized to the
support at the final time.
"""

import math
from dataclasses import dataclass

import numpy as np

from .integrator import evolve
from .relaxation import DIRICHLET, DiffusionProblem, Grid1D

__all__ = [
    "ConvergenceReport",
    "heat_problem",
    "heat_grid",
    "barenblatt_problem",
    "barenblatt_support_radius",
    "barenblatt_grid",
    "error_norms",
    "observed_orders",
    "convergence_study",
    "DEFAULT_HEAT_T_END",
]

DEFAULT_HEAT_T_END = 0.05


@dataclass
class ConvergenceReport:
    """Errors per grid, observed orders between grid halvings, and cost."""

    grids: list
    errors_l1: list
    errors_linf: list
    orders: list
    n_f: list


def heat_problem(xi_mode: int = 1, d: float = 1.0) -> DiffusionProblem:
    """u_t = D u_xx on [0, 1) periodic with u0 = sin(2 pi xi_mode x);
    exact solution decays as exp(-D (2 pi xi_mode)^2 t)."""
    if xi_mode < 1:
        raise ValueError("xi_mode must be >= 1")
    freq = 2.0 * np.pi * xi_mode

    def u0(x):
        return np.sin(freq * x)

    def exact(x, t):
        return np.exp(-d * freq**2 * t) * np.sin(freq * x)

    return DiffusionProblem(d=d, p_fn=lambda u: u, mu=1.0, u0=u0, exact=exact)


def heat_grid(n: int) -> Grid1D:
    return Grid1D(n=n, x_lo=0.0, x_hi=1.0)


def _barenblatt_constants(m: float, mass: float):
    k = 1.0 / (m + 1.0)
    b = k * (m - 1.0) / (2.0 * m)
    # mass of the profile: C^{(m+1)/(2(m-1))} / sqrt(b) * B(1/2, m/(m-1))
    im = math.sqrt(math.pi) * math.gamma(m / (m - 1.0)) / math.gamma(m / (m - 1.0) + 0.5)
    c = (mass * math.sqrt(b) / im) ** (2.0 * (m - 1.0) / (m + 1.0))
    return k, b, c


def barenblatt_problem(m: float, t0: float, mass: float = 1.0) -> DiffusionProblem:
    """Porous-medium problem p(u) = u^m with the self-similar compactly
    supported solution of prescribed total mass, shifted so the initial
    data is the profile at time offset t0.

    p is extended oddly (u |u|^{m-1}) so it stays nondecreasing if the
    numerical solution dips below zero.  The Lipschitz constant is taken
    over the initial data range: mu = m * max(u0)^{m-1}.
    """
    if m <= 1.0:
        raise ValueError("porous-medium exponent must satisfy m > 1")
    if t0 <= 0.0:
        raise ValueError("time offset t0 must be positive")
    k, b, c = _barenblatt_constants(m, mass)

    def exact(x, t):
        theta = t + t0
        prof = c - b * np.asarray(x) ** 2 / theta ** (2.0 * k)
        return theta ** (-k) * np.maximum(prof, 0.0) ** (1.0 / (m - 1.0))

    def u0(x):
        return exact(x, 0.0)

    umax = t0 ** (-k) * c ** (1.0 / (m - 1.0))
    mu = m * umax ** (m - 1.0)

    def p_fn(u):
        return u * np.abs(u) ** (m - 1.0)

    return DiffusionProblem(d=1.0, p_fn=p_fn, mu=mu, u0=u0, exact=exact)


def barenblatt_support_radius(m: float, t0: float, mass: float, t: float) -> float:
    """Edge of the exact solution's support: sqrt(C/b) (t + t0)^{1/(m+1)}."""
    k, b, c = _barenblatt_constants(m, mass)
    return math.sqrt(c / b) * (t + t0) ** k


def barenblatt_grid(m: float, t0: float, mass: float, t_end: float, n: int,
                    pad: float = 1.5) -> Grid1D:
    """Dirichlet-0 domain covering pad x the support radius at t_end; the
    compact support never reaches the boundary, so the boundary condition
    is exact."""
    r = pad * barenblatt_support_radius(m, t0, mass, t_end)
    return Grid1D(n=n, x_lo=-r, x_hi=r, boundary=DIRICHLET, bc_value=0.0)


def error_norms(numeric, exact, grid: Grid1D, t: float):
    """(L1, Linf) distance to the exact solution at cell centers."""
    if exact is None:
        raise ValueError("no exact solution available")
    diff = np.abs(np.asarray(numeric) - exact(grid.centers(), t))
    return float(diff.sum() * grid.h), float(diff.max())


def observed_orders(errors):
    """log2 ratios of successive errors (grids doubling in resolution)."""
    e = np.asarray(errors, dtype=float)
    return [float(v) for v in np.log2(e[:-1] / e[1:])]


def convergence_study(prob, cfg, t, grids, t_end, *, lam="ssp", form=None,
                      make_grid=None) -> ConvergenceReport:
    """Run the scheme on a doubling sequence of grids, recomputing dt from h
    and the chosen lambda at every resolution."""
    grids = list(grids)
    if len(grids) < 3:
        raise ValueError("need >= 3 grids, each double the previous")
    for a, b in zip(grids, grids[1:]):
        if b != 2 * a:
            raise ValueError(f"grids must double: got {b} after {a}")
    if make_grid is None:
        make_grid = heat_grid
    e1, einf, nfs = [], [], []
    for n in grids:
        grid = make_grid(n)
        try:
            u, stats = evolve(prob, cfg, grid, t, t_end, lam=lam, form=form)
        except Exception as err:
            raise RuntimeError(f"solver failed on grid n={n}: {err}") from err
        l1, li = error_norms(u, prob.exact, grid, t_end)
        e1.append(l1)
        einf.append(li)
        nfs.append(stats.n_f)
    return ConvergenceReport(grids=grids, errors_l1=e1, errors_linf=einf,
                             orders=observed_orders(e1), n_f=nfs)
