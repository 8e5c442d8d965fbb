"""Method-of-lines time stepping for the relaxed diffusion scheme.

An explicit Runge-Kutta tableau advances the semidiscrete system
du/dt = L(u): starting from u^(1) = u^n, stage i evaluates
u^(i) = u^n + dt sum_k a_ik L(u^(k)) and the update is
u^{n+1} = u^n + dt sum_i b_i L(u^(i)).  The time step comes from the
parabolic CFL model dt = (C1 - delta) lambda h^2 / (D mu) / (1 + 2 h phi),
and every operator evaluation is counted to measure scheme cost.
"""

import math
from dataclasses import dataclass

import numpy as np

from .relaxation import (
    DivergenceError,
    FluxCounter,
    apply_L,
    check_subcharacteristic,
)
from .stability import stability_report
from .tableaux import ButcherTableau

__all__ = ["RunStats", "timestep", "rk_step", "evolve"]


@dataclass
class RunStats:
    """Flux evaluations, step count, and the time actually reached.

    n_f = steps * s exactly: there is no rejection mechanism and the final
    truncated step still costs s evaluations.
    """

    n_f: int
    steps: int
    t_final: float


def _resolve_lambda(report, lam):
    if lam == "ssp":
        if report is None or report.lambda_ssp is None:
            raise ValueError("lam='ssp' needs a Shu-Osher form (lambda_ssp unavailable)")
        return report.lambda_ssp
    if lam == "opt":
        if report is None:
            raise ValueError("lam='opt' needs a stability report")
        return report.lambda_opt
    value = float(lam)
    if value <= 0:
        raise ValueError("custom lambda must be positive")
    return value


def timestep(grid, prob, cfg, report, lam="ssp") -> float:
    """dt = (C1 - delta) * lambda * h^2 / (D mu) / (1 + 2 h phi)."""
    if cfg.cfl is None:
        raise ValueError("SchemeConfig.cfl must carry a CflModel with c1 set")
    c1, delta = cfg.cfl.c1, cfg.cfl.delta
    if delta >= c1:
        raise ValueError(f"safety reduction delta={delta} must be below c1={c1}")
    lam_value = _resolve_lambda(report, lam)
    dt = (c1 - delta) * lam_value * grid.h**2 / (prob.d * prob.mu)
    dt /= 1.0 + 2.0 * grid.h * cfg.phi
    assert dt > 0.0
    return dt


def rk_step(u, dt, t: ButcherTableau, prob, cfg, grid, counter=None):
    """One explicit RK step; calls the semidiscrete operator exactly s times."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    s = t.s
    k = []
    for i in range(s):
        stage = u
        if i > 0:
            stage = u + dt * sum(t.a[i, j] * k[j] for j in range(i) if t.a[i, j] != 0.0)
        try:
            k.append(apply_L(stage, prob, cfg, grid, counter=counter))
        except DivergenceError as err:
            err.stage = i + 1
            raise
    return u + dt * sum(t.b[i] * k[i] for i in range(s) if t.b[i] != 0.0)


def _spot_check_monotone(prob, u):
    # cheap guard: p must be nondecreasing on the range of the data
    span = np.linspace(np.min(u), np.max(u), 33)
    if np.diff(prob.p_fn(span)).min() < -1e-12:
        raise ValueError("p(u) is not nondecreasing on the range of the initial data")


def evolve(prob, cfg, grid, t: ButcherTableau, t_end, *, lam="ssp", form=None,
           dt=None, u0=None):
    """Advance from the initial data to exactly t_end with fixed steps.

    The last step is truncated so the run ends at t_end (no overshoot),
    keeping error measurement well defined.  Returns (final field, RunStats).
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    u = np.array(prob.u0(grid.centers()) if u0 is None else u0, dtype=float)
    _spot_check_monotone(prob, u)
    check_subcharacteristic(cfg, prob)
    if dt is None:
        report = stability_report(t, form=form)
        dt = timestep(grid, prob, cfg, report, lam=lam)
    steps = max(1, math.ceil(t_end / dt - 1e-12))
    counter = FluxCounter()
    now = 0.0
    for step in range(steps):
        step_dt = dt if step < steps - 1 else t_end - (steps - 1) * dt
        try:
            u = rk_step(u, step_dt, t, prob, cfg, grid, counter=counter)
        except DivergenceError as err:
            err.step = step + 1
            err.time = now
            raise
        now += step_dt
    return u, RunStats(n_f=counter.count, steps=steps, t_final=t_end)
