"""Space discretization of u_t = D p(u)_xx by diffusive relaxation.

The parabolic equation is approximated through a semilinear hyperbolic
system with characteristic speeds +/- Phi whose zero-relaxation limit sets
w = p(u) and v = -D dx w.  In that limit one explicit evaluation of the
semidiscrete operator is

    w_j = p(u_j)
    v_j = -D (discrete dx of w)_j
    F_{j+1/2} = (v- + v+)/2 - (Phi/2)(w+ - w-)
    L_j = -(F_{j+1/2} - F_{j-1/2})/h

where -/+ are left/right-biased face values of the chosen reconstruction
and the Phi term is the upwind dissipation in the characteristic variables
v -/+ Phi w.  The derivative producing v is matched to the reconstruction:
the conservative difference of the face-averaged reconstruction, which for
piecewise-constant and piecewise-linear data reduces to the wide central
difference (w_{j+1} - w_{j-1})/(2h).

All operators act on the last axis, so a batch of fields can be evaluated
in one call.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PWC", "PWL", "WENO5", "PWL_LINEAR", "WENO5_LINEAR", "RECONSTRUCTIONS",
    "Grid1D", "DiffusionProblem", "SchemeConfig", "FluxCounter",
    "DivergenceError", "reconstruct", "apply_L", "space_symbol",
    "linearized_kind", "check_subcharacteristic",
]

PWC = "pwc"
PWL = "pwl"
WENO5 = "weno5"
# Frozen-coefficient twins used for linear (von Neumann) analysis: the
# minmod slope freezes to the one-sided slope matching the stencil bias,
# WENO weights freeze to their ideal values.
PWL_LINEAR = "pwl_linear"
WENO5_LINEAR = "weno5_linear"

RECONSTRUCTIONS = (PWC, PWL, WENO5)
_ALL_KINDS = (PWC, PWL, WENO5, PWL_LINEAR, WENO5_LINEAR)
_LINEARIZED = {PWC: PWC, PWL: PWL_LINEAR, WENO5: WENO5_LINEAR,
               PWL_LINEAR: PWL_LINEAR, WENO5_LINEAR: WENO5_LINEAR}
_MIN_CELLS = {PWC: 2, PWL: 3, WENO5: 6, PWL_LINEAR: 3, WENO5_LINEAR: 6}

_PAD = 8           # ghost cells; covers the widest composed stencil
_WENO_EPS = 1e-6   # smoothness-indicator regularization
PERIODIC = "periodic"
DIRICHLET = "dirichlet"


class DivergenceError(RuntimeError):
    """A field stopped being finite; carries the first offending index."""

    def __init__(self, message, index=None, stage=None, step=None, time=None):
        super().__init__(message)
        self.index = index
        self.stage = stage
        self.step = step
        self.time = time


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centered grid on [x_lo, x_hi) with n cells."""

    n: int
    x_lo: float = 0.0
    x_hi: float = 1.0
    boundary: str = PERIODIC
    bc_value: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid needs at least 2 cells")
        if not self.x_hi > self.x_lo:
            raise ValueError("x_hi must exceed x_lo")
        if self.boundary not in (PERIODIC, DIRICHLET):
            raise ValueError(f"boundary must be '{PERIODIC}' or '{DIRICHLET}'")

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / self.n

    def centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n) + 0.5) * self.h


@dataclass
class DiffusionProblem:
    """Diffusion coefficient D, nondecreasing flux function p with Lipschitz
    constant mu, initial data, and optionally the exact solution u(x, t)."""

    d: float
    p_fn: object
    mu: float
    u0: object = None
    exact: object = None

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("Lipschitz constant mu must be positive")
        if self.d <= 0:
            raise ValueError("diffusion coefficient must be positive")


@dataclass
class SchemeConfig:
    """Reconstruction kind, relaxation speed Phi, and the CFL model used for
    time step selection."""

    recon: str
    phi: float = 0.0
    cfl: object = None

    def __post_init__(self):
        if self.recon not in _ALL_KINDS:
            raise ValueError(f"unknown reconstruction '{self.recon}'; use one of {_ALL_KINDS}")
        if self.phi < 0:
            raise ValueError("relaxation speed phi must be >= 0")


def check_subcharacteristic(cfg: SchemeConfig, prob: DiffusionProblem):
    """For phi > 0 the characteristic speeds must dominate the diffusion
    wave speeds: phi^2 >= D * mu."""
    if cfg.phi > 0.0 and cfg.phi**2 < prob.d * prob.mu * (1.0 - 1e-12):
        raise ValueError(
            f"subcharacteristic condition violated: phi^2 = {cfg.phi**2:.6g}"
            f" < D*mu = {prob.d * prob.mu:.6g}"
        )


class FluxCounter:
    """Counts semidiscrete operator evaluations; owned by one run context."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0


def linearized_kind(recon: str) -> str:
    return _LINEARIZED[recon]


# ---------------------------------------------------------------------------
# padding and face-value kernels
# ---------------------------------------------------------------------------

def _pad(arr, grid, ghost_value):
    """Extend by _PAD ghost cells per side along the last axis."""
    n = arr.shape[-1]
    if grid.boundary == PERIODIC:
        idx = np.arange(-_PAD, n + _PAD) % n
        return arr[..., idx]
    ghosts = np.full(arr.shape[:-1] + (_PAD,), ghost_value, dtype=arr.dtype)
    return np.concatenate([ghosts, arr, ghosts], axis=-1)


def _minmod(a, b):
    return np.where(a * b > 0.0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def _weno5_kernel(vm2, vm1, v0, vp1, vp2, linear):
    """Fifth-order biased face value from five cell values.

    With `linear` the ideal weights (1, 6, 3)/10 are used; otherwise the
    classical smoothness indicators with epsilon 1e-6 and exponent 2.
    """
    q0 = (2.0 * vm2 - 7.0 * vm1 + 11.0 * v0) / 6.0
    q1 = (-vm1 + 5.0 * v0 + 2.0 * vp1) / 6.0
    q2 = (2.0 * v0 + 5.0 * vp1 - vp2) / 6.0
    if linear:
        return 0.1 * q0 + 0.6 * q1 + 0.3 * q2
    b0 = 13.0 / 12.0 * (vm2 - 2.0 * vm1 + v0) ** 2 + 0.25 * (vm2 - 4.0 * vm1 + 3.0 * v0) ** 2
    b1 = 13.0 / 12.0 * (vm1 - 2.0 * v0 + vp1) ** 2 + 0.25 * (vm1 - vp1) ** 2
    b2 = 13.0 / 12.0 * (v0 - 2.0 * vp1 + vp2) ** 2 + 0.25 * (3.0 * v0 - 4.0 * vp1 + vp2) ** 2
    a0 = 0.1 / (_WENO_EPS + b0) ** 2
    a1 = 0.6 / (_WENO_EPS + b1) ** 2
    a2 = 0.3 / (_WENO_EPS + b2) ** 2
    return (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)


def _face_values(recon, padded, n_faces, first_face):
    """Left/right-biased values at faces first_face ... first_face+n_faces-1.

    Face f sits between cells f-1 and f; `padded` carries _PAD ghosts, so
    cell j lives at padded index j + _PAD.
    """
    off = _PAD + first_face

    def seg(k):
        # seg(k)[i] = value at cell (first_face + i - 1 + k)
        return padded[..., off - 1 + k: off - 1 + k + n_faces]

    if recon == PWC:
        return seg(0), seg(1)
    if recon == PWL:
        s_lo = _minmod(seg(1) - seg(0), seg(0) - seg(-1))
        s_hi = _minmod(seg(2) - seg(1), seg(1) - seg(0))
        return seg(0) + 0.5 * s_lo, seg(1) - 0.5 * s_hi
    if recon == PWL_LINEAR:
        return seg(0) + 0.5 * (seg(0) - seg(-1)), seg(1) - 0.5 * (seg(2) - seg(1))
    linear = recon == WENO5_LINEAR
    lo = _weno5_kernel(seg(-2), seg(-1), seg(0), seg(1), seg(2), linear)
    hi = _weno5_kernel(seg(3), seg(2), seg(1), seg(0), seg(-1), linear)
    return lo, hi


def reconstruct(recon, cellvals, grid):
    """Reconstruct left/right-biased interface values at the n+1 faces.

    Ghost cells hold the wrapped field (periodic) or grid.bc_value
    (Dirichlet).  Returns (minus, plus) arrays over faces 0..n.
    """
    cellvals = np.asarray(cellvals)
    if cellvals.shape[-1] != grid.n:
        raise ValueError(f"field has {cellvals.shape[-1]} cells, grid has {grid.n}")
    if recon not in _ALL_KINDS:
        raise ValueError(f"unknown reconstruction '{recon}'")
    if grid.n < _MIN_CELLS[recon]:
        raise ValueError(f"{recon} needs at least {_MIN_CELLS[recon]} cells, grid has {grid.n}")
    padded = _pad(cellvals, grid, grid.bc_value)
    return _face_values(recon, padded, grid.n + 1, 0)


def _flux_variable(recon, W, d, h, n):
    """Cell values of v = -D dx w on cells -3 .. n+2, aligned with W.

    PWC/PWL: wide central difference (the conservative difference of the
    piecewise-constant face average).  WENO5: conservative difference of the
    fifth-order face average, keeping the derivative at the reconstruction's
    accuracy.
    """
    V = np.zeros_like(W)
    if recon in (PWC, PWL, PWL_LINEAR):
        V[..., 1:-1] = -d * (W[..., 2:] - W[..., :-2]) / (2.0 * h)
        return V
    # faces -3 .. n+4 cover cells -3 .. n+3
    lo, hi = _face_values(recon, W, n + 8, -3)
    what = 0.5 * (lo + hi)
    V[..., _PAD - 3: _PAD + n + 4] = -d * (what[..., 1:] - what[..., :-1]) / h
    return V


def apply_L(u, prob: DiffusionProblem, cfg: SchemeConfig, grid: Grid1D, counter=None):
    """Evaluate the semidiscrete operator L(u) (the time derivative of u).

    One call counts as one numerical flux evaluation.  Raises
    DivergenceError when the result stops being finite.
    """
    u = np.asarray(u)
    if u.shape[-1] != grid.n:
        raise ValueError(f"state has {u.shape[-1]} cells, grid has {grid.n}")
    if grid.n < _MIN_CELLS[cfg.recon]:
        raise ValueError(
            f"{cfg.recon} needs at least {_MIN_CELLS[cfg.recon]} cells, grid has {grid.n}"
        )
    h = grid.h
    with np.errstate(over="ignore", invalid="ignore"):
        U = _pad(u, grid, grid.bc_value)
        W = prob.p_fn(U)
        V = _flux_variable(cfg.recon, W, prob.d, h, grid.n)

        wm, wp = _face_values(cfg.recon, W, grid.n + 1, 0)
        vm, vp = _face_values(cfg.recon, V, grid.n + 1, 0)
        F = 0.5 * (vm + vp) - 0.5 * cfg.phi * (wp - wm)
        L = -(F[..., 1:] - F[..., :-1]) / h

    if counter is not None:
        counter.count += 1
    if not np.isfinite(L).all():
        bad = int(np.argwhere(~np.isfinite(L))[0][-1])
        raise DivergenceError(f"non-finite time derivative at cell {bad}", index=bad)
    return L


# ---------------------------------------------------------------------------
# linear analysis
# ---------------------------------------------------------------------------

def _symbol_problem():
    return DiffusionProblem(d=1.0, p_fn=lambda x: x, mu=1.0)


def space_symbol(recon, xi, n: int = 2048):
    """Dimensionless symbol sigma_hat(xi) = h^2 L[e^{i xi j}] / e^{i xi j} of
    the linearized operator (p(u) = u, D = 1, Phi = 0, frozen limiter/weights).

    xi is snapped to the nearest grid-resolvable wavenumber 2 pi m / n,
    m = 1..n/2, so the Fourier mode is exactly periodic and the cell ratio is
    constant; a non-constant ratio signals a linearization bug.
    """
    if not 0.0 < xi <= np.pi + 1e-15:
        raise ValueError("xi must lie in (0, pi]")
    if n < 64:
        raise ValueError("need n >= 64 for the symbol grid")
    kind = _LINEARIZED[recon]
    m = min(max(int(round(xi * n / (2.0 * np.pi))), 1), n // 2)
    grid = Grid1D(n=n)
    j = np.arange(n)
    mode = np.exp(2j * np.pi * m * j / n)
    L = apply_L(mode, _symbol_problem(), SchemeConfig(recon=kind, phi=0.0), grid)
    ratio = grid.h**2 * L / mode
    mean = ratio.mean()
    spread = np.abs(ratio - mean).max()
    if spread > 1e-12 * max(1.0, abs(mean)):
        raise RuntimeError(
            f"symbol not constant across cells for '{recon}' at xi={xi:.6g}"
            f" (spread {spread:.3e}); linearization bug"
        )
    return complex(mean)


def symbol_samples(recon, n_samples: int = 1024):
    """sigma_hat at xi_k = pi k / n_samples, k = 1..n_samples.

    The linearized operator is translation invariant on the periodic grid,
    so its impulse response determines the symbol at every grid frequency
    at once via the DFT; two samples are cross-checked against the direct
    per-mode evaluation.
    """
    n = 2 * n_samples
    kind = _LINEARIZED[recon]
    grid = Grid1D(n=n)
    delta = np.zeros(n)
    delta[0] = 1.0
    L = apply_L(delta, _symbol_problem(), SchemeConfig(recon=kind, phi=0.0), grid)
    sig = grid.h**2 * np.fft.fft(L)[1: n_samples + 1]
    m = np.arange(1, n_samples + 1)
    xis = np.pi * m / n_samples
    for k in (max(1, n_samples // 3), n_samples):
        direct = space_symbol(recon, np.pi * k / n_samples, n=n)
        if abs(direct - sig[k - 1]) > 1e-12 * max(1.0, abs(direct)):
            raise RuntimeError(
                f"impulse-response symbol disagrees with per-mode symbol for "
                f"'{recon}' at xi={np.pi * k / n_samples:.6g}"
            )
    return xis, sig
