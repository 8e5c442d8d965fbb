"""Absolute-stability analysis of explicit Runge-Kutta schemes.

Provides the stability polynomial R(z), the real-axis stability interval
[-eta, 0], the gain lambda_opt = eta/2 over forward Euler (the relevant
quantity when the semidiscrete operator has a real nonpositive spectrum),
the |R(z)| = 1 boundary locus, and the CFL constants obtained by combining
eta with the von Neumann symbol of a space discretization.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import relaxation
from .tableaux import ButcherTableau, ShuOsherForm, lambda_ssp

__all__ = [
    "StabilityPolynomial",
    "StabilityReport",
    "CflModel",
    "stability_polynomial",
    "shu_osher_polynomial",
    "real_stability_interval",
    "lambda_opt",
    "boundary_locus",
    "von_neumann_c1",
    "stability_report",
]

_SCAN_STEP = 1e-3


@dataclass(frozen=True)
class StabilityPolynomial:
    """R(z) = sum_k coeffs[k] z^k; amplification of the scheme on u' = z u."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("need at least coefficients r_0, r_1")
        if abs(c[0] - 1.0) > 1e-12 or abs(c[1] - 1.0) > 1e-12:
            raise ValueError("consistency requires r_0 = r_1 = 1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], z)


@dataclass
class CflModel:
    """Time-step model dt = (c1 - delta) * lambda * h^2 / (D mu) / (1 + 2 h phi).

    c1 comes from linear analysis (von_neumann_c1); the conservative
    nonlinear factor 1/(1 + 2 h phi) stands in for the unknown linear
    correction constant c2, which is kept as an optional measured quantity.
    """

    c1: float
    c2: float = None
    delta: float = 0.01

    def __post_init__(self):
        if self.c1 <= 0:
            raise ValueError("c1 must be positive")
        if not 0.0 <= self.delta < self.c1:
            raise ValueError("need 0 <= delta < c1")


@dataclass
class StabilityReport:
    """Real-axis interval magnitude eta, the SSP and real-axis coefficients,
    and optionally the sampled |R| = 1 locus."""

    eta: float
    lambda_ssp: float
    lambda_opt: float
    locus: list = None


def stability_polynomial(t: ButcherTableau) -> StabilityPolynomial:
    """Stability polynomial by stage recursion (no matrix inversion).

    Each stage value on u' = z u is a polynomial in z; stage i adds
    z * sum_k a_ik g_k, and the update row gives R.
    """
    s = t.s
    g = np.zeros((s, s + 1))
    for i in range(s):
        g[i, 0] = 1.0
        acc = np.zeros(s + 1)
        for k in range(i):
            if t.a[i, k] != 0.0:
                acc += t.a[i, k] * g[k]
        g[i, 1:] += acc[:-1]
    r = np.zeros(s + 1)
    r[0] = 1.0
    acc = np.zeros(s + 1)
    for i in range(s):
        acc += t.b[i] * g[i]
    r[1:] += acc[:-1]
    d = s
    while d > 1 and abs(r[d]) < 1e-300:
        d -= 1
    return StabilityPolynomial(coeffs=r[: d + 1])


def shu_osher_polynomial(form: ShuOsherForm) -> StabilityPolynomial:
    """Stability polynomial expanded directly from the Shu-Osher rows;
    independent of the Butcher conversion and used to cross-check it."""
    s = form.s
    g = np.zeros((s + 1, s + 1))
    g[0, 0] = 1.0
    for rrow in range(s):
        acc = np.zeros(s + 1)
        for k in range(rrow + 1):
            if form.alpha[rrow, k] != 0.0:
                acc += form.alpha[rrow, k] * g[k]
            if form.beta[rrow, k] != 0.0:
                acc[1:] += form.beta[rrow, k] * g[k, :-1]
        g[rrow + 1] = acc
    r = g[s]
    d = s
    while d > 1 and abs(r[d]) < 1e-300:
        d -= 1
    return StabilityPolynomial(coeffs=r[: d + 1])


def real_stability_interval(r: StabilityPolynomial, tol: float = 1e-10) -> float:
    """Largest eta >= 0 with |R(z)| <= 1 on [-eta, 0].

    Dense scan (step 1e-3) locates the first violation left of the origin --
    interior violations shrink eta -- and bisection sharpens the boundary to
    tol.  The scan window starts at 4x the degree and grows until a
    violation is found (|R| -> inf for polynomials).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    d = r.degree
    zmax = 4.0 * d
    hard_cap = max(4.0 * d * d, 16.0)
    co = r.coeffs[::-1]
    while True:
        z = -np.arange(_SCAN_STEP, zmax + _SCAN_STEP, _SCAN_STEP)
        bad = np.nonzero(np.abs(np.polyval(co, z)) > 1.0)[0]
        if bad.size:
            break
        if zmax >= hard_cap:
            return zmax
        zmax = min(2.0 * zmax, hard_cap)
    i = int(bad[0])
    lo = z[i]                       # violating
    hi = z[i - 1] if i > 0 else 0.0  # stable
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if abs(np.polyval(co, mid)) > 1.0:
            lo = mid
        else:
            hi = mid
    return -0.5 * (lo + hi)


def lambda_opt(r: StabilityPolynomial, tol: float = 1e-10) -> float:
    """Real-axis gain over forward Euler: |eta|/2."""
    return 0.5 * real_stability_interval(r, tol=tol)


def boundary_locus(r: StabilityPolynomial, n: int):
    """Points of the |R(z)| = 1 level set, as (theta, z) pairs.

    For each theta_j = 2 pi j / n all roots of R(z) = e^{i theta_j} are
    found; every root lies on the boundary curve(s) of the stability region.
    """
    if n < 16:
        raise ValueError("need at least 16 samples")
    co = r.coeffs[::-1].astype(complex)
    pts = []
    for j in range(n):
        theta = 2.0 * np.pi * j / n
        shifted = co.copy()
        shifted[-1] -= np.exp(1j * theta)
        roots = np.roots(shifted)
        resid = np.abs(np.abs(r(roots)) - 1.0)
        if resid.max() > 1e-8:
            raise RuntimeError(
                f"root finding failed at theta={theta:.6g}: |R| residual {resid.max():.3e}"
            )
        pts.extend((theta, complex(z)) for z in roots)
    return pts


@lru_cache(maxsize=None)
def _symbol_max(recon: str, n_samples: int = 1024) -> float:
    """max |sigma_hat| over xi in (0, pi], asserting a real nonpositive symbol."""
    _, sig = relaxation.symbol_samples(recon, n_samples)
    if np.abs(sig.imag).max() > 1e-12:
        raise RuntimeError(
            f"space symbol of '{recon}' has imaginary part"
            f" {np.abs(sig.imag).max():.3e}; real-axis analysis does not apply"
        )
    if sig.real.max() > 1e-12:
        raise RuntimeError(f"space symbol of '{recon}' is not nonpositive")
    return float(np.abs(sig.real).max())


def von_neumann_c1(recon: str, r: StabilityPolynomial) -> float:
    """CFL constant C1 of a reconstruction/integrator pair.

    The fully discrete update amplifies mode xi by R(dt sigma(xi)); with a
    real nonpositive symbol, stability holds up to
    dt = eta * h^2 / max|sigma_hat|, i.e. C1 = eta / max|sigma_hat|.
    """
    return real_stability_interval(r) / _symbol_max(relaxation.linearized_kind(recon))


def stability_report(t: ButcherTableau, form: ShuOsherForm = None,
                     locus_samples: int = 0) -> StabilityReport:
    r = stability_polynomial(t)
    eta = real_stability_interval(r)
    return StabilityReport(
        eta=eta,
        lambda_ssp=lambda_ssp(form) if form is not None else None,
        lambda_opt=0.5 * eta,
        locus=boundary_locus(r, locus_samples) if locus_samples else None,
    )
