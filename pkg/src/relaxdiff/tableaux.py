"""Explicit Runge-Kutta schemes in Butcher and Shu-Osher form.

The catalog holds the optimal strong-stability-preserving schemes SSP(s,p)
used throughout the package: the first-order family (s equal forward Euler
substeps), the classical optimal second-order family, and the optimal
third-order schemes with 3, 4 and 5 stages.  A scheme in Shu-Osher form is
a convex combination of forward Euler steps

    u^(i) = sum_k alpha_ik [u^(k) + dt (beta_ik/alpha_ik) L(u^(k))],

and its SSP coefficient is min(alpha_ik/beta_ik) over entries with
beta_ik > 0.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ButcherTableau",
    "ShuOsherForm",
    "OrderCheck",
    "CATALOG_PAIRS",
    "ssp_tableau",
    "shu_osher_to_butcher",
    "lambda_ssp",
    "validate_order",
    "tableau_to_dict",
    "tableau_from_dict",
    "shu_osher_to_dict",
    "shu_osher_from_dict",
]

CATALOG_PAIRS = tuple(
    [(s, 1) for s in range(1, 6)] + [(s, 2) for s in range(2, 6)] + [(3, 3), (4, 3), (5, 3)]
)

_CONSISTENCY_TOL = 1e-12


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ButcherTableau:
    """Explicit Butcher tableau: strictly lower-triangular a, weights b,
    abscissae c = row sums of a, nominal order p."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    p: int

    def __post_init__(self):
        a = _readonly(np.atleast_2d(self.a))
        b = _readonly(self.b)
        c = _readonly(self.c)
        s = b.size
        if a.shape != (s, s):
            raise ValueError(f"a must be {s}x{s}, got {a.shape}")
        if np.abs(np.triu(a)).max() > 0.0:
            raise ValueError("explicit scheme requires strictly lower triangular a")
        if np.abs(a.sum(axis=1) - c).max() > _CONSISTENCY_TOL:
            raise ValueError("abscissae must equal row sums of a")
        if abs(b.sum() - 1.0) > _CONSISTENCY_TOL:
            raise ValueError("weights must sum to 1")
        if self.p < 1:
            raise ValueError("order must be >= 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def s(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class ShuOsherForm:
    """Shu-Osher coefficients alpha, beta as (s, s) lower-triangular arrays.

    Row r < s-1 builds stage r+2 from stages 1..r+1; the last row builds the
    updated solution.  Rows of alpha are convex combinations (nonnegative,
    summing to one).
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = _readonly(np.atleast_2d(self.alpha))
        beta = _readonly(np.atleast_2d(self.beta))
        if alpha.shape != beta.shape or alpha.shape[0] != alpha.shape[1]:
            raise ValueError("alpha and beta must be square arrays of equal shape")
        if np.abs(np.triu(alpha, k=1)).max() > 0.0 or np.abs(np.triu(beta, k=1)).max() > 0.0:
            raise ValueError("rows may only reference earlier stages")
        if alpha.min() < -1e-14:
            raise ValueError("alpha coefficients must be nonnegative")
        if np.abs(alpha.sum(axis=1) - 1.0).max() > _CONSISTENCY_TOL:
            raise ValueError("each alpha row must sum to 1 (convex combination)")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def s(self) -> int:
        return self.alpha.shape[0]


@dataclass
class OrderCheck:
    """Result of checking the order conditions up to a requested order."""

    ok: bool
    residuals: dict = field(default_factory=dict)
    tol: float = _CONSISTENCY_TOL


def shu_osher_to_butcher(form: ShuOsherForm, p: int) -> ButcherTableau:
    """Convert a Shu-Osher form to the equivalent Butcher tableau.

    Stage rows accumulate: row(i) = sum_k alpha_ik row(k) + beta_ik e_k,
    starting from the zero row of the first stage; the final row gives b.
    """
    s = form.s
    rows = np.zeros((s + 1, s))
    for r in range(s):
        acc = np.zeros(s)
        for k in range(r + 1):
            if form.alpha[r, k] != 0.0:
                acc += form.alpha[r, k] * rows[k]
            acc[k] += form.beta[r, k]
        rows[r + 1] = acc
    a, b = rows[:s], rows[s]
    return ButcherTableau(a=a, b=b, c=a.sum(axis=1), p=p)


def lambda_ssp(form: ShuOsherForm) -> float:
    """SSP coefficient min(alpha_ik/beta_ik) over entries with beta_ik > 0."""
    mask = form.beta > 0.0
    if not mask.any():
        raise ValueError("degenerate scheme: all beta coefficients are zero")
    return float((form.alpha[mask] / form.beta[mask]).min())


def validate_order(t: ButcherTableau, p: int, tol: float = _CONSISTENCY_TOL) -> OrderCheck:
    """Check the classical order conditions for order p (p <= 3 supported)."""
    if p > 3:
        raise ValueError("order conditions above 3 are not supported")
    if p < 1:
        raise ValueError("order must be >= 1")
    b, c, a = t.b, t.c, t.a
    res = {"b_sum": float(b.sum() - 1.0)}
    if p >= 2:
        res["bc"] = float(b @ c - 0.5)
    if p >= 3:
        res["bc2"] = float(b @ c**2 - 1.0 / 3.0)
        res["bAc"] = float(b @ (a @ c) - 1.0 / 6.0)
    ok = max(abs(v) for v in res.values()) <= tol
    return OrderCheck(ok=ok, residuals=res, tol=tol)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def _ssp_s1(s):
    # s equal forward Euler substeps of size dt/s; SSP coefficient s.
    alpha = np.zeros((s, s))
    beta = np.zeros((s, s))
    for r in range(s):
        alpha[r, r] = 1.0
        beta[r, r] = 1.0 / s
    return ShuOsherForm(alpha, beta)


def _ssp_s2(s):
    # Classical optimal second-order family: s-1 Euler substeps of size
    # dt/(s-1), then a 1/s : (s-1)/s convex combination.  SSP coefficient s-1.
    alpha = np.zeros((s, s))
    beta = np.zeros((s, s))
    for r in range(s - 1):
        alpha[r, r] = 1.0
        beta[r, r] = 1.0 / (s - 1)
    alpha[s - 1, 0] = 1.0 / s
    alpha[s - 1, s - 1] = (s - 1.0) / s
    beta[s - 1, s - 1] = 1.0 / s
    return ShuOsherForm(alpha, beta)


def _ssp_33():
    # TVD third-order scheme of Shu & Osher (1988).  SSP coefficient 1.
    alpha = np.array([
        [1.0, 0.0, 0.0],
        [3.0 / 4.0, 1.0 / 4.0, 0.0],
        [1.0 / 3.0, 0.0, 2.0 / 3.0],
    ])
    beta = np.array([
        [1.0, 0.0, 0.0],
        [0.0, 1.0 / 4.0, 0.0],
        [0.0, 0.0, 2.0 / 3.0],
    ])
    return ShuOsherForm(alpha, beta)


def _ssp_43():
    # Optimal four-stage third-order scheme (Kraaijevanger 1991; also in
    # Spiteri & Ruuth 2002): three half-steps with one 2/3 : 1/3 combination.
    # SSP coefficient 2.
    alpha = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [2.0 / 3.0, 0.0, 1.0 / 3.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    beta = np.array([
        [0.5, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.0, 0.0],
        [0.0, 0.0, 1.0 / 6.0, 0.0],
        [0.0, 0.0, 0.0, 0.5],
    ])
    return ShuOsherForm(alpha, beta)


# Five-stage third-order coefficients.  Only the SSP coefficient
# r = 2.650629191439389 of this scheme is available in closed form in the
# optimal-SSP literature; the entries below were obtained by maximizing
# min(alpha/beta) over the standard sparsity pattern subject to the
# third-order conditions, which they satisfy to < 1e-15.
_Q53 = 0.37726891533136825          # 1/r on the binding entries
_A53_20 = 0.5652470894496496
_A53_30 = 0.09436702383923867
_A53_31 = 0.0007352813995238337
_A53_41 = 0.2072642565109101
_A53_42 = 0.0037780795451607505
_B53_30 = 0.0005580833953159389
_B53_41 = 1.2740232757817723e-05


def _ssp_53():
    alpha = np.zeros((5, 5))
    alpha[0, 0] = 1.0
    alpha[1, 1] = 1.0
    alpha[2, 0] = _A53_20
    alpha[2, 2] = 1.0 - _A53_20
    alpha[3, 0] = _A53_30
    alpha[3, 1] = _A53_31
    alpha[3, 3] = 1.0 - _A53_30 - _A53_31
    alpha[4, 1] = _A53_41
    alpha[4, 2] = _A53_42
    alpha[4, 4] = 1.0 - _A53_41 - _A53_42
    beta = np.zeros((5, 5))
    for r in range(5):
        beta[r, r] = _Q53 * alpha[r, r]
    beta[3, 0] = _B53_30
    beta[4, 1] = _B53_41
    return ShuOsherForm(alpha, beta)


_CATALOG = {}
for _s in range(1, 6):
    _CATALOG[(_s, 1)] = _ssp_s1
for _s in range(2, 6):
    _CATALOG[(_s, 2)] = _ssp_s2
_CATALOG[(3, 3)] = _ssp_33
_CATALOG[(4, 3)] = _ssp_43
_CATALOG[(5, 3)] = _ssp_53


def ssp_tableau(s: int, p: int):
    """Return (ButcherTableau, ShuOsherForm) of the optimal SSP(s,p) scheme.

    Raises a ValueError naming the supported pairs for anything outside the
    catalog.
    """
    if (s, p) not in _CATALOG:
        pairs = ", ".join(f"({a},{b})" for a, b in CATALOG_PAIRS)
        raise ValueError(f"unknown SSP scheme ({s},{p}); supported (s,p): {pairs}")
    builder = _CATALOG[(s, p)]
    form = builder(s) if builder in (_ssp_s1, _ssp_s2) else builder()
    tab = shu_osher_to_butcher(form, p)
    check = validate_order(tab, p)
    assert check.ok, f"catalog scheme ({s},{p}) violates order conditions: {check.residuals}"
    return tab, form


# ---------------------------------------------------------------------------
# JSON import/export
# ---------------------------------------------------------------------------

def tableau_to_dict(t: ButcherTableau) -> dict:
    return {"s": t.s, "p": t.p, "a": t.a.tolist(), "b": t.b.tolist(), "c": t.c.tolist()}


def tableau_from_dict(d: dict) -> ButcherTableau:
    t = ButcherTableau(a=np.array(d["a"], dtype=float), b=np.array(d["b"], dtype=float),
                       c=np.array(d["c"], dtype=float), p=int(d["p"]))
    if t.s != int(d["s"]):
        raise ValueError(f"inconsistent stage count: s={d['s']} but b has length {t.s}")
    return t


def shu_osher_to_dict(form: ShuOsherForm, p: int) -> dict:
    return {"s": form.s, "p": p, "alpha": form.alpha.tolist(), "beta": form.beta.tolist()}


def shu_osher_from_dict(d: dict):
    """Build (ButcherTableau, ShuOsherForm) from a Shu-Osher JSON dict."""
    form = ShuOsherForm(alpha=np.array(d["alpha"], dtype=float),
                        beta=np.array(d["beta"], dtype=float))
    if form.s != int(d["s"]):
        raise ValueError(f"inconsistent stage count: s={d['s']} but alpha is {form.s}x{form.s}")
    return shu_osher_to_butcher(form, int(d["p"])), form
