"""Index functions ``a(lambda)``, their generators ``alpha`` and the
hypothesis checks needed by the interpolation inequalities.

An index function generating a dilational scale is increasing with
``a(0) = 1``; its dilations ``a(s lambda)`` weight the spectral measure.
Every function here is vectorized over ``lambda``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate, interpolate

__all__ = [
    "IndexFunction",
    "Exp",
    "PowerPlusOne",
    "OnePlusPower",
    "ExpSqrt",
    "PowerLaw",
    "Tabulated",
    "Dilated",
    "AlphaFunction",
    "ConstantAlpha",
    "Reciprocal1p",
    "PowerlawAlpha",
    "RationalAlpha",
    "CustomAlpha",
    "ConcaveWitness",
    "CheckReport",
    "eval_dilated",
    "inverse",
    "generate_from_alpha",
    "check_alpha_scaling",
    "check_cond9",
    "check_convexity_psi_phi_inv",
    "check_midpoint_concave",
    "from_peak",
    "default_grid",
    "bisect_increasing",
]


def default_grid(lam_max=10.0, n=512, lam_min=1e-6):
    """Log-spaced certificate grid on ``[lam_min, lam_max]``."""
    return np.geomspace(lam_min, lam_max, n)


def bisect_increasing(func, y, lo, hi, xtol=1e-12, maxiter=200):
    """Solve ``func(x) = y`` for increasing ``func`` on ``[lo, hi]`` by bisection.

    Vectorized over ``y``; returns the left end of the final bracket, so ties
    resolve toward smaller ``x``.
    """
    y = np.asarray(y, dtype=float)
    a = np.full(y.shape, float(lo))
    b = np.full(y.shape, float(hi))
    for _ in range(maxiter):
        if np.all(b - a <= xtol):
            break
        m = 0.5 * (a + b)
        below = func(m) < y
        a = np.where(below, m, a)
        b = np.where(below, b, m)
    # pick whichever end is closer in value
    fa, fb = func(a), func(b)
    return np.where(np.abs(fa - y) <= np.abs(fb - y), a, b)


# --------------------------------------------------------------------------
# generators alpha

class AlphaFunction:
    """Logarithmic derivative profile ``alpha = a''/a'`` of a generator."""

    name = "alpha"

    def __call__(self, lam):
        raise NotImplementedError

    def integral(self, t):
        """Closed form of ``int_1^t alpha``, or None if only quadrature applies."""
        return None


@dataclass(frozen=True)
class ConstantAlpha(AlphaFunction):
    value: float = 1.0
    name = "constant"

    def __call__(self, lam):
        return np.full(np.shape(lam), self.value, dtype=float)


@dataclass(frozen=True)
class Reciprocal1p(AlphaFunction):
    """``alpha(lambda) = 1/(1+lambda)``, the exponential-peak generator."""

    name = "reciprocal1p"

    def __call__(self, lam):
        return 1.0 / (1.0 + np.asarray(lam, dtype=float))


@dataclass(frozen=True)
class PowerlawAlpha(AlphaFunction):
    """``alpha(lambda) = (gamma - 1)/lambda``; generates ``1 + lambda**gamma``."""

    gamma: float = 2.0
    name = "powerlaw"

    def __call__(self, lam):
        return (self.gamma - 1.0) / np.asarray(lam, dtype=float)

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return (self.gamma - 1.0) * np.log(t)


@dataclass(frozen=True)
class RationalAlpha(AlphaFunction):
    """``alpha(lambda) = (1 - 1/(2 sqrt(lambda)))/sqrt(lambda)``.

    Negative for ``lambda < 1/4``.
    """

    name = "rational"

    def __call__(self, lam):
        r = np.sqrt(np.asarray(lam, dtype=float))
        return (1.0 - 0.5 / r) / r


@dataclass(frozen=True)
class CustomAlpha(AlphaFunction):
    func: Callable = None
    name = "custom"

    def __call__(self, lam):
        return np.asarray(self.func(np.asarray(lam, dtype=float)), dtype=float)


# --------------------------------------------------------------------------
# index functions

class IndexFunction:
    """Base class; subclasses implement ``_eval`` (and usually ``_inverse``)."""

    #: True when the function is increasing with a(0) = 1
    dhs_admissible = True

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < 0):
            raise ValueError(f"{self!r} evaluated at negative lambda")
        with np.errstate(over="ignore"):
            out = self._eval(lam)
        return out if out.ndim else float(out)

    def log(self, lam):
        """``log a(lambda)``; overridden where overflow of ``a`` itself is likely."""
        with np.errstate(divide="ignore"):
            return np.log(self(lam))

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        lo = self._eval(np.asarray(0.0)) if self.dhs_admissible else 0.0
        if np.any(y < lo * (1 - 1e-15)):
            raise ValueError(f"inverse of {self!r} undefined below {float(lo)}")
        out = self._inverse(np.maximum(y, lo))
        return out if np.ndim(out) else float(out)

    def dilate(self, s: float) -> "IndexFunction":
        return Dilated(self, float(s))

    def generator(self):
        """The ``alpha`` this function is generated from, if known."""
        return None

    def _eval(self, lam):
        raise NotImplementedError

    def _inverse(self, y):
        raise NotImplementedError(f"{type(self).__name__} has no inverse")


@dataclass(frozen=True)
class Exp(IndexFunction):
    """``a(lambda) = exp(lambda)``; Gaussian peaks, ordinary Hilbert scales."""

    def _eval(self, lam):
        return np.exp(lam)

    def log(self, lam):
        return np.asarray(lam, dtype=float)

    def _inverse(self, y):
        return np.log(y)

    def generator(self):
        return ConstantAlpha(1.0)


@dataclass(frozen=True)
class PowerPlusOne(IndexFunction):
    """``a(lambda) = (1 + lambda)**gamma``; ``gamma = 2`` for exponential peaks."""

    gamma: float = 2.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def _eval(self, lam):
        return (1.0 + lam) ** self.gamma

    def log(self, lam):
        return self.gamma * np.log1p(np.asarray(lam, dtype=float))

    def _inverse(self, y):
        return y ** (1.0 / self.gamma) - 1.0

    def generator(self):
        if self.gamma == 2.0:
            return Reciprocal1p()
        g = self.gamma
        return CustomAlpha(lambda lam: (g - 1.0) / (1.0 + lam))


@dataclass(frozen=True)
class OnePlusPower(IndexFunction):
    """``a(lambda) = 1 + lambda**gamma`` with ``gamma >= 1``."""

    gamma: float = 2.0

    def __post_init__(self):
        if not self.gamma >= 1:
            raise ValueError("gamma must be >= 1")

    def _eval(self, lam):
        return 1.0 + lam**self.gamma

    def _inverse(self, y):
        return (y - 1.0) ** (1.0 / self.gamma)

    def generator(self):
        return PowerlawAlpha(self.gamma)


@dataclass(frozen=True)
class ExpSqrt(IndexFunction):
    """``a(lambda) = exp(2 sqrt(lambda))``; rational (Lorentzian) peaks."""

    def _eval(self, lam):
        return np.exp(2.0 * np.sqrt(lam))

    def log(self, lam):
        return 2.0 * np.sqrt(np.asarray(lam, dtype=float))

    def _inverse(self, y):
        return (0.5 * np.log(y)) ** 2

    def generator(self):
        return RationalAlpha()


@dataclass(frozen=True)
class PowerLaw(IndexFunction):
    """``phi(lambda) = lambda**p`` for ordinary-scale comparisons.

    Not admissible as a dilational generator since ``phi(0) != 1``; negative
    ``p`` gives the dual (negative index) norms.
    """

    p: float = 1.0
    dhs_admissible = False

    def __post_init__(self):
        if self.p == 0 or not math.isfinite(self.p):
            raise ValueError("p must be finite and nonzero")

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam <= 0):
            raise ValueError("PowerLaw is undefined at lambda <= 0")
        out = lam**self.p
        return out if out.ndim else float(out)

    def log(self, lam):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam <= 0):
            raise ValueError("PowerLaw is undefined at lambda <= 0")
        return self.p * np.log(lam)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0):
            raise ValueError("PowerLaw inverse needs y > 0")
        out = y ** (1.0 / self.p)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class Dilated(IndexFunction):
    """``lambda -> base(s lambda)``."""

    base: IndexFunction
    s: float

    def __post_init__(self):
        if not self.s >= 0:
            raise ValueError("dilation must be >= 0")
        object.__setattr__(self, "dhs_admissible", self.base.dhs_admissible)

    def __call__(self, lam):
        return self.base(self.s * np.asarray(lam, dtype=float))

    def log(self, lam):
        return self.base.log(self.s * np.asarray(lam, dtype=float))

    def inverse(self, y):
        if self.s == 0:
            raise ValueError("a(0 * lambda) is constant and has no inverse")
        return self.base.inverse(y) / self.s

    def generator(self):
        return None


@dataclass(frozen=True, eq=False)
class Tabulated(IndexFunction):
    """Monotone table with piecewise-cubic interpolation.

    With ``slopes`` given the interpolant is cubic Hermite, otherwise the
    monotone PCHIP rule is used. Evaluation outside the table raises.
    """

    lambdas: np.ndarray
    values: np.ndarray
    slopes: np.ndarray | None = None
    alpha: AlphaFunction | None = None
    _interp: object = field(default=None, repr=False)

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float)
        val = np.array(self.values, dtype=float)
        if lam.ndim != 1 or lam.shape != val.shape or lam.size < 2:
            raise ValueError("need at least two (lambda, value) pairs")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("table lambdas must be strictly ascending")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(val))):
            raise ValueError("table contains non-finite entries")
        if np.any(np.diff(val) < 0):
            raise ValueError("table values must be nondecreasing")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "values", val)
        object.__setattr__(
            self, "dhs_admissible", bool(lam[0] == 0 and abs(val[0] - 1) < 1e-12)
        )
        if self.slopes is not None and np.all(np.isfinite(self.slopes)):
            sl = np.array(self.slopes, dtype=float)
            interp = interpolate.CubicHermiteSpline(lam, val, sl, extrapolate=False)
        else:
            object.__setattr__(self, "slopes", None)
            interp = interpolate.PchipInterpolator(lam, val, extrapolate=False)
        object.__setattr__(self, "_interp", interp)

    @property
    def lam_max(self) -> float:
        return float(self.lambdas[-1])

    def _eval(self, lam):
        if np.any(lam < self.lambdas[0]) or np.any(lam > self.lambdas[-1]):
            raise ValueError(
                f"lambda outside table range [{self.lambdas[0]}, {self.lambdas[-1]}]"
            )
        return np.asarray(self._interp(lam), dtype=float)

    def _inverse(self, y):
        if np.any(y > self.values[-1] * (1 + 1e-15)):
            raise ValueError(f"inverse undefined above table maximum {self.values[-1]}")
        return bisect_increasing(self._eval, y, self.lambdas[0], self.lambdas[-1])

    def generator(self):
        return self.alpha

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "value"])
            for lam, v in zip(self.lambdas, self.values):
                w.writerow([repr(float(lam)), repr(float(v))])

    @classmethod
    def from_csv(cls, path) -> "Tabulated":
        path = Path(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["lambda", "value"]:
            raise ValueError(f"{path}: expected header 'lambda,value'")
        try:
            data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        except ValueError as exc:
            raise ValueError(f"{path}: malformed row ({exc})") from None
        return cls(data[:, 0], data[:, 1])


# --------------------------------------------------------------------------
# operations

def eval_dilated(a: IndexFunction, s: float, lam):
    """``a(s * lambda)``."""
    if s < 0:
        raise ValueError("dilation s must be >= 0")
    return a(s * np.asarray(lam, dtype=float))


def inverse(a: IndexFunction, y):
    """``a^{-1}(y)`` for increasing ``a``; raises below ``a(0)``."""
    return a.inverse(y)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_on(lo, hi):
    """Gauss-Legendre nodes/weights mapped to [lo, hi] (broadcast over lo, hi)."""
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    half = 0.5 * (hi - lo)
    return lo + half * (_GL_NODES + 1.0), half * _GL_WEIGHTS


def generate_from_alpha(alpha: AlphaFunction, c: float, lam_max: float, n: int = 1024,
                        cutoff: float = 1e-12) -> Tabulated:
    """Tabulate ``a(lambda) = 1 + c int_0^lambda exp(int_1^t alpha) dt``.

    Parameters
    ----------
    alpha : AlphaFunction
        Generator; may be singular at 0 as long as ``exp(int_1^t alpha)`` is
        integrable there.
    c : float
        Positive scale (the derivative of ``a`` at 1).
    lam_max : float
        Right end of the table.
    n : int
        Number of cells; nodes are ``lam_max * i / n``.
    cutoff : float
        Lower limit replacing 0 in the first cell when ``alpha`` has no
        closed-form integral.

    Returns
    -------
    Tabulated
        Cubic Hermite table using the exact slopes ``c exp(int_1^t alpha)``.
    """
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    if n < 64:
        raise ValueError("need n >= 64 cells")
    if not lam_max > 0:
        raise ValueError("lam_max must be positive")
    t = np.linspace(0.0, lam_max, n + 1)
    h = t[1]
    gx, gw = _gl_on(t[:-1], t[1:])                   # (n, 16) outer nodes per cell

    if alpha.integral(np.array([1.0])) is not None:
        with np.errstate(over="ignore", divide="ignore"):
            slopes = c * np.exp(alpha.integral(t))
            increments = c * np.sum(np.exp(alpha.integral(gx)) * gw, axis=-1)
    else:
        if not np.all(np.isfinite(alpha(np.linspace(h, lam_max, 4 * n)))):
            raise ValueError("alpha is not finite on the grid")

        def inner(x):
            val, _ = integrate.quad(alpha, 1.0, x, limit=200, epsabs=1e-14, epsrel=1e-13)
            return val

        # int_1^t alpha at nodes t_1..t_n, accumulated over cells 1..n-1
        cx, cw = _gl_on(t[1:-1], t[2:])
        node_int = inner(h) + np.concatenate(([0.0], np.cumsum(np.sum(alpha(cx) * cw, axis=-1))))
        # inside cell i >= 1: int_1^x alpha = node_int[i-1] + int_{t_i}^x alpha
        sx, sw = _gl_on(np.broadcast_to(t[1:-1, None], cx.shape), cx)
        partial = np.sum(alpha(sx) * sw, axis=-1)
        increments = np.empty(n)
        slopes = np.empty(n + 1)
        with np.errstate(over="ignore"):
            increments[1:] = c * np.sum(np.exp(node_int[:-1, None] + partial) * cw, axis=-1)
            slopes[1:] = c * np.exp(node_int)
        # first cell: alpha may be singular at 0, use adaptive quadrature
        first, _ = integrate.quad(lambda x: math.exp(inner(x)), cutoff, h,
                                  limit=200, epsabs=1e-14, epsrel=1e-12)
        increments[0] = c * first
        # a singular alpha leaves a'(0) infinite or zero; use the secant slope there
        regular = abs(float(alpha(np.array([cutoff]))[0])) * cutoff < 1e-6
        slopes[0] = c * math.exp(inner(cutoff)) if regular else increments[0] / h

    values = 1.0 + np.concatenate(([0.0], np.cumsum(increments)))
    if not np.all(np.isfinite(values)):
        raise ValueError("generated index function overflows on [0, lam_max]")
    return Tabulated(t, values, slopes, alpha=alpha)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a hypothesis check: worst margin over the grid and verdict."""

    value: float
    ok: bool

    # names used by the individual checks
    @property
    def max_violation(self):
        return self.value

    @property
    def min_margin(self):
        return self.value


def check_alpha_scaling(alpha: AlphaFunction, lam_grid, sigma_grid) -> CheckReport:
    """Worst value of ``alpha(sigma lambda) - alpha(lambda)/sigma`` over both grids."""
    lam = np.asarray(lam_grid, dtype=float)[None, :]
    sig = np.asarray(sigma_grid, dtype=float)[:, None]
    if np.any(lam <= 0) or np.any(sig <= 0) or np.any(sig > 1):
        raise ValueError("grids must lie in (0, lam_max] x (0, 1]")
    rhs = alpha(np.broadcast_to(lam, (sig.size, lam.size))) / sig
    viol = alpha(sig * lam) - rhs
    worst = float(np.max(viol))
    # equality cases (power laws) carry roundoff proportional to alpha itself
    ok = bool(np.all(viol <= 1e-12 * np.maximum(1.0, np.abs(rhs))))
    return CheckReport(worst, ok)


def check_cond9(a: IndexFunction, tau: float, rho: float, lam_grid) -> CheckReport:
    """Worst value of ``a(tau lambda) a(rho lambda) - a(lambda)`` over the grid."""
    lam = np.asarray(lam_grid, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("grid must be positive")
    target = a(lam)
    margin = a(tau * lam) * a(rho * lam) - target
    worst = float(np.min(margin))
    # the product carries roundoff proportional to a(lambda)
    ok = bool(np.all(margin >= -1e-12 * np.maximum(1.0, target)))
    return CheckReport(worst, ok)


def check_midpoint_concave(func, grid, tol=1e-12, relative=True):
    """Smallest midpoint-concavity margin of ``func`` on consecutive grid pairs.

    Returns ``min(func(mid) - (func(x) + func(y))/2)``, normalized by the
    value scale when ``relative``.
    """
    x = np.unique(np.asarray(grid, dtype=float))
    if x.size < 2:
        return 0.0
    left, right = x[:-1], x[1:]
    fl, fr, fm = func(left), func(right), func(0.5 * (left + right))
    margin = fm - 0.5 * (fl + fr)
    if relative:
        margin = margin / np.maximum(np.abs(fm), 1e-300)
    return float(np.min(margin))


@dataclass(frozen=True)
class ConcaveWitness:
    """A function on (0, inf) together with a grid certifying midpoint concavity."""

    func: Callable
    grid: np.ndarray = field(default_factory=lambda: np.geomspace(1e-6, 1e6, 512))

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def certificate(self) -> CheckReport:
        m = check_midpoint_concave(self.func, self.grid, relative=False)
        return CheckReport(m, m >= -1e-12)


def check_convexity_psi_phi_inv(a: IndexFunction, sigma: float, lam_grid) -> CheckReport:
    """Certify convexity of ``theta(y) = a(a^{-1}(y)/sigma)`` on the mapped grid.

    The grid is mapped through ``a``; convexity is tested at midpoints of
    consecutive mapped nodes with relative tolerance 1e-10.
    """
    if not 0 < sigma <= 1:
        raise ValueError("sigma must lie in (0, 1]")
    y = np.unique(a(np.asarray(lam_grid, dtype=float)))

    def theta(v):
        return a(a.inverse(v) / sigma)

    # concavity margin of -theta is the convexity margin of theta
    worst = check_midpoint_concave(lambda v: -theta(v), y, relative=True)
    return CheckReport(worst, worst >= -1e-10)


def from_peak(model) -> IndexFunction:
    """Index function ``1/|B(sqrt(lambda))|^2`` of a peak family."""
    from .peaks import PeakModel

    model = PeakModel(model)
    return {
        PeakModel.GAUSSIAN: Exp(),
        PeakModel.EXPONENTIAL: PowerPlusOne(2.0),
        PeakModel.RATIONAL: ExpSqrt(),
    }[model]
