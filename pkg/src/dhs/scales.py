"""Weighted norms of spectral densities and the interpolation inequalities
evaluated as signed margins.

A margin is ``rhs - lhs`` of an inequality ``lhs <= rhs``; it is
nonnegative (up to roundoff) whenever the hypotheses hold. Hypotheses are
checked numerically and reported in :attr:`Margin.certified`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .index_functions import (
    ConcaveWitness,
    IndexFunction,
    RationalAlpha,
    check_alpha_scaling,
    check_midpoint_concave,
)
from .spectral import CrossDensity, SpectralDensity

log = logging.getLogger(__name__)

__all__ = [
    "Margin",
    "PreconditionError",
    "ScaleNorms",
    "vhs_norm",
    "dhs_norm",
    "scale_norms",
    "holder_margin",
    "interp_margin",
    "dhs_interp_margin",
    "variant_cs_margin",
    "certify_generator",
]


class PreconditionError(ValueError):
    """Raised when an inequality's hypotheses fail their numerical certificate."""


@dataclass(frozen=True)
class Margin:
    """Signed margin of an inequality.

    ``scale`` is the dominant term, so ``value / scale`` is the relative
    margin used for tolerances.
    """

    value: float
    scale: float
    certified: bool
    detail: str = ""

    @property
    def relative(self) -> float:
        return self.value / self.scale if self.scale > 0 else self.value


@dataclass(frozen=True)
class ScaleNorms:
    base: float
    phi_norm: float | None = None
    psi_norm: float | None = None
    theta_norm: float | None = None
    s: float | None = None
    t: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        for name in ("base", "phi_norm", "psi_norm", "theta_norm"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise ValueError(f"{name} must be nonnegative")


def _log_weight(phi, lam):
    if phi is None:
        return np.zeros_like(lam)
    if isinstance(phi, IndexFunction):
        return np.asarray(phi.log(lam), dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.asarray(phi(lam), dtype=float)
        if np.any(vals <= 0) or np.any(np.isnan(vals)):
            raise ValueError("index function must be positive on the support")
        return np.log(vals)


def _weighted(lam, w, *phis, powers=None):
    """``sum prod_i phi_i(lam)**p_i * w`` over ``w > 0``, computed in logs."""
    mask = w > 0
    lam, w = lam[mask], w[mask]
    if lam.size == 0:
        return 0.0
    powers = powers or [1.0] * len(phis)
    logs = np.log(w)
    for phi, p in zip(phis, powers):
        logs = logs + p * _log_weight(phi, lam)
    if np.any(np.isnan(logs)):
        raise ValueError("index function undefined on the density support")
    top = np.max(logs)
    if top > 700:
        with np.errstate(over="ignore"):
            total = np.inf if top == np.inf else float(np.exp(top) * np.sum(np.exp(logs - top)))
    else:
        total = float(np.sum(np.exp(logs)))
    if not np.isfinite(total):
        log.warning("weighted norm overflows; reporting +inf")
        return np.inf
    return total


def vhs_norm(d: SpectralDensity, phi) -> float:
    """``sqrt(sum phi(lambda_k) w_k)``; ``phi=None`` is the ambient norm.

    Overflow saturates to ``inf`` with a logged diagnostic.
    """
    return float(np.sqrt(_weighted(d.lambdas, d.weights, phi)))


def dhs_norm(d: SpectralDensity, a: IndexFunction, s: float) -> float:
    """Dilational norm ``||f||_s`` with weight ``a(s lambda)``."""
    if not a.dhs_admissible:
        raise ValueError(f"{a!r} does not generate a dilational scale")
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return vhs_norm(d, None)
    return vhs_norm(d, a.dilate(s))


def scale_norms(d, phi=None, psi=None, theta=None) -> ScaleNorms:
    return ScaleNorms(
        base=vhs_norm(d, None),
        phi_norm=None if phi is None else vhs_norm(d, phi),
        psi_norm=None if psi is None else vhs_norm(d, psi),
        theta_norm=None if theta is None else vhs_norm(d, theta),
    )


def _nonzero(d):
    if not np.any(d.weights > 0):
        raise ValueError("density is zero; ratios of norms are undefined")


def _as_witness(F):
    return F if isinstance(F, ConcaveWitness) else ConcaveWitness(F)


def holder_margin(d: SpectralDensity, phi, psi, theta, Phi, Psi) -> Margin:
    """``Phi(A) Psi(B) - 1`` with ``A, B`` the theta-normalized phi/psi energies.

    ``detail`` carries the pointwise margin ``min Phi(phi) Psi(psi) - 1`` over
    the support; ``certified`` requires it and the concavity certificates of
    ``Phi`` and ``Psi`` to pass.
    """
    _nonzero(d)
    lam, w = d.lambdas, d.weights
    nt = _weighted(lam, w, theta)
    A = _weighted(lam, w, phi, theta) / nt
    B = _weighted(lam, w, psi, theta) / nt
    Phi, Psi = _as_witness(Phi), _as_witness(Psi)
    value = float(Phi(A) * Psi(B) - 1.0)

    sup = d.support
    pointwise = float(np.min(Phi(_eval(phi, sup)) * Psi(_eval(psi, sup)) - 1.0))
    ok = pointwise >= -1e-12 and Phi.certificate().ok and Psi.certificate().ok
    return Margin(value, 1.0, ok, f"pointwise condition margin {pointwise!r}")


def _eval(phi, lam):
    if phi is None:
        return np.ones_like(lam)
    return np.asarray(phi(lam), dtype=float)


def interp_margin(d: SpectralDensity, phi, psi, theta=None, strict=True) -> Margin:
    """``||f||_theta^2 (phi o psi^-1)(||f||_{psi theta}^2/||f||_theta^2) - ||f||_{phi theta}^2``.

    ``psi`` must provide ``inverse``. Concavity of ``phi o psi^-1`` is
    certified at midpoints of the mapped support; failure raises
    :class:`PreconditionError` unless ``strict`` is False.
    """
    _nonzero(d)
    lam, w = d.lambdas, d.weights
    nt = _weighted(lam, w, theta)
    npt = _weighted(lam, w, phi, theta)
    nst = _weighted(lam, w, psi, theta)
    if not np.isfinite(nst):
        raise ValueError("||f||_{psi theta} is infinite")

    def comp(y):
        return np.asarray(phi(psi.inverse(y)), dtype=float)

    y = np.concatenate((_eval(psi, d.support), [nst / nt]))
    cert = check_midpoint_concave(comp, y, relative=True)
    ok = cert >= -1e-12
    if strict and not ok:
        raise PreconditionError(f"phi o psi^-1 fails concavity certificate ({cert!r})")
    value = float(nt * comp(nst / nt) - npt)
    return Margin(value, npt if npt > 0 else 1.0, ok, f"concavity margin {cert!r}")


def certify_generator(a: IndexFunction, lam_max=100.0) -> bool:
    """Check the scaling relation of ``a``'s generator on a grid.

    Functions without a known generator are not certified.
    """
    alpha = a.generator()
    if alpha is None:
        return False
    lo = 0.25 if isinstance(alpha, RationalAlpha) else 1e-6
    lam = np.geomspace(lo, lam_max, 256)
    sig = np.linspace(0.01, 1.0, 100)
    return check_alpha_scaling(alpha, lam, sig).ok


def dhs_interp_margin(d: SpectralDensity, a: IndexFunction, t: float, sigma: float) -> Margin:
    """``||f||^2 a(sigma a^-1(||f||_t^2/||f||^2)) - ||f||_{sigma t}^2``.

    The equality cases ``sigma in {0, 1}`` are evaluated without the
    ``a(a^-1(.))`` round trip, so they return exactly 0.
    """
    if not 0 <= sigma <= 1:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    if not t > 0:
        raise ValueError("t must be positive")
    _nonzero(d)
    lam, w = d.lambdas, d.weights
    n0 = _weighted(lam, w, None)
    nt = _weighted(lam, w, a.dilate(t))
    if not np.isfinite(nt):
        raise ValueError("||f||_t overflows")
    if sigma == 0:
        rhs, lhs = n0, n0
    elif sigma == 1:
        rhs, lhs = nt, nt
    else:
        rhs = n0 * float(a(sigma * a.inverse(nt / n0)))
        lhs = _weighted(lam, w, a.dilate(sigma * t))
    return Margin(float(rhs - lhs), nt, certify_generator(a))


def variant_cs_margin(cd: CrossDensity, theta, psi) -> Margin:
    """``||g||_psi ||r||_{theta^2/psi} - Re (g, r)_theta`` from joint spectral data."""
    lam = cd.lambdas
    support = (cd.gg > 0) | (cd.rr > 0)
    if np.any(_eval(psi, lam[support]) <= 0):
        raise ValueError("psi vanishes on the support")
    g_psi = np.sqrt(_weighted(lam, cd.gg, psi))
    r_mix = np.sqrt(_weighted(lam, cd.rr, theta, psi, powers=[2.0, -1.0]))
    mask = np.abs(cd.gr) > 0
    inner = float(np.sum(_eval(theta, lam[mask]) * cd.gr[mask].real))
    bound = float(g_psi * r_mix)
    return Margin(bound - inner, bound, True)
