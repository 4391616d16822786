"""Differentiation of analytic periodic functions in a Hardy space.

A function ``g(z) = sum_{k>=1} b_k z^k`` is analytic on the disk of radius
``R`` when ``sum R^{2k} |b_k|^2`` is finite. Differentiating noisy boundary
data is ill-posed, but the analyticity assumption gives an error of order
``eps log(1/eps)`` rather than the ``eps^{1 - 1/m}`` of Sobolev smoothness.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

__all__ = [
    "HardyFunction",
    "DiffReport",
    "hardy_norm",
    "differentiate",
    "diff_bounds",
    "diff_experiment",
    "hardy_truth",
]


@dataclass(frozen=True)
class HardyFunction:
    """Taylor coefficients ``b_1, ..., b_K`` (the constant term is zero)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("need a 1-d sequence of at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self) -> int:
        return self.coeffs.size

    @property
    def powers(self) -> np.ndarray:
        return np.arange(1, self.K + 1)

    def norm(self) -> float:
        """Ambient norm ``sqrt(sum |b_k|^2)``."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))


def hardy_norm(g: HardyFunction, R: float) -> float:
    """``sqrt(sum R^{2k} |b_k|^2)``; overflow gives ``inf`` with a warning."""
    if not R >= 1:
        raise ValueError(f"R must be >= 1, got {R}")
    mag = np.abs(g.coeffs)
    mask = mag > 0
    if not np.any(mask):
        return 0.0
    logs = 2 * g.powers[mask] * math.log(R) + 2 * np.log(mag[mask])
    top = float(np.max(logs))
    total = math.exp(top) * float(np.sum(np.exp(logs - top))) if top < 700 else math.inf
    if not math.isfinite(total):
        log.warning("Hardy norm overflows; reporting +inf")
        return math.inf
    return math.sqrt(total)


def differentiate(g: HardyFunction) -> np.ndarray:
    """Coefficients of ``g'``: entry ``j`` multiplies ``z^j``, i.e. ``c_{k-1} = k b_k``."""
    return g.powers * g.coeffs


def diff_bounds(C: float, epsilon: float, R: float, m: float = 2.0) -> dict:
    """Worst-case derivative errors under analytic and Sobolev smoothness.

    Returns
    -------
    dict
        ``vhs = 2 eps |log(C/eps)| / log R`` and ``ohs = 2 C^{1/m} eps^{1-1/m}``.
    """
    if not R > 1:
        raise ValueError(f"R must be > 1 (log R must be positive), got {R}")
    if not (C > 0 and epsilon > 0):
        raise ValueError("C and epsilon must be positive")
    if not epsilon < C:
        raise ValueError(f"need epsilon < C, got epsilon={epsilon}, C={C}")
    if not m > 1:
        raise ValueError("m must be > 1")
    vhs = 2 * epsilon * abs(math.log(C / epsilon)) / math.log(R)
    ohs = 2 * C ** (1 / m) * epsilon ** (1 - 1 / m)
    return {"vhs": vhs, "ohs": ohs}


@dataclass(frozen=True)
class DiffReport:
    epsilon: float
    K: int
    R: float
    C: float
    k_star: int
    empirical_error: float
    vhs_bound: float | None
    ohs_bound: float | None

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "K": self.K,
            "R": self.R,
            "C": self.C,
            "k_star": self.k_star,
            "empirical_error": self.empirical_error,
            "vhs_bound": self.vhs_bound,
            "ohs_bound": self.ohs_bound,
        }


def _complex_noise(seed: int, K: int, epsilon: float) -> np.ndarray:
    z = np.random.Generator(np.random.Philox(int(seed))).standard_normal(2 * K)
    eta = z[:K] + 1j * z[K:]
    return eta * (epsilon / np.sqrt(np.sum(np.abs(eta) ** 2)))


def diff_experiment(g: HardyFunction, R: float, epsilon: float, seed: int,
                    method: str = "cutoff", m: float = 2.0) -> DiffReport:
    """Differentiate ``g`` from coefficients perturbed by noise of norm ``epsilon``.

    Modes ``k <= k*`` with ``k* = floor(log(C/eps)/log R)`` are kept, where
    ``C = hardy_norm(g, R)``. For ``k* >= 2`` the error provably stays below
    the ``vhs`` bound: the noise contributes at most ``k* eps`` and the
    discarded tail at most ``(k* + 1) eps``.
    """
    if method != "cutoff":
        raise ValueError(f"unknown method {method!r}; only 'cutoff' is available")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    C = hardy_norm(g, R)
    if not math.isfinite(C):
        raise ValueError("hardy_norm(g, R) is infinite")
    K = g.K
    if epsilon == 0:
        noisy, k_star = g.coeffs, K
    else:
        if not R > 1:
            raise ValueError(f"R must be > 1, got {R}")
        noisy = g.coeffs + _complex_noise(seed, K, epsilon)
        k_star = int(min(K, max(0, math.floor(math.log(C / epsilon) / math.log(R)))))
    est = differentiate(HardyFunction(noisy))
    est[k_star:] = 0
    err = float(np.sqrt(np.sum(np.abs(est - differentiate(g)) ** 2)))
    if 0 < epsilon < C:
        b = diff_bounds(C, epsilon, R, m)
        vhs, ohs = b["vhs"], b["ohs"]
    else:
        vhs = ohs = None
    return DiffReport(float(epsilon), K, float(R), C, k_star, err, vhs, ohs)


def hardy_truth(R: float = 2.0, K: int = 256, seed: int = 0) -> HardyFunction:
    """Test function with ``b_k = phase_k R^{-k} 3^{-k/2}``.

    Then ``hardy_norm(g, R)^2 = sum 3^{-k} < 1/2``.
    """
    k = np.arange(1, K + 1)
    phase = np.exp(2j * np.pi * np.random.Generator(np.random.Philox(int(seed))).random(K))
    return HardyFunction(phase * np.exp(-k * (math.log(R) + 0.5 * math.log(3.0))))
