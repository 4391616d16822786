"""Dilational peak models, convolution, and synthetic spectra."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .index_functions import CheckReport, from_peak
from .scales import dhs_norm
from .spectral import (
    GridSignal,
    Spectrum,
    dft_forward,
    dft_inverse,
    frequencies,
    l2_norm,
    spectral_density,
)

__all__ = [
    "PeakModel",
    "peak_hat",
    "factored_kernel_hat",
    "convolve",
    "convolve_spectrum",
    "source_check",
    "error_dominance_check",
    "Peak",
    "SyntheticSpectrum",
    "synth_spectrum",
    "noise",
]


class PeakModel(str, enum.Enum):
    """Unit-area peak families, described by their Fourier transforms."""

    GAUSSIAN = "gaussian"          # B(w) = exp(-w^2/2)
    EXPONENTIAL = "exponential"    # B(w) = 1/(1 + w^2)
    RATIONAL = "rational"          # B(w) = exp(-|w|)

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for m in cls:
                if m.value == value.lower():
                    return m
        raise ValueError(
            f"unknown peak model {value!r}; expected one of "
            + ", ".join(repr(m.value) for m in cls)
        )

    def log_hat(self, omega):
        w = np.asarray(omega, dtype=float)
        if self is PeakModel.GAUSSIAN:
            return -0.5 * w**2
        if self is PeakModel.EXPONENTIAL:
            return -np.log1p(w**2)
        return -np.abs(w)

    def hat(self, omega):
        return np.exp(self.log_hat(omega))

    def profile(self, t):
        """The peak shape B(t) itself (unit area)."""
        t = np.asarray(t, dtype=float)
        if self is PeakModel.GAUSSIAN:
            return np.exp(-0.5 * t**2) / math.sqrt(2 * math.pi)
        if self is PeakModel.EXPONENTIAL:
            return 0.5 * np.exp(-np.abs(t))
        return 1.0 / (math.pi * (1.0 + t**2))


def peak_hat(model, gamma: float, omega):
    """Fourier transform of the broadening kernel ``B_gamma``: ``B(gamma w)``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    out = PeakModel(model).hat(gamma * np.asarray(omega, dtype=float))
    return out if np.ndim(out) else float(out)


def _log_factored(model, gamma, beta, omega):
    if not 0 < beta < gamma:
        raise ValueError(f"need 0 < beta < gamma, got beta={beta}, gamma={gamma}")
    m = PeakModel(model)
    w = np.asarray(omega, dtype=float)
    return m.log_hat(gamma * w) - m.log_hat(beta * w)


def factored_kernel_hat(model, gamma: float, beta: float, omega):
    """``B(gamma w)/B(beta w)``, the symbol of the sharpening kernel."""
    out = np.exp(_log_factored(model, gamma, beta, omega))
    return out if np.ndim(out) else float(out)


def convolve_spectrum(model, gamma: float, F: Spectrum) -> Spectrum:
    return F.scaled(peak_hat(model, gamma, F.omega))


def convolve(model, gamma: float, f: GridSignal) -> GridSignal:
    """``B_gamma * f`` on the periodic window."""
    return dft_inverse(convolve_spectrum(model, gamma, dft_forward(f)))


def source_check(f: GridSignal, model, gamma: float) -> float:
    """``||B_gamma * f||_s - ||f||`` with ``s = gamma^2`` and ``a`` from the model.

    The convolved spectrum is formed directly, without a round trip
    through the sample domain.
    """
    g_hat = convolve_spectrum(model, gamma, dft_forward(f))
    a = from_peak(model)
    return dhs_norm(spectral_density(g_hat), a, gamma**2) - l2_norm(f)


def error_dominance_check(model, gamma, beta, sigma, omega_grid) -> CheckReport:
    """Check ``|B(beta w)|^2 <= |B(gamma w)|^2 / |B(gamma sqrt(sigma) w)|^2``.

    This guarantees that the error is bounded by the ``s sigma`` norm of
    the residual.
    """
    if not 0 < beta < gamma:
        raise ValueError("need 0 < beta < gamma")
    if not 0 < sigma < 1:
        raise ValueError("sigma must lie in (0, 1)")
    m = PeakModel(model)
    w = np.asarray(omega_grid, dtype=float)
    lhs = m.hat(beta * w) ** 2
    rhs = np.exp(2 * (m.log_hat(gamma * w) - m.log_hat(gamma * math.sqrt(sigma) * w)))
    margin = rhs - lhs
    worst = float(np.min(margin))
    return CheckReport(worst, worst >= -1e-12)


# --------------------------------------------------------------------------
# synthetic data

@dataclass(frozen=True)
class Peak:
    center: float
    amplitude: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("peak width must be positive")


def noise(seed: int, n: int) -> np.ndarray:
    """Standard normal stream from a Philox4x64 counter-based generator."""
    return np.random.Generator(np.random.Philox(int(seed))).standard_normal(n)


@dataclass(frozen=True)
class SyntheticSpectrum:
    """Synthetic truth and data; spectra are exact on the frequency grid."""

    f: GridSignal
    g: GridSignal
    g_eps: GridSignal
    f_hat: Spectrum
    model: PeakModel
    gamma: float
    epsilon: float

    @property
    def g_hat(self) -> Spectrum:
        return convolve_spectrum(self.model, self.gamma, self.f_hat)

    def z_hat(self, beta: float) -> Spectrum:
        return convolve_spectrum(self.model, beta, self.f_hat)

    def z(self, beta: float) -> GridSignal:
        """The sharpened target ``B_beta * f``."""
        return dft_inverse(self.z_hat(beta))


def _leakage(p: Peak, x0, length):
    left = (p.center - x0) / (p.width * math.sqrt(2))
    right = (x0 + length - p.center) / (p.width * math.sqrt(2))
    return 0.5 * (erfc(left) + erfc(right))


def synth_spectrum(peaks, model, gamma: float, epsilon: float, seed: int,
                   n: int = 4096, dx: float = 0.01, x0: float = -20.48) -> SyntheticSpectrum:
    """Superposition of Gaussian lines, broadened by ``B_gamma`` and perturbed.

    Parameters
    ----------
    peaks : iterable of Peak or dict
        Lines ``amplitude * G((x - center)/width)/width`` with ``G`` the unit
        Gaussian; each must leave less than 1e-8 of its mass outside the window.
    model : PeakModel or str
        Broadening family.
    gamma : float
        Instrument width.
    epsilon : float
        Noise level; the noise is rescaled so ``||g_eps - g|| = epsilon``.
    seed : int
        Seed of the Philox noise stream.
    n, dx, x0 : grid
    """
    if n < 2 or n % 2:
        raise ValueError("n must be even")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    peaks = [p if isinstance(p, Peak) else Peak(**p) for p in peaks]
    if not peaks:
        raise ValueError("need at least one peak")
    length = n * dx
    for p in peaks:
        leak = _leakage(p, x0, length)
        if leak > 1e-8:
            raise ValueError(f"peak at {p.center} leaks {leak:.3g} of its mass past the window")
    model = PeakModel(model)
    omega = frequencies(n, dx)
    coeffs = np.zeros(n, dtype=complex)
    for p in peaks:
        coeffs += p.amplitude * np.exp(-1j * omega * p.center - 0.5 * (p.width * omega) ** 2)
    # the Nyquist bin has no partner; project it so the signal is real
    phase = np.exp(1j * omega[0] * x0)
    coeffs[0] = np.real(coeffs[0] * phase) / phase
    f_hat = Spectrum(coeffs, dx, x0, n)
    f = dft_inverse(f_hat)
    g = dft_inverse(convolve_spectrum(model, gamma, f_hat))
    eta = noise(seed, n)
    if epsilon > 0:
        eta *= epsilon / math.sqrt(np.sum(eta**2) * dx)
        g_eps = g.with_samples(g.samples + eta)
    else:
        g_eps = g
    return SyntheticSpectrum(f, g, g_eps, f_hat, model, float(gamma), float(epsilon))
