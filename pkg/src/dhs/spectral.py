"""Fourier transforms on a truncated periodic window and the spectral
measure of a signal with respect to ``T = -d^2/dx^2``.

The continuous transform convention is::

    F(w) = ∫ f(x) exp(-i w x) dx
    f(x) = 1/(2 pi) ∫ F(w) exp(+i w x) dw

approximated by Riemann sums on the grids::

    x_j = x0 + j dx,          j = 0, ..., N-1
    w_k = 2 pi k / (N dx),    k = -N/2, ..., N/2 - 1

so that ``F_k = dx exp(-i w_k x0) fft[f]_k`` (after shifting to increasing k).
With this scaling Parseval reads ``sum |f_j|^2 dx = 1/(2 pi) sum |F_k|^2 dw``
and the spectral measure of ``T`` has masses at ``lambda = w^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSignal",
    "Spectrum",
    "SpectralDensity",
    "CrossDensity",
    "dft_forward",
    "dft_inverse",
    "spectral_density",
    "cross_density",
    "l2_norm",
    "frequencies",
]


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def frequencies(n: int, dx: float) -> np.ndarray:
    """Angular frequencies ``w_k`` for ``k = -n/2, ..., n/2 - 1``."""
    k = np.arange(-(n // 2), n - n // 2)
    return 2.0 * np.pi * k / (n * dx)


@dataclass(frozen=True)
class GridSignal:
    """Uniformly sampled real signal on the window ``[x0, x0 + N dx)``.

    The window is treated as one period; the samples must be real, finite,
    and ``N`` even.
    """

    samples: np.ndarray
    dx: float
    x0: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if np.iscomplexobj(s):
            raise ValueError("samples must be real")
        s = _frozen(s, float)
        n = s.size
        if n < 2 or n % 2:
            raise ValueError(f"number of samples must be even and >= 2, got {n}")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples contain NaN or Inf")
        if not (np.isfinite(self.dx) and self.dx > 0):
            raise ValueError(f"dx must be positive and finite, got {self.dx}")
        if not np.isfinite(self.x0):
            raise ValueError("x0 must be finite")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "x0", float(self.x0))

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def length(self) -> float:
        return self.n * self.dx

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def with_samples(self, samples) -> "GridSignal":
        return GridSignal(samples, self.dx, self.x0)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, c):
        return self.with_samples(self.samples * float(c))

    __rmul__ = __mul__


def _check_same_grid(a, b):
    if a.n != b.n or a.dx != b.dx or a.x0 != b.x0:
        raise ValueError("signals live on different grids")


@dataclass(frozen=True)
class Spectrum:
    """Samples of the continuous Fourier transform at ``omega``.

    ``coeffs[i]`` belongs to ``omega[i]``; frequencies increase with ``i``.
    """

    coeffs: np.ndarray
    dx: float
    x0: float = 0.0
    n: int = field(default=-1)

    def __post_init__(self):
        c = _frozen(self.coeffs, complex)
        if c.ndim != 1:
            raise ValueError("coeffs must be one-dimensional")
        n = c.size if self.n == -1 else int(self.n)
        if c.size != n:
            raise ValueError(f"spectrum has {c.size} coefficients, declared N = {n}")
        if n < 2 or n % 2:
            raise ValueError(f"N must be even and >= 2, got {n}")
        if not (np.isfinite(self.dx) and self.dx > 0):
            raise ValueError(f"dx must be positive and finite, got {self.dx}")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "x0", float(self.x0))

    @property
    def omega(self) -> np.ndarray:
        return frequencies(self.n, self.dx)

    @property
    def domega(self) -> float:
        return 2.0 * np.pi / (self.n * self.dx)

    def scaled(self, factor) -> "Spectrum":
        """Pointwise product with ``factor`` (scalar or array over omega)."""
        return Spectrum(self.coeffs * factor, self.dx, self.x0, self.n)


def dft_forward(f: GridSignal) -> Spectrum:
    """Rectangle-rule approximation of the continuous Fourier transform."""
    if not isinstance(f, GridSignal):
        raise TypeError(f"expected GridSignal, got {type(f).__name__}")
    omega = frequencies(f.n, f.dx)
    raw = np.fft.fftshift(np.fft.fft(f.samples))
    return Spectrum(f.dx * np.exp(-1j * omega * f.x0) * raw, f.dx, f.x0, f.n)


def dft_inverse(F: Spectrum) -> GridSignal:
    """Exact inverse of :func:`dft_forward`.

    The imaginary part of the result is discarded; it must be roundoff-sized,
    i.e. ``F`` must be Hermitian up to the phase convention.
    """
    if F.coeffs.size != F.n:
        raise ValueError(f"spectrum has {F.coeffs.size} coefficients, declared N = {F.n}")
    omega = F.omega
    raw = np.fft.ifft(np.fft.ifftshift(F.coeffs * np.exp(1j * omega * F.x0))) / F.dx
    scale = np.max(np.abs(raw)) if raw.size else 0.0
    if np.max(np.abs(raw.imag)) > 1e-9 * scale + 1e-300:
        raise ValueError("spectrum is not Hermitian; inverse is not a real signal")
    return GridSignal(raw.real, F.dx, F.x0)


@dataclass(frozen=True)
class SpectralDensity:
    """Discrete spectral measure: masses ``weights`` at points ``lambdas``."""

    lambdas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        lam = _frozen(self.lambdas, float)
        w = _frozen(self.weights, float)
        if lam.ndim != 1 or lam.shape != w.shape:
            raise ValueError("lambdas and weights must be 1-d arrays of equal length")
        if lam.size == 0:
            raise ValueError("empty spectral density")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(w))):
            raise ValueError("non-finite density entries")
        if lam[0] < 0 or np.any(np.diff(lam) <= 0):
            raise ValueError("lambdas must be nonnegative and strictly ascending")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    @property
    def support(self) -> np.ndarray:
        return self.lambdas[self.weights > 0]

    @classmethod
    def point_mass(cls, lam: float, weight: float = 1.0) -> "SpectralDensity":
        return cls([lam], [weight])


@dataclass(frozen=True)
class CrossDensity:
    """Joint spectral data of two signals on a common lambda grid.

    ``gg`` and ``rr`` are the auto densities, ``gr`` the complex cross masses
    ``1/(2 pi) (conj(G(w)) R(w) + conj(G(-w)) R(-w)) dw``.
    """

    lambdas: np.ndarray
    gg: np.ndarray
    rr: np.ndarray
    gr: np.ndarray

    def __post_init__(self):
        for name in ("lambdas", "gg", "rr"):
            object.__setattr__(self, name, _frozen(getattr(self, name), float))
        object.__setattr__(self, "gr", _frozen(self.gr, complex))
        if not (self.lambdas.shape == self.gg.shape == self.rr.shape == self.gr.shape):
            raise ValueError("cross density arrays differ in length")


def _as_spectrum(f) -> Spectrum:
    if isinstance(f, Spectrum):
        return f
    if isinstance(f, GridSignal):
        return dft_forward(f)
    raise TypeError(f"expected GridSignal or Spectrum, got {type(f).__name__}")


def _paired(F: Spectrum):
    """Split coefficients into (lambda, F(w), F(-w)) for w >= 0.

    The w = 0 and Nyquist entries carry a zero partner so that they count once.
    """
    n = F.n
    half = n // 2
    c = F.coeffs
    # index half is k = 0; index 0 is k = -N/2 (Nyquist, no +N/2 partner)
    pos = c[half:]                       # k = 0 .. N/2-1
    neg = np.concatenate(([0.0], c[half - 1:0:-1]))   # k = 0(dummy), -1 .. -(N/2-1)
    omega = F.omega[half:]
    lam = np.concatenate((omega**2, [(np.pi / F.dx) ** 2]))
    plus = np.concatenate((pos, [c[0]]))
    minus = np.concatenate((neg, [0.0]))
    return lam, plus, minus


def spectral_density(f) -> SpectralDensity:
    """Spectral measure ``dE_ff`` of a signal (or of a spectrum) over ``lambda = w^2``.

    Bins ``+w`` and ``-w`` are merged into one mass
    ``1/(2 pi) (|F(w)|^2 + |F(-w)|^2) dw``.
    """
    F = _as_spectrum(f)
    lam, plus, minus = _paired(F)
    w = (np.abs(plus) ** 2 + np.abs(minus) ** 2) * F.domega / (2.0 * np.pi)
    return SpectralDensity(lam, w)


def cross_density(g, r) -> CrossDensity:
    """Auto and cross spectral masses of two signals on the same grid."""
    G, R = _as_spectrum(g), _as_spectrum(r)
    if G.n != R.n or G.dx != R.dx:
        raise ValueError("signals live on different grids")
    lam, gp, gm = _paired(G)
    _, rp, rm = _paired(R)
    k = G.domega / (2.0 * np.pi)
    return CrossDensity(
        lam,
        (np.abs(gp) ** 2 + np.abs(gm) ** 2) * k,
        (np.abs(rp) ** 2 + np.abs(rm) ** 2) * k,
        (np.conj(gp) * rp + np.conj(gm) * rm) * k,
    )


def l2_norm(f: GridSignal) -> float:
    """Ambient norm ``sqrt(sum |f_j|^2 dx)``."""
    return float(np.sqrt(np.sum(f.samples**2) * f.dx))
