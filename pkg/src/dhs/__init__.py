"""Dilational Hilbert scales: weighted spectral norms, interpolation
inequalities and deconvolution by sharpening."""

from .hardy import HardyFunction, diff_bounds, diff_experiment, differentiate, hardy_norm
from .index_functions import (
    Dilated,
    Exp,
    ExpSqrt,
    IndexFunction,
    OnePlusPower,
    PowerLaw,
    PowerPlusOne,
    Tabulated,
    generate_from_alpha,
)
from .peaks import Peak, PeakModel, convolve, source_check, synth_spectrum
from .scales import (
    Margin,
    PreconditionError,
    dhs_interp_margin,
    dhs_norm,
    holder_margin,
    interp_margin,
    variant_cs_margin,
    vhs_norm,
)
from .sharpen import SharpenConfig, apriori_bound, error_bound, morozov_sharpen, sharpen
from .spectral import GridSignal, SpectralDensity, dft_forward, dft_inverse, spectral_density

__version__ = "0.1.0"
