import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dhs.index_functions import ConcaveWitness, Exp, ExpSqrt, PowerLaw, PowerPlusOne, Tabulated
from dhs.scales import (
    Margin,
    PreconditionError,
    ScaleNorms,
    certify_generator,
    dhs_interp_margin,
    dhs_norm,
    holder_margin,
    interp_margin,
    scale_norms,
    variant_cs_margin,
    vhs_norm,
)
from dhs.spectral import (
    GridSignal,
    Spectrum,
    SpectralDensity,
    cross_density,
    dft_inverse,
    l2_norm,
    spectral_density,
)


@st.composite
def densities(draw, lam_max=5.0, lam_min=1e-3, max_size=12):
    lam = draw(st.lists(st.floats(lam_min, lam_max), min_size=1, max_size=max_size, unique=True))
    w = draw(st.lists(st.floats(1e-3, 1e3), min_size=len(lam), max_size=len(lam)))
    order = np.argsort(lam)
    return SpectralDensity(np.array(lam)[order], np.array(w)[order])


def bandlimited(seed, n=512, dx=0.05, kmax=20):
    """Spectrum of a real signal with modes 1..kmax only (no constant term)."""
    rng = np.random.default_rng(seed)
    c = np.zeros(n, dtype=complex)
    amp = rng.normal(size=kmax) + 1j * rng.normal(size=kmax)
    c[n // 2 + 1:n // 2 + 1 + kmax] = amp
    c[n // 2 - kmax:n // 2] = np.conj(amp[::-1])
    return Spectrum(c, dx)


# -- norms -------------------------------------------------------------------------------

def test_constant_weight_gives_ambient_norm():
    F = bandlimited(0)
    f = dft_inverse(F)
    d = spectral_density(f)
    assert vhs_norm(d, PowerPlusOne(2).dilate(0.0)) == pytest.approx(l2_norm(f), rel=1e-12)
    assert vhs_norm(d, None) == pytest.approx(l2_norm(f), rel=1e-12)


def test_point_mass_exp():
    assert vhs_norm(SpectralDensity.point_mass(1.0), Exp()) == pytest.approx(math.sqrt(math.e))


def test_power_law_norm_is_derivative_norm():
    F = bandlimited(1)
    df = dft_inverse(F.scaled(1j * F.omega))
    assert vhs_norm(spectral_density(F), PowerLaw(1.0)) == pytest.approx(l2_norm(df), rel=1e-8)


def test_power_law_rejects_dc_mass():
    f = GridSignal(np.ones(16), 0.1)
    with pytest.raises(ValueError):
        vhs_norm(spectral_density(f), PowerLaw(1.0))


def test_dhs_norm_examples():
    d = SpectralDensity.point_mass(2.0, 4.0)
    assert dhs_norm(d, Exp(), 1.0) == pytest.approx(2 * math.e)
    f = dft_inverse(bandlimited(2))
    assert dhs_norm(spectral_density(f), Exp(), 0.0) == pytest.approx(l2_norm(f), rel=1e-12)


def test_dhs_norm_rejects_non_admissible_and_negative_s():
    d = SpectralDensity.point_mass(1.0)
    with pytest.raises(ValueError):
        dhs_norm(d, PowerLaw(1.0), 1.0)
    with pytest.raises(ValueError):
        dhs_norm(d, Exp(), -1.0)


def test_overflow_saturates_to_inf(caplog):
    d = SpectralDensity([1.0, 2000.0], [1.0, 1.0])
    with caplog.at_level(logging.WARNING):
        assert vhs_norm(d, Exp()) == math.inf
    assert "overflow" in caplog.text


def test_log_domain_avoids_spurious_overflow():
    # exp(750) overflows, but a tiny weight keeps the product finite
    d = SpectralDensity([750.0], [1e-300])
    expected = math.exp(0.5 * (750.0 + math.log(1e-300)))
    assert vhs_norm(d, Exp()) == pytest.approx(expected, rel=1e-12)


def test_tabulated_weight_outside_table_raises():
    tab = Tabulated([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        vhs_norm(SpectralDensity.point_mass(3.0), tab)


@settings(max_examples=100, deadline=None)
@given(densities(), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_embedding(d, s, t):
    s, t = sorted((s, t))
    for a in (Exp(), PowerPlusOne(2), ExpSqrt()):
        assert dhs_norm(d, a, s) <= dhs_norm(d, a, t) * (1 + 1e-14)


@settings(max_examples=100, deadline=None)
@given(densities(), st.floats(0.0, 3.0))
def test_gaussian_scale_is_ordinary_scale(d, s):
    direct = np.sum(np.exp(s * d.lambdas) * d.weights)
    assert dhs_norm(d, Exp(), s) ** 2 == pytest.approx(direct, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(densities(), st.floats(0.1, 10.0))
def test_norm_monotone_in_weights(d, c):
    bigger = SpectralDensity(d.lambdas, d.weights * (1 + c))
    assert vhs_norm(d, Exp()) <= vhs_norm(bigger, Exp())


def test_scale_norms_container():
    d = SpectralDensity([0.5, 1.0], [1.0, 2.0])
    n = scale_norms(d, phi=Exp(), psi=PowerPlusOne(2))
    assert n.base == pytest.approx(math.sqrt(3.0))
    assert n.theta_norm is None
    with pytest.raises(ValueError):
        ScaleNorms(base=-1.0)


def test_margin_relative():
    assert Margin(-2.0, 4.0, True).relative == -0.5
    assert Margin(-2.0, 0.0, True).relative == -2.0


# -- Hoelder ------------------------------------------------------------------------------

IDENT = ConcaveWitness(lambda x: x)


@settings(max_examples=100, deadline=None)
@given(densities())
def test_holder_sobolev_case(d):
    m = holder_margin(d, PowerLaw(-1.0), PowerLaw(1.0), None, IDENT, IDENT)
    direct = vhs_norm(d, PowerLaw(-1.0)) ** 2 * vhs_norm(d, PowerLaw(1.0)) ** 2 / d.total**2 - 1
    assert m.value == pytest.approx(direct, rel=1e-10, abs=1e-12)
    assert m.value >= -1e-9
    assert m.certified


def test_holder_point_mass_equals_pointwise_condition():
    d = SpectralDensity.point_mass(0.7, 3.0)
    Phi = ConcaveWitness(np.sqrt)
    Psi = ConcaveWitness(np.sqrt)
    m = holder_margin(d, Exp(), Exp(), None, Phi, Psi)
    assert m.value == pytest.approx(math.exp(0.7) - 1, rel=1e-12)
    assert "pointwise" in m.detail


@settings(max_examples=100, deadline=None)
@given(densities(), st.floats(0.05, 0.95))
def test_holder_exp_case(d, s):
    Phi = ConcaveWitness(lambda x: 1.0 / x)
    Psi = ConcaveWitness(lambda y: y**s)
    m = holder_margin(d, Exp().dilate(s), Exp(), None, Phi, Psi)
    assert m.value >= -1e-9
    # 1/x is convex, so the hypothesis is not certified even though the bound holds
    assert not m.certified


def test_holder_zero_density_rejected():
    with pytest.raises(ValueError):
        holder_margin(SpectralDensity([1.0], [0.0]), Exp(), Exp(), None, IDENT, IDENT)


# -- interpolation --------------------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(densities(), st.floats(-1.0, 1.0), st.floats(0.1, 2.0), st.floats(0.1, 2.0))
def test_ordinary_scale_interpolation(d, a, db, dc):
    # phi = lambda^b, psi = lambda^c, theta = lambda^a with a < b < c
    def power(p):
        return PowerLaw(p) if p != 0 else None

    b, c = a + db, a + db + dc
    m = interp_margin(d, PowerLaw(db), PowerLaw(db + dc), power(a))
    assert m.relative >= -1e-9
    # equivalent form ||f||_b <= ||f||_a^{1-s} ||f||_c^s with s = (b-a)/(c-a)
    s = (b - a) / (c - a)
    nb, na, nc = (vhs_norm(d, power(p)) for p in (b, a, c))
    assert nb <= na ** (1 - s) * nc**s * (1 + 1e-9)


@settings(max_examples=100, deadline=None)
@given(densities())
def test_sobolev_m3_interpolation(d):
    m = interp_margin(d, PowerLaw(1.0), PowerLaw(3.0))
    assert m.relative >= -1e-9
    lhs = vhs_norm(d, PowerLaw(0.5))
    rhs = vhs_norm(d, None) ** (2 / 3) * vhs_norm(d, PowerLaw(1.5)) ** (1 / 3)
    assert lhs <= rhs * (1 + 1e-9)


@settings(max_examples=50, deadline=None)
@given(densities())
def test_equal_functions_give_zero_margin(d):
    m = interp_margin(d, Exp(), Exp())
    assert abs(m.relative) <= 1e-14


def test_interp_precondition_failure():
    d = SpectralDensity([0.5, 1.0, 2.0], [1.0, 1.0, 1.0])
    with pytest.raises(PreconditionError):
        interp_margin(d, PowerLaw(3.0), PowerLaw(1.0))
    m = interp_margin(d, PowerLaw(3.0), PowerLaw(1.0), strict=False)
    assert not m.certified
    assert m.value < 0


# -- dilational interpolation -------------------------------------------------------------------

@pytest.mark.parametrize("a", [Exp(), PowerPlusOne(2), ExpSqrt()], ids=repr)
@settings(max_examples=30, deadline=None)
@given(d=densities(), t=st.floats(0.1, 3.0))
def test_dhs_interp_equality_at_endpoints(a, d, t):
    assert dhs_interp_margin(d, a, t, 0.0).value == 0.0
    assert dhs_interp_margin(d, a, t, 1.0).value == 0.0


@pytest.mark.parametrize("a", [Exp(), PowerPlusOne(2), ExpSqrt()], ids=repr)
@settings(max_examples=30, deadline=None)
@given(lam=st.floats(1e-3, 5.0), w=st.floats(1e-3, 1e3), t=st.floats(0.1, 3.0),
       sigma=st.floats(0.0, 1.0))
def test_dhs_interp_point_mass_is_tight(a, lam, w, t, sigma):
    m = dhs_interp_margin(SpectralDensity.point_mass(lam, w), a, t, sigma)
    assert abs(m.relative) <= 1e-12


@pytest.mark.parametrize("a", [Exp(), PowerPlusOne(2), ExpSqrt()], ids=repr)
@settings(max_examples=50, deadline=None)
@given(d=densities(), t=st.floats(0.1, 3.0), sigma=st.floats(0.0, 1.0))
def test_dhs_interp_holds(a, d, t, sigma):
    m = dhs_interp_margin(d, a, t, sigma)
    assert m.relative >= -1e-9
    assert m.certified


def test_dhs_interp_domain_errors():
    d = SpectralDensity.point_mass(1.0)
    with pytest.raises(ValueError):
        dhs_interp_margin(d, Exp(), 1.0, 1.5)
    with pytest.raises(ValueError):
        dhs_interp_margin(d, Exp(), 0.0, 0.5)
    with pytest.raises(ValueError, match="overflow"):
        dhs_interp_margin(SpectralDensity.point_mass(1000.0), Exp(), 1.0, 0.5)


def test_certify_generator():
    assert certify_generator(Exp())
    assert certify_generator(PowerPlusOne(2))
    assert certify_generator(ExpSqrt())
    assert not certify_generator(Tabulated([0.0, 1.0], [1.0, 2.0]))


# -- variant Cauchy-Schwarz ----------------------------------------------------------------------

def signal(seed, n=64, dx=0.5):
    return GridSignal(np.random.default_rng(seed).standard_normal(n), dx)


def test_variant_cs_equality():
    g = signal(0)
    psi = Exp().dilate(0.1)
    m = variant_cs_margin(cross_density(g, g), psi, psi)
    assert abs(m.relative) <= 1e-12


def test_variant_cs_orthogonal():
    n, dx = 64, 0.5
    x = dx * np.arange(n)
    L = n * dx
    g = GridSignal(np.cos(2 * np.pi * 2 * x / L), dx)
    r = GridSignal(np.cos(2 * np.pi * 5 * x / L), dx)
    cd = cross_density(g, r)
    m = variant_cs_margin(cd, PowerPlusOne(2), Exp().dilate(0.1))
    assert abs(np.sum(cd.gr)) <= 1e-10
    assert m.value == pytest.approx(m.scale)
    assert m.value > 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 2.0), st.floats(0.01, 0.2))
def test_variant_cs_random_pairs(seed, s, t):
    cd = cross_density(signal(seed), signal(seed + 1))
    m = variant_cs_margin(cd, PowerPlusOne(2).dilate(s), Exp().dilate(t))
    assert m.relative >= -1e-9


def test_variant_cs_rejects_vanishing_psi():
    cd = cross_density(signal(0), signal(1))
    with pytest.raises(ValueError):
        variant_cs_margin(cd, None, lambda lam: lam)
