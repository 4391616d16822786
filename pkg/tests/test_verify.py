import numpy as np
import pytest

from dhs.verify import SUITES, TOL, random_density, run_all, run_suite


def test_all_suites_pass():
    results = run_all(seed=0, trials=100)
    assert [r.inequality for r in results] == list(SUITES)
    for r in results:
        assert r.trials >= 100
        assert r.ok, r
        assert r.min_margin >= -TOL


def test_suites_cover_dhs_interp_grid():
    names = [n for n in SUITES if n.startswith("dhs_interp_")]
    assert len(names) == 15


def test_suites_cover_every_check_predicate():
    for name in ("check_alpha_scaling", "check_cond9", "check_midpoint_concave",
                 "check_convexity_psi_phi_inv", "concave_witness_certificate",
                 "error_dominance_check"):
        assert name in SUITES


def test_suite_is_deterministic():
    a = run_suite("interp_unweighted", seed=5, trials=50)
    b = run_suite("interp_unweighted", seed=5, trials=50)
    assert a == b


def test_suite_seed_matters():
    a = run_suite("holder_sobolev", seed=1, trials=30)
    b = run_suite("holder_sobolev", seed=2, trials=30)
    assert a.min_margin != b.min_margin


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("no_such_inequality")
    with pytest.raises(ValueError):
        run_suite("interp_unweighted", trials=0)


def test_random_density_shape():
    rng = np.random.Generator(np.random.Philox(0))
    for _ in range(50):
        d = random_density(rng)
        assert 1 <= d.lambdas.size <= 16
        assert np.all(d.weights > 0)
        assert np.all((d.lambdas >= 1e-3) & (d.lambdas <= 5.0))


def test_holder_exp_marked_uncertified():
    r = run_suite("holder_exp", seed=0, trials=100)
    assert r.ok
    assert r.uncertified == r.trials
