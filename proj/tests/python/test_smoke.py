import math

import numpy as np
import pytest

import eivsparse as ev


def test_toy_example_shapes():
    toy = ev.toy_example(200, seed=3)
    ds = toy["dataset"]
    assert (ds.samples, ds.predictors, ds.replicates) == (200, 3, 2)
    assert toy["V"].shape == (200, 3)
    assert np.allclose(toy["beta"], [1.0, 0.0, 0.0])


def test_anova_hand_example():
    # Two samples, two replicates: means 2 and 7, within-sample variance 2.
    e = ev.anova(np.array([[1.0, 3.0], [6.0, 8.0]]))
    assert e["s_delta_sq"] == pytest.approx(2.0)
    assert e["s_nu_sq"] == pytest.approx(11.5)
    assert e["df_treatment"] == 1 and e["df_error"] == 2


def test_lars_ends_at_least_squares():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((30, 5))
    y = X @ rng.standard_normal(5) + 0.1 * rng.standard_normal(30)
    path = ev.lars(X, y)
    assert len(path) >= 6
    assert path.coefficients.shape == (len(path), 5)
    ls = np.linalg.lstsq(X, y, rcond=None)[0]
    assert np.allclose(path.coefficients[-1], ls, atol=1e-9)
    assert np.all(np.diff(path.rss) <= 1e-10)


def test_dantzig_large_lambda_is_zero():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((20, 4))
    y = rng.standard_normal(20)
    beta, objective, status = ev.dantzig(X, y, float(np.abs(X.T @ y).max()))
    assert status == "optimal"
    assert objective == 0.0 and not beta.any()


def test_design_uncertainty_identity():
    s = np.array([0.5, 2.0, 1.5])
    b = np.array([1.0, -2.0, 0.25])
    assert ev.design_uncertainty(b / s, s) == pytest.approx(np.linalg.norm(b))


def test_cross_validate_is_deterministic():
    ds = ev.toy_example(120, seed=5)["dataset"]
    a = ev.cross_validate(ds, "lars", k=5, outer_loops=2, seed=9, threads=1)
    b = ev.cross_validate(ds, "lars", k=5, outer_loops=2, seed=9, threads=2)
    assert a.to_json() == b.to_json()
    assert all(math.isfinite(v) for v in a.msep)
    assert set(a.selected_support) <= {0, 1, 2}


def test_csv_round_trip(tmp_path):
    ds = ev.toy_example(10, seed=1)["dataset"]
    path = tmp_path / "toy.csv"
    ev.save_csv(ds, path)
    back = ev.load_csv(path)
    assert back.samples == 10 and back.predictors == 3
    assert np.allclose(back.design[0], ds.design[0], atol=1e-12)


def test_errors_map_to_python_exceptions(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("sample,replicate,y,x\na,1,1.0,2.0\n")
    with pytest.raises(ev.InputError, match="replicates"):
        ev.anova_per_variable(ev.load_csv(bad))
    assert issubclass(ev.InputError, ValueError)
    with pytest.raises(ev.InputError):
        ev.forward_stagewise(np.ones((3, 2)), np.ones(3), gamma=-1.0)
