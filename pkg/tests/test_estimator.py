import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bribery.errors import DesignError, RankDeficiencyError, SizeLimitError
from bribery.estimator import RegressionSpec, fit_panel, fit_within, lsdv_oracle, stars, within_demean
from bribery.panelgen import Calibration, Design, generate_panel


def make_design(X, y, firm, year=None):
    X = pd.DataFrame(X) if not isinstance(X, pd.DataFrame) else X
    X.columns = [str(c) for c in X.columns]
    return Design(X=X, y=pd.Series(np.asarray(y, float)), firm_id=np.asarray(firm),
                  year=np.zeros(len(y)) if year is None else np.asarray(year),
                  coef_keys={c: c for c in X.columns}, variant="custom")


def random_design(rng, G=3, T=4, k=4):
    firm = np.repeat(np.arange(G), T)
    X = rng.normal(size=(G * T, k)) + rng.normal(size=(G, k))[firm]
    y = X @ rng.normal(size=k) + rng.normal(size=G)[firm] + rng.normal(size=G * T)
    return make_design(pd.DataFrame(X, columns=[f"x{j}" for j in range(k)]), y, firm)


@pytest.fixture
def toy():
    return make_design({"x": [0.0, 2.0, 0.0, 2.0]}, [1.0, 4.0, 2.0, 3.0], ["A", "A", "B", "B"])


# -- demeaning ------------------------------------------------------------------------------

def test_two_point_demeaning():
    out, means = within_demean(np.array([0.0, 2.0]), ["A", "A"])
    np.testing.assert_array_equal(out, [-1.0, 1.0])
    assert means[0] == 1.0


def test_firm_constant_column_vanishes():
    firm = np.array([3, 3, 7, 7, 7])
    out, _ = within_demean(np.column_stack([firm, firm * 2.5]).astype(float), firm)
    np.testing.assert_array_equal(out, 0.0)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (12, 3), elements=st.floats(-1e6, 1e6)),
       arrays(np.int64, 12, elements=st.integers(0, 3)))
def test_demeaning_idempotent_and_zero_mean(X, groups):
    once, _ = within_demean(X, groups)
    twice, _ = within_demean(once, groups)
    scale = max(1.0, np.abs(X).max())
    np.testing.assert_allclose(twice, once, atol=1e-12 * scale)
    for g in np.unique(groups):
        assert np.abs(once[groups == g].mean(axis=0)).max() <= 1e-12 * scale


# -- toy panel ----------------------------------------------------------------------------

def test_toy_panel_cr0(toy):
    fit = fit_within(toy, cov_type="CR0")
    assert fit.coef["x"] == pytest.approx(1.0, abs=1e-12)
    assert fit.se["x"] == pytest.approx(0.35355, abs=1e-5)
    assert fit.coef["intercept"] == pytest.approx(1.5)


def test_toy_panel_cr1_out_of_dof(toy):
    with pytest.raises(DesignError, match="CR1"):
        fit_within(toy, cov_type="CR1")


def test_toy_panel_lsdv(toy):
    assert lsdv_oracle(toy)["x"] == pytest.approx(1.0, abs=1e-12)


def test_cr1_factor():
    d = random_design(np.random.default_rng(0), G=10, T=3, k=2)
    a, b = fit_within(d, "CR0"), fit_within(d, "CR1")
    N, G, K = 30, 10, 2 + 10 + 1
    ratio = (G / (G - 1)) * (N - 1) / (N - K)
    np.testing.assert_allclose(b.cov.to_numpy(), a.cov.to_numpy() * ratio, rtol=1e-12)
    assert b.df_resid == N - K


# -- oracle equivalence and absorbed regressors --------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_lsdv_matches_within(seed):
    d = random_design(np.random.default_rng(seed))
    fit, oracle = fit_within(d), lsdv_oracle(d)
    for k, v in oracle.items():
        assert abs(fit.coef[k] - v) < 1e-8


def test_within_constant_regressor_not_identified():
    rng = np.random.default_rng(1)
    d = random_design(rng, G=4, T=3, k=3)
    d.X["const_in_firm"] = np.repeat(rng.normal(size=4), 3)
    d.coef_keys["const_in_firm"] = "const_in_firm"
    fit, oracle = fit_within(d), lsdv_oracle(d)
    assert fit.not_identified == ["const_in_firm"]
    assert np.isnan(fit.coef["const_in_firm"])
    assert "const_in_firm" not in oracle
    for k, v in oracle.items():
        assert abs(fit.coef[k] - v) < 1e-8
    assert "not identified" in fit.table()


def test_rank_deficiency_names_collinear_set():
    d = random_design(np.random.default_rng(2), G=5, T=3, k=3)
    d.X["twice_x0"] = 2 * d.X["x0"] - d.X["x1"]
    d.coef_keys["twice_x0"] = "twice_x0"
    with pytest.raises(RankDeficiencyError) as err:
        fit_within(d)
    assert set(err.value.collinear) == {"x0", "x1", "twice_x0"}


def test_lsdv_size_cap():
    d = random_design(np.random.default_rng(0), G=20, T=3)
    with pytest.raises(SizeLimitError):
        lsdv_oracle(d, max_firms=10)


# -- singleton clusters --------------------------------------------------------------------------

def test_singleton_clusters_contribute_nothing():
    rng = np.random.default_rng(3)
    d = random_design(rng, G=6, T=3, k=2)
    extra = make_design(pd.DataFrame(rng.normal(size=(3, 2)), columns=["x0", "x1"]),
                        rng.normal(size=3), [100, 101, 102])
    both = make_design(pd.concat([d.X, extra.X], ignore_index=True),
                       np.r_[d.y, extra.y], np.r_[d.firm_id, extra.firm_id])
    a, b = fit_within(d, "CR0"), fit_within(both, "CR0")
    np.testing.assert_allclose(b.cov.to_numpy(), a.cov.to_numpy(), rtol=1e-10)
    np.testing.assert_allclose([b.coef["x0"], b.coef["x1"]], [a.coef["x0"], a.coef["x1"]], rtol=1e-10)


def test_all_singletons_rejected():
    d = make_design({"x": [1.0, 2.0, 3.0]}, [1.0, 2.0, 4.0], [1, 2, 3])
    with pytest.raises(DesignError, match="2 periods"):
        fit_within(d, "CR0")


# -- invariances ----------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def panel():
    return generate_panel(Calibration(n_firms=150), "SwC", seed=11)


@pytest.fixture(scope="module")
def design(panel):
    return RegressionSpec().build(panel)


def test_response_shift_moves_intercept_only(design):
    base = fit_within(design)
    shifted = fit_within(Design(design.X, design.y + 17.5, design.firm_id, design.year,
                                design.coef_keys))
    for k in base.coef:
        if k == "intercept":
            assert shifted.coef[k] == pytest.approx(base.coef[k] + 17.5, abs=1e-10)
        else:
            assert abs(shifted.coef[k] - base.coef[k]) <= 1e-10 * max(1.0, abs(base.coef[k]))


@pytest.mark.parametrize("col,k", [("n_w", 3.0), ("dpi_p_w", 1e-3), ("ap_w", -2.0)])
def test_column_rescaling(design, col, k):
    base = fit_within(design)
    X = design.X.copy()
    X[col] = X[col] * k
    scaled = fit_within(Design(X, design.y, design.firm_id, design.year, design.coef_keys))
    key = design.coef_keys[col]
    assert scaled.coef[key] == pytest.approx(base.coef[key] / k, rel=1e-8)
    t0, t1 = base.tstat, scaled.tstat
    for name in t0:
        assert abs(t1[name]) == pytest.approx(abs(t0[name]), rel=1e-8, abs=1e-8)


def test_row_order_does_not_matter(design):
    base = fit_within(design)
    perm = np.random.default_rng(0).permutation(len(design.y))
    shuffled = Design(design.X.iloc[perm], design.y.iloc[perm], design.firm_id[perm],
                      design.year[perm], design.coef_keys)
    other = fit_within(shuffled)
    for k in base.coef:
        assert other.coef[k] == pytest.approx(base.coef[k], rel=1e-10, abs=1e-12)
        assert other.se[k] == pytest.approx(base.se[k], rel=1e-10)


def test_fit_result_invariants(panel):
    fit = fit_panel(panel)
    V = fit.cov.to_numpy()
    np.testing.assert_array_equal(V, V.T)
    assert np.linalg.eigvalsh(V).min() > -1e-12 * np.abs(V).max()
    np.testing.assert_allclose([fit.se[k] for k in fit.cov.index], np.sqrt(np.diag(V)))
    for r2 in (fit.r2_within, fit.r2_between, fit.r2_overall):
        assert 0.0 <= r2 <= 1.0
    assert fit.n_obs == 450 and fit.n_firms == 150


def test_report_and_csv(panel, tmp_path):
    fit = fit_panel(panel)
    text = fit.table()
    assert "1_SwC·λ" in text and "−s_P" in text and "Intercept" in text and "***" in text
    fit.write_csv(tmp_path / "fit.csv")
    df = pd.read_csv(tmp_path / "fit.csv", float_precision="round_trip")
    assert list(df.columns) == ["name", "estimate", "se", "t"]
    row = df.set_index("name").loc["swc_lambda"]
    assert row.estimate == fit.coef["swc_lambda"]


def test_stars():
    assert stars(3.0) == "***" and stars(-2.0) == "**" and stars(1.7) == "*" and stars(1.0) == ""


def test_spec_options(panel):
    no_years = fit_panel(panel, RegressionSpec(year_dummies=False))
    assert not any(k.startswith("beta_20") for k in no_years.coef)
    sub = fit_panel(panel, RegressionSpec(regressors=("n_w", "m_p_w")))
    assert set(sub.coef) == {"swc_g", "neg_sp", "intercept"}
    with pytest.raises(DesignError):
        RegressionSpec(regressors=("n_w", "n_w"))
    with pytest.raises(DesignError):
        fit_panel(panel, RegressionSpec(regressors=("nope",)))
