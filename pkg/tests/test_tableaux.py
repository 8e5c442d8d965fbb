import json

import numpy as np
import pytest

from relaxdiff.tableaux import (
    CATALOG_PAIRS,
    ButcherTableau,
    ShuOsherForm,
    lambda_ssp,
    shu_osher_from_dict,
    shu_osher_to_butcher,
    shu_osher_to_dict,
    ssp_tableau,
    tableau_from_dict,
    tableau_to_dict,
    validate_order,
)

# Reference SSP coefficients: first-order family -> s, second-order -> s-1,
# third-order -> 1, 2, 2.65.
LAMBDA_SSP = {(s, 1): float(s) for s in range(1, 6)}
LAMBDA_SSP.update({(s, 2): float(s - 1) for s in range(2, 6)})
LAMBDA_SSP.update({(3, 3): 1.0, (4, 3): 2.0, (5, 3): 2.65})


def test_catalog_pairs_complete():
    assert len(CATALOG_PAIRS) == 12
    for s, p in CATALOG_PAIRS:
        tab, form = ssp_tableau(s, p)
        assert tab.s == s
        assert form.s == s
        assert tab.p == p


def test_unknown_pair_names_supported_catalog():
    with pytest.raises(ValueError, match=r"\(3,3\)"):
        ssp_tableau(2, 3)
    with pytest.raises(ValueError, match="unknown"):
        ssp_tableau(6, 1)


def test_forward_euler_is_trivial():
    tab, form = ssp_tableau(1, 1)
    assert tab.a.shape == (1, 1)
    assert tab.a[0, 0] == 0.0
    np.testing.assert_array_equal(tab.b, [1.0])
    np.testing.assert_array_equal(form.alpha, [[1.0]])
    np.testing.assert_array_equal(form.beta, [[1.0]])


def test_ssp33_matches_classical_coefficients():
    _, form = ssp_tableau(3, 3)
    alpha = np.array([[1, 0, 0], [3 / 4, 1 / 4, 0], [1 / 3, 0, 2 / 3]])
    beta = np.array([[1, 0, 0], [0, 1 / 4, 0], [0, 0, 2 / 3]])
    np.testing.assert_allclose(form.alpha, alpha, atol=1e-15)
    np.testing.assert_allclose(form.beta, beta, atol=1e-15)


def test_first_order_family_is_equal_substeps():
    for s in range(1, 6):
        _, form = ssp_tableau(s, 1)
        for r in range(s):
            expect_a = np.zeros(s)
            expect_a[r] = 1.0
            np.testing.assert_array_equal(form.alpha[r], expect_a)
            assert form.beta[r, r] == pytest.approx(1.0 / s, abs=1e-16)
        assert lambda_ssp(form) == pytest.approx(s, abs=1e-13)


@pytest.mark.parametrize("s,p", CATALOG_PAIRS)
def test_lambda_ssp_reference_values(s, p):
    _, form = ssp_tableau(s, p)
    lam = lambda_ssp(form)
    if (s, p) == (5, 3):
        assert lam == pytest.approx(2.65, abs=0.01)
    else:
        assert lam == pytest.approx(LAMBDA_SSP[(s, p)], abs=1e-13)


def test_lambda_ssp_degenerate():
    form = ShuOsherForm(alpha=np.array([[1.0]]), beta=np.array([[0.0]]))
    with pytest.raises(ValueError, match="degenerate"):
        lambda_ssp(form)


@pytest.mark.parametrize("s,p", CATALOG_PAIRS)
def test_catalog_invariants(s, p):
    _, form = ssp_tableau(s, p)
    assert form.alpha.min() >= 0.0
    assert form.beta.min() >= 0.0
    np.testing.assert_allclose(form.alpha.sum(axis=1), 1.0, atol=1e-14)


@pytest.mark.parametrize("s,p", CATALOG_PAIRS)
def test_order_conditions_hold(s, p):
    tab, _ = ssp_tableau(s, p)
    check = validate_order(tab, p)
    assert check.ok, check.residuals
    assert max(abs(v) for v in check.residuals.values()) <= 1e-12


def test_forward_euler_passes_first_order():
    tab, _ = ssp_tableau(1, 1)
    assert validate_order(tab, 1).ok


def test_ssp33_is_not_fourth_order():
    tab, _ = ssp_tableau(3, 3)
    assert validate_order(tab, 3).ok
    # sum(b c^3) = 1/4 happens to hold for this scheme, but a three-stage
    # scheme cannot be fourth order: the remaining quartic conditions fail
    assert abs(tab.b @ tab.c**3 - 0.25) < 1e-14
    assert abs(tab.b @ (tab.a @ tab.c**2) - 1.0 / 12.0) > 1e-2
    assert abs(tab.b @ (tab.a @ (tab.a @ tab.c)) - 1.0 / 24.0) > 1e-2
    with pytest.raises(ValueError, match="above 3"):
        validate_order(tab, 4)


def test_ssp32_fails_third_order_with_known_residual():
    tab, _ = ssp_tableau(3, 2)
    assert validate_order(tab, 2).ok
    check = validate_order(tab, 3)
    assert not check.ok
    assert check.residuals["bc2"] == pytest.approx(1.0 / 12.0, abs=1e-14)


@pytest.mark.parametrize("s,p", CATALOG_PAIRS)
def test_shu_osher_butcher_equivalence(s, p):
    tab, form = ssp_tableau(s, p)
    again = shu_osher_to_butcher(form, p)
    np.testing.assert_allclose(again.a, tab.a, atol=1e-14)
    np.testing.assert_allclose(again.b, tab.b, atol=1e-14)


def test_abscissae_are_row_sums():
    for s, p in CATALOG_PAIRS:
        tab, _ = ssp_tableau(s, p)
        np.testing.assert_allclose(tab.c, tab.a.sum(axis=1), atol=1e-15)
        assert tab.b.sum() == pytest.approx(1.0, abs=1e-14)


def test_tableau_validation_rejects_bad_input():
    with pytest.raises(ValueError, match="lower triangular"):
        ButcherTableau(a=[[0.0, 0.5], [0.5, 0.0]], b=[0.5, 0.5], c=[0.5, 0.5], p=1)
    with pytest.raises(ValueError, match="sum to 1"):
        ButcherTableau(a=[[0.0, 0.0], [0.5, 0.0]], b=[0.5, 0.9], c=[0.0, 0.5], p=1)
    with pytest.raises(ValueError, match="row sums"):
        ButcherTableau(a=[[0.0, 0.0], [0.5, 0.0]], b=[0.5, 0.5], c=[0.0, 0.9], p=1)
    with pytest.raises(ValueError, match="convex"):
        ShuOsherForm(alpha=np.array([[0.5]]), beta=np.array([[0.5]]))


def test_json_roundtrip_butcher(tmp_path):
    tab, _ = ssp_tableau(4, 3)
    path = tmp_path / "tab.json"
    path.write_text(json.dumps(tableau_to_dict(tab)))
    back = tableau_from_dict(json.loads(path.read_text()))
    np.testing.assert_array_equal(back.a, tab.a)
    np.testing.assert_array_equal(back.b, tab.b)
    np.testing.assert_array_equal(back.c, tab.c)
    assert back.p == tab.p


def test_json_roundtrip_shu_osher():
    tab, form = ssp_tableau(5, 3)
    d = shu_osher_to_dict(form, 3)
    tab2, form2 = shu_osher_from_dict(json.loads(json.dumps(d)))
    np.testing.assert_allclose(form2.alpha, form.alpha, atol=1e-15)
    np.testing.assert_allclose(form2.beta, form.beta, atol=1e-15)
    np.testing.assert_allclose(tab2.a, tab.a, atol=1e-14)
    np.testing.assert_allclose(tab2.b, tab.b, atol=1e-14)
