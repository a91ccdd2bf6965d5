import math
import os
import tempfile

import pytest

import rsbound

CACHE = os.environ.get("RSBOUND_TEST_CACHE") or os.path.join(tempfile.gettempdir(), "rsbound-test-cache")


@pytest.fixture(scope="module")
def table():
    os.makedirs(CACHE, exist_ok=True)
    return rsbound.cached_overlap_table(rsbound.ModelParams(1.0, 1.0), rsbound.OverlapSettings(), CACHE)


def test_closed_forms():
    assert rsbound.norm_factor(math.pi ** 2) == pytest.approx(math.exp(0.5), rel=1e-12)
    assert rsbound.bump_theta(0.5) == pytest.approx(0.5, abs=1e-12)
    assert rsbound.bump_theta(-1.0) == 0.0
    assert rsbound.bump_theta(2.0) == 1.0
    assert rsbound.profile_h(0.0) == 0.0
    assert rsbound.generic_bound(0.1, 2.0, 0.01) == pytest.approx(0.09)
    assert rsbound.bessel_j1(1.0) == pytest.approx(0.44005058574493355, rel=1e-14)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        rsbound.norm_factor(0.0)
    with pytest.raises(ValueError):
        rsbound.ModelParams(1.0, 0.5).validate()
    with pytest.raises(ValueError):
        rsbound.onshell_ft(-1.0, 0.0, rsbound.ModelParams())


def test_model():
    p = rsbound.ModelParams(1.0, 2.0)
    c = p.center()
    assert c[1] == pytest.approx(-2.0 * math.sqrt(2.0))
    assert rsbound.smearing_f(c, p) == 1.0
    w0 = rsbound.w2_self(p)
    assert w0 == pytest.approx(0.020578827911688722, rel=1e-9)
    assert rsbound.p_ideal(p) == pytest.approx(-math.expm1(-w0), rel=1e-12)
    w = rsbound.boosted_overlap(0.3, p)
    assert isinstance(w, complex)
    assert rsbound.boosted_overlap(-0.3, p) == pytest.approx(w.conjugate(), abs=1e-12 * w0)


def test_table_and_bound(table):
    assert table.converged
    assert table.w0 == pytest.approx(0.020578827911688722, rel=1e-9)
    assert table(0.0) == pytest.approx(table.w0)
    e = rsbound.approx_error(1e4, table)
    assert e == pytest.approx(math.sqrt(rsbound.ideal_click_probability(table.w0)), rel=0.01)

    res = rsbound.bound_min(1e-4, table)
    assert 0.0 <= res.p_max <= 1.0
    assert res.p_max == pytest.approx(
        rsbound.generic_bound(res.e_zeta, rsbound.norm_factor(res.zeta_star), 1e-4), rel=1e-12)

    vac = rsbound.bound_min(1e-4, table.with_alpha(0.0))
    assert vac.p_max == pytest.approx(1e-4, rel=0.005)

    rows = rsbound.sweep(table, [1e-10, 1e-6, 1e-2, 1.0])
    assert [r["p_dark"] for r in rows] == [1e-10, 1e-6, 1e-2, 1.0]
    assert all(b["p_max"] >= a["p_max"] for a, b in zip(rows, rows[1:]))
    assert rows[-1]["p_max"] == 1.0


def test_verify():
    reports = rsbound.verify()
    assert len(reports) == 5
    assert all(r.pass_ for r in reports)
