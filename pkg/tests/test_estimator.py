from fractions import Fraction

import pytest

from perctri.estimator import (
    EstimateRow, exact_enumeration, fit_exponent, restricted_ratio_reports,
    run_arms, run_moments, second_moment_ratio, worker_count,
)


def test_fit_exact_power_law():
    rows = [(n, n ** 1.5, 1e-12) for n in (8, 16, 32, 64)]
    fit = fit_exponent(rows)
    assert abs(fit.slope - 1.5) < 1e-12
    assert fit.r_squared > 1 - 1e-12


def test_fit_constant():
    rows = [(n, 5.0, 1e-12) for n in (8, 16, 32, 64)]
    assert abs(fit_exponent(rows).slope) < 1e-12


def test_fit_drops_nonpositive():
    rows = [(8, 2.0, 0.1), (16, 0.0, 0.1), (32, 4.0, 0.1), (64, 8.0, 0.1)]
    with pytest.warns(UserWarning):
        fit = fit_exponent(rows)
    assert len(fit.points) == 3


def test_fit_weighted():
    rows = [(8, 10.0, 0.1), (16, 20.0, 0.3), (32, 40.0, 8.0)]
    a = fit_exponent(rows, weighting="none")
    b = fit_exponent(rows, weighting="inverse-relvar")
    assert abs(a.slope - 1.0) < 0.01
    assert abs(b.slope - 1.0) < 0.02
    assert a.slope != b.slope


def test_oracle_n1_golden_values():
    ex = exact_enumeration(1)
    assert ex.moments["L"][1] == Fraction(885, 512)
    assert ex.moments["F"][1] == Fraction(895, 512)
    assert ex.moments["Q"][1] == Fraction(498, 512)
    assert ex.moments["L"][2] == Fraction(3181, 512)
    assert ex.crossing_probability == Fraction(1, 2)
    # arms at radius one are bare exempt chains
    assert ex.arm_probabilities["U4"] == 1


def test_oracle_inclusion_order():
    ex = exact_enumeration(1)
    for t in (1, 2, 3):
        assert ex.moments["Q"][t] <= ex.moments["L"][t] <= ex.moments["F"][t]


def test_oracle_all_open_contribution():
    # |L| = 3 on the all-open radius-1 box: the bottom row; no pivotal site
    # exists without closed chains
    from conftest import all_open
    from perctri.features import feature_counts
    assert feature_counts(all_open(1)) == (3, 3, 0)


def test_oracle_rejects_big_n():
    with pytest.raises(ValueError):
        exact_enumeration(3)


def test_moments_scheduler_independence():
    a = run_moments([6], (1, 2), 400, 321, workers=1)
    b = run_moments([6], (1, 2), 400, 321, workers=3)
    assert a.csv_lines() == b.csv_lines()


def test_moments_against_oracle_n1():
    ex = exact_enumeration(1)
    table = run_moments([1], (1,), 20000, 97531, workers=2)
    for q in ("L", "F", "Q"):
        row = table.select(q, 1)[0]
        exact = float(ex.moments[q][1])
        assert abs(row.mean - exact) < 3 * row.stderr + 1e-12, (q, row, exact)


def test_moment_inclusion_means():
    table = run_moments([4], (1,), 300, 12, workers=1)
    means = {q: table.select(q, 1)[0].mean for q in ("L", "F", "Q")}
    assert means["Q"] <= means["L"] <= means["F"]


def test_jensen_between_moments():
    table = run_moments([4], (1, 2), 500, 13, workers=1)
    m1 = table.select("L", 1)[0].mean
    m2 = table.select("L", 2)[0].mean
    assert m2 >= m1 * m1 - 1e-9


def test_second_moment_ratio_synthetic():
    # |L| == n^{4/3} exactly would put the squared moment at slope 8/3
    rows = [EstimateRow(n, "L", 2, 10, float(n) ** (8 / 3), 1e-9, 0)
            for n in (8, 16, 32)]
    assert abs(fit_exponent(rows).slope - 8 / 3) < 1e-9


def test_run_arms_pattern_needs():
    # the mirrored pattern (one open, two closed chains) is a different
    # event with the same distribution; both must evaluate cleanly
    t1 = run_arms("annulus", (4, 6, 8), 300, 55, kappa=3, inner=1)
    t2 = run_arms("annulus", (4, 6, 8), 300, 55, kappa=3, inner=1,
                  needs=(1, 2))
    assert 0 < t1.rows[0].mean < 1
    assert 0 < t2.rows[0].mean < 1


def test_run_arms_requires_three_radii():
    with pytest.raises(ValueError):
        run_arms("point", (4, 8), 50, 55, kappa=2)


def test_run_arms_trials_callable():
    tab = run_arms("point", (4, 6, 8), lambda n: 200 if n == 4 else 100, 77,
                   kappa=2)
    assert tab.rows[0].trials == 200 and tab.rows[1].trials == 100


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("PERCTRI_WORKERS", "7")
    assert worker_count() == 7
    assert worker_count(2) == 2
    monkeypatch.setenv("PERCTRI_WORKERS", "junk")
    assert worker_count() == 1


def test_ratio_report_shapes():
    reps = restricted_ratio_reports((3, 4), 16, 150, 31)
    for kappa, rep in reps.items():
        assert len(rep.cells) == 25
        assert rep.n == 16 and rep.kappa == kappa
        for cell in rep.cells:
            assert 0 <= cell.p_restricted <= cell.p_unrestricted <= 1