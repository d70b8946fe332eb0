"""Compensator forms, generalized inverses, and the time-change identities."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jumptime.compensators import (
    LinearCompensator,
    PowerCompensator,
    SaturatingExpCompensator,
    TabulatedCompensator,
    generalized_inverse,
    load_tabulated_csv,
    time_change_check,
)
from jumptime.core import INFINITY, TimePoint


def flat_table() -> TabulatedCompensator:
    return TabulatedCompensator(
        times=(0.0, 1.0, 2.0, 3.0),
        values=(0.0, 1.0, 1.0, 2.0),
        extrapolation_slope=1.0,
    )


class TestLinear:
    def test_evaluate(self):
        A = LinearCompensator(2.0)
        assert A(0.0) == 0.0
        assert A(1.5) == 3.0
        assert A(TimePoint(2.0)) == 4.0

    def test_inverse(self):
        A = LinearCompensator(2.0)
        assert A.inverse(3.0) == TimePoint(1.5)
        assert A.inverse(0.0) == TimePoint(0.0)

    def test_unbounded_range_rejects_infinite_time(self):
        with pytest.raises(ValueError):
            LinearCompensator(1.0).evaluate(INFINITY)

    def test_rejects_bad_rate(self):
        for rate in (0.0, -1.0, math.inf, math.nan):
            with pytest.raises(ValueError):
                LinearCompensator(rate)

    @given(st.floats(min_value=1e-6, max_value=1e6), st.floats(min_value=1e-6, max_value=1e6))
    def test_inverse_is_generalized_inverse(self, rate, s):
        A = LinearCompensator(rate)
        t = A.inverse(s)
        # inf{t : A(t) >= s}: the level is reached at t and not strictly before
        assert A(t) >= s or math.isclose(A(t.value), s, rel_tol=1e-12)
        assert A(t.value * (1 - 1e-9)) < s
        assert A.inverse(0.0) == TimePoint(0.0)


class TestPower:
    def test_square_compensator_oracle(self):
        A = PowerCompensator(2.0)
        assert A(3.0) == 9.0
        assert A.inverse(4.0) == TimePoint(2.0)
        assert A.inverse(0.0) == TimePoint(0.0)

    def test_inverse_solves_the_level_equation(self):
        A = PowerCompensator(3.0)
        for s in (0.5, 1.0, 7.0, 123.0):
            t = A.inverse(s)
            assert A(t) == pytest.approx(s, rel=1e-12)

    def test_rejects_nonpositive_exponent(self):
        with pytest.raises(ValueError):
            PowerCompensator(0.0)


class TestSaturatingExp:
    def test_bounded_range(self):
        A = SaturatingExpCompensator(limit=1.0, rate=1.0)
        assert A.range_sup == 1.0
        assert A(0.0) == 0.0
        assert A(1.0) == pytest.approx(1.0 - math.exp(-1.0))
        assert A.evaluate(INFINITY) == 1.0

    def test_unreachable_levels_map_to_infinity(self):
        A = SaturatingExpCompensator(limit=1.0, rate=1.0)
        assert A.inverse(2.0) == INFINITY
        assert A.inverse(1.0) == INFINITY
        assert A.inverse(0.5) == TimePoint(math.log(2.0))


class TestTabulated:
    def test_evaluate_on_and_between_knots(self):
        A = flat_table()
        assert A(0.0) == 0.0
        assert A(0.5) == 0.5
        assert A(1.0) == 1.0
        assert A(1.5) == 1.0  # flat piece
        assert A(2.5) == 1.5
        assert A(3.0) == 2.0
        assert A(4.5) == 3.5  # slope-1 extrapolation

    def test_inverse_left_edge_of_flat_is_exact(self):
        A = flat_table()
        assert A.inverse(1.0) == TimePoint(1.0)
        assert A.inverse(1.0).value == 1.0

    def test_inverse_oracles(self):
        A = flat_table()
        assert A.inverse(0.5) == TimePoint(0.5)
        assert A.inverse(1.5) == TimePoint(2.5)
        assert A.inverse(2.0) == TimePoint(3.0)
        assert A.inverse(2.5) == TimePoint(3.5)

    def test_bounded_table_without_extrapolation(self):
        A = TabulatedCompensator((0.0, 1.0), (0.0, 1.0))
        assert A.range_sup == 1.0
        assert A.inverse(2.0) == INFINITY
        assert A(5.0) == 1.0
        assert A.evaluate(INFINITY) == 1.0

    def test_vector_paths_match_scalar_paths(self):
        A = flat_table()
        ts = np.linspace(0.0, 6.0, 301)
        np.testing.assert_array_equal(
            A.evaluate_many(ts), np.array([A(float(t)) for t in ts])
        )
        ss = np.linspace(0.0, 3.0, 301)
        expected = np.array(
            [A.inverse(float(s)).value if A.inverse(float(s)).is_finite else math.inf for s in ss]
        )
        np.testing.assert_array_equal(A.inverse_many(ss), expected)

    def test_validation(self):
        with pytest.raises(ValueError):
            TabulatedCompensator((0.0,), (0.0,))
        with pytest.raises(ValueError):
            TabulatedCompensator((0.5, 1.0), (0.0, 1.0))
        with pytest.raises(ValueError):
            TabulatedCompensator((0.0, 1.0), (0.5, 1.0))
        with pytest.raises(ValueError):
            TabulatedCompensator((0.0, 1.0, 1.0), (0.0, 1.0, 2.0))
        with pytest.raises(ValueError):
            TabulatedCompensator((0.0, 1.0, 2.0), (0.0, 1.0, 0.5))
        with pytest.raises(ValueError):
            TabulatedCompensator((0.0, 1.0), (0.0, 1.0), extrapolation_slope=-1.0)


class TestStopped:
    def test_freezes_after_the_stop(self):
        A = LinearCompensator(1.0).stop(2.0)
        assert A(1.0) == 1.0
        assert A(2.0) == 2.0
        assert A(5.0) == 2.0
        assert A.range_sup == 2.0
        assert A.evaluate(INFINITY) == 2.0

    def test_inverse_respects_the_cap(self):
        A = LinearCompensator(1.0).stop(2.0)
        assert A.inverse(1.5) == TimePoint(1.5)
        assert A.inverse(2.0) == TimePoint(2.0)
        assert A.inverse(2.5) == INFINITY

    def test_infinite_stop_changes_nothing(self):
        A = LinearCompensator(3.0).stop(INFINITY)
        assert A(10.0) == 30.0
        assert A.range_sup == math.inf

    def test_vectorized_evaluation(self):
        A = PowerCompensator(2.0).stop(2.0)
        np.testing.assert_array_equal(
            A.evaluate_many(np.array([1.0, 2.0, 3.0])), np.array([1.0, 4.0, 4.0])
        )


class TestGeneralizedInverseIdentities:
    def test_module_level_alias(self):
        A = LinearCompensator(1.0)
        assert generalized_inverse(A, 0.7) == TimePoint(0.7)

    @given(st.floats(min_value=1e-3, max_value=0.999))
    def test_level_attained_on_tabulated(self, s):
        A = flat_table()
        t = A.inverse(s)
        assert A(t) == pytest.approx(s, abs=1e-12)

    def test_monotone_in_the_level(self):
        A = flat_table()
        levels = np.linspace(0.0, 3.0, 100)
        inverses = [A.inverse(float(s)) for s in levels]
        assert all(a <= b for a, b in zip(inverses, inverses[1:]))


class TestTimeChangeCheck:
    def test_holds_for_strictly_increasing_compensator(self):
        A = LinearCompensator(1.0)
        for tau, s in [(1.0, 1.0), (0.5, 0.25), (2.0, 3.0), (3.0, 0.1)]:
            assert time_change_check(A, tau, s)

    def test_holds_at_sampled_points_of_the_flat_model(self):
        A = flat_table()
        # taus of the form A^{-1}(z) avoid the interior of the flat piece
        for tau, s in [(0.5, 0.25), (1.0, 1.0), (2.5, 1.0), (2.5, 1.5), (3.5, 0.7)]:
            assert time_change_check(A, tau, s)

    def test_fails_inside_a_flat_piece(self):
        # tau = 1.5 sits strictly inside the flat piece [1, 2] and is
        # unreachable by sampling from this compensator.  At s = 1 the
        # indicator comparison breaks: A^{-1}(1) = 1 < 1.5 while
        # s = 1 >= A(1.5) = 1, so the check reports the mismatch.
        A = flat_table()
        assert not time_change_check(A, 1.5, 1.0)

    def test_rejects_bad_tau(self):
        A = LinearCompensator(1.0)
        with pytest.raises(ValueError):
            time_change_check(A, INFINITY, 1.0)
        with pytest.raises(ValueError):
            time_change_check(A, 0.0, 1.0)

    @given(
        st.floats(min_value=1e-3, max_value=50.0),
        st.floats(min_value=0.0, max_value=60.0),
    )
    def test_always_holds_for_linear(self, tau, s):
        assert time_change_check(LinearCompensator(1.25), tau, s)


class TestCsvLoader:
    def _write(self, tmp_path, text):
        path = tmp_path / "table.csv"
        path.write_text(text)
        return path

    def test_loads_a_valid_table(self, tmp_path):
        path = self._write(tmp_path, "t,value\n0,0\n1,1\n2,1\n3,2\n")
        A = load_tabulated_csv(path, extrapolation_slope=1.0)
        assert A(2.5) == 1.5
        assert A.inverse(1.0) == TimePoint(1.0)

    def test_skips_blank_lines(self, tmp_path):
        path = self._write(tmp_path, "t,value\n0,0\n\n1,2\n")
        assert load_tabulated_csv(path)(0.5) == 1.0

    def test_reports_offending_row_for_non_numeric(self, tmp_path):
        path = self._write(tmp_path, "t,value\n0,0\n1,one\n")
        with pytest.raises(ValueError, match="row 2"):
            load_tabulated_csv(path)

    def test_reports_offending_row_for_decreasing_times(self, tmp_path):
        path = self._write(tmp_path, "t,value\n0,0\n2,1\n1,2\n")
        with pytest.raises(ValueError, match="row 3.*increasing"):
            load_tabulated_csv(path)

    def test_reports_offending_row_for_decreasing_values(self, tmp_path):
        path = self._write(tmp_path, "t,value\n0,0\n1,2\n2,1\n")
        with pytest.raises(ValueError, match="row 3.*nondecreasing"):
            load_tabulated_csv(path)

    def test_rejects_nonzero_start(self, tmp_path):
        path = self._write(tmp_path, "t,value\n1,0\n2,1\n")
        with pytest.raises(ValueError, match="row 1"):
            load_tabulated_csv(path)
        path = self._write(tmp_path, "t,value\n0,0.5\n2,1\n")
        with pytest.raises(ValueError, match="row 1"):
            load_tabulated_csv(path)

    def test_rejects_empty_and_header_only(self, tmp_path):
        with pytest.raises(ValueError, match="header"):
            load_tabulated_csv(self._write(tmp_path, ""))
        with pytest.raises(ValueError, match="two data rows"):
            load_tabulated_csv(self._write(tmp_path, "t,value\n"))

    def test_rejects_identically_zero_table(self, tmp_path):
        path = self._write(tmp_path, "t,value\n0,0\n1,0\n")
        with pytest.raises(ValueError, match="zero"):
            load_tabulated_csv(path)
        # a positive extrapolation slope rescues it: mass eventually accrues
        A = load_tabulated_csv(path, extrapolation_slope=2.0)
        assert A(2.0) == 2.0
