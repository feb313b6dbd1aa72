import numpy as np
import pytest

from isodeform import profiles as P
from isodeform.errors import ArgumentError, FormatError


def test_identity_profile_values():
    f, g, h = P.identity()(np.array([0.5, 2.0]))
    np.testing.assert_array_equal(f, [0.5, 2.0])
    np.testing.assert_array_equal(g, [1.0, 1.0])
    np.testing.assert_array_equal(h, [0.25, 4.0])


def test_reflected_identity_has_negative_f():
    f, _, _ = P.identity(-1)(1.5)
    assert f == -1.5


def test_orientation_must_be_unit():
    with pytest.raises(ArgumentError):
        P.identity(2)


@pytest.mark.parametrize("prof", [P.unit_pitch_spiral(), P.power_law(1.5, 0.7), P.polynomial([0.3, 0.1], [1.0, 0.5])])
def test_gap_closed_form_matches_direct(prof):
    r = np.linspace(0.05, 2.0, 50)
    f, g, h = prof(r)
    np.testing.assert_allclose(prof.gap_at(r), g * h - f * f, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("prof", [P.unit_pitch_spiral(), P.power_law(1.5, 0.7), P.polynomial([0.3, 0.1], [1.0, 0.5])])
def test_analytic_dh_matches_difference(prof):
    r = np.linspace(0.1, 2.0, 20)
    step = 1e-6
    fd = (prof.h(r + step) - prof.h(r - step)) / (2 * step)
    np.testing.assert_allclose(prof.dh_at(r), fd, rtol=1e-7)


def test_polynomial_pitch_is_q():
    prof = P.polynomial([0.2], [0.5, 1.0], orientation=-1)
    r = np.linspace(0.1, 2, 11)
    np.testing.assert_allclose(np.sqrt(prof.gap_at(r)) / prof.h(r), 0.5 + r, rtol=1e-12)
    np.testing.assert_allclose(prof.f(r), -0.5 * prof.dh_at(r))


def test_table_profile_interpolates_and_is_sampled():
    r = np.linspace(0.0, 2.0, 41)
    rows = np.column_stack([r, r, 1 + r ** 2, r ** 2])
    prof = P.from_table(rows)
    assert prof.sampled and prof.default_tol == P.SAMPLED_TOL
    x = np.array([0.33, 1.01, 1.77])
    np.testing.assert_allclose(prof.h(x), x ** 2, atol=1e-3)
    np.testing.assert_allclose(prof.dh_at(x), 2 * x, atol=1e-2)


def test_table_rejects_unsorted_radii():
    with pytest.raises(FormatError):
        P.from_table([[0, 0, 1, 0], [1, 1, 1, 1], [0.5, 0.5, 1, 0.25]])


@pytest.mark.parametrize("prof", [P.identity(-1, r_max=3.0), P.unit_pitch_spiral(), P.power_law(1.5, 0.7, -1),
                                  P.polynomial([0.3, 0.1], [1.0, 0.5], -1)])
def test_closed_form_round_trip(prof):
    back = P.parse_profile(P.format_profile(prof))
    r = np.linspace(0.1, prof.r_max, 7)
    for a, b in zip(prof(r), back(r)):
        np.testing.assert_array_equal(a, b)
    assert back.r_max == prof.r_max


def test_table_round_trip():
    rows = [[0.0, 0.0, 1.0, 0.0], [1.0, 1.0, 1.0, 1.0], [2.0, 2.0, 1.0, 4.0]]
    back = P.parse_profile(P.format_profile(P.from_table(rows)))
    np.testing.assert_array_equal(back.source[1], np.array(rows))


@pytest.mark.parametrize("text", ["", "profile v2\ntable\n", "profile v1\nclosed-form nope\n",
                                  "profile v1\ntable\n0 0 1 x\n", "profile v1\nr_max\n", "profile v1\n"])
def test_parse_errors(text):
    with pytest.raises(FormatError):
        P.parse_profile(text)


def test_comments_and_blank_lines_ignored():
    prof = P.parse_profile("# header\nprofile v1\n\nr_max 3  # radius\nclosed-form unit-pitch-spiral -1\n")
    assert prof.r_max == 3.0 and prof.f(1.0) == -1.0
