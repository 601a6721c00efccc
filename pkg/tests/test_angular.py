import pytest
import sys
import math
from fractions import Fraction
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parent))
sys.path.append(str(Path(__file__).resolve().parents[1]))

import numpy as np

from moyal_spin.angular import (
    bracket_kernel,
    clebsch_gordan,
    coeff_Lambda,
    coeff_Q,
    coeff_U,
    coeff_Z,
    coefficient_rows,
    flat_index,
    n_slots,
    product_kernel,
    rank_pairs,
    star_kernel,
    twice,
    wigner_6j,
)

S = 1.0 / math.sqrt(2.0)


def test_twice_accepts_half_integers():
    assert twice("1/2") == 1
    assert twice(1.5) == 3
    assert twice(Fraction(5, 2)) == 5
    assert twice(2) == 4
    with pytest.raises(ValueError):
        twice(0.3)


def test_flat_index_layout():
    assert [flat_index(j, m) for j, m in rank_pairs(2)] == list(range(9))
    assert rank_pairs(1) == [(0, 0), (1, -1), (1, 0), (1, 1)]
    assert n_slots(1) == 4
    assert n_slots(2) == 9


def test_clebsch_gordan_values():
    assert clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1, 0) == pytest.approx(S, abs=1e-15)
    assert clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0) == pytest.approx(-S, abs=1e-15)
    assert clebsch_gordan(1, 1, 1, -1, 0, 0) == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    assert clebsch_gordan(1, 0, 1, 0, 2, 0) == pytest.approx(math.sqrt(2 / 3), abs=1e-15)
    assert clebsch_gordan(1, 0, 1, 0, 1, 0) == 0.0


def test_clebsch_gordan_selection_rules_give_zero():
    assert clebsch_gordan(1, 1, 1, 0, 2, 0) == 0.0  # M != m1 + m2
    assert clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0  # triangle
    assert clebsch_gordan(1, 2, 1, -2, 0, 0) == 0.0  # |m| > j


def test_clebsch_gordan_orthogonality():
    j1, j2 = Fraction(3, 2), 1
    for L in (Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)):
        for M in np.arange(-float(L), float(L) + 1):
            total = sum(
                clebsch_gordan(j1, m1, j2, M - m1, L, M) ** 2 for m1 in np.arange(-float(j1), float(j1) + 1)
            )
            assert total == pytest.approx(1.0, abs=1e-14)


def test_sixj_half_spin_values():
    assert wigner_6j(1, 1, 1, 0.5) == pytest.approx(-1.0 / 3.0, abs=1e-15)
    assert wigner_6j(0, 0, 0, 0.5) == pytest.approx(-S, abs=1e-15)
    assert wigner_6j(1, 1, 0, 0.5) == pytest.approx(1 / math.sqrt(6), abs=1e-15)
    assert wigner_6j(0, 1, 1, 0.5) == pytest.approx(1 / math.sqrt(6), abs=1e-15)
    assert wigner_6j(2, 1, 1, 0.5) == 0.0


@pytest.mark.parametrize("J", [Fraction(1, 2), 1, Fraction(3, 2), 2])
def test_Q_identity_coefficient(J):
    assert coeff_Q(J, 0, 0, 0) == pytest.approx(1 / math.sqrt(2 * J + 1), abs=1e-15)


def test_Q_vanishes_above_2J():
    assert coeff_Q(Fraction(1, 2), 1, 1, 2) == 0.0


def test_Lambda_and_Q_listed_values():
    expected = {
        (0, 0, 0): S,
        (0, 1, 1): S,
        (1, 0, 1): S,
        (1, 1, 0): -math.sqrt(3) / math.sqrt(2),
        (1, 1, 1): -1.0,
    }
    for (j1, j2, L), value in expected.items():
        assert abs(coeff_Lambda(j1, j2, L) - value) < 1e-12
        assert abs(coeff_Q(Fraction(1, 2), j1, j2, L) - value) < 1e-12


def test_Lambda_equals_half_spin_Q():
    for j1 in range(2):
        for j2 in range(2):
            for L in range(2):
                assert abs(coeff_Lambda(j1, j2, L) - coeff_Q(Fraction(1, 2), j1, j2, L)) < 1e-12


def test_Z_and_U_values():
    assert coeff_Z(0, 1, 1) == pytest.approx(1 / math.sqrt(4 * math.pi), abs=1e-15)
    assert coeff_Z(1, 1, 1) == 0.0
    assert abs(coeff_U(1, 1, 1) - (-2j)) < 1e-14
    assert coeff_U(1, 1, 0) == 0
    assert coeff_U(0, 1, 1) == 0


def test_bracket_kernel_antisymmetric_product_kernel_symmetric():
    bracket = bracket_kernel(2, 2)
    product = product_kernel(2, 2)
    assert np.allclose(bracket, -bracket.transpose(0, 2, 1), atol=1e-14)
    assert np.allclose(product, product.transpose(0, 2, 1), atol=1e-14)


def test_bracket_with_Y10_scales_by_order():
    kernel = bracket_kernel(1, 2)
    a = flat_index(1, 0)
    for j, m in rank_pairs(2):
        column = kernel[:, a, flat_index(j, m)]
        expected = np.zeros(n_slots(3), dtype=complex)
        expected[flat_index(j, m)] = 1j * math.sqrt(2) * m
        assert np.allclose(column, expected, atol=1e-14)


def test_star_kernel_combines_product_and_bracket():
    expected = math.sqrt(2 * math.pi) * product_kernel(1, 1) - 0.5j * bracket_kernel(1, 1)
    assert np.allclose(star_kernel(1, 1), expected, atol=1e-14)


def test_coefficient_rows_include_U111():
    rows = coefficient_rows(1)
    assert ("U", 1, 1, 1, 0.0, -2.0) in [(n, a, b, c, round(re, 12) + 0.0, round(im, 12)) for n, a, b, c, re, im in rows]
    names = {row[0] for row in rows}
    assert names == {"Z", "U", "Q", "Lambda"}
