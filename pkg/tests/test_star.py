import pytest
import sys
import math
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parent))
sys.path.append(str(Path(__file__).resolve().parents[1]))

import numpy as np

from oracles import cart, hamilton_product, make_angles, make_operator, make_rng, wig
from moyal_spin.exceptions import NonlinearHamiltonianError, NotNaturalHamiltonianError, ShapeMismatchError
from moyal_spin.spin_ops import identity_op, spin_matrices, SpinOperator, von_neumann_rhs
from moyal_spin.star import (
    SQRT_2PI,
    eom_rhs,
    eom_rhs_linear_J,
    eom_rhs_natural,
    prestar_multi,
    prestar_single,
    quaternion_inner,
    quaternion_product_wigner,
    quaternion_to_wigner,
    quaternion_units,
    star_commutator,
    star_multi,
    star_result,
    star_single,
    subset_weight,
    vector_wigner,
    wigner_to_quaternion,
)
from moyal_spin.wigner import WignerCoeffs, evaluate, poisson_bracket, project_rank

S = 1.0 / math.sqrt(2.0)
BASIS = [(0, 0), (1, -1), (1, 0), (1, 1)]

# prestar products Y_row * Y_col of the single spin-1/2 basis
PRESTAR_TABLE = {
    ((1, -1), (1, -1)): {(2, -2): math.sqrt(3 / 5)},
    ((1, -1), (1, 0)): {(1, -1): S, (2, -1): math.sqrt(3 / 10)},
    ((1, -1), (1, 1)): {(0, 0): -S, (1, 0): S, (2, 0): math.sqrt(1 / 10)},
    ((1, 0), (1, -1)): {(1, -1): -S, (2, -1): math.sqrt(3 / 10)},
    ((1, 0), (1, 0)): {(0, 0): S, (2, 0): math.sqrt(2 / 5)},
    ((1, 0), (1, 1)): {(1, 1): S, (2, 1): math.sqrt(3 / 10)},
    ((1, 1), (1, -1)): {(0, 0): -S, (1, 0): -S, (2, 0): math.sqrt(1 / 10)},
    ((1, 1), (1, 0)): {(1, 1): -S, (2, 1): math.sqrt(3 / 10)},
    ((1, 1), (1, 1)): {(2, 2): math.sqrt(3 / 5)},
}
for _pair in BASIS:
    PRESTAR_TABLE[((0, 0), _pair)] = {_pair: S}
    PRESTAR_TABLE[(_pair, (0, 0))] = {_pair: S}


def make_unit(jm):
    return WignerCoeffs.unit((jm,), spin_twice=1, max_rank=1)


def make_expected(entries, max_rank):
    return WignerCoeffs.from_dict({((j, m),): value for (j, m), value in entries.items() if j <= max_rank}, 1, 1, max_rank)


def make_three_spin_hamiltonian(nu=1.0):
    return math.pi * nu * (2 * cart(3, (1, "z"), (2, "z")) + 2 * cart(3, (2, "z"), (3, "z")))


def test_prestar_table():
    assert len(PRESTAR_TABLE) == 16
    for (a, b), entries in PRESTAR_TABLE.items():
        result = prestar_single(make_unit(a), make_unit(b))
        assert result.max_abs_diff(make_expected(entries, 2)) < 1e-12, (a, b)


def test_star_table_discards_rank_two():
    for (a, b), entries in PRESTAR_TABLE.items():
        result = star_single(make_unit(a), make_unit(b))
        assert result.max_rank == 1
        assert result.max_abs_diff(make_expected(entries, 1)) < 1e-12, (a, b)


def test_star_result_keeps_prestar():
    result = star_result(make_unit((1, 0)), make_unit((1, 0)))
    assert abs(result.prestar[((2, 0),)] - math.sqrt(2 / 5)) < 1e-12
    assert result.star.max_rank == 1


def test_subset_weight():
    assert subset_weight(2, 0) == pytest.approx(2 * math.pi)
    assert subset_weight(1, 1) == pytest.approx(-0.5j)
    assert subset_weight(3, 2) == pytest.approx(-0.25 * SQRT_2PI)


def test_prestar_multi_single_sphere_matches_prestar_single():
    rng = make_rng(21)
    f = wig(make_operator(1, rng=rng, hermitian=False))
    g = wig(make_operator(1, rng=rng, hermitian=False))
    assert prestar_multi(f, g).allclose(prestar_single(f, g), atol=1e-14)


@pytest.mark.parametrize("n_spins", [1, 2, 3])
def test_star_product_is_operator_product(n_spins):
    rng = make_rng(100 + n_spins)
    worst = 0.0
    for _ in range(200):
        A = make_operator(n_spins, rng=rng)
        B = make_operator(n_spins, rng=rng)
        worst = max(worst, star_multi(wig(A), wig(B)).max_abs_diff(wig(A @ B)))
    assert worst < 1e-10


@pytest.mark.parametrize("n_spins", [1, 2, 3])
def test_eom_rhs_is_von_neumann(n_spins):
    rng = make_rng(200 + n_spins)
    worst = 0.0
    for _ in range(200):
        H = make_operator(n_spins, rng=rng)
        rho = make_operator(n_spins, rng=rng)
        worst = max(worst, eom_rhs(wig(H), wig(rho)).max_abs_diff(wig(von_neumann_rhs(H, rho))))
    assert worst < 1e-10


def test_eom_rhs_has_no_trace_component():
    rhs = eom_rhs(wig(cart(2, (1, "z"), (2, "z"))), wig(cart(2, (1, "x"))))
    assert rhs[((0, 0), (0, 0))] == 0


def test_star_commutator():
    rng = make_rng(31)
    f = wig(make_operator(2, rng=rng, hermitian=False))
    g = wig(make_operator(2, rng=rng, hermitian=False))
    assert star_commutator(f, g).allclose(star_multi(f, g) - star_multi(g, f), atol=1e-13)


def test_identity_is_neutral():
    f = wig(make_operator(3, rng=make_rng(32), hermitian=False))
    one = wig(identity_op(3))
    assert star_multi(one, f).allclose(f, atol=1e-13)
    assert star_multi(f, one).allclose(f, atol=1e-13)


def test_star_product_associative():
    rng = make_rng(33)
    f, g, h = (wig(make_operator(2, rng=rng, hermitian=False)) for _ in range(3))
    assert star_multi(star_multi(f, g), h).allclose(star_multi(f, star_multi(g, h)), atol=1e-12)


def test_star_requires_half_spin():
    w = wig(SpinOperator(1, 2, np.eye(3)))
    with pytest.raises(ShapeMismatchError):
        star_multi(w, w)
    with pytest.raises(ShapeMismatchError):
        star_multi(wig(identity_op(1)), wig(identity_op(2)))


def test_natural_path_matches_full_equation():
    W_H = wig(make_three_spin_hamiltonian())
    rng = make_rng(41)
    for _ in range(20):
        W_rho = wig(make_operator(3, rng=rng))
        assert eom_rhs_natural(W_H, W_rho).max_abs_diff(eom_rhs(W_H, W_rho)) < 1e-12


def test_natural_path_rejects_three_body_terms():
    W_H = wig(cart(3, (1, "z"), (2, "z"), (3, "z")))
    with pytest.raises(NotNaturalHamiltonianError):
        eom_rhs_natural(W_H, wig(cart(3, (2, "x"))))


@pytest.mark.parametrize("spin_twice", [1, 2, 3, 5])
def test_linear_hamiltonian_rule(spin_twice):
    ix, iy, iz = spin_matrices(spin_twice / 2)
    H = SpinOperator(1, spin_twice, 0.7 * ix - 0.2 * iy + 0.4 * iz)
    rho = make_operator(1, spin_twice=spin_twice, rng=make_rng(spin_twice))
    rhs = eom_rhs_linear_J(wig(H), wig(rho))
    assert rhs.max_abs_diff(wig(von_neumann_rhs(H, rho))) < 1e-12


def test_linear_hamiltonian_rejects_quadratic_terms():
    ix, iy, iz = spin_matrices(1)
    H = SpinOperator(1, 2, iz @ iz)
    with pytest.raises(NonlinearHamiltonianError):
        eom_rhs_linear_J(wig(H), wig(SpinOperator(1, 2, ix)))


def test_quaternion_relations():
    units = quaternion_units()
    one, i, j, k = units["1"], units["i"], units["j"], units["k"]
    for unit in (i, j, k):
        assert star_single(unit, unit).allclose(-one, atol=1e-12)
    assert star_single(star_single(i, j), k).allclose(-one, atol=1e-12)
    assert star_single(i, j).allclose(k, atol=1e-12)
    assert star_single(j, k).allclose(i, atol=1e-12)
    assert star_single(k, i).allclose(j, atol=1e-12)
    assert star_single(one, one).allclose(one, atol=1e-12)
    assert abs(quaternion_inner(one, one) - 1) < 1e-12
    assert abs(quaternion_inner(i, i) + 1) < 1e-12


def test_quaternion_products_follow_hamilton_rule():
    rng = make_rng(51)
    for _ in range(100):
        q1 = (rng.normal(), rng.normal(size=3))
        q2 = (rng.normal(), rng.normal(size=3))
        r, v = hamilton_product(q1, q2)
        product = star_single(quaternion_to_wigner(*q1), quaternion_to_wigner(*q2))
        assert product.allclose(quaternion_to_wigner(r, v), atol=1e-12)

        scalar, vector = quaternion_product_wigner(q1[0], vector_wigner(q1[1]), q2[0], vector_wigner(q2[1]))
        assert abs(scalar - r) < 1e-12
        assert vector.allclose(vector_wigner(v), atol=1e-12)


def test_quaternion_components_recovered():
    r, v = wigner_to_quaternion(quaternion_to_wigner(0.3, [1.0, -2.0, 0.5]))
    assert abs(r - 0.3) < 1e-13
    assert np.allclose(v, [1.0, -2.0, 0.5], atol=1e-13)


def test_single_spin_commutator_is_bracket():
    rng = make_rng(52)
    for _ in range(20):
        f = wig(make_operator(1, rng=rng, hermitian=False))
        g = wig(make_operator(1, rng=rng, hermitian=False))
        bracket = project_rank(poisson_bracket(f, g, 1), 1)
        assert (1j * star_commutator(f, g)).max_abs_diff(bracket) < 1e-12


@pytest.mark.parametrize("n_spins", [1, 2, 3])
def test_eom_rhs_keeps_functions_real(n_spins):
    rng = make_rng(300 + n_spins)
    for _ in range(10):
        rhs = eom_rhs(wig(make_operator(n_spins, rng=rng)), wig(make_operator(n_spins, rng=rng)))
        for _point in range(10):
            assert abs(evaluate(rhs, make_angles(n_spins, rng)).imag) < 1e-11


def test_quaternion_product_keeps_complex_scalar():
    v1, v2 = vector_wigner([1.0, 0.0, 0.0]), vector_wigner([0.0, 1.0, 0.0])
    scalar, vector = quaternion_product_wigner(0.5j, v1, 2.0, v2)
    assert isinstance(scalar, complex)
    assert abs(scalar - 1j) < 1e-12
    real_scalar, _ = quaternion_product_wigner(0.5, v1, 2.0, v2)
    assert isinstance(real_scalar, float)
    assert abs(real_scalar - 1.0) < 1e-12
    assert vector.max_rank == 1
