import pytest
import sys
import math
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parent))
sys.path.append(str(Path(__file__).resolve().parents[1]))

import numpy as np

from oracles import cart, finite_difference_bracket, make_angles, make_operator, make_rng, wig
from moyal_spin.angular import R
from moyal_spin.exceptions import ShapeMismatchError, SpinSlotError, UnrepresentableRankError
from moyal_spin.spin_ops import identity_op
from moyal_spin.wigner import (
    SphereAngles,
    WignerCoeffs,
    coherence_split,
    evaluate,
    evaluate_grid,
    inner,
    inverse_wigner,
    poisson_bracket,
    pointwise_product,
    project_rank,
    spherical_harmonic,
    wigner_kernel,
)


def make_function(n_spins, seed, max_rank=1, spin_twice=1):
    rng = make_rng(seed)
    side = (max_rank + 1) ** 2
    data = rng.standard_normal((side,) * n_spins) + 1j * rng.standard_normal((side,) * n_spins)
    return WignerCoeffs(n_spins, spin_twice, data)


def test_spherical_harmonics_closed_forms():
    theta, phi = 0.7, 1.9
    assert abs(spherical_harmonic(0, 0, theta, phi) - 1 / math.sqrt(4 * math.pi)) < 1e-15
    assert abs(spherical_harmonic(1, 0, theta, phi) - math.sqrt(3 / (4 * math.pi)) * math.cos(theta)) < 1e-15
    expected = -R * math.sin(theta) * np.exp(1j * phi)
    assert abs(spherical_harmonic(1, 1, theta, phi) - expected) < 1e-15
    assert abs(spherical_harmonic(1, -1, theta, phi) - R * math.sin(theta) * np.exp(-1j * phi)) < 1e-15


@pytest.mark.parametrize("n_spins", [1, 2, 3])
def test_identity_is_constant(n_spins):
    w = wig(identity_op(n_spins))
    rng = make_rng(n_spins)
    for _ in range(5):
        value = evaluate(w, make_angles(n_spins, rng))
        assert abs(value - 1 / math.sqrt(2 * math.pi) ** n_spins) < 1e-13


def test_iz_is_cosine():
    rng = make_rng(7)
    for k in (1, 2):
        w = wig(cart(2, (k, "z")))
        for _ in range(5):
            angles = make_angles(2, rng)
            expected = R * math.cos(angles[k - 1][0]) / math.sqrt(2 * math.pi)
            assert abs(evaluate(w, angles) - expected) < 1e-13


def test_ix_and_lowering_operator():
    w_x = wig(cart(1, (1, "x")))
    assert abs(w_x[((1, -1),)] - 0.5) < 1e-15
    assert abs(w_x[((1, 1),)] + 0.5) < 1e-15
    w_minus = wig(cart(1, (1, "m")))
    assert w_minus.allclose(WignerCoeffs.unit(((1, -1),)))


def test_kernel_trace_matches_evaluation():
    rng = make_rng(11)
    op = make_operator(1, spin_twice=2, rng=rng, hermitian=False)
    w = wig(op)
    for theta, phi in make_angles(3, rng):
        kernel = wigner_kernel(1, theta, phi)
        assert np.allclose(kernel, kernel.conj().T, atol=1e-14)
        assert abs(np.trace(kernel @ op.matrix) - evaluate(w, [(theta, phi)])) < 1e-13


def test_hermitian_operators_give_real_functions():
    rng = make_rng(5)
    w = wig(make_operator(2, rng=rng))
    for _ in range(5):
        assert abs(evaluate(w, make_angles(2, rng)).imag) < 1e-13


def test_inverse_transform_recovers_operator():
    op = make_operator(2, spin_twice=2, rng=make_rng(2), hermitian=False)
    assert inverse_wigner(wig(op)).allclose(op, atol=1e-13)


def test_inverse_rejects_high_rank():
    w = WignerCoeffs.unit(((2, 0),), spin_twice=1)
    with pytest.raises(UnrepresentableRankError):
        inverse_wigner(w)


def test_inner_product_is_trace():
    rng = make_rng(8)
    A = make_operator(2, rng=rng, hermitian=False)
    B = make_operator(2, rng=rng, hermitian=False)
    assert abs(inner(wig(A), wig(B)) - np.trace(A.matrix.conj().T @ B.matrix)) < 1e-13


def test_conj_is_dagger():
    op = make_operator(2, rng=make_rng(4), hermitian=False)
    assert wig(op).conj().allclose(wig(op.dagger()), atol=1e-14)


def test_pointwise_product_matches_samples():
    rng = make_rng(9)
    f = make_function(2, 1)
    g = make_function(2, 2)
    product = pointwise_product(f, g)
    assert product.max_rank == 2
    for _ in range(5):
        angles = make_angles(2, rng)
        assert abs(evaluate(product, angles) - evaluate(f, angles) * evaluate(g, angles)) < 1e-12


@pytest.mark.parametrize("k", [1, 2])
def test_poisson_bracket_matches_finite_differences(k):
    rng = make_rng(10 + k)
    f = make_function(2, 3)
    g = make_function(2, 4, max_rank=2)
    bracket = poisson_bracket(f, g, k)
    for _ in range(3):
        angles = make_angles(2, rng, margin=0.3)
        assert abs(evaluate(bracket, angles) - finite_difference_bracket(f, g, k, angles)) < 1e-6


def test_poisson_bracket_slot_check():
    f = make_function(2, 3)
    with pytest.raises(SpinSlotError):
        poisson_bracket(f, f, 3)


def test_project_rank_truncates():
    w = make_function(1, 5, max_rank=2)
    projected = project_rank(w)
    assert projected.max_rank == 1
    assert projected[((1, 1),)] == w[((1, 1),)]
    assert project_rank(projected) is projected


def test_coherence_split_reassembles_real_function():
    w = wig(make_operator(2, rng=make_rng(6)))
    part = coherence_split(w, 1)
    assert (part + part.conj()).allclose(w, atol=1e-14)


def test_coefficients_drop_tiny_entries_and_pad():
    w = WignerCoeffs(1, 1, [1.0, 1e-16, 0.0, 0.0])
    assert w.to_dict() == {((0, 0),): 1.0}
    assert w.effective_rank() == 0
    assert WignerCoeffs.zeros(2).effective_rank() == -1
    padded = w.with_rank(2)
    assert padded.data.shape == (9,)
    assert padded.allclose(w)


def test_coefficient_shape_errors():
    with pytest.raises(ShapeMismatchError):
        WignerCoeffs(1, 1, np.zeros(5))
    with pytest.raises(ShapeMismatchError):
        WignerCoeffs.zeros(1) + WignerCoeffs.zeros(2)
    with pytest.raises(ShapeMismatchError):
        WignerCoeffs.from_dict({((1, 2),): 1.0}, 1)


def test_json_payload_layout():
    w = wig(cart(1, (1, "z")))
    payload = w.to_json()
    assert payload["n_spins"] == 1
    assert payload["spin_2J"] == 1
    assert payload["entries"] == [{"jm": [[1, 0]], "re": pytest.approx(1 / math.sqrt(2)), "im": 0.0}]
    assert WignerCoeffs.from_json(payload).allclose(w)


def test_sphere_angles():
    angles = SphereAngles.from_flat([0.5, -1.0, 1.0, 7.0])
    assert angles.pairs[0] == (0.5, -1.0 % (2 * math.pi))
    assert angles.pairs[1][1] == pytest.approx(7.0 - 2 * math.pi)
    with pytest.raises(ValueError):
        SphereAngles(((4.0, 0.0),))
    with pytest.raises(ValueError):
        SphereAngles.from_flat([0.1, 0.2, 0.3])


def test_evaluate_grid_matches_pointwise():
    w = make_function(2, 12)
    theta = np.array([0.3, 1.1])
    phi = np.array([2.0, 4.0])
    values = evaluate_grid(w, [(theta, phi), (theta, phi)])
    assert values.shape == (2, 2)
    assert abs(values[1, 0] - evaluate(w, [(1.1, 4.0), (0.3, 2.0)])) < 1e-13


def apply_casimir(w):
    """L^2 on a single sphere as minus the double bracket with W(I_x), W(I_y), W(I_z)."""
    total = 0 * w
    for axis in "xyz":
        generator = wig(cart(1, (1, axis)))
        total = total - poisson_bracket(poisson_bracket(w, generator, 1), generator, 1)
    return total


def test_casimir_eigenvalues():
    for j, m in [(0, 0), (1, -1), (1, 1), (2, 0), (2, -2)]:
        unit = WignerCoeffs.unit(((j, m),), max_rank=2)
        assert apply_casimir(unit).max_abs_diff(j * (j + 1) * unit) < 1e-12, (j, m)


def test_projector_polynomial_matches_truncation():
    for seed in range(5):
        f = make_function(1, 20 + seed)
        square = pointwise_product(f, f)
        assert square.max_rank == 2
        casimir = apply_casimir(square)
        # 1 on ranks 0 and 1, 0 on rank 2
        projected = square - apply_casimir(casimir - 2 * square) / 24
        assert projected.max_abs_diff(project_rank(square, 1)) < 1e-11
