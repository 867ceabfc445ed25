"""Optimizer and oracle tests for the product-vector norm."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entnorm import (
    CompositeStructure,
    NormResult,
    OperatorMatrix,
    OptimizerOptions,
    ProductVector,
    brute_force_disentangled_norm,
    disentangled_norm,
    hilbert_norm,
    tensor_product,
)

from conftest import (
    bell_projector,
    complex_gaussian,
    random_density,
    random_unitary,
    schmidt_state,
)


def op(dims, entries, norm_meta=None):
    return OperatorMatrix(
        structure=CompositeStructure(dims=tuple(dims)),
        entries=np.asarray(entries, dtype=complex),
        norm_meta=norm_meta,
    )


def diag_op(dims, values):
    return op(dims, np.diag(np.asarray(values, dtype=complex)))


def power_iteration_norm(a, iters=2000):
    # independent largest-singular-value estimate via A^H A ascent
    gram = a.conj().T @ a
    v = np.ones(a.shape[1], dtype=complex) / np.sqrt(a.shape[1])
    for _ in range(iters):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    return float(np.sqrt(np.real(np.vdot(v, gram @ v))))


# ---------------------------------------------------------------- hilbert


def test_hilbert_norm_identity():
    assert hilbert_norm(op((2, 2), np.eye(4))) == pytest.approx(1.0, abs=1e-12)


def test_hilbert_norm_diagonal():
    a = diag_op((3,), [0.5, 0.25, 0.25])
    assert hilbert_norm(a) == pytest.approx(0.5, abs=1e-12)


def test_hilbert_norm_matches_power_iteration():
    rng = np.random.default_rng(7)
    a = complex_gaussian(rng, (8, 8))
    got = hilbert_norm(op((8,), a))
    assert got == pytest.approx(power_iteration_norm(a), abs=1e-8)


# ----------------------------------------------------------------- types


def test_options_validation():
    with pytest.raises(ValueError):
        OptimizerOptions(restarts=0)
    with pytest.raises(ValueError):
        OptimizerOptions(tol=0.0)
    with pytest.raises(ValueError):
        OptimizerOptions(max_iter=0)


def test_product_vector_requires_unit_factors():
    with pytest.raises(ValueError):
        ProductVector((np.array([1.0, 1.0]),))


def test_product_vector_as_vector_is_kron():
    f1 = np.array([1.0, 0.0])
    f2 = np.array([0.0, 1.0, 0.0])
    pv = ProductVector((f1, f2))
    assert np.array_equal(pv.as_vector(), np.kron(f1, f2))


# -------------------------------------------------------------- optimizer


def test_p1_equals_hilbert_norm_exactly():
    rng = np.random.default_rng(3)
    a = op((5,), complex_gaussian(rng, (5, 5)))
    res = disentangled_norm(a)
    assert res.converged
    assert res.value == hilbert_norm(a)


def test_product_basis_diagonal_is_exact():
    a = diag_op((2, 2), [0.5, 0.25, 0.25, 0.0])
    res = disentangled_norm(a)
    assert res.value == pytest.approx(0.5, abs=1e-12)
    assert res.converged


def test_single_part_diagonal():
    res = disentangled_norm(diag_op((2,), [1.0, 0.0]))
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_pure_bipartite_projector_gives_top_schmidt_weight():
    rng = np.random.default_rng(11)
    psi = schmidt_state(rng, np.sqrt([0.8, 0.2]), 2, 2)
    res = disentangled_norm(psi.projector())
    assert res.value == pytest.approx(0.8, abs=1e-9)


def test_bell_projector_value():
    res = disentangled_norm(bell_projector())
    assert res.value == pytest.approx(0.5, abs=1e-9)
    assert res.converged


def test_classically_correlated_mixture():
    a = diag_op((2, 2), [0.5, 0.0, 0.0, 0.5])
    res = disentangled_norm(a)
    assert res.value == pytest.approx(0.5, abs=1e-12)


def test_negative_region_example_norm():
    # classically anticorrelated diagonal state whose product-vector norm
    # drops below the product of its marginal norms
    a = diag_op((2, 2), [0.4, 0.3, 0.29, 0.01])
    res = disentangled_norm(a)
    assert res.value == pytest.approx(0.4, abs=1e-12)


def test_witness_pair_reproduces_value():
    rng = np.random.default_rng(23)
    a = op((2, 3), complex_gaussian(rng, (6, 6)))
    res = disentangled_norm(a)
    lhs = res.witness_left.as_vector()
    rhs = res.witness_right.as_vector()
    form = abs(np.vdot(lhs, a.entries @ rhs))
    assert form == pytest.approx(res.value, abs=1e-8)


def test_nonconvergence_is_reported():
    rng = np.random.default_rng(5)
    a = op((2, 2), complex_gaussian(rng, (4, 4)))
    res = disentangled_norm(a, OptimizerOptions(restarts=1, max_iter=1))
    assert not res.converged
    assert res.value > 0.0


def test_deterministic_for_fixed_options():
    rng = np.random.default_rng(29)
    a = op((2, 3), complex_gaussian(rng, (6, 6)))
    r1 = disentangled_norm(a, OptimizerOptions(seed=42))
    r2 = disentangled_norm(a, OptimizerOptions(seed=42))
    assert r1.value == r2.value
    for x, y in zip(r1.witness_right.factors, r2.witness_right.factors):
        assert np.array_equal(x, y)


def test_multiplicativity_on_product_densities():
    rng = np.random.default_rng(31)
    rho1 = random_density(rng, (3,))
    rho2 = random_density(rng, (4,))
    prod = tensor_product(rho1, rho2)
    res = disentangled_norm(prod)
    expected = hilbert_norm(rho1) * hilbert_norm(rho2)
    assert res.value == pytest.approx(expected, abs=1e-6)


def test_local_unitary_invariance():
    rng = np.random.default_rng(37)
    rho = random_density(rng, (2, 3))
    base = disentangled_norm(rho).value
    for _ in range(3):
        u = np.kron(random_unitary(rng, 2), random_unitary(rng, 3))
        rotated = op((2, 3), u.conj().T @ rho.entries @ u)
        assert disentangled_norm(rotated).value == pytest.approx(base, abs=1e-6)


@given(seed=st.integers(0, 200))
@settings(max_examples=40, deadline=None)
def test_dominated_by_hilbert_norm(seed):
    rng = np.random.default_rng(seed)
    dims = tuple(rng.integers(2, 4, size=2))
    a = op(dims, complex_gaussian(rng, (int(np.prod(dims)),) * 2))
    res = disentangled_norm(a, OptimizerOptions(restarts=6))
    assert res.value <= hilbert_norm(a) + 1e-9


@given(seed=st.integers(0, 200))
@settings(max_examples=25, deadline=None)
def test_scaling_homogeneity(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, (2, 2))
    lam = 3.7
    base = disentangled_norm(rho).value
    scaled = disentangled_norm(op((2, 2), lam * rho.entries)).value
    assert scaled == pytest.approx(lam * base, rel=1e-9)


def test_three_part_diagonal_exact():
    rng = np.random.default_rng(41)
    vals = rng.random(8)
    a = diag_op((2, 2, 2), vals)
    res = disentangled_norm(a)
    assert res.value == pytest.approx(float(vals.max()), abs=1e-12)


# ------------------------------------------------------------------ oracle


def test_oracle_diagonal_exact_any_parts():
    rng = np.random.default_rng(43)
    vals = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    a = diag_op((2, 3, 2), vals)
    assert brute_force_disentangled_norm(a) == float(np.max(np.abs(vals)))


def test_oracle_single_part_diagonal():
    assert brute_force_disentangled_norm(diag_op((2,), [1.0, 0.0])) == 1.0


def test_oracle_bell_within_grid_error():
    got = brute_force_disentangled_norm(bell_projector(), grid=0.02)
    assert got == pytest.approx(0.5, abs=1e-3)
    assert got <= 0.5 + 1e-12


def test_oracle_classically_correlated():
    a = diag_op((2, 2), [0.5, 0.0, 0.0, 0.5])
    assert brute_force_disentangled_norm(a) == 0.5


def test_oracle_negative_region_example():
    a = diag_op((2, 2), [0.4, 0.3, 0.29, 0.01])
    assert brute_force_disentangled_norm(a) == 0.4


def test_oracle_rejects_non_bipartite():
    rng = np.random.default_rng(47)
    a = op((2, 2, 2), rng.standard_normal((8, 8)))
    with pytest.raises(ValueError, match="bipartite"):
        brute_force_disentangled_norm(a)


def test_oracle_rejects_large_dimension():
    rng = np.random.default_rng(53)
    a = op((4, 5), rng.standard_normal((20, 20)))
    with pytest.raises(ValueError, match="dimension too large"):
        brute_force_disentangled_norm(a)


def test_oracle_rejects_complex_entries():
    rng = np.random.default_rng(59)
    a = op((2, 2), complex_gaussian(rng, (4, 4)))
    with pytest.raises(ValueError, match="real"):
        brute_force_disentangled_norm(a)


def test_oracle_rejects_bad_grid():
    rng = np.random.default_rng(61)
    a = op((2, 2), rng.standard_normal((4, 4)))
    with pytest.raises(ValueError, match="positive"):
        brute_force_disentangled_norm(a, grid=0.0)
    b = op((3, 3), rng.standard_normal((9, 9)))
    with pytest.raises(ValueError, match="grid too fine"):
        brute_force_disentangled_norm(b, grid=0.005)


@given(seed=st.integers(0, 100))
@settings(max_examples=15, deadline=None)
def test_optimizer_beats_oracle_minus_tolerance(seed):
    rng = np.random.default_rng(seed)
    d2 = int(rng.integers(2, 5))
    a = op((2, d2), rng.standard_normal((2 * d2, 2 * d2)))
    oracle = brute_force_disentangled_norm(a, grid=0.02)
    res = disentangled_norm(a)
    assert res.value >= oracle - 1e-3
    assert res.value <= hilbert_norm(a) + 1e-9


def test_optimizer_beats_oracle_three_by_three():
    rng = np.random.default_rng(67)
    a = op((3, 3), rng.standard_normal((9, 9)))
    oracle = brute_force_disentangled_norm(a, grid=0.15)
    res = disentangled_norm(a)
    assert res.value >= oracle - 1e-3
    assert res.value <= hilbert_norm(a) + 1e-9


def test_sphere_grid_vectors_are_unit():
    from entnorm.disentangled_norm import _sphere_grid

    for d in (1, 2, 3, 4):
        vecs = _sphere_grid(d, 0.2)
        norms = np.linalg.norm(vecs, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-12)
        assert vecs.shape[1] == d
