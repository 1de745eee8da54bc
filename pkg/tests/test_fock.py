"""Weighted power embeddings, symmetric powers, kernels, and Gram pencils."""

import numpy as np
import pytest

import oracles
from fockdeform import (
    TruncatedFunction,
    arrangement_from_bases,
    da_kernel,
    degree_space,
    embed_power,
    gram,
    gram_pencil_lb,
    homogeneous_component,
    multi_indices,
    multiplier_norm_lb,
    orthonormalize,
    sample_ball,
    subspace_sum,
    sym_dim,
    sym_power,
)
from helpers import random_point, random_subspace, three_lines_c2


def rand_vec(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


def rand_mat(rng, d_out, d_in):
    return rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))


# ---------------------------------------------------------------- embeddings


def test_multi_index_order_degree_two():
    assert multi_indices(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert multi_indices(3, 1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


@pytest.mark.parametrize("d,n", [(1, 4), (2, 3), (3, 5), (4, 2)])
def test_sym_dim_matches_index_count(d, n):
    assert sym_dim(d, n) == len(multi_indices(d, n))


def test_embed_power_basis_point():
    v = embed_power([1.0, 0.0], 3)
    assert v.coeffs[0] == pytest.approx(1.0)
    assert np.allclose(v.coeffs[1:], 0.0)
    assert embed_power([0.0, 0.0], 2).norm() == 0.0
    assert embed_power([0.3, 0.4], 0).coeffs[0] == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(5))
def test_embed_power_inner_product_identity(seed):
    rng = np.random.default_rng(seed)
    x, y = rand_vec(rng, 3), rand_vec(rng, 3)
    lhs = embed_power(x, 5).inner(embed_power(y, 5))
    rhs = complex(np.vdot(y, x)) ** 5
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)
    assert embed_power(x, 4).norm() == pytest.approx(np.linalg.norm(x) ** 4, rel=1e-12)


@pytest.mark.parametrize("d,n", [(2, 2), (2, 4), (3, 3)])
def test_embed_power_matches_tensor_oracle(d, n):
    rng = np.random.default_rng(10 * d + n)
    x = rand_vec(rng, d)
    assert np.allclose(embed_power(x, n).coeffs, oracles.tensor_embed(x, n), atol=1e-12)


# ------------------------------------------------------------- symmetric powers


def test_sym_power_identity_and_diagonal():
    assert np.allclose(sym_power(np.eye(3), 2), np.eye(6))
    got = sym_power(np.diag([2.0, 3.0]), 2)
    assert np.allclose(got, np.diag([4.0, 6.0, 9.0]), atol=1e-13)


def test_sym_power_coordinate_swap_permutes_monomials():
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    got = sym_power(swap, 2)
    expected = np.zeros((3, 3))
    expected[0, 2] = expected[2, 0] = expected[1, 1] = 1.0
    assert np.allclose(got, expected, atol=1e-14)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("d_out,d_in", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_sym_power_matches_tensor_oracle(n, d_out, d_in):
    rng = np.random.default_rng(100 + 10 * d_out + d_in + n)
    a = rand_mat(rng, d_out, d_in)
    assert np.allclose(sym_power(a, n), oracles.tensor_sym_power(a, n), atol=1e-11)


@pytest.mark.parametrize("seed", range(3))
def test_sym_power_functorial(seed):
    rng = np.random.default_rng(200 + seed)
    a, b = rand_mat(rng, 3, 3), rand_mat(rng, 3, 3)
    lhs = sym_power(a @ b, 3)
    rhs = sym_power(a, 3) @ sym_power(b, 3)
    assert np.allclose(lhs, rhs, atol=1e-10 * np.linalg.norm(rhs))
    adj = sym_power(a.conj().T, 3)
    assert np.allclose(adj, sym_power(a, 3).conj().T, atol=1e-11)


@pytest.mark.parametrize("n", [2, 3, 6])
@pytest.mark.parametrize("seed", range(3))
def test_sym_power_norm_is_norm_power(n, seed):
    rng = np.random.default_rng(300 + seed)
    a = rand_mat(rng, 3, 3)
    got = np.linalg.norm(sym_power(a, n), 2)
    assert got == pytest.approx(np.linalg.norm(a, 2) ** n, rel=1e-10)


@pytest.mark.parametrize("seed", range(3))
def test_sym_power_intertwines_embedding(seed):
    rng = np.random.default_rng(400 + seed)
    a = rand_mat(rng, 4, 2)
    x = rand_vec(rng, 2)
    lhs = sym_power(a, 3) @ embed_power(x, 3).coeffs
    rhs = embed_power(a @ x, 3).coeffs
    assert np.allclose(lhs, rhs, atol=1e-11 * max(1.0, np.linalg.norm(rhs)))


# ----------------------------------------------------------------- the kernel


def test_da_kernel_frozen_values():
    assert da_kernel([0.0, 0.0], [0.0, 0.0]) == pytest.approx(1.0)
    assert da_kernel([0.5, 0.0], [0.5, 0.0]) == pytest.approx(4.0 / 3.0, rel=1e-14)
    with pytest.raises(ValueError):
        da_kernel([1.0, 0.0], [1.0, 0.0])


def test_da_kernel_truncation_tail_bound():
    rng = np.random.default_rng(31)
    for _ in range(10):
        x, y = random_point(rng, 3, 0.8), random_point(rng, 3, 0.8)
        ip = abs(complex(np.vdot(y, x)))
        for n_max in (3, 8):
            err = abs(da_kernel(x, y) - oracles.kernel_partial_sum(x, y, n_max))
            assert err <= ip ** (n_max + 1) / (1.0 - ip) + 1e-15


def test_gram_hermitian_positive_definite():
    rng = np.random.default_rng(37)
    pts = sample_ball(rng, 3, 40, r_max=0.85)
    g = gram(pts)
    assert np.linalg.norm(g - g.conj().T, 2) < 1e-13
    assert np.linalg.eigvalsh(g)[0] > 0.0
    assert g[0, 0] == pytest.approx(da_kernel(pts[0], pts[0]).real, rel=1e-14)


# --------------------------------------------------- truncated functions


def test_truncated_function_parseval_and_eval():
    rng = np.random.default_rng(41)
    y = random_point(rng, 2, 0.7)
    x = random_point(rng, 2, 0.7)
    f = TruncatedFunction.from_kernel(y, 6)
    assert f.norm() ** 2 == pytest.approx(
        sum(c.norm() ** 2 for c in f.components), rel=1e-12
    )
    assert f(x) == pytest.approx(oracles.kernel_partial_sum(x, y, 6), rel=1e-12)


def test_homogeneous_component_of_truncated_kernel():
    rng = np.random.default_rng(43)
    y = random_point(rng, 3, 0.8)
    x = random_point(rng, 3, 0.8)
    f = TruncatedFunction.from_kernel(y, 6)
    got = homogeneous_component(f, 2, x, num_points=16, max_degree=6)
    assert got == pytest.approx(complex(np.vdot(y, x)) ** 2, rel=1e-12)


def test_homogeneous_component_degenerate_cases():
    const = lambda z: 3.25 + 0.0j  # noqa: E731
    assert homogeneous_component(const, 1, [0.4], num_points=8, max_degree=0) == (
        pytest.approx(0.0, abs=1e-14)
    )

    rng = np.random.default_rng(47)
    xi = embed_power(random_point(rng, 2, 0.9), 3)
    poly = lambda z: complex(np.vdot(xi.coeffs, embed_power(z, 3).coeffs))  # noqa: E731
    x = random_point(rng, 2, 0.8)
    assert homogeneous_component(poly, 3, x, num_points=12, max_degree=3) == (
        pytest.approx(poly(x), rel=1e-12)
    )

    with pytest.raises(ValueError, match="num_points"):
        homogeneous_component(poly, 3, x, num_points=6, max_degree=3)


# -------------------------------------------------------------- degree spaces


def test_degree_space_full_arrangement():
    arr = arrangement_from_bases(3, [np.eye(3)])
    assert degree_space(arr, 4).dim == sym_dim(3, 4)
    assert degree_space(arr, 0).dim == 1


def test_degree_space_two_lines_supports_pure_powers():
    arr = arrangement_from_bases(2, [[[1.0], [0.0]], [[0.0], [1.0]]])
    space = degree_space(arr, 2)
    assert space.dim == 2
    # no component along the mixed monomial (index 1 in degree order)
    assert np.allclose(space.matrix[1, :], 0.0, atol=1e-12)


def test_degree_space_three_lines_fill_degree_two():
    assert degree_space(three_lines_c2(), 2).dim == 3


def test_degree_space_degree_one_is_span_of_union():
    rng = np.random.default_rng(53)
    parts = [random_subspace(rng, 5, 2), random_subspace(rng, 5, 2)]
    arr = arrangement_from_bases(5, [p.basis for p in parts])
    space = degree_space(arr, 1)
    assert space.dim == subspace_sum(*parts).dim == 4


@pytest.mark.parametrize("n", [2, 3])
def test_degree_space_contained_in_span_space(n):
    rng = np.random.default_rng(59)
    parts = [random_subspace(rng, 4, 2), random_subspace(rng, 4, 2)]
    arr = arrangement_from_bases(4, [p.basis for p in parts])
    sub = degree_space(arr, n)
    full = degree_space(
        arrangement_from_bases(4, [subspace_sum(*parts).basis]), n
    )
    resid = sub.matrix - full.matrix @ (full.matrix.conj().T @ sub.matrix)
    assert np.linalg.norm(resid, 2) <= 1e-9
    assert sub.dim < full.dim  # strict: no single part spans


# -------------------------------------------------------------- Gram pencils


def test_pencil_identity_multiplier_is_one():
    rng = np.random.default_rng(61)
    pts = sample_ball(rng, 2, 60, r_max=0.85)
    assert multiplier_norm_lb(np.eye(2), pts) == pytest.approx(1.0, abs=1e-9)


def test_pencil_matches_generalized_eig_oracle():
    rng = np.random.default_rng(67)
    pts = sample_ball(rng, 2, 25, r_max=0.8)
    a = rand_mat(rng, 2, 2)
    vals = pts @ a.T
    assert gram_pencil_lb(vals, pts) == pytest.approx(
        oracles.pencil_lb(vals, pts), rel=1e-7
    )


def test_multiplier_scaled_identity_converges():
    rng = np.random.default_rng(71)
    pts = sample_ball(rng, 3, 300, r_max=0.9, r_min=0.2)
    lb = multiplier_norm_lb(2.0 * np.eye(3), pts)
    assert lb <= 2.0 + 1e-9
    assert lb >= 1.96


def test_multiplier_restricted_to_fixed_line_is_one():
    rng = np.random.default_rng(73)
    line = orthonormalize([[0.0], [1.0]])
    pts = sample_ball(rng, 2, 50, r_max=0.8, subspace=line)
    lb = multiplier_norm_lb(np.diag([2.0, 1.0]), pts)
    assert lb == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("d,n", [(1, 2), (2, 2), (2, 3)])
def test_homogeneous_polynomial_multiplier_norm(d, n):
    """Gram-pencil bounds for <x^n, xi> stay below ||xi|| and approach it."""
    rng = np.random.default_rng(80 + 10 * d + n)
    xi = rand_vec(rng, sym_dim(d, n))
    pts = sample_ball(rng, d, 500, r_max=0.95, r_min=0.3)
    vals = np.array([np.vdot(xi, embed_power(p, n).coeffs) for p in pts])
    lb = gram_pencil_lb(vals, pts)
    norm = np.linalg.norm(xi)
    assert lb <= norm * (1.0 + 1e-8)
    assert lb >= 0.98 * norm


def test_pencil_input_validation():
    rng = np.random.default_rng(79)
    pts = sample_ball(rng, 2, 10, r_max=0.5)
    with pytest.raises(ValueError, match="value row"):
        gram_pencil_lb(np.ones(9), pts)
    with pytest.raises(ValueError, match="unit ball"):
        gram_pencil_lb(np.ones(2), np.array([[0.4, 0.0], [1.2, 0.0]]))
    dup = np.vstack([pts, pts[:1]])
    with pytest.raises(ValueError, match="duplicate"):
        gram_pencil_lb(np.ones(11), dup)


def test_sample_ball_respects_radius_and_subspace():
    rng = np.random.default_rng(83)
    pts = sample_ball(rng, 4, 100, r_max=0.7, r_min=0.2)
    norms = np.linalg.norm(pts, axis=1)
    assert np.all(norms <= 0.7 + 1e-12) and np.all(norms >= 0.2 - 1e-12)

    sub = random_subspace(rng, 4, 2)
    inside = sample_ball(rng, 4, 30, subspace=sub)
    resid = inside.T - sub.basis @ (sub.basis.conj().T @ inside.T)
    assert np.linalg.norm(resid, 2) < 1e-12
