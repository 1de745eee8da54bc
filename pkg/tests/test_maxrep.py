"""Maximal isometric subspaces: extension, per-part representation, pairwise checks."""

import math

import numpy as np
import pytest

from fockdeform import (
    MaximalRepresentation,
    arrangement_from_bases,
    intersect,
    is_isometric_on,
    isometry_spectrum,
    maximal_representation,
    null_extension,
    orthonormalize,
    subspace_equal,
    subspace_sum,
    verify_pairwise,
)
from helpers import (
    coordinate_lines,
    hyperbolic_instance,
    map_with_spectrum,
    random_unitary,
    three_lines_c2,
)


def col(*entries):
    return np.array(entries, dtype=complex).reshape(-1, 1)


def zero_seed(d):
    return orthonormalize([], ambient_dim=d)


# ------------------------------------------------------------- null_extension


def test_extension_of_zero_seed_picks_the_balanced_direction():
    # For diag(2, 1/2) the only isometric lines are spanned by phase twists of
    # (1, 2)/sqrt(5): the expansion by 3 along e0 cancels the contraction by
    # 3/4 along e1 exactly when the weights are 1 and 4.
    a = np.diag([2.0, 0.5]).astype(complex)
    out = null_extension(a, zero_seed(2))
    assert out.dim == 1
    expected = col(1.0, 2.0) / math.sqrt(5.0)
    assert out.contains(orthonormalize(expected, ambient_dim=2))
    assert is_isometric_on(a, out, tol=1e-12).ok


def test_extension_includes_the_preserved_eigenspace():
    a = np.diag([2.0, 0.5, 1.0]).astype(complex)
    out = null_extension(a, zero_seed(3))
    assert out.dim == 2
    assert out.contains(orthonormalize(col(0, 0, 1), ambient_dim=3))
    assert out.contains(orthonormalize(col(1, 2, 0) / math.sqrt(5), ambient_dim=3))


def test_extension_keeps_the_seed():
    rng = np.random.default_rng(11)
    a = map_with_spectrum(rng, [1.4, 1.2, 0.7, 0.5, 1.0])
    lam, v = np.linalg.eigh(a.conj().T @ a)
    mu = lam - 1.0
    ip, im = int(np.argmax(mu)), int(np.argmin(mu))
    w = v[:, ip] + math.sqrt(mu[ip] / -mu[im]) * v[:, im]
    seed = orthonormalize(w.reshape(-1, 1) / np.linalg.norm(w), ambient_dim=5)
    out = null_extension(a, seed)
    assert out.contains(seed)
    # one positive and one negative direction consumed by the seed, one
    # preserved direction, one pairing left
    assert out.dim == 3
    assert is_isometric_on(a, out, tol=1e-9).ok


@pytest.mark.parametrize("seed", range(20))
def test_extension_dimension_formula(seed):
    rng = np.random.default_rng(500 + seed)
    d = int(rng.integers(2, 7))
    p = int(rng.integers(1, d))
    q = int(rng.integers(1, d - p + 1))
    ones = d - p - q
    sigmas = (
        [1.0 + 0.2 * (i + 1) for i in range(p)]
        + [1.0 / (1.0 + 0.2 * (i + 1)) for i in range(q)]
        + [1.0] * ones
    )
    a = map_with_spectrum(rng, sigmas)
    out = null_extension(a, zero_seed(d))
    assert out.dim == ones + min(p, q)
    assert is_isometric_on(a, out, tol=1e-8).ok


def test_contraction_only_map_preserves_no_more_than_its_eigenspace():
    # When the operator norm is 1 there are no expanding directions to pair
    # against, so the maximal isometric subspace is the preserved eigenspace.
    rng = np.random.default_rng(21)
    a = map_with_spectrum(rng, [1.0, 1.0, 0.9, 0.6])
    out = null_extension(a, zero_seed(4))
    assert out.dim == 2
    assert subspace_equal(out, isometry_spectrum(a).e_one)


@pytest.mark.parametrize("seed", range(10))
def test_extension_is_maximal(seed):
    # No unit vector outside the output can be added without breaking the
    # isometry: either its own form value or a cross term is macroscopic.
    rng = np.random.default_rng(700 + seed)
    d = int(rng.integers(3, 7))
    p = int(rng.integers(1, d - 1))
    q = int(rng.integers(1, d - p))
    sigmas = [1.3] * p + [0.7] * q + [1.0] * (d - p - q)
    a = map_with_spectrum(rng, sigmas)
    out = null_extension(a, zero_seed(d))
    h = a.conj().T @ a - np.eye(d)
    cand = rng.standard_normal((d, 300)) + 1j * rng.standard_normal((d, 300))
    if out.dim:
        cand -= out.basis @ (out.basis.conj().T @ cand)
    cand /= np.linalg.norm(cand, axis=0)
    off_diag = np.abs(out.basis.conj().T @ h @ cand).max(axis=0) if out.dim else 0.0
    diag = np.abs(np.sum(cand.conj() * (h @ cand), axis=0))
    assert np.maximum(off_diag, diag).min() > 1e-8


def test_extension_rejects_bad_seeds():
    a = np.diag([2.0, 0.5]).astype(complex)
    with pytest.raises(ValueError, match="isometric on the seed"):
        null_extension(a, orthonormalize(col(1, 0), ambient_dim=2))
    with pytest.raises(ValueError, match="ambient"):
        null_extension(a, zero_seed(3))


# ---------------------------------------------------- maximal_representation


def test_representation_merges_equal_outputs():
    # Both the balanced line and the preserved axis extend to the same plane;
    # the phase-twisted line extends to a different one.
    a = np.diag([2.0, 0.5, 1.0]).astype(complex)
    p1 = col(1, 2, 0) / math.sqrt(5)
    p2 = col(0, 0, 1)
    p3 = col(1, 2j, 0) / math.sqrt(5)
    rep = maximal_representation(a, arrangement_from_bases(3, [p1, p2, p3]))
    assert len(rep.parts_out) == 2
    assert rep.t_map == (0, 0, 1)
    assert all(s.dim == 2 for s in rep.parts_out)
    assert rep.e_one.dim == 1
    assert rep.parts_out[0].contains(orthonormalize(p1, ambient_dim=3))
    assert rep.parts_out[0].contains(orthonormalize(p2, ambient_dim=3))
    assert rep.parts_out[1].contains(orthonormalize(p3, ambient_dim=3))


@pytest.mark.parametrize("seed", range(5))
def test_unitary_representation_is_the_whole_space(seed):
    rng = np.random.default_rng(810 + seed)
    u = random_unitary(rng, 2)
    rep = maximal_representation(u, three_lines_c2())
    assert len(rep.parts_out) == 1
    assert rep.t_map == (0, 0, 0)
    assert rep.parts_out[0].dim == 2
    assert rep.e_one.dim == 2


def test_tilted_lines_stay_separate():
    eps = 0.3
    a = np.array([[1.0, math.sin(eps)], [0.0, math.cos(eps)]], dtype=complex)
    rep = maximal_representation(a, coordinate_lines(2))
    assert len(rep.parts_out) == 2
    assert rep.t_map == (0, 1)
    assert rep.e_one.dim == 0
    assert all(s.dim == 1 for s in rep.parts_out)


@pytest.mark.parametrize("half,e_one", [(1, 0), (2, 0), (2, 1), (3, 2)])
def test_representation_fixes_already_maximal_parts(half, e_one):
    rng = np.random.default_rng(97 + half + 10 * e_one)
    a, arr = hyperbolic_instance(rng, half, e_one=e_one)
    rep = maximal_representation(a, arr)
    assert len(rep.parts_out) == 2
    assert rep.t_map == (0, 1)
    assert rep.e_one.dim == e_one
    for got, seeded in zip(rep.parts_out, arr.parts):
        assert subspace_equal(got, seeded, tol=1e-8)


def test_representation_validates_inputs():
    a = np.diag([2.0, 0.5]).astype(complex)
    line = col(1, 2) / math.sqrt(5)
    with pytest.raises(ValueError, match="span"):
        maximal_representation(a, arrangement_from_bases(2, [line]))
    with pytest.raises(ValueError, match="isometric on part"):
        maximal_representation(a, coordinate_lines(2))


# -------------------------------------------------------------------- pairwise


def test_pairwise_on_tilted_lines():
    eps = 0.25
    a = np.array([[1.0, math.sin(eps)], [0.0, math.cos(eps)]], dtype=complex)
    rep = maximal_representation(a, coordinate_lines(2))
    report = verify_pairwise(a, rep)
    assert report.all_ok
    (rec,) = report.records
    assert rec.spans_ambient and rec.sum_dim == 2
    assert rec.preserved_dim == rec.intersection_dim == 0
    assert rec.intersection_match
    assert rec.even_ok and rec.halves_ok


def test_pairwise_on_unitary_is_vacuous():
    rng = np.random.default_rng(33)
    rep = maximal_representation(random_unitary(rng, 2), three_lines_c2())
    report = verify_pairwise(rep.a, rep)
    assert report.records == ()
    assert report.all_ok


@pytest.mark.parametrize("half,e_one", [(2, 0), (2, 1), (3, 1)])
def test_pairwise_on_hyperbolic_pairs(half, e_one):
    rng = np.random.default_rng(55 + half + 7 * e_one)
    a, arr = hyperbolic_instance(rng, half, e_one=e_one)
    rep = maximal_representation(a, arr)
    report = verify_pairwise(a, rep)
    assert report.all_ok
    (rec,) = report.records
    assert rec.spans_ambient
    assert rec.intersection_dim == e_one
    assert rec.even_ok and rec.halves_ok
    meet = intersect(rep.parts_out[0], rep.parts_out[1])
    assert subspace_equal(meet, rep.e_one, tol=1e-8)


def test_pairwise_handles_non_spanning_pairs():
    # Two maximal subspaces built from phase-twisted lines share the whole
    # second pairing and the preserved block, so their sum misses e5's
    # partner direction and the parity checks do not apply.
    a = np.diag([2.0, 0.5, 2.0, 0.5, 1.0, 1.0]).astype(complex)
    s1 = orthonormalize(col(1, 2, 0, 0, 0, 0) / math.sqrt(5), ambient_dim=6)
    s2 = orthonormalize(col(1, 2j, 0, 0, 0, 0) / math.sqrt(5), ambient_dim=6)
    m1 = null_extension(a, s1)
    m2 = null_extension(a, s2)
    rep = MaximalRepresentation(
        a=a, parts_out=(m1, m2), t_map=(0, 1), e_one=isometry_spectrum(a).e_one
    )
    report = verify_pairwise(a, rep)
    (rec,) = report.records
    assert not rec.spans_ambient
    assert rec.sum_dim == 5
    assert rec.intersection_dim == 3
    assert rec.intersection_match
    assert rec.even_ok is None and rec.halves_ok is None
    assert report.all_ok
    assert subspace_sum(m1, m2).dim == 5
