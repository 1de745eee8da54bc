"""Shared random constructions and named arrangements for the test suite."""

import numpy as np

from fockdeform import (
    Arrangement,
    Subspace,
    arrangement_from_bases,
    orthonormalize,
)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))[None, :]


def map_with_spectrum(rng: np.random.Generator, sigmas) -> np.ndarray:
    """Random map U diag(sigmas) V* with exactly the prescribed singular values."""
    sigmas = np.asarray(sigmas, dtype=float)
    d = sigmas.size
    u = random_unitary(rng, d)
    v = random_unitary(rng, d)
    return (u * sigmas[None, :]) @ v.conj().T


def random_subspace(rng: np.random.Generator, d: int, k: int) -> Subspace:
    z = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    return orthonormalize(z, ambient_dim=d)


def random_point(rng: np.random.Generator, d: int, r_max: float = 0.85) -> np.ndarray:
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    z /= np.linalg.norm(z)
    return z * rng.uniform(0.1, r_max)


def coordinate_lines(d: int) -> Arrangement:
    eye = np.eye(d, dtype=complex)
    return arrangement_from_bases(d, [eye[:, [i]] for i in range(d)])


def three_lines_c2() -> Arrangement:
    """Both coordinate lines of C^2 plus the diagonal; c constant 1/sqrt(2)."""
    return arrangement_from_bases(
        2, [[[1.0], [0.0]], [[0.0], [1.0]], [[1.0], [1.0]]]
    )


def transverse_planes_c4() -> Arrangement:
    e = np.eye(4, dtype=complex)
    return arrangement_from_bases(4, [e[:, [0, 1]], e[:, [2, 3]]])


def chain_planes_c4() -> Arrangement:
    """Three 2-planes in C^4 whose union spans but fits no classification clause."""
    e = np.eye(4, dtype=complex)
    return arrangement_from_bases(4, [e[:, [0, 1]], e[:, [1, 2]], e[:, [2, 3]]])


def pairwise_full_planes_c4() -> Arrangement:
    """Three planes in C^4, every pairwise sum of full dimension."""
    e = np.eye(4, dtype=complex)
    mixed = np.stack([(e[:, 0] + e[:, 2]), (e[:, 1] + e[:, 3])], axis=1)
    return arrangement_from_bases(4, [e[:, [0, 1]], e[:, [2, 3]], mixed])


def hyperbolic_instance(rng: np.random.Generator, half: int, e_one: int = 0):
    """A map plus two isotropic parts realizing the pairing construction.

    Returns (a, arrangement) in dimension 2*half + e_one.  The map expands on
    ``half`` directions, contracts on ``half`` others, and preserves the rest;
    each part pairs every expanded direction with a contracted one, weighted so
    the map is exactly isometric on it, and the two parts pair with opposite
    signs so they intersect only in the preserved block.
    """
    d = 2 * half + e_one
    gaps = rng.uniform(0.2, 0.9, size=2 * half)
    diag = np.concatenate([1.0 + gaps[:half], 1.0 / (1.0 + gaps[half:]), np.ones(e_one)])
    u = random_unitary(rng, d)
    w = random_unitary(rng, d)
    a = (w * diag[None, :]) @ u.conj().T

    h = diag**2 - 1.0  # diagonal of U*(A*A - I)U in the u-basis
    cols_plus = []
    cols_minus = []
    for i in range(half):
        j = half + i
        vp = u[:, i] / np.sqrt(h[i]) + u[:, j] / np.sqrt(-h[j])
        vm = u[:, i] / np.sqrt(h[i]) - u[:, j] / np.sqrt(-h[j])
        cols_plus.append(vp)
        cols_minus.append(vm)
    fixed = [u[:, 2 * half + t] for t in range(e_one)]
    basis_plus = np.stack(cols_plus + fixed, axis=1)
    basis_minus = np.stack(cols_minus + fixed, axis=1)
    arr = arrangement_from_bases(d, [basis_plus, basis_minus])
    return a, arr
