"""Finite arrangements of complex subspaces and the isometry geometry of linear maps.

Subspaces are stored as matrices with orthonormal columns.  Everything here is
plain dense numpy: SVD for ranks and principal angles, eigendecompositions of
``A* A`` for the singular-value splitting of an invertible map into expanded,
preserved and contracted directions.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, NamedTuple

import numpy as np

# Relative singular-value cutoff used for all rank decisions.
DEFAULT_TOL = 1e-10

# Band half-width |sigma - 1| <= ISOMETRY_TOL used to cluster singular values
# around 1 when splitting a map into expanded / preserved / contracted parts.
ISOMETRY_TOL = 1e-8


def _as_complex_matrix(vectors, ambient_dim: int | None = None) -> np.ndarray:
    """Normalize input (sequence of vectors, or a (d, k) matrix) to a complex matrix of columns."""
    arr = np.asarray(vectors, dtype=complex)
    if arr.size == 0 and ambient_dim is not None:
        return arr.reshape(ambient_dim, -1)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected vectors or a 2-d matrix, got ndim={arr.ndim}")
    if ambient_dim is not None and arr.shape[0] != ambient_dim:
        raise ValueError(
            f"vectors live in dimension {arr.shape[0]}, expected {ambient_dim}"
        )
    return arr


@dataclasses.dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of C^d, represented by an orthonormal column basis.

    ``basis`` has shape (ambient_dim, dim); dim may be zero.  The basis matrix
    is validated (columns orthonormal to 1e-12) and frozen on construction.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex)
        if basis.ndim != 2 or basis.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis must be ({self.ambient_dim}, dim), got {basis.shape}"
            )
        if basis.shape[1] > self.ambient_dim:
            raise ValueError("more basis vectors than ambient dimension")
        if basis.shape[1] > 0:
            gram = basis.conj().T @ basis
            if not np.allclose(gram, np.eye(basis.shape[1]), atol=1e-12):
                raise ValueError("basis columns are not orthonormal")
        basis = basis.copy()
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace, as a dense (d, d) matrix."""
        return self.basis @ self.basis.conj().T

    def contains(self, other: "Subspace", tol: float = DEFAULT_TOL) -> bool:
        """Whether ``other`` is contained in this subspace, up to ``tol``."""
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimensions differ")
        if other.dim == 0:
            return True
        if other.dim > self.dim:
            return False
        resid = other.basis - self.basis @ (self.basis.conj().T @ other.basis)
        return bool(np.linalg.norm(resid, 2) <= tol)

    def perp(self) -> "Subspace":
        """Orthogonal complement."""
        if self.dim == 0:
            return Subspace(self.ambient_dim, np.eye(self.ambient_dim, dtype=complex))
        if self.dim == self.ambient_dim:
            return Subspace(self.ambient_dim, np.zeros((self.ambient_dim, 0), complex))
        # Columns of U beyond dim span the complement.
        u, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(self.ambient_dim, u[:, self.dim :])

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def subspace_equal(v: Subspace, w: Subspace, tol: float = DEFAULT_TOL) -> bool:
    """Equality of subspaces up to ``tol`` (same dim and mutual containment)."""
    return v.dim == w.dim and v.contains(w, tol) and w.contains(v, tol)


def orthonormalize(
    vectors, ambient_dim: int | None = None, tol: float = DEFAULT_TOL
) -> Subspace:
    """Subspace spanned by the given vectors (columns), via SVD rank truncation.

    Singular values below ``tol`` times the largest are treated as zero, so
    near-dependent spanning sets collapse to the numerically supported span.
    An all-zero (or empty) input yields the zero subspace.
    """
    mat = _as_complex_matrix(vectors, ambient_dim)
    d = mat.shape[0]
    if mat.shape[1] == 0:
        return Subspace(d, np.zeros((d, 0), dtype=complex))
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace(d, np.zeros((d, 0), dtype=complex))
    rank = int(np.sum(s > tol * s[0]))
    return Subspace(d, u[:, :rank])


def subspace_sum(*parts: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    """Span of the union of the given subspaces."""
    if not parts:
        raise ValueError("need at least one subspace")
    d = parts[0].ambient_dim
    mats = [p.basis for p in parts if p.ambient_dim == d]
    if len(mats) != len(parts):
        raise ValueError("ambient dimensions differ")
    return orthonormalize(np.hstack(mats), ambient_dim=d, tol=tol)


def intersect(v: Subspace, w: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    """Intersection of two subspaces via principal vectors.

    Directions whose principal cosine is within ``tol`` of 1 are taken to be
    common to both subspaces.
    """
    if v.ambient_dim != w.ambient_dim:
        raise ValueError("ambient dimensions differ")
    d = v.ambient_dim
    if v.dim == 0 or w.dim == 0:
        return Subspace(d, np.zeros((d, 0), dtype=complex))
    u, s, _ = np.linalg.svd(v.basis.conj().T @ w.basis, full_matrices=False)
    mask = s >= 1.0 - tol
    # B_v @ U has orthonormal columns, so no re-orthonormalization is needed.
    return Subspace(d, v.basis @ u[:, mask])


def proj_product_norm(v: Subspace, w: Subspace) -> float:
    """Operator norm of the product of orthogonal projectors P_V P_W.

    Equals the largest principal cosine between the two subspaces; 0.0 if
    either is the zero subspace.
    """
    if v.ambient_dim != w.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if v.dim == 0 or w.dim == 0:
        return 0.0
    return float(np.linalg.norm(v.basis.conj().T @ w.basis, 2))


@dataclasses.dataclass(frozen=True, eq=False)
class Arrangement:
    """A finite collection of subspaces of a common C^d, none containing another."""

    ambient_dim: int
    parts: tuple[Subspace, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("arrangement needs at least one part")
        for p in parts:
            if p.ambient_dim != self.ambient_dim:
                raise ValueError("part ambient dimension mismatch")
        for i, p in enumerate(parts):
            for j, q in enumerate(parts):
                if i != j and q.contains(p):
                    raise ValueError(
                        f"part {i} is contained in part {j}; arrangement parts "
                        "must be incomparable"
                    )
        object.__setattr__(self, "parts", parts)

    def __len__(self) -> int:
        return len(self.parts)

    def span(self, tol: float = DEFAULT_TOL) -> Subspace:
        return subspace_sum(*self.parts, tol=tol)

    def map_by(self, a: np.ndarray, tol: float = DEFAULT_TOL) -> "Arrangement":
        """Image arrangement under an invertible linear map (parts A M_i)."""
        a = np.asarray(a, dtype=complex)
        new = [orthonormalize(a @ p.basis, tol=tol) for p in self.parts]
        return Arrangement(a.shape[0], tuple(new))


def arrangement_from_bases(
    ambient_dim: int, bases: Iterable, tol: float = DEFAULT_TOL
) -> Arrangement:
    """Build an arrangement by orthonormalizing each part's spanning set."""
    parts = tuple(orthonormalize(b, ambient_dim=ambient_dim, tol=tol) for b in bases)
    return Arrangement(ambient_dim, parts)


def c_constant(arr: Arrangement) -> float:
    """Largest pairwise projector-product norm over distinct parts.

    This is the cosine of the smallest principal angle occurring between any
    two parts of the arrangement.  Requires at least two parts.
    """
    if len(arr) < 2:
        raise ValueError("c_constant needs an arrangement with at least two parts")
    best = 0.0
    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            best = max(best, proj_product_norm(arr.parts[i], arr.parts[j]))
    return best


class IsometryCheck(NamedTuple):
    ok: bool
    residual: float


def is_isometric_on(a: np.ndarray, s: Subspace, tol: float = 1e-10) -> IsometryCheck:
    """Whether a matrix acts isometrically on a subspace.

    The residual is || B* (A*A - I) B ||_2 with B an orthonormal basis of the
    subspace; the check passes when it does not exceed ``tol``.
    """
    a = np.asarray(a, dtype=complex)
    if s.dim == 0:
        return IsometryCheck(True, 0.0)
    ab = a @ s.basis
    resid = ab.conj().T @ ab - np.eye(s.dim)
    r = float(np.linalg.norm(resid, 2))
    return IsometryCheck(r <= tol, r)


@dataclasses.dataclass(frozen=True, eq=False)
class IsometrySpectrum:
    """Singular-value splitting of an invertible map.

    ``e_plus``, ``e_one`` and ``e_minus`` are the spans of right singular
    vectors with singular value above, inside, and below the band
    |sigma - 1| <= tol.  They are mutually orthogonal and sum to C^d.
    ``singular_values`` is the full list, descending.
    """

    e_plus: Subspace
    e_one: Subspace
    e_minus: Subspace
    singular_values: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.e_one.ambient_dim


def isometry_spectrum(a: np.ndarray, tol: float = ISOMETRY_TOL) -> IsometrySpectrum:
    """Split C^d into expanded / preserved / contracted directions of a map.

    Computed from the SVD of ``a``; right singular vectors with singular value
    within ``tol`` of 1 span the preserved space ``e_one``.  Raises on a
    numerically singular input.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    d = a.shape[0]
    _, s, vh = np.linalg.svd(a)
    if s[-1] <= 1e-12 * s[0]:
        raise ValueError("matrix is numerically singular")
    v = vh.conj().T
    plus = s > 1.0 + tol
    minus = s < 1.0 - tol
    one = ~(plus | minus)
    return IsometrySpectrum(
        e_plus=Subspace(d, v[:, plus]),
        e_one=Subspace(d, v[:, one]),
        e_minus=Subspace(d, v[:, minus]),
        singular_values=s.copy(),
    )


class DeviationStats(NamedTuple):
    """Distance of A*A from the identity, computed two ways."""

    norm_dev: float
    formula_dev: float


def deviation_stats(a: np.ndarray) -> DeviationStats:
    """|| A*A - I ||_2 together with its closed form from extreme singular values.

    The closed form is max(| ||A||^2 - 1 |, | 1 - 1/||A^-1||^2 |); the two
    values agree up to roundoff for any invertible map.
    """
    a = np.asarray(a, dtype=complex)
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise ValueError("matrix is numerically singular")
    norm_dev = float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[1]), 2))
    formula_dev = float(max(abs(s[0] ** 2 - 1.0), abs(1.0 - s[-1] ** 2)))
    return DeviationStats(norm_dev=norm_dev, formula_dev=formula_dev)
