"""Weighted symmetric powers, kernel evaluations, and multiplier-norm estimates.

Degree-n symmetric coordinates are indexed by monomials of total degree n,
ordered by ``itertools.combinations_with_replacement``.  Coefficient vectors
are taken against the weighted monomial basis sqrt(n!/alpha!) z^alpha, so the
inner product of coefficient vectors is the Euclidean one and the embedding
x -> x^{(n)} satisfies <x^{(n)}, y^{(n)}> = <x, y>^n exactly.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from itertools import combinations_with_replacement
from typing import Callable

import numpy as np

from .arrangement import DEFAULT_TOL, Arrangement, Subspace, orthonormalize


@dataclasses.dataclass(frozen=True)
class MultiIndex:
    """An exponent vector for a monomial z^alpha."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be nonnegative")

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def factorial(self) -> int:
        out = 1
        for e in self.exponents:
            out *= math.factorial(e)
        return out


@functools.lru_cache(maxsize=None)
def multi_indices(d: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors in d variables of total degree n, in canonical order.

    The order is that of ``combinations_with_replacement(range(d), n)``: for
    d=2, n=2 it is (2,0), (1,1), (0,2).
    """
    if d < 0 or n < 0:
        raise ValueError("d and n must be nonnegative")
    out = []
    for combo in combinations_with_replacement(range(d), n):
        alpha = [0] * d
        for i in combo:
            alpha[i] += 1
        out.append(tuple(alpha))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _index_positions(d: int, n: int) -> dict:
    return {alpha: pos for pos, alpha in enumerate(multi_indices(d, n))}


def sym_dim(d: int, n: int) -> int:
    """Dimension of the degree-n symmetric coordinates over C^d."""
    return math.comb(d + n - 1, n) if d > 0 else (1 if n == 0 else 0)


@functools.lru_cache(maxsize=None)
def _weights(d: int, n: int) -> np.ndarray:
    """sqrt(n!/alpha!) for each alpha, in canonical order."""
    fac_n = math.factorial(n)
    vals = [
        math.sqrt(fac_n / MultiIndex(alpha).factorial) for alpha in multi_indices(d, n)
    ]
    return np.asarray(vals, dtype=float)


@functools.lru_cache(maxsize=None)
def _exponent_matrix(d: int, n: int) -> np.ndarray:
    return np.asarray(multi_indices(d, n), dtype=np.int64).reshape(-1, max(d, 1))


@functools.lru_cache(maxsize=None)
def _raise_table(d: int, n: int) -> np.ndarray:
    """Position of alpha + e_j in degree n+1, for each degree-n alpha and j."""
    pos = _index_positions(d, n + 1)
    table = np.empty((sym_dim(d, n), d), dtype=np.int64)
    for r, alpha in enumerate(multi_indices(d, n)):
        for j in range(d):
            beta = list(alpha)
            beta[j] += 1
            table[r, j] = pos[tuple(beta)]
    return table


@dataclasses.dataclass(frozen=True, eq=False)
class SymVector:
    """A degree-n symmetric coefficient vector over C^d (weighted basis)."""

    ambient_dim: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        expected = sym_dim(self.ambient_dim, self.degree)
        if coeffs.shape != (expected,):
            raise ValueError(
                f"degree {self.degree} over C^{self.ambient_dim} needs "
                f"{expected} coefficients, got shape {coeffs.shape}"
            )
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "SymVector") -> complex:
        """<self, other>, linear in self and conjugate-linear in other."""
        if (other.ambient_dim, other.degree) != (self.ambient_dim, self.degree):
            raise ValueError("mismatched degree or ambient dimension")
        return complex(np.vdot(other.coeffs, self.coeffs))


def embed_power(x, n: int) -> SymVector:
    """The weighted n-th power embedding of a point x in C^d.

    Coefficients are sqrt(n!/alpha!) x^alpha; consequently
    <embed_power(x,n), embed_power(y,n)> = <x,y>^n and the norm is ||x||^n.
    """
    x = np.asarray(x, dtype=complex).reshape(-1)
    d = x.shape[0]
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        return SymVector(d, 0, np.ones(1, dtype=complex))
    expo = _exponent_matrix(d, n)
    mono = np.prod(np.power(x[None, :], expo), axis=1)
    return SymVector(d, n, _weights(d, n) * mono)


def sym_power(a, n: int) -> np.ndarray:
    """Matrix of the degree-n symmetric power of a (possibly rectangular) map.

    For a of shape (d_out, d_in) this returns the matrix of the induced map on
    weighted symmetric coordinates, of shape (sym_dim(d_out, n),
    sym_dim(d_in, n)).  It is functorial (compatible with composition and
    adjoints) and sends embed_power(x, n) to embed_power(a @ x, n).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    d_out, d_in = a.shape
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        return np.ones((1, 1), dtype=complex)
    if d_in == 0:
        return np.zeros((sym_dim(d_out, n), 0), dtype=complex)
    if d_out == 0:
        raise ValueError("cannot raise a map into C^0 to a positive power")

    # Unweighted monomial coefficients of the polynomials P_alpha(z) =
    # prod_i ((A e_i) . z)^{alpha_i}, built degree by degree: each alpha of
    # degree m factors as alpha' + e_i (i = first nonzero entry), and
    # multiplying by the linear form (A e_i) . z is a sparse scatter-add.
    prev = np.ones((1, 1), dtype=complex)  # degree 0
    for m in range(1, n + 1):
        idx_in = multi_indices(d_in, m)
        cur = np.zeros((sym_dim(d_out, m), len(idx_in)), dtype=complex)
        raise_out = _raise_table(d_out, m - 1)
        pos_prev = _index_positions(d_in, m - 1)
        for c, alpha in enumerate(idx_in):
            i = next(t for t, e in enumerate(alpha) if e > 0)
            parent = list(alpha)
            parent[i] -= 1
            base = prev[:, pos_prev[tuple(parent)]]
            for t in range(d_out):
                coef = a[t, i]
                if coef != 0.0:
                    np.add.at(cur[:, c], raise_out[:, t], coef * base)
        prev = cur

    w_in = _weights(d_in, n)
    w_out = _weights(d_out, n)
    return prev * (w_in[None, :] / w_out[:, None])


def da_kernel(x, y) -> complex:
    """Reproducing kernel 1 / (1 - <x, y>) of the unit-ball function space."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    y = np.asarray(y, dtype=complex).reshape(-1)
    ip = complex(np.vdot(y, x))
    if abs(1.0 - ip) < 1e-14:
        raise ValueError("kernel singular: <x, y> is numerically 1")
    return 1.0 / (1.0 - ip)


def gram(points) -> np.ndarray:
    """Kernel Gram matrix G[i, j] = 1 / (1 - <p_i, p_j>) for rows p_i."""
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    ips = pts @ pts.conj().T
    if np.any(np.abs(1.0 - ips) < 1e-14):
        raise ValueError("kernel singular for some pair of points")
    return 1.0 / (1.0 - ips)


@dataclasses.dataclass(frozen=True, eq=False)
class TruncatedFunction:
    """A function with finitely many homogeneous components, degrees 0..max_degree."""

    components: tuple[SymVector, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("need at least the degree-0 component")
        d = comps[0].ambient_dim
        for n, c in enumerate(comps):
            if c.ambient_dim != d or c.degree != n:
                raise ValueError("components must have degrees 0,1,... over one C^d")
        object.__setattr__(self, "components", comps)

    @property
    def ambient_dim(self) -> int:
        return self.components[0].ambient_dim

    @property
    def max_degree(self) -> int:
        return len(self.components) - 1

    def norm(self) -> float:
        return math.sqrt(sum(c.norm() ** 2 for c in self.components))

    def __call__(self, x) -> complex:
        out = 0.0 + 0.0j
        for n, c in enumerate(self.components):
            out += complex(np.vdot(c.coeffs, embed_power(x, n).coeffs))
        return out

    @classmethod
    def from_kernel(cls, y, max_degree: int) -> "TruncatedFunction":
        """Degree truncation of the kernel function k_y, i.e. sum_n <., y>^n."""
        y = np.asarray(y, dtype=complex).reshape(-1)
        return cls(tuple(embed_power(y, n) for n in range(max_degree + 1)))


def homogeneous_component(
    f: Callable[[np.ndarray], complex],
    n: int,
    x,
    num_points: int,
    max_degree: int | None = None,
) -> complex:
    """Degree-n Taylor component of f at the point x, by roots-of-unity averaging.

    Averages f(e^{i t} x) e^{-i n t} over num_points equispaced angles.  When
    ``max_degree`` (a known bound on the polynomial degree of f along rays) is
    given, ``num_points`` must exceed max_degree + n so no aliasing can occur.
    """
    if n < 0 or num_points <= 0:
        raise ValueError("need n >= 0 and a positive number of sample points")
    if max_degree is not None and num_points <= max_degree + n:
        raise ValueError(
            f"num_points={num_points} cannot separate degrees up to "
            f"{max_degree} with n={n}; need more than {max_degree + n}"
        )
    x = np.asarray(x, dtype=complex).reshape(-1)
    total = 0.0 + 0.0j
    for j in range(num_points):
        t = 2.0 * math.pi * j / num_points
        w = np.exp(1j * t)
        total += f(w * x) * np.exp(-1j * n * t)
    return complex(total / num_points)


@dataclasses.dataclass(frozen=True, eq=False)
class DegreeSpace:
    """Orthonormal basis of the degree-n coordinates supported on an arrangement."""

    ambient_dim: int
    degree: int
    matrix: np.ndarray  # (sym_dim(d, n), rank), orthonormal columns

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape[0] != sym_dim(self.ambient_dim, self.degree):
            raise ValueError("matrix row count does not match sym_dim")
        if m.shape[1] > 0 and not np.allclose(
            m.conj().T @ m, np.eye(m.shape[1]), atol=1e-10
        ):
            raise ValueError("basis columns are not orthonormal")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def vectors(self) -> list[SymVector]:
        return [
            SymVector(self.ambient_dim, self.degree, self.matrix[:, j])
            for j in range(self.dim)
        ]


def degree_space(arr: Arrangement, n: int, tol: float = DEFAULT_TOL) -> DegreeSpace:
    """Span of the degree-n powers of points of the arrangement's union.

    Equals the sum over parts of the pushed-forward symmetric power of each
    part's basis; the per-part blocks have orthonormal columns, and the total
    span is orthonormalized with relative cutoff ``tol``.
    """
    d = arr.ambient_dim
    if n == 0:
        return DegreeSpace(d, 0, np.ones((1, 1), dtype=complex))
    blocks = [sym_power(p.basis, n) for p in arr.parts if p.dim > 0]
    if not blocks:
        return DegreeSpace(d, n, np.zeros((sym_dim(d, n), 0), dtype=complex))
    stacked = np.hstack(blocks)
    span = orthonormalize(stacked, tol=tol)
    return DegreeSpace(d, n, span.basis)


def part_pushforward(part: Subspace, n: int) -> np.ndarray:
    """Isometry from degree-n coordinates over the part into ambient ones."""
    return sym_power(part.basis, n)


def gram_pencil_lb(values, points, cutoff: float = 1e-7) -> float:
    """Largest generalized eigenvalue sqrt of (W o G, G) on the sampled kernels.

    ``values`` holds per-point data v_i (rows; scalars are allowed), and
    W[i, j] = <v_i, v_j>.  The returned value is a lower bound for the
    multiplier norm of any map whose graph the values sample, and converges to
    it as the points fill out the ball.  The kernel Gram matrix G is whitened
    with a relative eigenvalue cutoff to keep the compression well posed.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    vals = np.asarray(values, dtype=complex)
    if vals.ndim == 1:
        vals = vals.reshape(-1, 1)
    if vals.shape[0] != pts.shape[0]:
        raise ValueError("one value row per point required")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms >= 1.0):
        raise ValueError("points must lie in the open unit ball")
    dists = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    np.fill_diagonal(dists, np.inf)
    if np.min(dists) < 1e-9:
        raise ValueError("duplicate or near-duplicate points make the Gram singular")

    g = gram(pts)
    m = (vals @ vals.conj().T) * g
    ew, ev = np.linalg.eigh(g)
    keep = ew > cutoff * ew[-1]
    if not np.any(keep):
        raise ValueError("kernel Gram matrix is numerically zero")
    y = ev[:, keep] / np.sqrt(ew[keep])
    comp = y.conj().T @ m @ y
    comp = 0.5 * (comp + comp.conj().T)
    top = float(np.linalg.eigvalsh(comp)[-1])
    return math.sqrt(max(top, 0.0))


def multiplier_norm_lb(a, points, cutoff: float = 1e-7) -> float:
    """Lower bound for the multiplier norm of the linear row map x -> A x.

    Compresses M_A M_A* onto the kernel functions of the sampled points:
    W[i, j] = <A p_i, A p_j> against the kernel Gram matrix.  Always at most
    ||A||, and approaches it as the points fill out the ball.
    """
    a = np.asarray(a, dtype=complex)
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return gram_pencil_lb(pts @ a.T, pts, cutoff=cutoff)


def sample_ball(
    rng: np.random.Generator,
    d: int,
    count: int,
    r_max: float = 0.9,
    r_min: float = 0.0,
    subspace: Subspace | None = None,
) -> np.ndarray:
    """Sample points (rows) of the open ball, uniformly in direction.

    Radii are drawn uniformly in [r_min, r_max].  When ``subspace`` is given,
    the points are drawn inside it (still expressed in ambient coordinates).
    """
    if subspace is not None:
        frame = subspace.basis
        k = subspace.dim
        if k == 0:
            return np.zeros((count, d), dtype=complex)
    else:
        frame = None
        k = d
    z = rng.standard_normal((count, k)) + 1j * rng.standard_normal((count, k))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    r = rng.uniform(r_min, r_max, size=count)
    z *= r[:, None]
    if frame is not None:
        z = z @ frame.T
    return z
