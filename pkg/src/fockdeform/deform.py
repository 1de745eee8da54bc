"""Truncated deformation operators between arrangement function spaces.

An invertible map A that is (nearly) isometric on every part of an arrangement
induces, degree by degree, a map between the degree spaces of the arrangement
and of its image.  This module assembles those blocks, computes truncated
operator norms and condition numbers, evaluates the closed-form analytic bound
for them, and provides the diagnostic inequalities (Gram deviation, norm
sandwich) plus the one-parameter tilt family used in the experiments.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import NamedTuple, Sequence

import numpy as np

from .arrangement import (
    DEFAULT_TOL,
    Arrangement,
    c_constant,
    intersect,
    is_isometric_on,
)
from .fock import DegreeSpace, degree_space, embed_power, sym_power
from .tractability import classify


class IsometryWarning(UserWarning):
    """A map failed the per-part isometry tolerance; results may be off-model."""


class TractabilityWarning(UserWarning):
    """The arrangement did not classify as tractable; bounds are heuristic."""


@dataclasses.dataclass(frozen=True, eq=False)
class TruncatedDeformOp:
    """Blocks of the degree-truncated deformation operator T_A.

    ``blocks[n]`` maps coordinates of the degree-n space of the source
    arrangement to coordinates of the degree-n space of the image arrangement,
    for n = 0..max_degree.
    """

    a: np.ndarray
    max_degree: int
    blocks: tuple[np.ndarray, ...]
    source_spaces: tuple[DegreeSpace, ...]
    image_spaces: tuple[DegreeSpace, ...]

    def __post_init__(self):
        if len(self.blocks) != self.max_degree + 1:
            raise ValueError("need one block per degree 0..max_degree")


class TruncatedNorms(NamedTuple):
    norm: float
    inv_norm: float
    cond: float


def _intertwining_check(
    a: np.ndarray, arr: Arrangement, op: TruncatedDeformOp, tol: float = 1e-9
) -> float:
    """Verify blocks send powers of part points to powers of their images."""
    rng = np.random.default_rng(0)
    worst = 0.0
    for part in arr.parts:
        if part.dim == 0:
            continue
        coef = rng.standard_normal(part.dim) + 1j * rng.standard_normal(part.dim)
        x = part.basis @ (coef / np.linalg.norm(coef))
        ax = a @ x
        for n in range(op.max_degree + 1):
            vx = op.source_spaces[n].matrix.conj().T @ embed_power(x, n).coeffs
            target = op.image_spaces[n].matrix.conj().T @ embed_power(ax, n).coeffs
            worst = max(worst, float(np.linalg.norm(op.blocks[n] @ vx - target)))
    return worst


def build_t_op(
    a, arr: Arrangement, n_max: int, tol: float = DEFAULT_TOL
) -> TruncatedDeformOp:
    """Assemble the truncated deformation operator of a map on an arrangement.

    The map must be invertible; a warning is emitted if it is not isometric on
    every part (tolerance 1e-8), since the deformation framework assumes it.
    Each block is the compression W_n* Sym^n(A) V_n between orthonormal bases
    of the degree spaces; the intertwining property is spot-checked on sampled
    part points to 1e-9 and a failure raises ArithmeticError.
    """
    a = np.asarray(a, dtype=complex)
    d = arr.ambient_dim
    if a.shape != (d, d):
        raise ValueError(f"map must be {d}x{d}, got {a.shape}")
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise ValueError("map is numerically singular")
    for i, part in enumerate(arr.parts):
        check = is_isometric_on(a, part, tol=1e-8)
        if not check.ok:
            warnings.warn(
                f"map is not isometric on part {i} (residual {check.residual:.3e})",
                IsometryWarning,
                stacklevel=2,
            )
    image = arr.map_by(a, tol=tol)
    source_spaces = []
    image_spaces = []
    blocks = []
    for n in range(n_max + 1):
        vn = degree_space(arr, n, tol=tol)
        wn = degree_space(image, n, tol=tol)
        sn = sym_power(a, n)
        blocks.append(wn.matrix.conj().T @ sn @ vn.matrix)
        source_spaces.append(vn)
        image_spaces.append(wn)
    op = TruncatedDeformOp(
        a=a,
        max_degree=n_max,
        blocks=tuple(blocks),
        source_spaces=tuple(source_spaces),
        image_spaces=tuple(image_spaces),
    )
    worst = _intertwining_check(a, arr, op)
    if worst > 1e-9:
        raise ArithmeticError(
            f"intertwining check failed (residual {worst:.3e}); the degree "
            "spaces or symmetric powers are numerically inconsistent"
        )
    return op


def truncated_norms(op: TruncatedDeformOp) -> TruncatedNorms:
    """Operator norm, inverse norm, and condition number of the truncation.

    The operator is block diagonal across degrees, so the norm is the largest
    block singular value and the inverse norm the reciprocal of the smallest.
    Raises ArithmeticError if any block is rank deficient (the truncation is
    then not invertible and the deformation model has broken down).
    """
    top = 0.0
    bottom = math.inf
    for n, block in enumerate(op.blocks):
        if block.shape[0] != block.shape[1]:
            raise ArithmeticError(
                f"degree-{n} block is {block.shape[0]}x{block.shape[1]}; "
                "source and image degree spaces have different dimensions"
            )
        if block.size == 0:
            continue
        s = np.linalg.svd(block, compute_uv=False)
        if s[-1] <= 1e-12 * max(1.0, s[0]):
            raise ArithmeticError(f"degree-{n} block is numerically rank deficient")
        top = max(top, float(s[0]))
        bottom = min(bottom, float(s[-1]))
    return TruncatedNorms(norm=top, inv_norm=1.0 / bottom, cond=top / bottom)


def analytic_bound(a, arr: Arrangement, n_max: int, tol: float = DEFAULT_TOL) -> float:
    """Closed-form upper bound for the truncated deformation operator norm.

    Requires the parts to intersect pairwise trivially and the projector
    constants s = max(c of source, c of image) to satisfy s < 1.  The bound
    minimizes, over cut degrees N' >= N(s) (the first degree where s^N k < 1),
    the larger of a head term ||A||^N' and a tail term
    sqrt((1 + s^N' k) / (1 - s^N' k)) scaled by the largest per-part expansion
    factor; for maps isometric on the parts that factor is 1.
    """
    a = np.asarray(a, dtype=complex)
    k = len(arr.parts)
    image = arr.map_by(a, tol=tol)
    for i in range(k):
        for j in range(i + 1, k):
            if intersect(arr.parts[i], arr.parts[j], tol=1e-8).dim > 0:
                raise ValueError(
                    "analytic bound requires pairwise trivially intersecting parts"
                )
    if k >= 2:
        s = max(c_constant(arr), c_constant(image))
    else:
        s = 0.0
    if s >= 1.0 - 1e-12:
        raise ValueError(
            f"projector constant {s:.6f} is not below 1; the bound does not apply"
        )
    op_norm = float(np.linalg.svd(a, compute_uv=False)[0])
    part_expansion = 1.0
    for part in arr.parts:
        if part.dim > 0:
            part_expansion = max(
                part_expansion, float(np.linalg.norm(a @ part.basis, 2))
            )
    if s == 0.0:
        n_start = 1
    else:
        n_start = 1
        while (s**n_start) * k >= 1.0:
            n_start += 1
    best = math.inf
    for n_cut in range(n_start, max(n_max, n_start) + 1):
        head = op_norm**n_cut
        sk = (s**n_cut) * k
        tail = math.sqrt((1.0 + sk) / (1.0 - sk)) * part_expansion**n_cut
        best = min(best, max(head, tail))
    return best


class GramDeviation(NamedTuple):
    measured: float
    bound: float


def gram_deviation(
    a,
    b,
    arr: Arrangement,
    n_max: int,
    s_cap: int,
    tol: float = DEFAULT_TOL,
) -> GramDeviation:
    """Compare two maps' pullback Gram matrices on the arrangement's degree spaces.

    ``measured`` is the largest, over degrees n <= n_max, spectral norm of
    V_n* (Sym^n(A)* Sym^n(A) - Sym^n(B)* Sym^n(B)) V_n.  ``bound`` combines the
    full symmetric-space deviations up to the cap degree with a closed-form
    tail that requires k * c_V^s_cap < 1 (ValueError otherwise).  Both maps are
    expected to be isometric on the parts; a warning is emitted if not.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    k = len(arr.parts)
    for name, m in (("first", a), ("second", b)):
        for i, part in enumerate(arr.parts):
            check = is_isometric_on(m, part, tol=1e-8)
            if not check.ok:
                warnings.warn(
                    f"{name} map is not isometric on part {i} "
                    f"(residual {check.residual:.3e})",
                    IsometryWarning,
                    stacklevel=2,
                )
    c_v = c_constant(arr) if k >= 2 else 0.0
    c_av = c_constant(arr.map_by(a, tol=tol)) if k >= 2 else 0.0
    c_bv = c_constant(arr.map_by(b, tol=tol)) if k >= 2 else 0.0
    if (c_v**s_cap) * k >= 1.0:
        raise ValueError(
            "tail bound requires k * c^s_cap < 1 for the source arrangement"
        )
    measured = 0.0
    for n in range(n_max + 1):
        vn = degree_space(arr, n, tol=tol).matrix
        sa = sym_power(a, n) @ vn
        sb = sym_power(b, n) @ vn
        diff = sa.conj().T @ sa - sb.conj().T @ sb
        measured = max(measured, float(np.linalg.norm(diff, 2)))
    head = 0.0
    for n in range(s_cap + 1):
        sa = sym_power(a, n)
        sb = sym_power(b, n)
        diff = sa.conj().T @ sa - sb.conj().T @ sb
        head = max(head, float(np.linalg.norm(diff, 2)))
    tail = k * (c_av**s_cap + c_bv**s_cap) / (1.0 - k * (c_v**s_cap))
    return GramDeviation(measured=measured, bound=max(head, tail))


def sandwich_check(arr: Arrangement, degree: int, trials: int, seed: int = 0) -> float:
    """Worst normalized slack of the norm sandwich for sums across parts.

    For random per-part degree-n vectors x_i the squared norm of the sum is
    bounded between (1 -+ c^n k) times the sum of squared norms, with c the
    arrangement's projector constant and k the number of parts.  Returns the
    smallest slack over all trials and both inequality sides, normalized by
    the sum of squared norms; nonnegative (up to roundoff) when the sandwich
    holds.  With a single part the slack is exactly zero.
    """
    if trials <= 0:
        raise ValueError("need a positive number of trials")
    rng = np.random.default_rng(seed)
    slacks = _sandwich_slacks(arr, degree, trials, rng)
    return float(np.min(slacks))


def _sandwich_slacks(
    arr: Arrangement, degree: int, trials: int, rng: np.random.Generator
) -> np.ndarray:
    k = len(arr.parts)
    c = c_constant(arr) if k >= 2 else 0.0
    lo = 1.0 - (c**degree) * k
    hi = 1.0 + (c**degree) * k
    pushes = [sym_power(p.basis, degree) for p in arr.parts]
    total = None
    sum_sq = np.zeros(trials)
    for push in pushes:
        m = push.shape[1]
        coef = rng.standard_normal((m, trials)) + 1j * rng.standard_normal((m, trials))
        sum_sq += np.sum(np.abs(coef) ** 2, axis=0)
        vec = push @ coef
        total = vec if total is None else total + vec
    nrm2 = np.sum(np.abs(total) ** 2, axis=0)
    return np.minimum(nrm2 - lo * sum_sq, hi * sum_sq - nrm2) / sum_sq


def make_tilt_family(arr: Arrangement, epsilon: float) -> np.ndarray:
    """A one-parameter family of maps tilting one part toward another.

    Picks a pair of parts and a most-transverse principal direction g of the
    second relative to the first, with partner direction t in the first, and
    returns the map fixing the orthogonal complement of the out-of-first
    component of g while rotating g by ``epsilon`` toward t.  The result is
    exactly isometric on every part, equals the identity at epsilon = 0, and
    for two coordinate lines in C^2 reproduces [[1, sin e], [0, cos e]].
    Raises ValueError if no part pair admits such a tilt.
    """
    if not 0.0 <= epsilon < math.pi / 2:
        raise ValueError("epsilon must lie in [0, pi/2)")
    d = arr.ambient_dim
    k = len(arr.parts)
    if k < 2:
        raise ValueError("tilting needs at least two parts")
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            a = _try_tilt(arr, i, j, epsilon)
            if a is not None:
                return a
    raise ValueError("no pair of parts admits an isometric tilt")


def _try_tilt(arr: Arrangement, i: int, j: int, epsilon: float) -> np.ndarray | None:
    d = arr.ambient_dim
    b1 = arr.parts[i].basis
    b2 = arr.parts[j].basis
    if b1.shape[1] == 0 or b2.shape[1] == 0:
        return None
    u, s, vh = np.linalg.svd(b1.conj().T @ b2, full_matrices=True)
    r = min(b1.shape[1], b2.shape[1])
    sig = np.zeros(b2.shape[1])
    sig[:r] = s
    # Most transverse usable direction of part j relative to part i.
    order = np.argsort(sig)
    pick = None
    for idx in order:
        if sig[idx] < 1.0 - 1e-10:
            pick = idx
            break
    if pick is None:
        return None  # part j is contained in part i up to tolerance
    g = b2 @ vh.conj().T[:, pick]
    sigma = sig[pick]
    if pick < r:
        t = b1 @ u[:, pick]
    else:
        # g is orthogonal to part i; partner must avoid all positive
        # principal directions of part i.
        rank = int(np.sum(s > 1e-10))
        if rank >= b1.shape[1]:
            return None
        t = b1 @ u[:, rank]
    # Out-of-part-i component of g.
    p_part = b1 @ (b1.conj().T @ g)
    g_out = g - p_part
    beta = np.linalg.norm(g_out)
    if beta < 1e-12:
        return None
    g_tilde = g_out / beta
    g_new = math.sin(epsilon) * t + math.cos(epsilon) * g
    a = np.eye(d, dtype=complex) + np.outer(
        (g_new - p_part) / beta - g_tilde, g_tilde.conj()
    )
    for part in arr.parts:
        if not is_isometric_on(a, part, tol=1e-12).ok:
            return None
    return a


@dataclasses.dataclass(frozen=True)
class DeformRow:
    """One experiment row: deformation size against truncation diagnostics."""

    epsilon: float
    op_cond: float
    mult_norm_v: float
    mult_norm_w: float
    truncated_t_norm: float
    truncated_t_inv_norm: float
    truncated_cond: float
    analytic_bound: float
    c_v: float
    c_av: float


@dataclasses.dataclass(frozen=True)
class DeformReport:
    max_degree: int
    seed: int
    rows: tuple[DeformRow, ...]


def run_experiment(
    arr: Arrangement,
    epsilons: Sequence[float] | None = None,
    matrices: Sequence[np.ndarray] | None = None,
    max_degree: int = 8,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> DeformReport:
    """Deformation experiment over a schedule of maps.

    Either ``epsilons`` (tilt-family schedule, strictly decreasing) or
    ``matrices`` (explicit maps, paired with epsilon = their index) must be
    given.  Each row reports the map's condition number, the exact restricted
    multiplier norms of A on the arrangement span and of A^-1 on the image
    span, the truncated operator norms, and the closed-form bound for the
    truncated condition number (the product of the bounds for T and its
    inverse).  The closed form needs pairwise trivially intersecting parts;
    when it does not apply the bound is reported as infinity.  A warning is
    emitted when the arrangement is not tractable.
    """
    if (epsilons is None) == (matrices is None):
        raise ValueError("give exactly one of epsilons or matrices")
    verdict = classify(arr)
    if not verdict.tractable:
        warnings.warn(
            "arrangement is not tractable; deformation diagnostics are heuristic",
            TractabilityWarning,
            stacklevel=2,
        )
    if epsilons is not None:
        eps = [float(e) for e in epsilons]
        if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
            raise ValueError("epsilon schedule must be strictly decreasing")
        maps = [(e, make_tilt_family(arr, e)) for e in eps]
    else:
        maps = [(float(i), np.asarray(m, dtype=complex)) for i, m in enumerate(matrices)]

    span_v = arr.span(tol=tol)
    rows = []
    for e, a in maps:
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise ValueError("experiment map is numerically singular")
        a_inv = np.linalg.inv(a)
        image = arr.map_by(a, tol=tol)
        span_w = image.span(tol=tol)
        mult_v = float(np.linalg.norm(a @ span_v.basis, 2))
        mult_w = float(np.linalg.norm(a_inv @ span_w.basis, 2))
        op = build_t_op(a, arr, max_degree, tol=tol)
        norms = truncated_norms(op)
        try:
            bound = analytic_bound(a, arr, max_degree, tol=tol) * analytic_bound(
                a_inv, image, max_degree, tol=tol
            )
        except ValueError:
            bound = math.inf
        k = len(arr.parts)
        rows.append(
            DeformRow(
                epsilon=e,
                op_cond=float(sv[0] / sv[-1]),
                mult_norm_v=mult_v,
                mult_norm_w=mult_w,
                truncated_t_norm=norms.norm,
                truncated_t_inv_norm=norms.inv_norm,
                truncated_cond=norms.cond,
                analytic_bound=bound,
                c_v=c_constant(arr) if k >= 2 else 0.0,
                c_av=c_constant(image) if k >= 2 else 0.0,
            )
        )
    return DeformReport(max_degree=max_degree, seed=seed, rows=tuple(rows))
