"""Maximal isometric subspaces of an invertible map, seeded from an arrangement.

For an invertible A, the subspaces on which A acts isometrically are exactly
the totally isotropic subspaces of the Hermitian form H = A*A - I.  Given a
seed subspace that A preserves metrically, ``null_extension`` enlarges it to a
maximal such subspace: the preserved eigenspace of A*A is always included, and
expanded/contracted directions are paired off into isotropic combinations.
``maximal_representation`` applies this to every part of an arrangement and
``verify_pairwise`` checks the structural identities the outputs must satisfy.
"""

from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple

import numpy as np

from .arrangement import (
    Arrangement,
    Subspace,
    intersect,
    is_isometric_on,
    isometry_spectrum,
    orthonormalize,
    subspace_equal,
    subspace_sum,
)


def _deflate(basis: np.ndarray, e1: Subspace, tol: float) -> Subspace:
    """Directions of ``basis`` lying outside ``e1``, with an absolute cutoff.

    The columns of ``basis`` are unit vectors, so the singular values of the
    residue measure distance from ``e1`` on an absolute scale; a cutoff
    relative to the residue itself would keep pure-roundoff directions
    whenever the basis lies entirely inside ``e1``.
    """
    d = basis.shape[0]
    shifted = basis - e1.basis @ (e1.basis.conj().T @ basis)
    if shifted.size == 0:
        return orthonormalize([], ambient_dim=d)
    u, s, _ = np.linalg.svd(shifted, full_matrices=False)
    rank = int(np.sum(s > max(tol, 1e-10)))
    return orthonormalize(u[:, :rank], ambient_dim=d)


def null_extension(a, seed: Subspace, tol: float = 1e-8) -> Subspace:
    """Extend a metrically preserved subspace to a maximal one.

    ``seed`` must satisfy the isometry check for ``a`` at tolerance ``tol``
    (ValueError otherwise).  The output contains the seed and the preserved
    eigenspace E_1 of A*A, and has dimension dim E_1 + r + min(p, q) where r
    is the dimension of the seed modulo E_1 and p, q count the remaining
    positive and negative directions of A*A - I orthogonal (for the form) to
    the seed.  No strictly larger subspace on which A is isometric exists.
    """
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    if seed.ambient_dim != d:
        raise ValueError("seed subspace has wrong ambient dimension")
    check = is_isometric_on(a, seed, tol=tol)
    if not check.ok:
        raise ValueError(
            f"map is not isometric on the seed subspace (residual {check.residual:.3e})"
        )
    split = isometry_spectrum(a, tol=tol)
    e1 = split.e_one
    q_frame = np.hstack([split.e_plus.basis, split.e_minus.basis])
    h = a.conj().T @ a - np.eye(d)

    # Seed directions outside E_1.
    seed_out = _deflate(seed.basis, e1, tol) if seed.dim else None
    z = seed_out.dim if seed_out is not None else 0

    # Form-orthogonal complement of the projected seed inside E_1-perp.
    if z > 0:
        constraints = seed_out.basis.conj().T @ h @ q_frame
        _, s, vh = np.linalg.svd(constraints, full_matrices=True)
        rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 0.0)))
        w_frame = q_frame @ vh.conj().T[:, rank:]
    else:
        w_frame = q_frame

    pieces = [e1.basis]
    if seed_out is not None and z > 0:
        pieces.append(seed_out.basis)
    pairs = 0
    if w_frame.shape[1] > 0:
        compressed = w_frame.conj().T @ h @ w_frame
        compressed = 0.5 * (compressed + compressed.conj().T)
        mu, vecs = np.linalg.eigh(compressed)
        scale = max(1.0, float(np.linalg.norm(h, 2)))
        band = 2.5 * tol * scale
        pos = [i for i in range(mu.size) if mu[i] > band]
        neg = [i for i in range(mu.size) if mu[i] < -band]
        pos.sort(key=lambda i: -mu[i])  # most expansive first
        neg.sort(key=lambda i: -mu[i])  # closest to isometric first
        pairs = min(len(pos), len(neg))
        for ip, im in zip(pos[:pairs], neg[:pairs]):
            w = vecs[:, ip] + math.sqrt(mu[ip] / (-mu[im])) * vecs[:, im]
            w /= np.linalg.norm(w)
            pieces.append((w_frame @ w).reshape(d, 1))

    expected = e1.dim + z + pairs
    out = orthonormalize(np.hstack(pieces), ambient_dim=d)
    if out.dim != expected:
        raise ArithmeticError(
            f"extension collapsed: expected dimension {expected}, got {out.dim}"
        )
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class MaximalRepresentation:
    """Maximal isometric subspaces generated from an arrangement's parts.

    ``parts_out`` are the distinct maximal subspaces, ``t_map[i]`` is the
    output index for part i, and ``e_one`` is the preserved eigenspace of the
    map (contained in every output).
    """

    a: np.ndarray
    parts_out: tuple[Subspace, ...]
    t_map: tuple[int, ...]
    e_one: Subspace

    @property
    def ambient_dim(self) -> int:
        return self.e_one.ambient_dim


def maximal_representation(
    a, arr: Arrangement, tol: float = 1e-8
) -> MaximalRepresentation:
    """Maximal isometric subspace for each part of a spanning arrangement.

    The map must be invertible and isometric on every part, and the parts must
    span the ambient space (ValueError otherwise).  Equal outputs arising from
    different parts are merged; ``t_map`` records the merge, first occurrence
    keeping its index.  The outputs
    all share the dimension guaranteed by the pairing construction, contain
    their seeds, and the map is isometric on each; violations raise
    ArithmeticError since they indicate numerical breakdown.
    """
    a = np.asarray(a, dtype=complex)
    d = arr.ambient_dim
    if arr.span().dim != d:
        raise ValueError("arrangement parts must span the ambient space")
    for i, part in enumerate(arr.parts):
        check = is_isometric_on(a, part, tol=tol)
        if not check.ok:
            raise ValueError(
                f"map is not isometric on part {i} (residual {check.residual:.3e})"
            )
    split = isometry_spectrum(a, tol=tol)
    raw = [null_extension(a, part, tol=tol) for part in arr.parts]
    parts_out: list[Subspace] = []
    t_map: list[int] = []
    for cand in raw:
        found = None
        for idx, existing in enumerate(parts_out):
            if subspace_equal(cand, existing, tol=1e-8):
                found = idx
                break
        if found is None:
            parts_out.append(cand)
            found = len(parts_out) - 1
        t_map.append(found)

    dims = {s.dim for s in parts_out}
    if len(dims) != 1:
        raise ArithmeticError(f"outputs have unequal dimensions {sorted(dims)}")
    for idx, (part, out_idx) in enumerate(zip(arr.parts, t_map)):
        out = parts_out[out_idx]
        if not out.contains(part, tol=1e-8):
            raise ArithmeticError(f"output {out_idx} lost its seed part {idx}")
        check = is_isometric_on(a, out, tol=1e-6)
        if not check.ok:
            raise ArithmeticError(
                f"map is not isometric on output {out_idx} "
                f"(residual {check.residual:.3e})"
            )
    return MaximalRepresentation(
        a=a,
        parts_out=tuple(parts_out),
        t_map=tuple(t_map),
        e_one=split.e_one,
    )


class PairRecord(NamedTuple):
    i: int
    j: int
    sum_dim: int
    spans_ambient: bool
    preserved_dim: int
    intersection_dim: int
    intersection_match: bool
    even_ok: bool | None
    halves_ok: bool | None


@dataclasses.dataclass(frozen=True)
class PairwiseReport:
    records: tuple[PairRecord, ...]
    all_ok: bool


def verify_pairwise(
    a, rep: MaximalRepresentation, tol: float = 1e-9
) -> PairwiseReport:
    """Check the pairwise structure of a maximal representation.

    For each pair of outputs: the preserved eigenspace of the map restricted
    to their sum must equal their intersection (to ``tol``).  When the pair
    spans the ambient space, additionally: the complement of the global
    preserved eigenspace has even dimension, split into equal halves by the
    projections of the two outputs.
    """
    a = np.asarray(a, dtype=complex)
    d = rep.ambient_dim
    e1 = rep.e_one
    e1_perp_dim = d - e1.dim
    records = []
    ok = True
    for i in range(len(rep.parts_out)):
        for j in range(i + 1, len(rep.parts_out)):
            mi, mj = rep.parts_out[i], rep.parts_out[j]
            total = subspace_sum(mi, mj)
            frame = total.basis
            compressed = frame.conj().T @ (a.conj().T @ a) @ frame
            compressed = 0.5 * (compressed + compressed.conj().T)
            lam, vecs = np.linalg.eigh(compressed)
            band = np.abs(lam - 1.0) <= 1e-8
            preserved = orthonormalize(frame @ vecs[:, band], ambient_dim=d)
            meet = intersect(mi, mj, tol=1e-8)
            match = subspace_equal(preserved, meet, tol=max(tol, 1e-9))
            spans = total.dim == d
            even_ok = None
            halves_ok = None
            if spans:
                even_ok = e1_perp_dim % 2 == 0
                half_i = _projected_dim(mi, e1)
                half_j = _projected_dim(mj, e1)
                halves_ok = half_i == half_j == e1_perp_dim // 2
            record = PairRecord(
                i=i,
                j=j,
                sum_dim=total.dim,
                spans_ambient=spans,
                preserved_dim=preserved.dim,
                intersection_dim=meet.dim,
                intersection_match=match,
                even_ok=even_ok,
                halves_ok=halves_ok,
            )
            records.append(record)
            ok = ok and match and (even_ok is not False) and (halves_ok is not False)
    return PairwiseReport(records=tuple(records), all_ok=ok)


def _projected_dim(s: Subspace, e1: Subspace) -> int:
    return _deflate(s.basis, e1, 1e-8).dim


__all__ = [
    "null_extension",
    "MaximalRepresentation",
    "maximal_representation",
    "PairRecord",
    "PairwiseReport",
    "verify_pairwise",
]
