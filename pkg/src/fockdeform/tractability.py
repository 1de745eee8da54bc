"""Decision procedure for tractability of subspace arrangements.

An arrangement spanning C^d is tractable when one of the base cases applies
(common nonzero pairwise intersection, pairwise spanning sums, a hyperplane
part, or ambient dimension at most 3), or when it reduces to a smaller
tractable problem by splitting off a common intersection or by decomposing
into groups whose spans interact.  The classifier returns the verdict together
with a trace of which case fired at each level of the recursion.
"""

from __future__ import annotations

import dataclasses
from typing import NamedTuple

import numpy as np

from .arrangement import (
    DEFAULT_TOL,
    Arrangement,
    Subspace,
    intersect,
    orthonormalize,
    subspace_equal,
    subspace_sum,
)

# Case labels, in the order they are tried at each level.
CASE_COMMON_INTERSECTION = "1a"
CASE_PAIRWISE_SPANNING = "1b"
CASE_HYPERPLANE = "1c"
CASE_LOW_DIMENSION = "1d"
CASE_SPLIT_COMMON = "2"
CASE_GROUP_DECOMPOSITION = "3"


class TraceRecord(NamedTuple):
    case: str
    ambient_dim: int
    part_dims: tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class TractabilityVerdict:
    tractable: bool
    trace: tuple[TraceRecord, ...]
    common_e: Subspace | None = None

    def __bool__(self) -> bool:
        return self.tractable


def _pairwise_intersections(parts, tol):
    k = len(parts)
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            out.append(intersect(parts[i], parts[j], tol=tol))
    return out


def _compress(parts, frame: np.ndarray, tol):
    """Re-express parts in the coordinates of an orthonormal frame's span."""
    new = []
    for p in parts:
        cols = frame.conj().T @ p.basis
        new.append(orthonormalize(cols, tol=tol))
    return new


def _classify(parts: list[Subspace], d: int, tol: float):
    """Recursive worker; parts span C^d and are pairwise incomparable.

    Returns (tractable, trace list, common_e or None).  ``common_e`` is only
    reported from the top of the recursion (cases 1a and 2); the trace still
    exposes every nested case that fired.
    """
    dims = tuple(p.dim for p in parts)
    record = lambda case: TraceRecord(case, d, dims)  # noqa: E731
    k = len(parts)

    if k == 1:
        # A single part spanning C^d is the whole space: vacuously tractable.
        return True, [record(CASE_COMMON_INTERSECTION)], parts[0]

    # 1a: all pairwise intersections agree on a common nonzero subspace.
    pw = _pairwise_intersections(parts, tol)
    e0 = pw[0]
    if e0.dim > 0 and all(subspace_equal(e0, e, tol) for e in pw[1:]):
        return True, [record(CASE_COMMON_INTERSECTION)], e0

    # 1b: every pair of parts already spans C^d.
    if all(
        subspace_sum(parts[i], parts[j], tol=tol).dim == d
        for i in range(k)
        for j in range(i + 1, k)
    ):
        return True, [record(CASE_PAIRWISE_SPANNING)], None

    # 1c: some part is a hyperplane.
    if any(p.dim == d - 1 for p in parts):
        return True, [record(CASE_HYPERPLANE)], None

    # 1d: low ambient dimension.
    if d <= 3:
        return True, [record(CASE_LOW_DIMENSION)], None

    # 2: split off the common intersection of all parts, if nonzero.
    common = parts[0]
    for p in parts[1:]:
        common = intersect(common, p, tol=tol)
        if common.dim == 0:
            break
    if common.dim > 0:
        frame = common.perp().basis
        reduced = []
        for p in parts:
            shifted = p.basis - common.basis @ (common.basis.conj().T @ p.basis)
            reduced.append(orthonormalize(frame.conj().T @ shifted, tol=tol))
        ok, sub_trace, _ = _classify(reduced, d - common.dim, tol)
        return ok, [record(CASE_SPLIT_COMMON)] + sub_trace, (common if ok else None)

    # 3: group parts whose spans intersect, and recurse inside each group span.
    groups = [[i] for i in range(k)]
    spans = [parts[i] for i in range(k)]
    merged = True
    while merged and len(groups) > 1:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if intersect(spans[i], spans[j], tol=tol).dim > 0:
                    groups[i] = groups[i] + groups[j]
                    spans[i] = subspace_sum(spans[i], spans[j], tol=tol)
                    del groups[j], spans[j]
                    merged = True
                    break
            if merged:
                break
    if len(groups) >= 2:
        trace = [record(CASE_GROUP_DECOMPOSITION)]
        for members, span in zip(groups, spans):
            group_parts = _compress([parts[i] for i in members], span.basis, tol)
            ok, sub_trace, _ = _classify(group_parts, span.dim, tol)
            trace.extend(sub_trace)
            if not ok:
                return False, [], None
        return True, trace, None

    return False, [], None


def classify(arr: Arrangement, tol: float = 1e-8) -> TractabilityVerdict:
    """Classify an arrangement as tractable or not, with a case trace.

    The parts must jointly span the ambient space; a non-spanning arrangement
    raises ValueError.  ``tol`` controls the principal-angle tolerance for the
    subspace intersections and equalities taken during classification.
    """
    span = arr.span(tol=DEFAULT_TOL)
    if span.dim != arr.ambient_dim:
        raise ValueError(
            f"parts span a {span.dim}-dimensional subspace of "
            f"C^{arr.ambient_dim}; classification requires a spanning arrangement"
        )
    ok, trace, common_e = _classify(list(arr.parts), arr.ambient_dim, tol)
    if not ok:
        return TractabilityVerdict(False, ())
    top_case = trace[0].case
    e = common_e if top_case in (CASE_COMMON_INTERSECTION, CASE_SPLIT_COMMON) else None
    return TractabilityVerdict(True, tuple(trace), e)
