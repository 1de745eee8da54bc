"""Request/response models and handlers for the HTTP service.

All operations are exposed as pure handler functions taking an
``ExperimentConfig`` and returning a response model; the FastAPI app and the
command-line interface are both thin wrappers over them.  Complex scalars
travel as [re, im] pairs, vectors as lists of pairs, matrices as lists of row
vectors.
"""

from __future__ import annotations

import datetime
import math
import os
from typing import Literal, Optional, Union

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator, model_validator

from . import __version__
from .arrangement import Arrangement, arrangement_from_bases
from .deform import run_experiment
from .fock import multiplier_norm_lb, sample_ball
from .maxrep import maximal_representation, verify_pairwise
from .moebius import (
    defect_identity_residual,
    kernel_identity_residual,
    kernel_scaling_residual,
    moebius_map,
    pseudohyperbolic,
    random_automorphism,
)
from .tractability import classify

ComplexPair = tuple[float, float]
Vector = list[ComplexPair]
Matrix = list[Vector]


class ConfigError(ValueError):
    """The configuration is structurally valid but incomplete for the operation."""


def to_complex_vector(v: Vector) -> np.ndarray:
    return np.asarray([complex(re, im) for re, im in v], dtype=complex)

def to_complex_matrix(m: Matrix) -> np.ndarray:
    return np.asarray([[complex(re, im) for re, im in row] for row in m], dtype=complex)

def from_complex_vector(v: np.ndarray) -> Vector:
    return [(float(z.real), float(z.imag)) for z in np.asarray(v, dtype=complex)]

def from_complex_matrix(m: np.ndarray) -> Matrix:
    return [from_complex_vector(row) for row in np.asarray(m, dtype=complex)]


class TiltSchedule(BaseModel):
    kind: Literal["tilt"] = "tilt"
    epsilons: list[float] = Field(min_length=1)

    @field_validator("epsilons")
    @classmethod
    def _strictly_decreasing(cls, eps):
        if any(not 0.0 <= e < math.pi / 2 for e in eps):
            raise ValueError("each epsilon must lie in [0, pi/2)")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        return eps


class MatrixSchedule(BaseModel):
    kind: Literal["matrix-list"] = "matrix-list"
    matrices: list[Matrix] = Field(min_length=1)


DeformationSchedule = Union[TiltSchedule, MatrixSchedule]


class ExperimentConfig(BaseModel):
    """Configuration shared by all operations; unused fields are ignored."""

    ambient_dim: int = Field(ge=1, le=64)
    arrangement: Optional[list[list[Vector]]] = None
    matrix: Optional[Matrix] = None
    deformation: Optional[DeformationSchedule] = Field(
        default=None, discriminator="kind"
    )
    max_degree: int = Field(default=8, ge=0, le=24)
    gram_samples: int = Field(default=200, ge=4, le=5000)
    seed: int = Field(default=0, ge=0)
    tol: float = Field(default=1e-10, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_shapes(self):
        d = self.ambient_dim
        if self.arrangement is not None:
            if not self.arrangement:
                raise ValueError("arrangement must be nonempty when given")
            for i, part in enumerate(self.arrangement):
                if not part:
                    raise ValueError(f"part {i} has no spanning vectors")
                for v in part:
                    if len(v) != d:
                        raise ValueError(
                            f"part {i} has a vector of length {len(v)}, expected {d}"
                        )
        if self.matrix is not None:
            if len(self.matrix) != d or any(len(row) != d for row in self.matrix):
                raise ValueError(f"matrix must be {d}x{d}")
        if self.deformation is not None and self.deformation.kind == "matrix-list":
            for m in self.deformation.matrices:
                if len(m) != d or any(len(row) != d for row in m):
                    raise ValueError(f"deformation matrices must be {d}x{d}")
        return self

    def to_arrangement(self) -> Arrangement:
        if self.arrangement is None:
            raise ConfigError("this operation requires 'arrangement'")
        bases = [
            np.stack([to_complex_vector(v) for v in part], axis=1)
            for part in self.arrangement
        ]
        return arrangement_from_bases(self.ambient_dim, bases, tol=self.tol)

    def to_matrix(self) -> np.ndarray:
        if self.matrix is None:
            raise ConfigError("this operation requires 'matrix'")
        return to_complex_matrix(self.matrix)


class RunMeta(BaseModel):
    seed: int
    max_degree: int
    version: str
    generated_at: str


def _meta(cfg: ExperimentConfig) -> RunMeta:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        stamp = datetime.datetime.fromtimestamp(
            int(epoch), tz=datetime.timezone.utc
        ).isoformat()
    else:
        stamp = datetime.datetime.now(tz=datetime.timezone.utc).isoformat()
    return RunMeta(
        seed=cfg.seed, max_degree=cfg.max_degree, version=__version__, generated_at=stamp
    )


class TraceRecordModel(BaseModel):
    case: str
    ambient_dim: int
    part_dims: list[int]


class TractableResponse(BaseModel):
    tractable: bool
    trace: list[TraceRecordModel]
    common_e: Optional[list[Vector]] = None
    meta: RunMeta


class DeformRowModel(BaseModel):
    epsilon: float
    op_cond: float
    mult_norm_v: float
    mult_norm_w: float
    truncated_t_norm: float
    truncated_t_inv_norm: float
    truncated_cond: float
    # None when the closed-form bound does not apply (infinite bound), so the
    # JSON payload stays free of non-standard float literals.
    analytic_bound: Optional[float] = None
    c_v: float
    c_av: float


class DeformResponse(BaseModel):
    rows: list[DeformRowModel]
    meta: RunMeta


class KernelCheckResponse(BaseModel):
    kernel_identity_max: float
    scaling_identity_max: float
    involution_max: float
    metric_invariance_max: float
    defect_residual_max: float
    passed: bool
    meta: RunMeta


class PairRecordModel(BaseModel):
    i: int
    j: int
    sum_dim: int
    spans_ambient: bool
    preserved_dim: int
    intersection_dim: int
    intersection_match: bool
    even_ok: Optional[bool] = None
    halves_ok: Optional[bool] = None


class MaxrepResponse(BaseModel):
    output_dim: int
    e_one_dim: int
    parts_out: list[Matrix]  # each output part: list of basis vectors
    t_map: list[int]
    pairwise_ok: bool
    pairwise: list[PairRecordModel]
    meta: RunMeta


class MultNormResponse(BaseModel):
    lower_bound: float
    operator_norm: float
    ratio: float
    samples: int
    meta: RunMeta


def run_tractable(cfg: ExperimentConfig) -> TractableResponse:
    arr = cfg.to_arrangement()
    verdict = classify(arr, tol=max(cfg.tol, 1e-10))
    common = None
    if verdict.common_e is not None and verdict.common_e.dim > 0:
        common = [from_complex_vector(col) for col in verdict.common_e.basis.T]
    return TractableResponse(
        tractable=verdict.tractable,
        trace=[
            TraceRecordModel(
                case=r.case, ambient_dim=r.ambient_dim, part_dims=list(r.part_dims)
            )
            for r in verdict.trace
        ],
        common_e=common,
        meta=_meta(cfg),
    )


def run_deform(cfg: ExperimentConfig) -> DeformResponse:
    arr = cfg.to_arrangement()
    if cfg.deformation is None:
        raise ConfigError("deform requires a 'deformation' schedule")
    if cfg.deformation.kind == "tilt":
        report = run_experiment(
            arr,
            epsilons=cfg.deformation.epsilons,
            max_degree=cfg.max_degree,
            seed=cfg.seed,
            tol=cfg.tol,
        )
    else:
        mats = [to_complex_matrix(m) for m in cfg.deformation.matrices]
        report = run_experiment(
            arr, matrices=mats, max_degree=cfg.max_degree, seed=cfg.seed, tol=cfg.tol
        )
    rows = [
        DeformRowModel(
            epsilon=r.epsilon,
            op_cond=r.op_cond,
            mult_norm_v=r.mult_norm_v,
            mult_norm_w=r.mult_norm_w,
            truncated_t_norm=r.truncated_t_norm,
            truncated_t_inv_norm=r.truncated_t_inv_norm,
            truncated_cond=r.truncated_cond,
            analytic_bound=r.analytic_bound if math.isfinite(r.analytic_bound) else None,
            c_v=r.c_v,
            c_av=r.c_av,
        )
        for r in report.rows
    ]
    return DeformResponse(rows=rows, meta=_meta(cfg))


def run_kernel_check(cfg: ExperimentConfig) -> KernelCheckResponse:
    d = cfg.ambient_dim
    rng = np.random.default_rng(cfg.seed)
    worst_kernel = worst_scaling = worst_invol = worst_metric = worst_defect = 0.0
    n_maps = max(4, cfg.gram_samples // 25)
    for _ in range(n_maps):
        f = random_automorphism(rng, d)
        pts = sample_ball(rng, d, 8, r_max=0.85)
        for idx in range(0, 8, 2):
            x, y = pts[idx], pts[idx + 1]
            worst_kernel = max(worst_kernel, kernel_identity_residual(f, x, y))
            worst_scaling = max(worst_scaling, kernel_scaling_residual(f, x, y))
            back = moebius_map(f.a, moebius_map(f.a, x))
            worst_invol = max(worst_invol, float(np.linalg.norm(back - x)))
            worst_metric = max(
                worst_metric,
                abs(pseudohyperbolic(f(x), f(y)) - pseudohyperbolic(x, y)),
            )
        worst_defect = max(worst_defect, defect_identity_residual(f, pts))
    tol = max(cfg.tol, 1e-10)
    passed = max(worst_kernel, worst_scaling, worst_invol, worst_metric) <= tol
    return KernelCheckResponse(
        kernel_identity_max=worst_kernel,
        scaling_identity_max=worst_scaling,
        involution_max=worst_invol,
        metric_invariance_max=worst_metric,
        defect_residual_max=worst_defect,
        passed=passed and worst_defect <= max(tol, 1e-8),
        meta=_meta(cfg),
    )


def run_maxrep(cfg: ExperimentConfig) -> MaxrepResponse:
    arr = cfg.to_arrangement()
    a = cfg.to_matrix()
    rep = maximal_representation(a, arr, tol=max(cfg.tol, 1e-8))
    report = verify_pairwise(a, rep)
    return MaxrepResponse(
        output_dim=rep.parts_out[0].dim,
        e_one_dim=rep.e_one.dim,
        parts_out=[
            [from_complex_vector(col) for col in out.basis.T] for out in rep.parts_out
        ],
        t_map=list(rep.t_map),
        pairwise_ok=report.all_ok,
        pairwise=[PairRecordModel(**r._asdict()) for r in report.records],
        meta=_meta(cfg),
    )


def run_mult_norm(cfg: ExperimentConfig) -> MultNormResponse:
    a = cfg.to_matrix()
    rng = np.random.default_rng(cfg.seed)
    pts = sample_ball(rng, cfg.ambient_dim, cfg.gram_samples, r_max=0.9, r_min=0.2)
    lb = multiplier_norm_lb(a, pts)
    op = float(np.linalg.norm(a, 2))
    return MultNormResponse(
        lower_bound=lb,
        operator_norm=op,
        ratio=lb / op if op > 0 else 0.0,
        samples=cfg.gram_samples,
        meta=_meta(cfg),
    )


app = FastAPI(
    title="fockdeform",
    description="Arrangement tractability, truncated deformation operators, "
    "ball-automorphism kernel identities, and multiplier norm estimates.",
    version=__version__,
)


def _run(handler, cfg: ExperimentConfig):
    try:
        return handler(cfg)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/tractable", response_model=TractableResponse)
def tractable_endpoint(cfg: ExperimentConfig) -> TractableResponse:
    return _run(run_tractable, cfg)


@app.post("/deform", response_model=DeformResponse)
def deform_endpoint(cfg: ExperimentConfig) -> DeformResponse:
    return _run(run_deform, cfg)


@app.post("/kernel-check", response_model=KernelCheckResponse)
def kernel_check_endpoint(cfg: ExperimentConfig) -> KernelCheckResponse:
    return _run(run_kernel_check, cfg)


@app.post("/maxrep", response_model=MaxrepResponse)
def maxrep_endpoint(cfg: ExperimentConfig) -> MaxrepResponse:
    return _run(run_maxrep, cfg)


@app.post("/mult-norm", response_model=MultNormResponse)
def mult_norm_endpoint(cfg: ExperimentConfig) -> MultNormResponse:
    return _run(run_mult_norm, cfg)
