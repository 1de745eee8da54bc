"""Command-line interface.

Thin client over the service handlers: reads a JSON configuration, applies
flag overrides, runs the requested operation in process, and emits JSON or CSV.
Exit codes: 0 on success, 2 on configuration/validation problems, 1 on
numerical failure inside an operation.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np
import pydantic

from .service import (
    ConfigError,
    DeformResponse,
    ExperimentConfig,
    MultNormResponse,
    run_deform,
    run_kernel_check,
    run_maxrep,
    run_mult_norm,
    run_tractable,
)

HANDLERS = {
    "tractable": run_tractable,
    "deform": run_deform,
    "kernel-check": run_kernel_check,
    "maxrep": run_maxrep,
    "mult-norm": run_mult_norm,
}

DEFORM_CSV_HEADER = [
    "epsilon",
    "op_cond",
    "mult_norm_V",
    "mult_norm_W",
    "truncated_T_norm",
    "truncated_Tinv_norm",
    "truncated_cond",
    "analytic_bound",
    "c_V",
    "c_AV",
    "seed",
    "N",
]


def parse_config(text: str) -> ExperimentConfig:
    """Parse a JSON configuration document; raises pydantic.ValidationError."""
    return ExperimentConfig.model_validate_json(text)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def emit(response, fmt: str, stream) -> None:
    """Serialize a response model as JSON or (for tabular responses) CSV."""
    if fmt == "json":
        stream.write(response.model_dump_json(indent=2))
        stream.write("\n")
        return
    if fmt != "csv":
        raise ConfigError(f"unknown format {fmt!r}; expected 'json' or 'csv'")
    if isinstance(response, DeformResponse):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(DEFORM_CSV_HEADER)
        for r in response.rows:
            writer.writerow(
                [
                    _fmt(r.epsilon),
                    _fmt(r.op_cond),
                    _fmt(r.mult_norm_v),
                    _fmt(r.mult_norm_w),
                    _fmt(r.truncated_t_norm),
                    _fmt(r.truncated_t_inv_norm),
                    _fmt(r.truncated_cond),
                    "inf" if r.analytic_bound is None else _fmt(r.analytic_bound),
                    _fmt(r.c_v),
                    _fmt(r.c_av),
                    str(response.meta.seed),
                    str(response.meta.max_degree),
                ]
            )
        return
    if isinstance(response, MultNormResponse):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["lower_bound", "operator_norm", "ratio", "samples", "seed"])
        writer.writerow(
            [
                _fmt(response.lower_bound),
                _fmt(response.operator_norm),
                _fmt(response.ratio),
                str(response.samples),
                str(response.meta.seed),
            ]
        )
        return
    raise ConfigError("csv output is only available for 'deform' and 'mult-norm'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockdeform",
        description="Subspace-arrangement deformation diagnostics and kernel checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("tractable", "classify an arrangement, printing the case trace"),
        ("deform", "run a deformation experiment over a schedule of maps"),
        ("kernel-check", "verify automorphism kernel identities on random data"),
        ("maxrep", "compute maximal isometric subspaces seeded by the parts"),
        ("mult-norm", "sampled lower bound for a linear map's multiplier norm"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON config file")
        p.add_argument(
            "--format", choices=["json", "csv"], default="json", help="output format"
        )
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument(
            "--degree", type=int, default=None, help="override truncation degree"
        )
        p.add_argument(
            "--tol", type=float, default=None, help="override numerical tolerance"
        )
        p.add_argument("--out", default=None, help="output file (default stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.degree is not None:
            overrides["max_degree"] = args.degree
        if args.tol is not None:
            overrides["tol"] = args.tol
        if overrides:
            cfg = cfg.model_copy(update=overrides)
            cfg = ExperimentConfig.model_validate(cfg.model_dump())
    except pydantic.ValidationError as exc:
        print(f"error: invalid configuration:\n{exc}", file=sys.stderr)
        return 2

    buffer = io.StringIO()
    try:
        response = HANDLERS[args.command](cfg)
        emit(response, args.format, buffer)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 1

    if args.out is None:
        sys.stdout.write(buffer.getvalue())
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buffer.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
