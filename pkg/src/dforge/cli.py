"""Command-line entry point: run the pipeline and write the certificate."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .certificate import CONSERVATIVE, DISCREPANCY, emit
from .pipeline import STAGES, PipelineConfig, StageFailure, certificate_ok, run_pipeline
from .realkit import DEFAULT_BITS
from .seqkit import SequenceKind

EXIT_OK = 0
EXIT_DISCREPANCY = 2
EXIT_STAGE_FAILURE = 3


def _default_bits() -> int:
    env = os.environ.get("DFORGE_PRECISION_BITS")
    if env:
        try:
            return int(env)
        except ValueError:
            print(f"ignoring non-integer DFORGE_PRECISION_BITS={env!r}", file=sys.stderr)
    return DEFAULT_BITS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dforge",
        description="Certified bounds and exhaustive search for "
                    "W_m^(n+k) + W_m^n = W_r with Lucas or Pell numbers.",
    )
    p.add_argument("--equation", choices=[k.value for k in SequenceKind], required=True)
    p.add_argument("--precision-bits", type=int, default=None,
                   help=f"working precision (default {DEFAULT_BITS}, or $DFORGE_PRECISION_BITS)")
    p.add_argument("--stage", choices=STAGES, default="all")
    p.add_argument("--certificate", type=Path, default=None,
                   help="write the JSON certificate here (default: stdout)")
    p.add_argument("--paper-check", choices=("strict", "report"), default="strict",
                   help="strict: exit 2 on any discrepancy; report: only list them")
    p.add_argument("--threads", type=int, default=1)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    bits = args.precision_bits if args.precision_bits is not None else _default_bits()
    kind = SequenceKind(args.equation)
    try:
        config = PipelineConfig(bits=bits, stage=args.stage, threads=args.threads)
        cert = run_pipeline(kind, config)
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE_FAILURE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE_FAILURE

    text = emit(cert)
    if args.certificate is None:
        sys.stdout.write(text)
    else:
        args.certificate.write_text(text, encoding="utf-8")

    for stage in cert.stages:
        if stage.verdict in (DISCREPANCY, CONSERVATIVE):
            print(f"{stage.verdict}: {stage.name} computed "
                  f"{stage.computed_value} vs published {stage.paper_value}", file=sys.stderr)
    ok = certificate_ok(cert)
    if not ok and args.paper_check == "strict":
        return EXIT_DISCREPANCY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
