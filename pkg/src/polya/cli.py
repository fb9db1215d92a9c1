"""Command-line entry point: ``polya bound|certify|oracle|constants``.

Machine-readable output goes to stdout, logs to stderr.  Exit codes: 0 on
success, 1 when a certificate fails or a solver does not converge, 2 on
usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from polya import __version__
from polya.bounds import (
    BoundResult,
    Kind,
    Quantity,
    auxiliary_published_bounds,
    certified_sandwich,
    rhombus_ratio_lower,
    rhombus_ratio_upper,
    sector_torsion_enclosure,
    theorem1_upper,
    triangle_ratio_lower_G,
    triangle_ratio_lower_narrow,
    triangle_ratio_lower_wide,
    triangle_ratio_upper,
)
from polya.certifier import (
    Certificate,
    Strategy,
    certificate_filename,
    certify_t11,
    certify_theorem4,
    certify_theorem5_part2,
    export_certificate,
)
from polya.errors import DomainNotSupported, NonConvergence, ShapeSpecError
from polya.interval import Interval, constants_json
from polya.oracle import extrapolate, mask_factory, rect_series
from polya.shapes import (
    ConvexSlabSpec,
    IsoscelesTriangle,
    Rectangle,
    Rhombus,
    Sector,
    parse_shape,
    rhombus_from_beta,
    rhombus_from_d,
    triangle_from_alpha,
    triangle_from_beta,
)

log = logging.getLogger("polya")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- run manifest ------------------------------------------------------------


@dataclass
class RunManifest:
    command_line: list
    parameters: dict
    artifacts: list = field(default_factory=list)
    started: str = ""
    finished: str = ""
    config_digest: Optional[str] = None
    version: str = __version__

    def write(self, directory: Path, stem: str) -> Path:
        path = directory / f"manifest_{stem}.json"
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _echo_shape(spec: str, shape) -> dict:
    """Decimal spec plus the hex endpoints of every interval parameter."""
    doc = {"spec": spec}
    for name, value in vars(shape).items():
        if isinstance(value, Interval):
            doc[name] = {"lo_hex": value.lo.hex(), "hi_hex": value.hi.hex(), "lo_dec": repr(value.lo), "hi_dec": repr(value.hi)}
        elif isinstance(value, (int, float)):
            doc[name] = value
    return doc


def _out_dir(arg: Optional[str]) -> Path:
    d = Path(arg or os.environ.get("POLYA_CERT_DIR") or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


# -- bound -------------------------------------------------------------------


def _sector_row(s: Sector, terms: int = 10) -> BoundResult:
    return BoundResult(
        value=sector_torsion_enclosure(s, terms),
        kind=Kind.LOWER,
        quantity=Quantity.TORSION,
        equation_tag="torsion",
        valid=True,
        params={"rho": s.rho, "alpha": s.alpha, "terms": terms},
    )


def _bound_table(shape) -> dict[str, callable]:
    if isinstance(shape, IsoscelesTriangle):
        return {
            "e28": lambda: triangle_ratio_upper(shape),
            "T2-L1": lambda: triangle_ratio_lower_wide(shape),
            "G": lambda: triangle_ratio_lower_G(shape),
            "finalestimate": lambda: triangle_ratio_lower_narrow(shape.alpha),
            "e33": lambda: auxiliary_published_bounds("e33_lambda_upper", d=shape.with_normalization("Base2").height),
        }
    if isinstance(shape, Rhombus):
        return {"e28a": lambda: rhombus_ratio_upper(shape), "e28b": lambda: rhombus_ratio_lower(shape)}
    if isinstance(shape, Sector):
        return {"torsion": lambda: _sector_row(shape)}
    if isinstance(shape, ConvexSlabSpec):
        return {
            "e15": lambda: theorem1_upper(shape),
            "e4": lambda: auxiliary_published_bounds("e4_cm", m=shape.m),
            "e9": lambda: auxiliary_published_bounds("e9_slab"),
        }
    raise UsageError(f"no certified bounds for {type(shape).__name__}")


def _bound_rows(shape, which: Sequence[str]) -> list[dict]:
    table = _bound_table(shape)
    tags = list(table) if list(which) == ["all"] else list(which)
    unknown = [t for t in tags if t not in table]
    if unknown:
        raise UsageError(f"unknown tags {unknown}; available: {', '.join(table)}")
    rows = []
    for tag in tags:
        try:
            rows.append(table[tag]().to_json())
        except DomainNotSupported as exc:
            rows.append({"equation_tag": tag, "valid": False, "reason": str(exc)})
    return rows


def _format_rows(rows: list[dict]) -> str:
    lines = [f"{'tag':<14} {'kind':<11} {'lo':>22} {'hi':>22}  valid"]
    for r in rows:
        lo = f"{r['lo']:.15g}" if "lo" in r else "-"
        hi = f"{r['hi']:.15g}" if "hi" in r else "-"
        note = "" if r["valid"] else f"  ({r.get('reason', '')})"
        lines.append(f"{r['equation_tag']:<14} {r.get('kind', '-'):<11} {lo:>22} {hi:>22}  {str(r['valid']).lower()}{note}")
    return "\n".join(lines) + "\n"


def cmd_bound(args) -> int:
    shape = parse_shape(args.shape)
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    rows = _bound_rows(shape, which)
    if args.format == "json":
        sys.stdout.write(json.dumps({"shape": args.shape, "bounds": rows}, indent=2) + "\n")
    else:
        sys.stdout.write(_format_rows(rows))
    return EXIT_OK


# -- certify --------------------------------------------------------------------


def _run_certify(args) -> Certificate:
    if args.max_depth > 40:
        raise UsageError("--max-depth must be <= 40")
    if args.claim == "theorem5":
        strategy = Strategy.ADAPTIVE_BISECT if args.adaptive else Strategy.UNIFORM_MIDRAD
        return certify_theorem5_part2(
            N_cells=args.cells or 1000,
            threshold=1.01 if args.threshold is None else args.threshold,
            terms=args.terms,
            strategy=strategy,
            max_depth=args.max_depth,
            jobs=args.jobs,
        )
    # the scalar claims are adaptive unless a fixed cell count is requested
    uniform = args.cells is not None and not args.adaptive
    kw = dict(
        threshold=0.0 if args.threshold is None else args.threshold,
        strategy=Strategy.UNIFORM_MIDRAD if uniform else Strategy.ADAPTIVE_BISECT,
        n_cells=args.cells or 1000,
        max_depth=args.max_depth,
    )
    if args.claim == "t11":
        return certify_t11(**kw)
    return certify_theorem4(**kw)


def cmd_certify(args) -> int:
    if args.cells is not None and args.cells < 1:
        raise UsageError("--cells must be >= 1")
    if args.terms < 1:
        raise UsageError("--terms must be >= 1")
    started = _now()
    cert = _run_certify(args)
    out = _out_dir(args.out_dir)
    json_path = out / certificate_filename(cert, "json")
    csv_path = out / certificate_filename(cert, "csv")
    json_path.write_text(export_certificate(cert, "json"))
    csv_path.write_text(export_certificate(cert, "csv"))
    manifest = RunManifest(
        command_line=["polya", *args.argv],
        parameters={
            "claim": args.claim,
            "cells": args.cells,
            "threshold": args.threshold,
            "terms": args.terms,
            "adaptive": args.adaptive,
            "max_depth": args.max_depth,
            "range": {"lo_hex": cert.range[0].hex(), "hi_hex": cert.range[1].hex(),
                      "lo_dec": repr(cert.range[0]), "hi_dec": repr(cert.range[1])},
        },
        artifacts=[str(json_path), str(csv_path)],
        started=started,
        config_digest=cert.config_digest,
    )
    stem = f"{cert.claim_id}_{cert.config_digest}"
    manifest.artifacts.append(str(out / f"manifest_{stem}.json"))
    manifest.finished = _now()
    manifest.write(out, stem)

    failures = cert.failures
    for r in failures:
        v = "undefined" if r.value is None else f"[{r.value.lo!r}, {r.value.hi!r}]"
        log.warning("cell [%r, %r] failed: value %s", r.cell.lo, r.cell.hi, v)
    summary = {
        "claim_id": cert.claim_id,
        "passed": cert.passed,
        "strategy": cert.strategy.value,
        "cells": len(cert.cells),
        "covers": cert.covers(),
        "failures": [
            {"lo": r.cell.lo, "hi": r.cell.hi, "value_lo": None if r.value is None else r.value.lo}
            for r in failures
        ],
        "min_value_lo": min((r.value.lo for r in cert.cells if r.value is not None), default=None),
        "config_digest": cert.config_digest,
        "artifacts": manifest.artifacts,
    }
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK if cert.passed else EXIT_FAIL


# -- oracle ----------------------------------------------------------------------


def _solve_summary(shape, spec: str, h: float, method: str) -> dict:
    make, n = mask_factory(shape, h)
    ex = extrapolate(make, n, method=method)
    doc = ex.fine.summary()
    doc["shape"] = spec
    doc["h"] = h / 2
    doc["extrapolated"] = {
        "h_pair": [h, h / 2],
        "order": ex.fine.mask.order,
        "lambda": ex.lam.extrapolated,
        "lambda_indicator": ex.lam.error_indicator,
        "T": ex.T.extrapolated,
        "T_indicator": ex.T.error_indicator,
        "M": ex.M.extrapolated,
        "M_indicator": ex.M.error_indicator,
        "ratio": ex.ratio,
        "ratio_indicator": ex.ratio_indicator,
        "lambda_M": ex.lambda_M,
        "lambda_M_indicator": ex.lambda_M_indicator,
    }
    if isinstance(shape, (IsoscelesTriangle, Rhombus)):
        lower, upper = certified_sandwich(shape)
        doc["lower_cert"] = None if lower is None else lower.to_json()
        doc["upper_cert"] = None if upper is None else upper.to_json()
    return doc


def _series_summary(shape, spec: str, terms: int) -> dict:
    if not isinstance(shape, Rectangle):
        raise UsageError("--series applies to rect shapes only")
    doc = rect_series(shape.a, shape.b, terms).summary(shape.a, shape.b)
    doc["shape"] = spec
    doc["pi2_over_12"] = math.pi**2 / 12
    return doc


_SWEEP_SHAPES = {
    ("triangle", "beta"): triangle_from_beta,
    ("triangle", "alpha"): lambda x: triangle_from_alpha(x, "Base2"),
    ("rhombus", "beta"): rhombus_from_beta,
    ("rhombus", "d"): rhombus_from_d,
}

SWEEP_COLUMNS = [
    "param", "lambda", "T", "M", "ratio", "lower_cert_lo", "upper_cert_hi",
    "ratio_indicator", "lower_tag", "upper_tag", "in_sandwich",
]


def parse_sweep(text: str):
    """``kind.param=lo:hi:n`` -> (kind, param, [decimal strings])."""
    try:
        lhs, rhs = text.split("=", 1)
        kind, param = lhs.strip().split(".", 1)
        lo, hi, n = rhs.split(":")
        lo_f, hi_f, count = float(lo), float(hi), int(n)
    except ValueError:
        raise UsageError(f"cannot parse sweep {text!r}; expected kind.param=lo:hi:n") from None
    if (kind, param) not in _SWEEP_SHAPES:
        raise UsageError(f"unsupported sweep parameter {kind}.{param}")
    if count < 1 or not lo_f <= hi_f:
        raise UsageError("sweep needs lo <= hi and n >= 1")
    values = [lo_f] if count == 1 else [lo_f + (hi_f - lo_f) * k / (count - 1) for k in range(count)]
    return kind, param, [repr(v) for v in values]


def sweep_rows(kind: str, param: str, values: Sequence[str], h: float, method: str = "cg") -> list[dict]:
    rows = []
    make_shape = _SWEEP_SHAPES[(kind, param)]
    for text in values:
        shape = make_shape(text)
        make, n = mask_factory(shape, h)
        ex = extrapolate(make, n, method=method)
        lower, upper = certified_sandwich(shape)
        tol = max(0.01 * ex.ratio, 5 * ex.ratio_indicator)
        ok = (lower is None or lower.value.lo - tol <= ex.ratio) and (upper is None or ex.ratio <= upper.value.hi + tol)
        rows.append(
            {
                "param": float(text),
                "lambda": ex.lam.extrapolated,
                "T": ex.T.extrapolated,
                "M": ex.M.extrapolated,
                "ratio": ex.ratio,
                "lower_cert_lo": None if lower is None else lower.value.lo,
                "upper_cert_hi": None if upper is None else upper.value.hi,
                "ratio_indicator": ex.ratio_indicator,
                "lower_tag": None if lower is None else lower.equation_tag,
                "upper_tag": None if upper is None else upper.equation_tag,
                "in_sandwich": ok,
            }
        )
        log.info("%s.%s=%s ratio=%.6f", kind, param, text, ex.ratio)
    return rows


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r[k] is None else repr(r[k]) if isinstance(r[k], float) else r[k]) for k in SWEEP_COLUMNS})
    return buf.getvalue()


def cmd_oracle(args) -> int:
    if not args.h > 0.0:
        raise UsageError("--h must be positive")
    if args.sweep:
        if args.shape:
            raise UsageError("give either a shape or --sweep, not both")
        kind, param, values = parse_sweep(args.sweep)
        text = sweep_csv(sweep_rows(kind, param, values, args.h, args.method))
        if args.output:
            Path(args.output).parent.mkdir(parents=True, exist_ok=True)
            Path(args.output).write_text(text)
        sys.stdout.write(text)
        return EXIT_OK
    if not args.shape:
        raise UsageError("oracle needs a shape spec or --sweep")
    shape = parse_shape(args.shape)
    if args.series:
        doc = _series_summary(shape, args.shape, args.terms)
    else:
        doc = _solve_summary(shape, args.shape, args.h, args.method)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.output:
        started = _now()
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        manifest = RunManifest(
            command_line=["polya", *args.argv],
            parameters={"shape": _echo_shape(args.shape, shape), "h": args.h, "method": args.method, "series": args.series},
            artifacts=[str(out), str(out.parent / f"manifest_{out.stem}.json")],
            started=started,
            finished=_now(),
        )
        manifest.write(out.parent, out.stem)
    sys.stdout.write(text)
    return EXIT_OK


# -- constants -------------------------------------------------------------------


def cmd_constants(args) -> int:
    sys.stdout.write(constants_json() + "\n")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polya", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"polya {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="evaluate certified bounds for one shape")
    b.add_argument("shape", help="e.g. triangle:beta=0.7, rhombus:beta=0.5, slab:m=2,w=0.1,rho=1")
    b.add_argument("--which", default="all", help="comma-separated equation tags or 'all'")
    b.add_argument("--format", choices=("json", "text"), default="json")
    b.set_defaults(func=cmd_bound)

    c = sub.add_parser("certify", help="run a covering proof and write certificate files")
    c.add_argument("claim", choices=("theorem5", "t11", "theorem4"))
    c.add_argument("--cells", type=int, default=None, help="number of uniform cells (theorem5 default 1000)")
    c.add_argument("--threshold", type=float, default=None)
    c.add_argument("--terms", type=int, default=10, help="series terms in the sector torsion")
    c.add_argument("--adaptive", action="store_true", help="use adaptive bisection")
    c.add_argument("--max-depth", type=int, default=24)
    c.add_argument("--jobs", type=int, default=1, help="worker processes for uniform coverings")
    c.add_argument("--out-dir", default=None, help="artifact directory (default $POLYA_CERT_DIR or .)")
    c.set_defaults(func=cmd_certify)

    o = sub.add_parser("oracle", help="finite-difference cross-check")
    o.add_argument("shape", nargs="?", help="shape spec, e.g. rhombus:beta=0.5")
    o.add_argument("--h", type=float, default=0.02, help="coarse grid spacing; the fine grid uses h/2")
    o.add_argument("--sweep", help="parameter sweep kind.param=lo:hi:n, e.g. triangle.beta=0.05:1.0:20")
    o.add_argument("--series", action="store_true", help="use the rectangle series instead of a grid")
    o.add_argument("--terms", type=int, default=200, help="series terms for --series")
    o.add_argument("--method", choices=("cg", "cg-plain", "direct"), default="cg", help="torsion linear solver")
    o.add_argument("--output", help="also write the result to this file")
    o.set_defaults(func=cmd_oracle)

    k = sub.add_parser("constants", help="dump the certified constant table")
    k.set_defaults(func=cmd_constants)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (UsageError, ShapeSpecError, DomainNotSupported) as exc:
        print(f"polya: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergence as exc:
        print(f"polya: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"polya: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
