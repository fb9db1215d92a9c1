"""Covering proofs: evaluate a rigorous predicate on cells that cover a range.

A :class:`Certificate` is passed only when every cell passes and the cells
cover the claimed range.  Failures are reported in the certificate, never
raised.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import logging
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Callable, Optional, Sequence

from polya import __version__
from polya.bounds import G_enclosure, rhombus_lower_excess, t11_margin
from polya.errors import PolyaError
from polya.interval import Interval, midrad, pi_enclosure

__all__ = [
    "Certificate",
    "CellRecord",
    "Strategy",
    "certificate_filename",
    "certify_predicate",
    "certify_t11",
    "certify_theorem4",
    "certify_theorem5_part2",
    "export_certificate",
    "load_certificate",
]

log = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 24
MAX_DEPTH_LIMIT = 40


class Strategy(str, enum.Enum):
    UNIFORM_MIDRAD = "UniformMidrad"
    ADAPTIVE_BISECT = "AdaptiveBisect"


@dataclass(frozen=True)
class CellRecord:
    cell: Interval
    value: Optional[Interval]
    ok: bool


@dataclass
class Certificate:
    claim_id: str
    range: tuple[float, float]
    strategy: Strategy
    cells: list[CellRecord]
    threshold: float
    terms: int
    passed: bool
    config_digest: str
    strict: bool = True
    toolchain_note: str = ""

    @property
    def failures(self) -> list[CellRecord]:
        return [c for c in self.cells if not c.ok]

    def covers(self) -> bool:
        return _covers(self.cells, self.range)


def _covers(cells: Sequence[CellRecord], rng: tuple[float, float]) -> bool:
    if not cells:
        return False
    if cells[0].cell.lo > rng[0] or cells[-1].cell.hi < rng[1]:
        return False
    return all(a.cell.hi >= b.cell.lo for a, b in zip(cells, cells[1:]))


def _digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _toolchain_note() -> str:
    return (
        f"polya {__version__}; CPython {platform.python_version()}; "
        "binary64 endpoints, ulp-directed outward rounding"
    )


def _passes(value: Optional[Interval], threshold: float, strict: bool) -> bool:
    if value is None:
        return False
    return value.lo > threshold if strict else value.lo >= threshold


def _evaluate(f: Callable[[Interval], Interval], cell: Interval) -> Optional[Interval]:
    try:
        return f(cell)
    except PolyaError as exc:
        log.debug("predicate raised on %s: %s", cell, exc)
        return None


def _uniform_cells(rng: tuple[Interval, Interval], n_cells: int) -> list[Interval]:
    """Cells midrad(a + n*Delta, Delta.hi), n = 0..n_cells, Delta = (b - a)/n_cells."""
    a, b = rng
    delta = (b - a) / n_cells
    return [midrad((a + n * delta).mid, delta.hi) for n in range(n_cells + 1)]


def certify_predicate(
    claim_id: str,
    f: Callable[[Interval], Interval],
    range: tuple,
    threshold: float,
    strategy: Strategy = Strategy.ADAPTIVE_BISECT,
    max_depth: int = DEFAULT_MAX_DEPTH,
    *,
    n_cells: int = 1000,
    strict: bool = True,
    terms: int = 0,
    jobs: int = 1,
    config: Optional[dict] = None,
) -> Certificate:
    """Certify f(cell).lo > threshold (>= when ``strict`` is False) on ``range``.

    ``range`` holds two Intervals (or numbers); the certified real range is
    [range[0].lo, range[1].hi], so decimal endpoints are never shaved.
    ``f`` must be a pure function of its cell; with ``jobs > 1`` it must
    also be picklable.
    """
    strategy = Strategy(strategy)
    a, b = (Interval.coerce(x) if not isinstance(x, Interval) else x for x in range)
    lo, hi = a.lo, b.hi
    if not lo < hi:
        raise ValueError(f"empty range [{lo!r}, {hi!r}]")
    if max_depth > MAX_DEPTH_LIMIT:
        raise ValueError(f"max_depth must be <= {MAX_DEPTH_LIMIT}")
    cfg = {
        "claim_id": claim_id,
        "range": [lo.hex(), hi.hex()],
        "strategy": strategy.value,
        "threshold": float(threshold).hex(),
        "strict": strict,
        "terms": terms,
    }
    if strategy is Strategy.UNIFORM_MIDRAD:
        cfg["n_cells"] = n_cells
    else:
        cfg["max_depth"] = max_depth
    cfg.update(config or {})

    if strategy is Strategy.UNIFORM_MIDRAD:
        cells = _uniform_cells((a, b), n_cells)
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                values = list(pool.map(partial(_evaluate, f), cells, chunksize=32))
        else:
            values = [_evaluate(f, c) for c in cells]
        records = [CellRecord(c, v, _passes(v, threshold, strict)) for c, v in zip(cells, values)]
    else:
        records = []
        stack = [(Interval(lo, hi), 0)]
        while stack:
            cell, depth = stack.pop()
            v = _evaluate(f, cell)
            if _passes(v, threshold, strict):
                records.append(CellRecord(cell, v, True))
                continue
            m = cell.mid
            if depth >= max_depth or not (cell.lo < m < cell.hi):
                log.info("%s: leaf %s failed at depth %d", claim_id, cell, depth)
                records.append(CellRecord(cell, v, False))
                continue
            # push right first so cells come out in ascending order
            stack.append((Interval(m, cell.hi), depth + 1))
            stack.append((Interval(cell.lo, m), depth + 1))

    passed = all(r.ok for r in records) and _covers(records, (lo, hi))
    return Certificate(
        claim_id=claim_id,
        range=(lo, hi),
        strategy=strategy,
        cells=records,
        threshold=float(threshold),
        terms=terms,
        passed=passed,
        config_digest=_digest(cfg),
        strict=strict,
        toolchain_note=_toolchain_note(),
    )


# -- named claims ----------------------------------------------------------------


def certify_theorem5_part2(
    N_cells: int = 1000,
    threshold: float = 1.01,
    terms: int = 10,
    *,
    strategy: Strategy = Strategy.UNIFORM_MIDRAD,
    max_depth: int = DEFAULT_MAX_DEPTH,
    jobs: int = 1,
) -> Certificate:
    """G(alpha) > threshold on [33/100, pi/3], covered by N_cells + 1 midrad cells."""
    if N_cells < 1 or terms < 1:
        raise ValueError("N_cells and terms must be >= 1")
    rng = (Interval.from_fraction(Fraction(33, 100)), pi_enclosure() / 3)
    return certify_predicate(
        "theorem5",
        partial(G_enclosure, terms=terms),
        rng,
        threshold,
        strategy,
        max_depth,
        n_cells=N_cells,
        terms=terms,
        jobs=jobs,
    )


def _enclose(x) -> Interval:
    # a float argument stands for its shortest decimal, e.g. 1e-6
    if isinstance(x, Interval):
        return x
    if isinstance(x, float):
        return Interval.from_decimal(repr(x))
    if isinstance(x, str):
        return Interval.from_decimal(x)
    return Interval.coerce(x)


def certify_t11(
    lo: float = 1e-6,
    hi: Fraction = Fraction(33, 100),
    *,
    threshold: float = 0.0,
    strategy: Strategy = Strategy.ADAPTIVE_BISECT,
    n_cells: int = 1000,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Certificate:
    """C1 - C1 C2 alpha - C2 alpha^(1/3) > 0 on [lo, hi]."""
    rng = (_enclose(lo), _enclose(hi))
    return certify_predicate("t11", t11_margin, rng, threshold, strategy, max_depth, n_cells=n_cells)


def certify_theorem4(
    lo: float = 1e-6,
    hi: float = 2.0,
    *,
    threshold: float = 0.0,
    strategy: Strategy = Strategy.ADAPTIVE_BISECT,
    n_cells: int = 1000,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Certificate:
    """(16+24d^2+d^4)/((1+3d^2/4)(16+4d^2)) - 1 >= 0 on [lo, hi]."""
    if hi > 2.0:
        raise ValueError("the rhombus lower-bound factor is stated for d <= 2")
    rng = (_enclose(lo), _enclose(hi))
    return certify_predicate(
        "theorem4", rhombus_lower_excess, rng, threshold, strategy, max_depth, n_cells=n_cells, strict=False
    )


# -- serialization -------------------------------------------------------------------


def _hex(x: Optional[float]) -> Optional[str]:
    return None if x is None else float(x).hex()


def _unhex(s: Optional[str]) -> Optional[float]:
    return None if s is None else float.fromhex(s)


def certificate_to_dict(c: Certificate) -> dict:
    return {
        "claim_id": c.claim_id,
        "range": [_hex(c.range[0]), _hex(c.range[1])],
        "strategy": c.strategy.value,
        "threshold": _hex(c.threshold),
        "strict": c.strict,
        "terms": c.terms,
        "passed": c.passed,
        "config_digest": c.config_digest,
        "toolchain_note": c.toolchain_note,
        "cells": [
            {
                "lo": _hex(r.cell.lo),
                "hi": _hex(r.cell.hi),
                "value_lo": _hex(r.value.lo) if r.value is not None else None,
                "value_hi": _hex(r.value.hi) if r.value is not None else None,
                "pass": r.ok,
            }
            for r in c.cells
        ],
    }


def certificate_from_dict(doc: dict) -> Certificate:
    cells = []
    for row in doc["cells"]:
        v = None
        if row["value_lo"] is not None:
            v = Interval(_unhex(row["value_lo"]), _unhex(row["value_hi"]))
        cells.append(CellRecord(Interval(_unhex(row["lo"]), _unhex(row["hi"])), v, bool(row["pass"])))
    return Certificate(
        claim_id=doc["claim_id"],
        range=(_unhex(doc["range"][0]), _unhex(doc["range"][1])),
        strategy=Strategy(doc["strategy"]),
        cells=cells,
        threshold=_unhex(doc["threshold"]),
        terms=int(doc["terms"]),
        passed=bool(doc["passed"]),
        config_digest=doc["config_digest"],
        strict=bool(doc.get("strict", True)),
        toolchain_note=doc.get("toolchain_note", ""),
    )


_CSV_HEADER = ["index", "lo", "hi", "value_lo", "value_hi", "pass", "lo_dec", "hi_dec", "value_lo_dec", "value_hi_dec"]


def export_certificate(c: Certificate, format: str = "json") -> str:
    """Render as JSON (hex endpoints, lossless) or CSV (one row per cell)."""
    if format == "json":
        return json.dumps(certificate_to_dict(c), indent=1, sort_keys=True) + "\n"
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_CSV_HEADER)
        for i, r in enumerate(c.cells):
            v = r.value
            w.writerow(
                [
                    i,
                    _hex(r.cell.lo),
                    _hex(r.cell.hi),
                    _hex(v.lo) if v else "",
                    _hex(v.hi) if v else "",
                    int(r.ok),
                    repr(r.cell.lo),
                    repr(r.cell.hi),
                    repr(v.lo) if v else "",
                    repr(v.hi) if v else "",
                ]
            )
        return buf.getvalue()
    raise ValueError(f"unknown format {format!r}")


def load_certificate(text: str) -> Certificate:
    return certificate_from_dict(json.loads(text))


def certificate_filename(c: Certificate, ext: str = "json") -> str:
    return f"cert_{c.claim_id}_{c.config_digest}.{ext}"
