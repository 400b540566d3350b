"""Run records and their CSV form."""
from __future__ import annotations

import csv
import io
import statistics
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields

CSV_HEADER = ("algorithm", "function", "n", "ell", "arity", "seed", "queries",
              "success", "restarts", "wall_ms")


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one run (all restarts included).

    ``queries`` is the first-hit query index on success and the number of
    queries spent otherwise.  ``wall_ms`` is excluded from equality so that
    reruns with the same seed compare equal.
    """

    algorithm: str
    function: str
    n: int
    ell: int
    arity: int
    seed: int
    queries: int
    success: bool
    restarts: int
    wall_ms: int = field(default=0, compare=False)

    def to_dict(self) -> dict:
        return asdict(self)


_PARSERS = {"n": int, "ell": int, "arity": int, "seed": int, "queries": int,
            "restarts": int, "wall_ms": int,
            "success": lambda s: {"true": True, "false": False}[s.strip().lower()]}


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def emit_csv(records, out=None) -> str | None:
    """Write records to the text stream ``out``, or return the CSV text."""
    buf = out if out is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([_cell(getattr(r, name)) for name in CSV_HEADER])
    return None if out is not None else buf.getvalue()


def parse_csv(source) -> list[RunRecord]:
    """Inverse of :func:`emit_csv`; ``source`` is CSV text or a text stream."""
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
    names = [f.name for f in fields(RunRecord)]
    rows = []
    for raw in reader:
        rows.append(RunRecord(**{k: _PARSERS.get(k, str)(raw[k]) for k in names}))
    return rows


def summarize(records) -> list[dict]:
    """Per (algorithm, n, ell): reps, success rate, median and mean queries."""
    groups = defaultdict(list)
    for r in records:
        groups[(r.algorithm, r.n, r.ell)].append(r)
    out = []
    for (alg, n, ell), rs in sorted(groups.items()):
        q = [r.queries for r in rs]
        ok = [r for r in rs if r.success]
        out.append({
            "algorithm": alg, "n": n, "ell": ell, "reps": len(rs),
            "success_rate": len(ok) / len(rs),
            "median_queries": statistics.median(q),
            "mean_queries": statistics.fmean(q),
            "max_restarts": max(r.restarts for r in rs),
        })
    return out
