"""Delimited reports of convergence runs, with optional figure rendering.

Reports are byte-deterministic: a fixed column order, floats at 17
significant digits, and a config hash plus per-row seed for reproduction.
Wall times are not serialised (they would break determinism); pass
``include_timing=True`` to add them explicitly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math

from .convergence import ConvergenceRow

COLUMNS = [
    "level", "seed", "mesh", "fullness", "lambda1", "lambda1_ref",
    "gap_error", "h_det_p", "h_det_p1", "log_det_imdelta",
    "partition_value", "partition_log", "proxy_error", "proxy_C",
    "model_passed", "config_hash",
]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.17g}"
    return str(value)


def _row_values(row: ConvergenceRow, chash: str, include_timing: bool) -> dict:
    d = {
        "level": row.level, "seed": row.seed, "mesh": row.mesh,
        "fullness": row.fullness, "lambda1": row.lambda1,
        "lambda1_ref": row.lambda1_ref, "gap_error": row.gap_error,
        "h_det_p": row.h_det_p, "h_det_p1": row.h_det_p1,
        "log_det_imdelta": row.log_det_imdelta,
        "partition_value": row.partition_value,
        "partition_log": row.partition_log,
        "proxy_error": row.proxy_error, "proxy_C": row.proxy_C,
        "model_passed": row.model_passed, "config_hash": chash,
    }
    if include_timing:
        d["wall_time_s"] = row.wall_time_s
    return d


def emit_report(
    rows,
    fmt: str,
    path: str,
    config: dict | None = None,
    include_timing: bool = False,
) -> str:
    """Write rows as CSV or JSONL; returns the path.  Empty input produces a
    header-only file."""
    chash = config_hash(config or {})
    cols = COLUMNS + (["wall_time_s"] if include_timing else [])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for row in rows:
            vals = _row_values(row, chash, include_timing)
            writer.writerow([_fmt(vals[c]) for c in cols])
        text = buf.getvalue()
    elif fmt == "jsonl":
        lines = []
        for row in rows:
            vals = _row_values(row, chash, include_timing)
            lines.append(json.dumps(
                {c: (None if isinstance(vals[c], float) and math.isnan(vals[c])
                     else vals[c]) for c in cols},
                sort_keys=True, separators=(",", ":"),
            ))
        text = "\n".join(lines) + ("\n" if lines else "")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def parse_report(path: str) -> list:
    """Parse a CSV or JSONL report back into a list of string dicts (CSV) or
    decoded objects (JSONL); re-emitting a parsed CSV reproduces it byte for
    byte."""
    if path.endswith(".jsonl"):
        with open(path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def reemit_csv(records: list, path: str) -> str:
    """Round-trip helper: write parsed CSV records exactly as read."""
    if not records:
        raise ValueError("no records to re-emit")
    cols = list(records[0].keys())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for rec in records:
        writer.writerow([rec[c] for c in cols])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return path


# -------------------------------------------------------------- figures


def render_figures(rows, prefix: str) -> list:
    """Render convergence figures next to the delimited output: eigenvalue
    error vs mesh, partition trend, and the character proxy, whichever the
    rows contain.  Returns the list of written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    meshes = [r.mesh for r in rows]

    gaps = [(r.mesh, r.gap_error) for r in rows if not math.isnan(r.gap_error)]
    if len(gaps) >= 2:
        fig, ax = plt.subplots(figsize=(5, 4))
        xs, ys = zip(*gaps)
        ax.loglog(xs, ys, "o-", label="eigenvalue error")
        ref = [ys[0] * (x / xs[0]) ** 2 for x in xs]
        ax.loglog(xs, ref, "k--", alpha=0.5, label="order 2")
        ax.set_xlabel("mesh")
        ax.set_ylabel("|lambda1 - smooth|")
        ax.legend()
        fig.tight_layout()
        p = f"{prefix}_gap.png"
        fig.savefig(p, dpi=130)
        plt.close(fig)
        paths.append(p)

    parts = [(r.level, r.partition_log) for r in rows
             if not math.isnan(r.partition_log)]
    if len(parts) >= 2:
        fig, ax = plt.subplots(figsize=(5, 4))
        lv, pv = zip(*parts)
        ax.plot(lv, pv, "s-")
        ax.set_xlabel("level")
        ax.set_ylabel("log partition value")
        fig.tight_layout()
        p = f"{prefix}_partition.png"
        fig.savefig(p, dpi=130)
        plt.close(fig)
        paths.append(p)

    prox = [(r.mesh, r.proxy_error) for r in rows
            if not math.isnan(r.proxy_error)]
    if len(prox) >= 2:
        fig, ax = plt.subplots(figsize=(5, 4))
        xs, ys = zip(*prox)
        ax.loglog(xs, ys, "o-", label="character proxy error")
        cbound = max(y / x for x, y in prox)
        ax.loglog(xs, [cbound * x for x in xs], "k--", alpha=0.5,
                  label="C * mesh")
        ax.set_xlabel("mesh")
        ax.set_ylabel("max panel error (R/Z)")
        ax.legend()
        fig.tight_layout()
        p = f"{prefix}_proxy.png"
        fig.savefig(p, dpi=130)
        plt.close(fig)
        paths.append(p)

    return paths
