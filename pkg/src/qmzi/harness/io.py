"""CSV/JSON/SVG emission with a '#'-prefixed metadata header."""
import csv
import io
import json
import math
from pathlib import Path

from .. import __version__
from ..errors import DomainError, QmziError


class OutputError(QmziError):
    code = "output_error"


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(s):
    if s == "":
        return None
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def table_to_csv(rows, columns, meta):
    buf = io.StringIO()
    for key in sorted(meta):
        buf.write(f"# {key}={json.dumps(meta[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def csv_to_table(text):
    """Inverse of table_to_csv: (rows, columns, meta)."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, val = line[2:].split("=", 1)
            meta[key] = json.loads(val)
        elif line:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [{c: _parse(v) for c, v in zip(columns, rec)} for rec in reader]
    return rows, columns, meta


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def output_metadata(cfg, extra=None):
    from .experiments import RNG_ALGORITHM
    from .._accel import backend

    meta = {
        "artifact": "qmzi",
        "artifact_version": __version__,
        "config": cfg.physics_dict(),
        "seed": cfg.seed,
        "rng_algorithm": RNG_ALGORITHM,
        "kernel_backend": backend(),
    }
    meta.update(extra or {})
    return meta


def emit_outputs(tables, cfg, plots=None, extra_meta=None):
    """Write each table as <name>.csv and <name>.json, plus optional SVG plots.

    ``tables`` maps name -> (rows, columns); ``plots`` maps name -> svg text.
    Returns the list of written paths.
    """
    if not tables or all(not rows for rows, _ in tables.values()):
        raise DomainError("nothing to emit: all tables are empty")
    out_dir = Path(cfg.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out_dir}: {exc}") from exc
    meta = output_metadata(cfg, extra_meta)
    written = []
    try:
        for name, (rows, columns) in tables.items():
            path = out_dir / f"{name}.csv"
            path.write_text(table_to_csv(rows, columns, meta))
            written.append(path)
            jpath = out_dir / f"{name}.json"
            doc = {"meta": meta, "columns": columns,
                   "rows": [{c: _jsonable(r.get(c)) for c in columns} for r in rows]}
            jpath.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
            written.append(jpath)
        for name, svg in (plots or {}).items():
            path = out_dir / f"{name}.svg"
            path.write_text(svg)
            written.append(path)
    except OSError as exc:
        raise OutputError(f"cannot write outputs under {out_dir}: {exc}") from exc
    return written
