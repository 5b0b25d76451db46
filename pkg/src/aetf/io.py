"""Persistence: GDS record cache (JSON lines), CSV and SVG output, config files."""

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .gf2 import FrameShape
from .search import GaConfig, fitness
from .spectra import IndexSet, difference_spectrum, gds_target

CACHE_ENV = "AETF_GDS_CACHE"
DEFAULT_CACHE = "gds_cache.jsonl"


def default_cache_path():
    return Path(os.environ.get(CACHE_ENV, DEFAULT_CACHE))


@dataclass
class GdsRecord:
    n_users: int
    m_rows: int
    n_plus: int
    indices: list
    fitness: float
    peak_residual: float
    rng_seed: int
    generations_run: int
    version: str
    timestamp: str

    @classmethod
    def from_result(cls, result, cfg):
        s = result.best_set
        shape = s.shape
        lam = difference_spectrum(s)
        peak = float(lam[shape.n_minus] - gds_target(shape).values[shape.n_minus])
        return cls(
            n_users=shape.n_users,
            m_rows=shape.m_rows,
            n_plus=shape.n_plus,
            indices=list(s.indices),
            fitness=float(result.best_fitness),
            peak_residual=peak,
            rng_seed=int(cfg.rng_seed),
            generations_run=int(result.generations_run),
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )

    @property
    def shape(self):
        return FrameShape(self.n_users, self.m_rows)

    def index_set(self):
        return IndexSet(tuple(self.indices), self.shape)

    def recompute_fitness(self):
        s = self.index_set()
        return fitness(difference_spectrum(s), gds_target(s.shape), GaConfig())

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=False)


class CacheError(ValueError):
    pass


def load_records(path):
    """Read every record, checking that stored fitness matches a recomputation."""
    path = Path(path)
    if not path.exists():
        return []
    out = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = GdsRecord(**json.loads(line))
            except (TypeError, json.JSONDecodeError) as exc:
                raise CacheError(f"{path}:{lineno}: malformed record ({exc})") from exc
            if rec.n_plus != rec.shape.n_plus:
                raise CacheError(f"{path}:{lineno}: n_plus inconsistent with n_users")
            if abs(rec.recompute_fitness() - rec.fitness) > 1e-9:
                raise CacheError(f"{path}:{lineno}: stored fitness does not match indices")
            out.append(rec)
    return out


def append_record(path, record):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        fh.write(record.to_json() + "\n")


def best_record(records, n_users, m_rows):
    """Lowest-fitness record for the shape; earliest wins ties."""
    hits = [r for r in records if r.n_users == n_users and r.m_rows == m_rows]
    return min(hits, key=lambda r: r.fitness) if hits else None


def format_number(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "-inf" if x < 0 else "inf"
        return repr(x)
    return str(x)


def csv_text(columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_number(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def svg_line_plot(series, title, xlabel, ylabel, width=640, height=420):
    """Static SVG with one polyline per ``(label, xs, ys)`` series."""
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys) if y is not None and math.isfinite(y)]
    if not pts:
        return None
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    left, right, top, bottom = 70, 150, 40, 60
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle">{xlabel}</text>',
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 18 {top + ph / 2:.1f})">{ylabel}</text>',
    ]
    for i in range(5):
        yv = y0 + (y1 - y0) * i / 4
        xv = x0 + (x1 - x0) * i / 4
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.3f}</text>')
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 18}" text-anchor="middle">{xv:g}</text>')
    for j, (label, xs, ys) in enumerate(series):
        color = _PALETTE[j % len(_PALETTE)]
        coords = " ".join(
            f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys) if y is not None and math.isfinite(y)
        )
        if coords:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = top + 16 * (j + 1)
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 36}" y="{ly}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
