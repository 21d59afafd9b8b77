"""Benchmark harness: grid experiments over block sizes, CSV + SVG output.

Each cell encodes an initial segment of the bundled corpus, corrupts it
once, and decodes the same corrupted transmission twice: once from the
full LP data and once from randomly projected LP data.  Rows follow a
fixed CSV schema; a JSON-lines manifest records the configuration and
environment of every run.
"""

from __future__ import annotations

import csv
import importlib.resources
import json
import platform
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy
import threadpoolctl

from .channel import ChannelModel
from .codec import char_distance
from .errors import InsufficientData, InvalidParameter, SparselineError
from .matgen import (
    IMPOSSIBLE,
    ORTHOGONAL,
    derive_seed,
    generate_impossible_key,
    generate_orthogonal_key,
)
from .pipeline import decode, default_projector_for, encode

CSV_FIELDS = [
    "regime",
    "d_or_m",
    "n",
    "variant",
    "mu_err",
    "cpu_seconds",
    "lp_status",
    "seed",
    "k",
    "epsilon",
    "alpha",
    "C",
    "trial_index",
]

TABLE1_SIZES = (80, 128, 216, 248, 320, 408)
TABLE2_SIZES = ((328, 0.3), (328, 0.4), (328, 0.5), (328, 0.8), (1896, 0.3))

# seed-mixing roles, combined as derive_seed(master, cell, trial, role)
_ROLE_KEY = 0
_ROLE_CHANNEL = 1
_ROLE_PROJECTOR = 2


@dataclass(frozen=True)
class ExperimentConfig:
    regime: str
    sizes: tuple
    redundancy: float = 4.0
    delta: float = 0.08
    epsilon: float = 0.2
    alpha: float = 0.02
    jll_constant: float = 1.0
    gross_magnitude: float = 1000.0
    trials_per_cell: int = 1
    master_seed: int = 0
    corpus_path: str | None = None
    # impossible regime: channel error rate defaults to each cell's
    # delta_prime; set channel_delta to decouple them
    channel_delta: float | None = None

    def __post_init__(self):
        if self.regime not in (ORTHOGONAL, IMPOSSIBLE):
            raise InvalidParameter(f"unknown regime {self.regime!r}")
        if self.trials_per_cell < 1:
            raise InvalidParameter("trials_per_cell must be at least 1")
        if not self.sizes:
            raise InvalidParameter("sizes must not be empty")
        object.__setattr__(self, "sizes", tuple(self.sizes))


def bundled_corpus_path() -> Path:
    return Path(importlib.resources.files("sparseline") / "data" / "aeneid.txt")


def load_corpus(path=None) -> str:
    """Corpus text in Latin-1; defaults to the bundled passage."""
    target = Path(path) if path is not None else bundled_corpus_path()
    return target.read_bytes().decode("latin-1")


def corpus_message(corpus: str, char_count: int) -> str:
    """Initial ``char_count`` characters of the corpus as flowing text
    (line breaks and runs of whitespace become single spaces)."""
    flat = " ".join(corpus.split())
    if char_count > len(flat):
        raise InsufficientData(
            f"corpus has {len(flat)} characters, message needs {char_count}"
        )
    return flat[:char_count]


def _run_cell(cfg: ExperimentConfig, cell_index: int, size, corpus: str) -> list[dict]:
    if cfg.regime == ORTHOGONAL:
        d_or_m = size
        delta = cfg.delta
    else:
        d_or_m, delta_prime = size
        delta = cfg.channel_delta if cfg.channel_delta is not None else delta_prime

    rows = []
    key = None
    for trial in range(cfg.trials_per_cell):
        trial_seed = derive_seed(cfg.master_seed, cell_index, trial)

        def row(variant, n="", mu_err="", cpu="", status="", k="", eps="", alph="", c=""):
            return {
                "regime": cfg.regime,
                "d_or_m": d_or_m,
                "n": n,
                "variant": variant,
                "mu_err": mu_err,
                "cpu_seconds": cpu,
                "lp_status": status,
                "seed": trial_seed,
                "k": k,
                "epsilon": eps,
                "alpha": alph,
                "C": c,
                "trial_index": trial,
            }

        try:
            if cfg.regime == ORTHOGONAL:
                # independent single runs: a fresh key per trial
                key = generate_orthogonal_key(
                    d_or_m,
                    cfg.redundancy,
                    derive_seed(cfg.master_seed, cell_index, trial, _ROLE_KEY),
                )
            elif key is None:
                # one shared key per cell; trials differ in noise
                key = generate_impossible_key(
                    d_or_m,
                    delta_prime,
                    derive_seed(cfg.master_seed, cell_index, 0, _ROLE_KEY),
                )
            text = corpus_message(corpus, key.message_bits // 8)
            channel = ChannelModel(
                delta,
                cfg.gross_magnitude,
                seed=derive_seed(cfg.master_seed, cell_index, trial, _ROLE_CHANNEL),
            )
            z_bar, _ = channel.corrupt(encode(key, text))

            report_org = decode(key, z_bar)
            projector = default_projector_for(
                key,
                epsilon=cfg.epsilon,
                alpha=cfg.alpha,
                jll_constant=cfg.jll_constant,
                seed=derive_seed(cfg.master_seed, cell_index, trial, _ROLE_PROJECTOR),
            )
            report_prj = decode(key, z_bar, projector)
        except (SparselineError, np.linalg.LinAlgError) as exc:
            status = f"error:{type(exc).__name__}"
            rows.append(row("original", status=status))
            rows.append(row("projected", status=status))
            continue

        row_org = row(
            "original",
            n=key.n,
            mu_err=char_distance(text, report_org.decoded_text),
            cpu=f"{report_org.solve_seconds:.3f}",
            status=report_org.lp_status.value,
        )
        row_org["decoded_text"] = report_org.decoded_text
        row_prj = row(
            "projected",
            n=key.n,
            mu_err=char_distance(text, report_prj.decoded_text),
            cpu=f"{report_prj.solve_seconds:.3f}",
            status=report_prj.lp_status.value,
            k=projector.k,
            eps=cfg.epsilon,
            alph=cfg.alpha,
            c=cfg.jll_constant,
        )
        row_prj["decoded_text"] = report_prj.decoded_text
        rows.extend([row_org, row_prj])
    return rows


def _run_grid(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    corpus = load_corpus(cfg.corpus_path)
    cells = list(enumerate(cfg.sizes))
    if jobs > 1:
        # cells parallelize at this level, so cap BLAS threads to avoid
        # oversubscription
        with threadpoolctl.threadpool_limits(limits=1):
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_run_cell, cfg, i, size, corpus) for i, size in cells]
                results = [f.result() for f in futures]
    else:
        results = [_run_cell(cfg, i, size, corpus) for i, size in cells]
    return [row for cell_rows in results for row in cell_rows]


def run_table1(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    """Orthogonal-regime grid over block sizes d."""
    if cfg.regime != ORTHOGONAL:
        raise InvalidParameter("run_table1 needs an orthogonal-regime config")
    return _run_grid(cfg, jobs)


def run_table2(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    """Low-redundancy grid over (m, delta_prime) cells."""
    if cfg.regime != IMPOSSIBLE:
        raise InvalidParameter("run_table2 needs an impossible-regime config")
    return _run_grid(cfg, jobs)


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_manifest(cfg: ExperimentConfig, path) -> None:
    """Append a provenance record: config echo plus environment stamp."""
    record = {
        "config": asdict(cfg),
        "environment": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "platform": platform.platform(),
        },
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record) + "\n")


# ------------------------------------------------------------- SVG plot

_SERIES_COLORS = {"original": "#1f77b4", "projected": "#d62728"}
_WIDTH, _HEIGHT = 720, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 160, 50, 60


def emit_plot(rows: list[dict], title: str = "LP solve time") -> str:
    """Line chart of median cpu_seconds per block size, one series per
    variant, as a standalone SVG document."""
    series: dict[str, dict[int, list[float]]] = {}
    for r in rows:
        cpu = str(r.get("cpu_seconds", "")).strip()
        if not cpu:
            continue
        variant = r["variant"]
        x = int(r["d_or_m"])
        series.setdefault(variant, {}).setdefault(x, []).append(float(cpu))
    series = {
        name: {x: statistics.median(vals) for x, vals in points.items()}
        for name, points in series.items()
    }
    xs = sorted({x for points in series.values() for x in points})
    if len(xs) < 2:
        raise InsufficientData("need at least two block sizes to draw a line chart")

    y_max = max(max(points.values()) for points in series.values())
    y_max = y_max * 1.15 if y_max > 0 else 1.0
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B
    x_lo, x_hi = xs[0], xs[-1]

    def px(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        # SVG y grows downward: larger values sit higher on the chart
        return _MARGIN_T + plot_h - y / y_max * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="28" text-anchor="middle" font-size="18" '
        f'font-family="sans-serif">{title}</text>',
    ]
    for i in range(5):
        value = y_max * i / 4
        y = py(value)
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{y:.1f}" x2="{_MARGIN_L + plot_w}" y2="{y:.1f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end" font-size="12" '
            f'font-family="sans-serif">{value:.2f}</text>'
        )
    axis_y = _MARGIN_T + plot_h
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{axis_y}" x2="{_MARGIN_L + plot_w}" y2="{axis_y}" '
        'stroke="#000000" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" y2="{axis_y}" '
        'stroke="#000000" stroke-width="1.5"/>'
    )
    for x in xs:
        parts.append(
            f'<text x="{px(x):.1f}" y="{axis_y + 20}" text-anchor="middle" font-size="12" '
            f'font-family="sans-serif">{x}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.0f}" y="{_HEIGHT - 14}" text-anchor="middle" '
        'font-size="13" font-family="sans-serif">block size</text>'
    )
    parts.append(
        f'<text x="20" y="{_MARGIN_T + plot_h / 2:.0f}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif" transform="rotate(-90 20 {_MARGIN_T + plot_h / 2:.0f})">'
        "seconds</text>"
    )
    legend_y = _MARGIN_T + 10
    for name in sorted(series):
        points = series[name]
        color = _SERIES_COLORS.get(name, "#2ca02c")
        coords = " ".join(f"{px(x):.1f},{py(points[x]):.1f}" for x in sorted(points))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2.5" points="{coords}"/>'
        )
        for x in sorted(points):
            parts.append(
                f'<circle cx="{px(x):.1f}" cy="{py(points[x]):.1f}" r="3.5" fill="{color}"/>'
            )
        lx = _MARGIN_L + plot_w + 16
        parts.append(
            f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 24}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="2.5"/>'
        )
        parts.append(
            f'<text x="{lx + 30}" y="{legend_y + 4}" font-size="13" '
            f'font-family="sans-serif">{name}</text>'
        )
        legend_y += 22
    parts.append("</svg>")
    return "\n".join(parts)
