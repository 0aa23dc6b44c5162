from __future__ import annotations

import csv
import threading
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np


DIGITS = 17

# one lock per output path; sweep workers may target the same index file
_PATH_LOCKS: Dict[str, threading.Lock] = defaultdict(threading.Lock)
_LOCKS_GUARD = threading.Lock()


def _lock_for(path: Path) -> threading.Lock:
    with _LOCKS_GUARD:
        return _PATH_LOCKS[str(path.resolve())]


def fmt(value) -> str:
    """17 significant digits; integers print as integers."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.{DIGITS}g}"


class ExportService:
    """
    Writes CSV tables and gnuplot scripts.

    CSV: UTF-8, comma separated, `\\n` line endings, header row always present.
    """

    def write_csv(self, path: Path, header: Sequence[str], columns: Sequence[Iterable]) -> Path:
        """
        Write equal-length columns under a header.

        Raises:
            ValueError: header and columns disagree or columns are ragged.
        """
        cols = [list(c) for c in columns]
        if len(cols) != len(header):
            raise ValueError(f"{len(header)} header fields for {len(cols)} columns")
        n = len(cols[0]) if cols else 0
        if any(len(c) != n for c in cols):
            raise ValueError("ragged CSV columns")
        return self.write_rows(path, header, zip(*cols))

    def write_rows(self, path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with _lock_for(path):
            with path.open("w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(list(header))
                for row in rows:
                    writer.writerow([fmt(v) for v in row])
        return path

    def write_gnuplot(self, path: Path, data: Path, *, n_lateral: int, beta: float,
                      constant: Optional[float] = None, slices: Sequence[float] = (),
                      title: str = "") -> Path:
        """
        Script plotting u against x_N for the given lateral slices on a
        log-log scale, plus the line constant * x_N^beta.

        Args:
            data: the field CSV (columns x1..x_{N-1}, xN, u).
            n_lateral: number of lateral columns (0 for N = 1).
        """
        path = Path(path)
        ycol, ucol = n_lateral + 1, n_lateral + 2
        lines: List[str] = [
            f"# {title}" if title else "# strip field",
            "set datafile separator ','",
            "set key left top",
            "set logscale xy",
            "set xlabel 'x_N'",
            "set ylabel 'u'",
        ]
        plots: List[str] = []
        if n_lateral == 0 or not slices:
            plots.append(f"'{data.name}' every ::1 using {ycol}:{ucol} with lines title 'u'")
        else:
            for x in slices:
                plots.append(
                    f"'{data.name}' every ::1 using {ycol}:((abs($1-{fmt(x)})<1e-12)?${ucol}:1/0) "
                    f"with lines title 'x1={x:.4g}'"
                )
        if constant is not None:
            lines.append(f"C = {fmt(constant)}")
            lines.append(f"b = {fmt(beta)}")
            plots.append("C*x**b with lines dashtype 2 title sprintf('fit %.4g x^{%.4g}', C, b)")
        lines.append("plot " + ", \\\n     ".join(plots))
        lines.append("pause -1")
        path.parent.mkdir(parents=True, exist_ok=True)
        with _lock_for(path):
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


def field_table(x: np.ndarray, y: np.ndarray, u: np.ndarray, lateral: bool) -> tuple[list[str], list[np.ndarray]]:
    """Header and columns for a field dump; x varies fastest."""
    if not lateral:
        return ["xN", "u"], [y, u[:, 0]]
    X, Y = np.meshgrid(x, y)
    return ["x1", "xN", "u"], [X.ravel(), Y.ravel(), u.ravel()]


def output_path(ctx, out: Optional[str], stem: str, suffix: str = ".csv") -> Path:
    """
    Where a handler writes its product.

    `--out` may name a file or a directory (existing, or ending in a
    separator); without it the configured output directory is used.
    """
    name = f"{stem}{suffix}"
    if not out:
        return Path(ctx.out_dir) / name
    path = Path(out).expanduser()
    if out.endswith(("/", "\\")) or path.is_dir():
        return path / name
    return path


def tag(value: float) -> str:
    """Compact number for file stems: 0.5 -> 0.5, 3.0 -> 3."""
    return f"{float(value):g}"
