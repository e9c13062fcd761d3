"""
Report, CSV and SVG writers. Complex numbers go to CSV as re,im column pairs and
every float is written with repr, so that a rerun reproduces the files byte for byte.
"""
import csv
import logging
import os
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .fredholm import Leaf

logger = logging.getLogger(__name__)

REPORT_NAME = "report.txt"
# matplotlib writes SVG at 72 units per inch, so this yields an 800x800 viewBox
SVG_DPI = 72
SVG_INCHES = 800 / SVG_DPI


def _cell(value: Any) -> list[str]:
    if isinstance(value, (complex, np.complexfloating)):
        return [repr(float(value.real)), repr(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        return [repr(float(value))]
    if isinstance(value, (bool, np.bool_)):
        return [str(bool(value)).lower()]
    if isinstance(value, (int, np.integer)):
        return [str(int(value))]
    return [str(value)]


def write_csv(out_dir: str, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
              complex_columns: Sequence[str] = ()) -> str:
    """Columns named in complex_columns expand to <name>_re,<name>_im"""
    columns = []
    for column in header:
        columns += [f"{column}_re", f"{column}_im"] if column in complex_columns else [column]
    path = os.path.join(out_dir, name)
    count = 0
    with open(path, 'w', newline='') as file:
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            cells = []
            for column, value in zip(header, row):
                cells += _cell(complex(value)) if column in complex_columns else _cell(value)
            writer.writerow(cells)
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return path


def write_report(out_dir: str, command: str, lines: Sequence[str], steps: Sequence[str]) -> str:
    path = os.path.join(out_dir, REPORT_NAME)
    with open(path, 'w') as file:
        file.write(f"command: {command}\n\n")
        for line in lines:
            file.write(f"{line}\n")
        if steps:
            file.write("\nsteps:\n")
            for step in steps:
                file.write(f"  {step}\n")
    logger.debug(f"Wrote report {path}")
    return path


def leaf_rows(leaves: Sequence[Leaf]) -> list[list[Any]]:
    """jump, x, lower, upper for every sample of every leaf"""
    rows = []
    for idx, leaf in enumerate(leaves):
        for x, lower, upper in zip(leaf.x_grid, leaf.lower, leaf.upper):
            rows.append([idx, float(x), complex(lower), complex(upper)])
    return rows


def plot_leaves(out_dir: str, name: str, leaves: Sequence[Leaf], symbol_range: Optional[np.ndarray] = None,
                title: str = '') -> str:
    """Leaf boundaries, z1/z2 markers, the range of the symbol and a crosshair at the origin"""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams['svg.hashsalt'] = 'nakano-fredholm'
    fig, ax = plt.subplots(figsize=(SVG_INCHES, SVG_INCHES), dpi=SVG_DPI)
    if symbol_range is not None and len(symbol_range):
        values = np.asarray(symbol_range)
        ax.plot(values.real, values.imag, '.', color='0.6', markersize=1.5, label='range of a/b')
    for idx, leaf in enumerate(leaves):
        ax.plot(leaf.lower.real, leaf.lower.imag, '-', color='tab:blue', linewidth=1,
                label='leaf boundary' if idx == 0 else None)
        ax.plot(leaf.upper.real, leaf.upper.imag, '-', color='tab:blue', linewidth=1)
        ax.plot([leaf.z1.real], [leaf.z1.imag], 'o', color='tab:green', label='z1' if idx == 0 else None)
        ax.plot([leaf.z2.real], [leaf.z2.imag], 's', color='tab:red', label='z2' if idx == 0 else None)
    ax.axhline(0.0, color='k', linewidth=0.5)
    ax.axvline(0.0, color='k', linewidth=0.5)
    ax.plot([0.0], [0.0], '+', color='k', markersize=14, label='origin')
    ax.set_xlabel('Re')
    ax.set_ylabel('Im')
    ax.set_aspect('equal', adjustable='datalim')
    if title:
        ax.set_title(title)
    ax.legend(loc='upper right')
    path = os.path.join(out_dir, name)
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logger.debug(f"Wrote plot {path}")
    return path


def plot_profile(out_dir: str, name: str, x: np.ndarray, alpha: np.ndarray, beta: np.ndarray,
                 title: str = '') -> str:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams['svg.hashsalt'] = 'nakano-fredholm'
    fig, ax = plt.subplots(figsize=(SVG_INCHES, SVG_INCHES), dpi=SVG_DPI)
    ax.plot(x, alpha, '-', label='α*')
    ax.plot(x, beta, '-', label='β*')
    ax.set_xlabel('x')
    ax.set_ylabel('index')
    if title:
        ax.set_title(title)
    ax.legend(loc='best')
    path = os.path.join(out_dir, name)
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    return path
