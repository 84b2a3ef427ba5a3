"""Deterministic output formatting and figure rendering for the CLI.

Every number crossing a file boundary goes through format_float: 15
significant digits, scientific notation, locale-independent.  Identical
inputs therefore produce byte-identical CSV and JSON.  Files are built as
complete strings first and written in one call, so a failure never leaves a
partial file behind.

Figures are a convenience layer on the same data (PNG, Agg backend, no
display); matplotlib is imported lazily so data-only runs never pay for it.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence


def format_float(x: float) -> str:
    return f"{float(x):.14e}"


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def render_json(value, indent: int = 0) -> str:
    """JSON text with floats in the same fixed notation as the CSV cells.

    Hand-rolled because the stdlib encoder offers no hook for float
    formatting; the emitted tokens are valid JSON numbers.
    """
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f'{pad}  "{k}": {render_json(v, indent + 1)}' for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ",\n".join(f"{pad}  {render_json(v, indent + 1)}" for v in value)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if value is True:
        return "true"
    if value is False:
        return "false"
    if value is None:
        return "null"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_text(path: str, content: str) -> None:
    """Atomic-enough write: full content lands via a temporary sibling."""
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)
    os.replace(tmp, path)


def rows_to_json(header: Sequence[str], rows: Iterable[Sequence]) -> list[dict]:
    return [dict(zip(header, row)) for row in rows]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_line_figure(path: str, x, y, xlabel: str, ylabel: str, title: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(x, y, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_stem_figure(path: str, x, y, xlabel: str, ylabel: str, title: str) -> None:
    """Discrete lines (spectra, coefficients) on a log magnitude axis."""
    import numpy as np

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    magnitude = np.abs(np.asarray(y, dtype=float))
    positive = magnitude > 0.0
    markerline, stemlines, baseline = ax.stem(
        np.asarray(x, dtype=float)[positive], magnitude[positive]
    )
    plt.setp(markerline, markersize=4)
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_run_figure(path: str, times, probe, energies, title: str) -> None:
    import numpy as np

    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7.0, 5.6), sharex=True)
    ax1.plot(times, probe, lw=0.9)
    ax1.set_ylabel("probe value")
    ax1.set_title(title)
    ax1.grid(True, alpha=0.3)
    e = np.asarray(energies, dtype=float)
    scale = abs(e[0]) if e[0] != 0.0 else 1.0
    ax2.plot(times, (e - e[0]) / scale, lw=0.9)
    ax2.set_ylabel("relative energy drift")
    ax2.set_xlabel("time")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
