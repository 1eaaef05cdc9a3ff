"""Map and table output: CSV plus binary 8-bit graymaps (P5)."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .hom import CoincidenceMap

MAP_HEADER = ("x_mm", "y_mm", "probability")


def write_map_csv(cmap, path):
    """Row-major scan order (y outer, x inner); floats via repr so re-reading is exact."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(MAP_HEADER)
            for iy, y in enumerate(cmap.ys):
                for ix, x in enumerate(cmap.xs):
                    w.writerow((repr(float(x)), repr(float(y)), repr(float(cmap.values[iy, ix]))))
    except OSError as exc:
        raise OSError(f"cannot write map CSV {path}: {exc}") from exc
    return path


def graymap_pixels(cmap):
    """8-bit pixels, linear from 0 to the map peak; first image row is the largest y."""
    peak = cmap.peak
    if peak > 0:
        pix = np.rint(255.0 * cmap.values / peak)
    else:
        pix = np.zeros_like(cmap.values)
    return np.clip(pix, 0, 255).astype(np.uint8)[::-1]


def write_pgm(cmap, path):
    path = Path(path)
    pix = graymap_pixels(cmap)
    h, w = pix.shape
    try:
        with path.open("wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(pix.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write graymap {path}: {exc}") from exc
    return path


def read_pgm(path):
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary graymap")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit graymaps are supported")
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)


def emit_map(cmap, path):
    """Write ``<path>.csv`` and ``<path>.pgm``; returns both paths."""
    stem = Path(path)
    if stem.suffix in (".csv", ".pgm"):
        stem = stem.with_suffix("")
    return write_map_csv(cmap, stem.with_suffix(".csv")), write_pgm(cmap, stem.with_suffix(".pgm"))


def read_map_csv(path, peak_normalized=False):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != MAP_HEADER:
        raise ValueError(f"{path}: unexpected header {rows[0]!r}")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
    # x varies fastest: the first row block sharing y gives the x axis
    changes = np.nonzero(data[:, 1] != data[0, 1])[0]
    nx = int(changes[0]) if changes.size else data.shape[0]
    if data.shape[0] % nx:
        raise ValueError(f"{path}: rows do not form a rectangular grid")
    xs = data[:nx, 0]
    ys = data[::nx, 1]
    values = data[:, 2].reshape(ys.size, xs.size)
    return CoincidenceMap(xs, ys, values, peak_normalized=peak_normalized)


def write_table(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path
