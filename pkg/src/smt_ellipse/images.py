"""Reconstructed images on a rectangular grid, with CSV and PGM output."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class ImageGrid:
    """values[j, i] at (x1_i, x2_j); ``mask`` marks pixels that were evaluated.

    Pixels outside the mask hold NaN.  ``params`` records the header fields
    (aperture size, k_max, N_k, n_terms), ``diagnostics`` anything else.
    """

    values: np.ndarray
    mask: np.ndarray
    box: tuple[float, float, float, float]
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        m = np.asarray(self.mask, dtype=bool)
        if v.ndim != 2 or v.shape != m.shape:
            raise ValueError("values and mask must be 2-d arrays of the same shape")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "box", tuple(float(b) for b in self.box))

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def x1(self) -> np.ndarray:
        return np.linspace(self.box[0], self.box[2], self.nx)

    @property
    def x2(self) -> np.ndarray:
        return np.linspace(self.box[1], self.box[3], self.ny)

    def mesh(self):
        return np.meshgrid(self.x1, self.x2)


def grid_mesh(box, nx: int, ny: int):
    x1 = np.linspace(box[0], box[2], nx)
    x2 = np.linspace(box[1], box[3], ny)
    return np.meshgrid(x1, x2)


_HEADER_KEYS = ("xi0", "R", "k_max", "N_k", "n_terms")


def write_image_csv(img: ImageGrid, path, extra_header=()) -> None:
    """Write the grid; ``extra_header`` lines follow the first header as comments."""
    fields = []
    for key in ("xi0", "R"):
        if key in img.params:
            fields.append(f"{key}={img.params[key]!r}")
    fields += [f"nx={img.nx}", f"ny={img.ny}", "box=" + ",".join(repr(b) for b in img.box)]
    for key in ("k_max", "N_k", "n_terms"):
        if key in img.params:
            fields.append(f"{key}={img.params[key]!r}")
    with open(path, "w") as fh:
        fh.write("# " + " ".join(fields) + "\n")
        for line in extra_header:
            fh.write(f"# {line}\n")
        np.savetxt(fh, img.values, fmt="%.17g", delimiter=",")
        fh.write("# mask\n")
        np.savetxt(fh, img.mask.astype(int), fmt="%d", delimiter=",")


def read_image_csv(path) -> ImageGrid:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("image file must start with a '#' header line")
    head = {}
    for tok in lines[0].lstrip("#").split():
        k, _, v = tok.partition("=")
        head[k] = v
    try:
        nx, ny = int(head["nx"]), int(head["ny"])
        box = tuple(float(b) for b in head["box"].split(","))
    except KeyError as exc:
        raise ValueError(f"missing header field {exc}") from None
    try:
        split = lines.index("# mask")
    except ValueError:
        raise ValueError("image file has no mask section") from None
    vals = np.loadtxt(lines[1:split], delimiter=",", ndmin=2)
    mask = np.loadtxt(lines[split + 1:], delimiter=",", ndmin=2).astype(bool)
    if vals.shape != (ny, nx) or mask.shape != (ny, nx):
        raise ValueError("image size does not match its header")
    params = {}
    for key in _HEADER_KEYS:
        if key in head:
            params[key] = int(head[key]) if key in ("N_k", "n_terms") else float(head[key])
    return ImageGrid(vals, mask, box, params)


def write_pgm(img: ImageGrid, path) -> None:
    """8-bit binary PGM, row 0 at the top (largest x2), masked pixels black."""
    v = np.where(img.mask, img.values, np.nan)
    lo, hi = (np.nanmin(v), np.nanmax(v)) if img.mask.any() else (0.0, 0.0)
    span = hi - lo if hi > lo else 1.0
    scaled = np.where(img.mask, np.round(255.0 * (v - lo) / span), 0.0)
    data = np.clip(np.nan_to_num(scaled), 0, 255).astype(np.uint8)[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.nx} {img.ny}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if m is None:
        raise ValueError("not a binary PGM file")
    w, h, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise ValueError("only 8-bit PGM is supported")
    return np.frombuffer(raw[m.end(): m.end() + w * h], dtype=np.uint8).reshape(h, w)
