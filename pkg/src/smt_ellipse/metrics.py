"""Error metrics between a reconstruction and the phantom sampled on the same grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .images import ImageGrid
from .phantom import PhantomSpec, eval_phantom


@dataclass(frozen=True)
class Metrics:
    rel_l2: float
    max_abs: float
    center_errors: tuple[float, ...]


def sample_truth(spec: PhantomSpec, like: ImageGrid) -> ImageGrid:
    X1, X2 = like.mesh()
    vals = np.where(like.mask, eval_phantom(spec, X1, X2), np.nan)
    return ImageGrid(vals, like.mask, like.box, dict(like.params))


def error_metrics(truth: ImageGrid, recon: ImageGrid, centers=()) -> Metrics:
    """Relative L2 and max error over pixels in both masks.

    ``centers`` are (x1, x2) points; the error there is read at the
    nearest pixel.
    """
    if truth.values.shape != recon.values.shape or not np.allclose(truth.box, recon.box):
        raise ValueError("truth and reconstruction grids do not match")
    m = truth.mask & recon.mask
    t = truth.values[m]
    r = recon.values[m]
    diff = r - t
    norm = np.linalg.norm(t)
    rel = float(np.linalg.norm(diff) / norm) if norm > 0 else float(np.linalg.norm(diff) > 0)
    mx = float(np.max(np.abs(diff))) if diff.size else 0.0
    errs = []
    x1, x2 = recon.x1, recon.x2
    for c in centers:
        i = int(np.argmin(np.abs(x1 - c[0])))
        j = int(np.argmin(np.abs(x2 - c[1])))
        errs.append(float(abs(recon.values[j, i] - truth.values[j, i])))
    return Metrics(rel, mx, tuple(errs))
