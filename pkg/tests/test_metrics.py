import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smt_ellipse.images import ImageGrid
from smt_ellipse.metrics import error_metrics, sample_truth
from smt_ellipse.phantom import default_phantom

BOX = (-1.0, -1.0, 1.0, 1.0)


def _truth(n=15):
    mask = np.ones((n, n), bool)
    mask[0, 0] = False
    like = ImageGrid(np.zeros((n, n)), mask, BOX)
    return sample_truth(default_phantom(), like)


def _as(img, values):
    return ImageGrid(values, img.mask, img.box)


def test_identical_images():
    t = _truth()
    m = error_metrics(t, _as(t, t.values.copy()), centers=[(0.3, 0.2)])
    assert m.rel_l2 == 0.0 and m.max_abs == 0.0 and m.center_errors == (0.0,)


def test_zero_reconstruction():
    t = _truth()
    m = error_metrics(t, _as(t, np.zeros_like(t.values)))
    assert m.rel_l2 == pytest.approx(1.0)
    assert m.max_abs == pytest.approx(np.nanmax(t.values))


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_scale_invariance(a):
    t = _truth()
    rng = np.random.default_rng(0)
    r = _as(t, t.values + 0.01 * rng.standard_normal(t.values.shape))
    m1 = error_metrics(t, r)
    m2 = error_metrics(_as(t, a * t.values), _as(t, a * r.values))
    assert m2.rel_l2 == pytest.approx(m1.rel_l2, rel=1e-10)
    assert m2.max_abs == pytest.approx(a * m1.max_abs, rel=1e-10)


def test_masked_pixels_ignored():
    t = _truth()
    vals = t.values.copy()
    vals[0, 0] = 1e6
    assert error_metrics(t, _as(t, vals)).rel_l2 == 0.0
    assert np.isnan(t.values[0, 0])


def test_grid_mismatch():
    t = _truth()
    with pytest.raises(ValueError):
        error_metrics(t, ImageGrid(np.zeros((3, 3)), np.ones((3, 3), bool), BOX))
    with pytest.raises(ValueError):
        error_metrics(t, ImageGrid(t.values, t.mask, (-2, -1, 1, 1)))
