import math

import numpy as np
import pytest

from smt_ellipse.forward import (CircleAperture, EllipseAperture, Sinogram, angle_grid,
                                 build_sinogram, forward_smt, read_sinogram, write_sinogram)
from smt_ellipse.phantom import PhantomSpec, analytic_smt_gaussian, default_phantom, gaussian

UNCUT = PhantomSpec((gaussian((0.3, 0.2), 0.2, 1.0, math.inf),))


def test_angle_grid():
    t = angle_grid(256)
    np.testing.assert_allclose(t, -np.pi + 2 * np.pi * np.arange(256) / 256, atol=1e-15)
    assert np.all(t[1:] == -t[:0:-1])
    assert t[0] == -np.pi


def test_forward_zero_radius():
    assert forward_smt(default_phantom(), 0.3, 0.2, 0.0) == 0.0


def test_forward_matches_analytic():
    val = forward_smt(UNCUT, 0.8, 0.2, 0.7, n_quad=4096)
    assert val == pytest.approx(analytic_smt_gaussian((0.3, 0.2), 0.2, 1.0, 0.8, 0.2, 0.7), rel=1e-8)


def test_forward_outside_support():
    assert abs(forward_smt(default_phantom(), 3.0, 0.0, 0.5)) < 1e-12


def test_forward_broadcasts():
    r = np.linspace(0.1, 1.0, 5)
    v = forward_smt(UNCUT, 0.0, 0.0, r)
    assert v.shape == (5,)
    np.testing.assert_allclose(v, [forward_smt(UNCUT, 0.0, 0.0, x) for x in r], rtol=1e-14)


def test_zero_phantom_zero_sinogram():
    s = build_sinogram(PhantomSpec(), EllipseAperture(1.0), 16, 20, 2.0)
    assert not s.values.any()


@pytest.fixture(scope="module")
def small():
    return build_sinogram(default_phantom(), EllipseAperture(1.0), 64, 120, 4.0, 1024)


def test_sinogram_invariants(small):
    assert np.all(small.values[:, 0] == 0.0)
    assert np.max(np.abs(small.values[:, -1])) < 1e-10 * small.values.max()


def test_sinogram_matches_analytic_oracle():
    s = build_sinogram(UNCUT, EllipseAperture(1.0), 32, 80, 4.0, 2048)
    c1, c2 = s.aperture.centers(s.eta)
    ref = analytic_smt_gaussian((0.3, 0.2), 0.2, 1.0, c1[:, None], c2[:, None], s.r[None, :])
    big = ref > 1e-300
    rel = np.abs(s.values[big] - ref[big]) / ref[big]
    assert rel.max() < 1e-7


def test_truncated_gaussian_close_to_analytic():
    spec = PhantomSpec((gaussian((0.3, 0.2), 0.2, 1.0),))  # 6 sigma cut
    s = build_sinogram(spec, EllipseAperture(1.0), 16, 60, 4.0, 2048)
    c1, c2 = s.aperture.centers(s.eta)
    ref = analytic_smt_gaussian((0.3, 0.2), 0.2, 1.0, c1[:, None], c2[:, None], s.r[None, :])
    assert np.max(np.abs(s.values - ref)) < 1e-7


def test_quadrature_converged_for_smooth_integrand():
    a = build_sinogram(UNCUT, EllipseAperture(1.0), 64, 120, 4.0, 2048).values
    b = build_sinogram(UNCUT, EllipseAperture(1.0), 64, 120, 4.0, 4096).values
    assert np.max(np.abs(a - b)) < 1e-10 * a.max()


def test_hard_cut_limits_quadrature_convergence(small):
    # the 4.5 sigma cut leaves a jump of about 4e-5 at the support edge
    fine = build_sinogram(default_phantom(), EllipseAperture(1.0), 64, 120, 4.0, 2048)
    change = np.max(np.abs(fine.values - small.values)) / small.values.max()
    assert 1e-10 < change < 1e-5


def test_reflection_symmetry():
    spec = PhantomSpec((gaussian((0.2, 0.0), 0.2, 1.0, 0.8),))
    s = build_sinogram(spec, EllipseAperture(0.8), 40, 50, 3.0, 512)
    np.testing.assert_allclose(s.values[1:], s.values[:0:-1], rtol=0, atol=1e-15 * s.values.max())


def test_circle_aperture_centers():
    s = build_sinogram(default_phantom(), CircleAperture(1.5), 8, 30, 3.0, 256)
    c1, c2 = s.aperture.centers(s.eta)
    np.testing.assert_allclose(np.hypot(c1, c2), 1.5)
    j = 3
    assert s.values[j, 10] == forward_smt(default_phantom(), c1[j], c2[j], s.r[10], 256)


def test_r_max_bound_enforced():
    with pytest.raises(ValueError, match="bound"):
        build_sinogram(default_phantom(), EllipseAperture(1.0), 8, 10, 2.0)


def test_bad_apertures_and_shapes():
    with pytest.raises(ValueError):
        EllipseAperture(0.0)
    with pytest.raises(ValueError):
        CircleAperture(-1.0)
    with pytest.raises(ValueError):
        Sinogram(EllipseAperture(1.0), np.zeros(5), 1.0)


@pytest.mark.parametrize("ap", [EllipseAperture(1.0), CircleAperture(1.5)])
def test_round_trip_bit_exact(tmp_path, small, ap):
    s = Sinogram(ap, small.values * np.pi, 4.0)
    p = tmp_path / "s.csv"
    write_sinogram(s, p, ["note=extra"])
    back = read_sinogram(p)
    assert back.aperture == ap and back.r_max == 4.0
    assert np.array_equal(back.values, s.values)


def test_header_format(tmp_path, small):
    p = tmp_path / "s.csv"
    write_sinogram(small, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "# aperture=ellipse xi0=1.0"
    assert lines[1] == "# N_eta=64 N_r=120 r_max=4.0"


@pytest.mark.parametrize("text", [
    "0,0\n0,0\n",
    "# aperture=ellipse xi0=1\n# N_eta=2 N_r=3 r_max=1\n0,0\n0,0\n",
    "# aperture=square xi0=1\n# N_eta=2 N_r=2 r_max=1\n0,0\n0,0\n",
    "# aperture=ellipse\n# N_eta=2 N_r=2 r_max=1\n0,0\n0,0\n",
    "# aperture=ellipse xi0=1 junk\n# N_eta=2 N_r=2 r_max=1\n0,0\n0,0\n",
])
def test_malformed_files(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ValueError):
        read_sinogram(p)
