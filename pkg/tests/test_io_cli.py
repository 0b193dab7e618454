import subprocess
import sys

import numpy as np
import pytest
from scipy.special import mathieu_a

from smt_ellipse.cli import EXIT_DOMAIN, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from smt_ellipse.config import ConfigError, parse_config
from smt_ellipse.forward import CircleAperture, EllipseAperture, Sinogram, read_sinogram, write_sinogram
from smt_ellipse.images import ImageGrid, read_image_csv, read_pgm, write_image_csv, write_pgm

SMALL = """
[aperture]
kind = ellipse
xi0 = 1.0
[sinogram]
n_eta = 64
n_r = 120
r_max = 4.0
n_quad = 512
[phantom]
components = 1
c0.center = 0.3, 0.2
c0.sigma = 0.2
c0.support_radius = 0.9
[reconstruction]
box = -1.0, -1.0, 1.0, 1.0
nx = 5
ny = 5
k_max = 4
n_k = 20
n_terms = 20
"""


def _write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# --------------------------------------------------------------- config ---

def test_defaults_without_sections():
    cfg = parse_config("")
    assert cfg.aperture == EllipseAperture(1.0)
    assert cfg.sinogram.n_eta == 256 and cfg.recon.k_max == 12.0
    assert cfg.phantom.components[0].center == (0.3, 0.2)


def test_parse_small():
    cfg = parse_config(SMALL)
    assert cfg.recon.nx == 5 and cfg.norton.n_k == 20
    assert cfg.phantom.components[0].support_radius == 0.9


@pytest.mark.parametrize("text", [
    "[mystery]\na = 1\n",
    "[aperture]\nkind = square\n",
    "[aperture]\nxi0 = -1\n",
    "[sinogram]\nn_eta = many\n",
    "[sinogram]\nn_r = 1\n",
    "[phantom]\ncomponents = 0\n",
    "[phantom]\ncomponents = 1\nc0.sigma = 0.1\n",
    "[phantom]\ncomponents = 1\nc0.center = 0.1\nc0.sigma = 0.1\n",
    "[phantom]\ncomponents = 1\nc0.center = 0, 0\nc0.sigma = nan\n",
    "[reconstruction]\nbox = 1, 1, 0, 0\n",
    "[reconstruction]\nk_max = 0\n",
    "not an ini file",
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_echo_regenerates_config():
    cfg = parse_config(SMALL)
    lines = cfg.echo()
    assert any("aperture.xi0=1.0" in x for x in lines)
    assert any("phantom.c0.support_radius=0.9" in x for x in lines)
    assert any("reconstruction.n_k=20" in x for x in lines)


# ---------------------------------------------------------------- images ---

def _img():
    v = np.arange(12.0).reshape(3, 4) / 7
    m = np.ones((3, 4), bool)
    m[0, 0] = False
    v[0, 0] = np.nan
    return ImageGrid(v, m, (-1, -0.5, 1, 0.5), {"xi0": 1.0, "k_max": 12.0, "N_k": 240, "n_terms": 40})


def test_image_round_trip(tmp_path):
    p = tmp_path / "img.csv"
    img = _img()
    write_image_csv(img, p, ["note=1"])
    first = p.read_text().splitlines()[0]
    assert first == "# xi0=1.0 nx=4 ny=3 box=-1.0,-0.5,1.0,0.5 k_max=12.0 N_k=240 n_terms=40"
    back = read_image_csv(p)
    np.testing.assert_array_equal(back.values, img.values)
    assert np.array_equal(back.mask, img.mask) and back.box == img.box and back.params == img.params


def test_image_bad_files(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("# nx=2 ny=2 box=0,0,1,1\n1,2\n3,4\n")
    with pytest.raises(ValueError, match="mask"):
        read_image_csv(p)
    p.write_text("1,2\n")
    with pytest.raises(ValueError):
        read_image_csv(p)


def test_pgm(tmp_path):
    p = tmp_path / "img.pgm"
    write_pgm(_img(), p)
    data = read_pgm(p)
    assert data.shape == (3, 4)
    # row 0 of the file is the top of the image
    assert data[-1, 0] == 0 and data[0, -1] == 255
    empty = ImageGrid(np.full((2, 2), np.nan), np.zeros((2, 2), bool), (0, 0, 1, 1))
    write_pgm(empty, p)
    assert not read_pgm(p).any()


# ------------------------------------------------------------------- cli ---

def test_simulate_and_reconstruct(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL)
    sino = str(tmp_path / "s.csv")
    assert main(["simulate", "-c", cfg, "-o", sino]) == EXIT_OK
    s = read_sinogram(sino)
    assert s.values.shape == (64, 120) and np.all(s.values[:, 0] == 0)
    text = open(sino).read()
    assert "# sinogram.n_eta=64" in text and "phantom.c0.sigma=0.2" in text
    img_path = str(tmp_path / "i.csv")
    pgm = str(tmp_path / "i.pgm")
    assert main(["reconstruct", "-c", cfg, "-i", sino, "-o", img_path, "--pgm", pgm]) == EXIT_OK
    img = read_image_csv(img_path)
    assert img.params["xi0"] == 1.0 and img.mask.sum() > 0
    assert read_pgm(pgm).shape == (5, 5)
    out = capsys.readouterr().out
    assert "dropped mode fraction" in out and "wall time" in out


def test_simulate_is_deterministic(tmp_path):
    cfg = _write(tmp_path, SMALL)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "-c", cfg, "-o", str(a)])
    main(["simulate", "-c", cfg, "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_zero_sinogram_reconstructs_to_zero(tmp_path):
    cfg = _write(tmp_path, SMALL)
    sino = tmp_path / "z.csv"
    write_sinogram(Sinogram(EllipseAperture(1.0), np.zeros((16, 40)), 4.0), sino)
    out = tmp_path / "z_img.csv"
    assert main(["reconstruct", "-c", cfg, "-i", str(sino), "-o", str(out)]) == EXIT_OK
    img = read_image_csv(out)
    assert np.all(img.values[img.mask] == 0.0)


def test_circle_file_routes_to_circle_backend(tmp_path):
    cfg = _write(tmp_path, SMALL.replace("kind = ellipse\nxi0 = 1.0", "kind = circle\nR = 1.5"))
    sino = str(tmp_path / "c.csv")
    assert main(["simulate", "-c", cfg, "-o", sino]) == EXIT_OK
    assert isinstance(read_sinogram(sino).aperture, CircleAperture)
    out = str(tmp_path / "c_img.csv")
    # the sinogram header wins over an elliptic config
    assert main(["reconstruct", "-c", _write(tmp_path, SMALL, "e.ini"), "-i", sino, "-o", out]) == EXIT_OK
    assert read_image_csv(out).params["R"] == 1.5


def test_phantom_outside_aperture(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL.replace("c0.center = 0.3, 0.2", "c0.center = 1.3, 0.2"))
    assert main(["simulate", "-c", cfg, "-o", str(tmp_path / "s.csv")]) == EXIT_DOMAIN
    assert "c0" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert main([]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["simulate", "-c", str(tmp_path / "missing.ini"), "-o", "x"]) == EXIT_USAGE
    assert main(["validate", "nonsense"]) == EXIT_USAGE
    bad = _write(tmp_path, SMALL.replace("r_max = 4.0", "r_max = 1.0"))
    assert main(["simulate", "-c", bad, "-o", str(tmp_path / "s.csv")]) == EXIT_USAGE
    junk = tmp_path / "junk.csv"
    junk.write_text("hello\n")
    assert main(["reconstruct", "-c", bad, "-i", str(junk), "-o", str(tmp_path / "o.csv")]) == EXIT_USAGE


def test_basis_dump(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["basis", "-q", "2", "-n", "4", "-o", str(out), "--samples", "9"]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[1] == "n,a_n,b_n"
    a0 = float(lines[2].split(",")[1])
    assert a0 == pytest.approx(mathieu_a(0, 2.0), abs=1e-9)
    table = np.loadtxt(lines[lines.index("# samples") + 2:], delimiter=",")
    assert table.shape == (9, 1 + 5 + 4)
    assert main(["basis", "-q", "-1", "-n", "4", "-o", str(out)]) == EXIT_USAGE


def test_validate_exit_codes(monkeypatch, capsys):
    from smt_ellipse import cli
    from smt_ellipse.validation import Check
    monkeypatch.setattr(cli, "run_suite", lambda name: [Check("x", 1.0, 2.0, True)])
    assert main(["validate", "mathieu"]) == EXIT_OK
    monkeypatch.setattr(cli, "run_suite", lambda name: [Check("x", 3.0, 2.0, False)])
    assert main(["validate", "mathieu"]) == EXIT_FAIL
    assert "FAIL x" in capsys.readouterr().out


def test_validate_mathieu_suite(capsys):
    assert main(["validate", "mathieu"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("A1.eigenvalues", "A1.orthogonality", "A1.ode_residual"):
        assert f"PASS {name}" in out


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "smt_ellipse.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "reconstruct" in r.stdout
