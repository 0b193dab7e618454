"""``smt`` command line: simulate, reconstruct, validate, basis.

Exit codes: 0 ok, 1 validation failure, 2 usage or config error,
3 domain violation (phantom outside the aperture, points outside it).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .forward import CircleAperture, EllipseAperture, build_sinogram, read_sinogram, write_sinogram
from .images import write_image_csv, write_pgm
from .mathieu import build_basis
from .norton import reconstruct_circle
from .phantom import inside_circle_violations, inside_violations
from .reconstruct import reconstruct_grid
from .validation import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class DomainError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"smt: error: {msg}", file=sys.stderr)


def _violations(cfg: RunConfig) -> list[int]:
    ap = cfg.aperture
    if isinstance(ap, EllipseAperture):
        return inside_violations(cfg.phantom, ap.xi0)
    return inside_circle_violations(cfg.phantom, ap.radius)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    bad = _violations(cfg)
    if bad:
        names = ", ".join(f"c{i}" for i in bad)
        raise DomainError(f"phantom component(s) {names} not strictly inside the aperture")
    g = cfg.sinogram
    try:
        s = build_sinogram(cfg.phantom, cfg.aperture, g.n_eta, g.n_r, g.r_max, g.n_quad)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    write_sinogram(s, args.output, cfg.echo())
    edge = float(np.max(np.abs(s.values[:, -1])))
    print(f"wrote {args.output}: {s.n_eta}x{s.n_r}, max value {s.values.max():.6g}, "
          f"max |Rf| at r_max {edge:.3g}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg = load_config(args.config)
    try:
        s = read_sinogram(args.input)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read sinogram {args.input}: {exc}") from None
    if type(s.aperture) is not type(cfg.aperture) or s.aperture != cfg.aperture:
        logging.getLogger("smt").warning("sinogram aperture %s overrides the config", s.aperture)
        cfg = RunConfig(s.aperture, cfg.phantom, cfg.sinogram, cfg.recon, cfg.norton)
    t0 = time.perf_counter()
    warnings_seen: list[str] = []
    handler = _Collect(warnings_seen)
    logging.getLogger("smt_ellipse").addHandler(handler)
    try:
        if isinstance(s.aperture, CircleAperture):
            img = reconstruct_circle(s, cfg.norton)
            diag = f"masked mode fraction {img.diagnostics['masked_fraction']:.4f}"
        else:
            img = reconstruct_grid(s, cfg.recon)
            diag = (f"dropped mode fraction {img.diagnostics['dropped_mode_fraction']:.4f}, "
                    f"limit-consistency spread {img.diagnostics['max_spread']:.3g}")
            if img.diagnostics["max_spread"] > 0.05 * max(np.nanmax(np.abs(img.values)), 1e-300):
                warnings_seen.append("limit-consistency spread exceeds 5% of the image scale")
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    finally:
        logging.getLogger("smt_ellipse").removeHandler(handler)
    dt = time.perf_counter() - t0
    header = cfg.echo() + [f"sinogram={args.input}"] + [f"warning={w}" for w in warnings_seen]
    write_image_csv(img, args.output, header)
    if args.pgm:
        write_pgm(img, args.pgm)
    print(f"wrote {args.output}: {img.nx}x{img.ny}, {diag}, wall time {dt:.1f} s")
    for w in warnings_seen:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


class _Collect(logging.Handler):
    def __init__(self, sink: list[str]):
        super().__init__(logging.WARNING)
        self.sink = sink

    def emit(self, record):
        self.sink.append(record.getMessage().replace(" ", "_"))


def cmd_validate(args) -> int:
    if args.suite not in SUITES:
        _err(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
        return EXIT_USAGE
    checks = run_suite(args.suite)
    for c in checks:
        print(c.line(), flush=True)
    failed = sum(not c.passed for c in checks)
    print(f"{args.suite}: {len(checks) - failed}/{len(checks)} passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_basis(args) -> int:
    if args.q < 0 or args.n_max < 0 or args.samples < 0:
        raise ConfigError("need q >= 0, n_max >= 0 and samples >= 0")
    b = build_basis(args.q, args.n_max)
    with open(args.output, "w") as fh:
        fh.write(f"# q={b.q!r} n_max={b.n_max} M={b.M}\n")
        fh.write("n,a_n,b_n\n")
        for n in range(b.n_max + 1):
            fh.write(f"{n},{b.a[n]:.17g},{b.b[n]:.17g}\n")
        if args.samples:
            eta = np.linspace(-np.pi, np.pi, args.samples)
            cols = ["eta"] + [f"ce_{n}" for n in range(b.n_max + 1)]
            cols += [f"se_{n}" for n in range(1, b.n_max + 1)]
            fh.write("# samples\n" + ",".join(cols) + "\n")
            table = np.vstack([eta, b.ce_table(eta), b.se_table(eta)[1:]]).T
            np.savetxt(fh, table, fmt="%.17g", delimiter=",")
    print(f"wrote {args.output}: orders 0..{b.n_max} at q={b.q:g} (M={b.M})")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smt", description="Spherical mean transform with centers on an ellipse.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="write a sinogram for the configured phantom")
    s.add_argument("-c", "--config", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reconstruct", help="invert a sinogram onto the configured grid")
    r.add_argument("-c", "--config", required=True)
    r.add_argument("-i", "--input", required=True)
    r.add_argument("-o", "--output", required=True)
    r.add_argument("--pgm", help="also write an 8-bit PGM preview")
    r.set_defaults(func=cmd_reconstruct)

    v = sub.add_parser("validate", help="run a numerical self-check suite")
    v.add_argument("suite", help=", ".join(SUITES))
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("basis", help="dump Mathieu characteristic values and samples")
    b.add_argument("-q", type=float, required=True)
    b.add_argument("-n", "--n-max", dest="n_max", type=int, required=True)
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--samples", type=int, default=65, help="angular samples per function (0 for none)")
    b.set_defaults(func=cmd_basis)
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except DomainError as exc:
        _err(str(exc))
        return EXIT_DOMAIN
    except OSError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
