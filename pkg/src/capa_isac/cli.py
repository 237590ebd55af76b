"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 config or usage error.
Without ``--config`` the reference scene is used.  Position overrides on
the command line take angles in degrees.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import report
from .channel import Endpoint, green_kernel
from .scene import ApertureId, PolarPosition, Scene, default_scene, load_config
from .validate import format_report, run_validation

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2

_SWEEP_DEFAULTS = {"snr": (0.0, 30.0, 31), "aperture": (0.1, 0.5, 21)}


def _scene(args) -> Scene:
    scene = load_config(args.config) if args.config else default_scene()
    for name in ("cu", "target"):
        override = getattr(args, name)
        if override is not None:
            r, theta_deg, phi_deg = override
            pos = PolarPosition(r, math.radians(theta_deg), math.radians(phi_deg))
            scene = scene.replace(**{name: pos})
    return scene


def _emit(text: str, out) -> None:
    if out:
        report.write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_rates(args) -> int:
    _emit(report.rates_csv(_scene(args)), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    start, stop, steps = _SWEEP_DEFAULTS[args.axis]
    spec = report.SweepSpec(
        axis=args.axis,
        start=start if args.start is None else args.start,
        stop=stop if args.stop is None else args.stop,
        steps=steps if args.steps is None else args.steps,
    )
    _emit(report.sweep_csv(_scene(args), spec, args.workers), args.out)
    return EXIT_OK


def cmd_region(args) -> int:
    text, verdicts = report.region_csv(_scene(args), args.which, args.grid)
    if args.out:
        report.write_text(args.out, text)
        sys.stdout.write("".join(v + "\n" for v in verdicts))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_validation(_scene(args), args.level, args.seed, args.perturb_gain)
    sys.stdout.write(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def cmd_dump_kernel(args) -> int:
    """Kernel samples on a ``grid x grid`` lattice of both apertures."""
    scene = _scene(args)
    zs = np.linspace(-scene.lz / 2, scene.lz / 2, args.grid)
    rows = []
    for aperture in ApertureId:
        xs = np.linspace(*aperture.x_range(scene.lx), args.grid)
        for endpoint in Endpoint:
            h = green_kernel(scene, endpoint, xs[:, None], zs[None, :])
            rows += [(endpoint.value, aperture.value, x, z, h[i, k].real, h[i, k].imag)
                     for i, x in enumerate(xs) for k, z in enumerate(zs)]
    _emit(report.to_csv(("endpoint", "aperture", "x_m", "z_m", "re", "im"), rows), args.out)
    return EXIT_OK


def _positive_int(min_value):
    def parse(text):
        value = int(text)
        if value < min_value:
            raise argparse.ArgumentTypeError(f"must be >= {min_value}")
        return value
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capa-isac",
        description="Rates and SR-CR regions of continuous-aperture-array ISAC.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="scene config file")
    common.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    for name in ("cu", "target"):
        common.add_argument(f"--{name}", nargs=3, type=float,
                            metavar=("R_M", "THETA_DEG", "PHI_DEG"),
                            help=f"override the {name} position (angles in degrees)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", parents=[common], help="all rates at one scene")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("sweep", parents=[common], help="rates over an SNR or aperture sweep")
    p.add_argument("--axis", choices=sorted(_SWEEP_DEFAULTS), default="snr")
    p.add_argument("--start", type=float, help="dB for snr, edge in m for aperture")
    p.add_argument("--stop", type=float)
    p.add_argument("--steps", type=_positive_int(2))
    p.add_argument("--workers", type=_positive_int(1), default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("region", parents=[common], help="CAPA, SPDA and FDSAC boundaries")
    p.add_argument("--which", choices=("dl", "ul"), default="dl")
    p.add_argument("--grid", type=_positive_int(2), default=101)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("validate", parents=[common], help="oracle and identity checks")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb-gain", type=float, default=0.0,
                   help="relative error injected into the closed-form gains")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dump-kernel", parents=[common], help="kernel samples on both apertures")
    p.add_argument("--grid", type=_positive_int(2), default=11)
    p.set_defaults(func=cmd_dump_kernel)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    # ConfigError and invalid sweep/scene values alike
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
