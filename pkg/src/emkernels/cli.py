"""Command-line front end.

Every run writes its artifacts plus a ``manifest.json`` (config echo, input
hashes, output list) into the output directory.
"""

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import EMKernelError, InvalidInputError
from .fields import field_from_potential, electric_potential
from .io import (
    dump_json,
    file_sha256,
    load_charge_image,
    save_grid,
    save_overlay,
    write_orientation_csv,
)
from .kernels import build_kernel
from .shapes import DEFAULT_THRESHOLDS, ThresholdTable, classify_regions, contour_fields, region_report
from .strokes import (
    magnetize_stroke,
    orientation_rows,
    resolve_attraction,
    resolve_repulsion,
    split_substrokes,
    stroke_orientation,
    substroke_potentials,
    thin,
)

log = logging.getLogger("emkernels")

SUBCOMMANDS = ("kernel", "potential", "field", "roi", "stroke", "magnetize", "interact")
REPORT_VERSION = 1
_DEFAULT_N = {"stroke": [2.0], "magnetize": [2.0], "interact": [2.0]}


@dataclass
class JobConfig:
    subcommand: str
    input: str | None = None
    n_values: list = field(default_factory=lambda: [3.0])
    kernel_size: int | None = None
    kind: str = "monopole"
    engine: str = "auto"
    mode: str = "binary"
    threshold: float = 128.0
    thresholds: str | None = None
    growth_pct: float = 0.05
    smoothing: int = 1
    passes: int = 3
    output_dir: str = "emk_out"

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise InvalidInputError(f"unknown subcommand {self.subcommand!r}")
        if not self.n_values:
            raise InvalidInputError("at least one n value is required")
        if not 0.0 <= self.growth_pct <= 1.0:
            raise InvalidInputError("growth_pct must lie in [0, 1]")
        if self.subcommand == "kernel":
            if self.kernel_size is None:
                raise InvalidInputError("the kernel subcommand needs --size")
        elif self.input is None:
            raise InvalidInputError(f"the {self.subcommand} subcommand needs an input file")
        return self


def _tag(n):
    return f"n{n:g}".replace(".", "p")


def _load(cfg):
    return load_charge_image(cfg.input, mode=cfg.mode, threshold=cfg.threshold)


def _save_pair(grid, out, stem, outputs, render="png_diverging"):
    outputs.append(str(save_grid(grid, out / f"{stem}.emk", "raw").name))
    if grid.ndim <= 3:
        ext = "png" if render == "png_diverging" else "pgm"
        outputs.append(str(save_grid(grid, out / f"{stem}.{ext}", render).name))


def _run_kernel(cfg, out, outputs):
    for n in cfg.n_values:
        size = (cfg.kernel_size, cfg.kernel_size)
        kernel = build_kernel(size, n, cfg.kind, size=cfg.kernel_size)
        values = kernel.values
        if np.iscomplexobj(values):
            _save_pair(values.real, out, f"kernel_{cfg.kind}_{_tag(n)}_real", outputs, "pgm_norm")
            _save_pair(values.imag, out, f"kernel_{cfg.kind}_{_tag(n)}_imag", outputs, "pgm_norm")
        else:
            _save_pair(values, out, f"kernel_{cfg.kind}_{_tag(n)}", outputs, "pgm_norm")


def _run_potential(cfg, out, outputs, with_field=False):
    image = _load(cfg)
    for n in cfg.n_values:
        V = electric_potential(image, n, kernel_size=cfg.kernel_size, engine=cfg.engine)
        _save_pair(V, out, f"potential_{_tag(n)}", outputs)
        if with_field:
            fmap = field_from_potential(V)
            for axis, comp in zip("xyz", fmap.components):
                _save_pair(comp, out, f"field_{axis}_{_tag(n)}", outputs)
            _save_pair(fmap.magnitude, out, f"field_mag_{_tag(n)}", outputs, "pgm_norm")


def _run_roi(cfg, out, outputs):
    image = _load(cfg)
    mask = image > 0
    table = ThresholdTable.from_json(cfg.thresholds) if cfg.thresholds else DEFAULT_THRESHOLDS
    for n in cfg.n_values:
        contour, V, E_mag = contour_fields(mask, n, cfg.kernel_size, cfg.engine)
        regions = classify_regions(V, E_mag, contour, table, cfg.growth_pct)
        report = {
            "schema_version": REPORT_VERSION,
            "n": n,
            "growth_pct": cfg.growth_pct,
            "contour_pixels": int(contour.sum()),
            "thresholds": {k: list(v) for k, v in table.items()},
            "regions": region_report(regions, contour),
        }
        name = f"regions_{_tag(n)}.json"
        dump_json(report, out / name)
        outputs.append(name)
        if mask.ndim == 2:
            overlay = f"regions_{_tag(n)}.png"
            save_overlay(mask, regions, out / overlay)
            outputs.append(overlay)


def _prepare_strokes(cfg):
    image = _load(cfg)
    if image.ndim != 2:
        raise InvalidInputError("stroke analysis needs a 2D image")
    strokes = split_substrokes(thin(image != 0))
    orient = stroke_orientation(strokes, smoothing_radius=cfg.smoothing, passes=cfg.passes)
    return strokes, orient


def _run_stroke(cfg, out, outputs):
    strokes, orient = _prepare_strokes(cfg)
    write_orientation_csv(orientation_rows(strokes, orient), out / "orientation.csv")
    outputs.append("orientation.csv")
    _save_pair(strokes.labels.astype(np.float64), out, "substrokes", outputs, "pgm_norm")


def _run_magnetize(cfg, out, outputs):
    strokes, orient = _prepare_strokes(cfg)
    for n in cfg.n_values:
        result = magnetize_stroke(strokes, orient, n=n, kernel_size=cfg.kernel_size, engine=cfg.engine)
        _save_pair(result.V_perp, out, f"magnetic_perp_{_tag(n)}", outputs)
        _save_pair(result.V_par, out, f"magnetic_par_{_tag(n)}", outputs)


def _run_interact(cfg, out, outputs):
    strokes, orient = _prepare_strokes(cfg)
    for n in cfg.n_values:
        pots = substroke_potentials(strokes, orient, n, cfg.kernel_size, cfg.engine)
        assignments = {
            "repulsion": resolve_repulsion(strokes, orient, n, potentials=pots),
            "attraction": resolve_attraction(strokes, orient, n, potentials=pots),
        }
        summary = {"schema_version": REPORT_VERSION, "n": n, "substrokes": strokes.count}
        for name, flips in assignments.items():
            V = magnetize_stroke(strokes, orient, flips, n, cfg.kernel_size, cfg.engine).V_perp
            E = field_from_potential(V).magnitude
            _save_pair(V, out, f"{name}_potential_{_tag(n)}", outputs)
            _save_pair(np.sqrt(E), out, f"{name}_field_sqrt_{_tag(n)}", outputs, "pgm_norm")
            summary[name] = {"flips": flips, "l2_norm": float(np.linalg.norm(V))}
        dump_json(summary, out / f"interaction_{_tag(n)}.json")
        outputs.append(f"interaction_{_tag(n)}.json")


_RUNNERS = {
    "kernel": _run_kernel,
    "potential": _run_potential,
    "field": lambda cfg, out, outputs: _run_potential(cfg, out, outputs, with_field=True),
    "roi": _run_roi,
    "stroke": _run_stroke,
    "magnetize": _run_magnetize,
    "interact": _run_interact,
}


def run_job(config):
    """Run one subcommand; returns a process exit code."""
    try:
        config.validate()
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        outputs = []
        _RUNNERS[config.subcommand](config, out, outputs)
        manifest = {
            "schema_version": REPORT_VERSION,
            "emkernels": __version__,
            "config": asdict(config),
            "inputs": {config.input: file_sha256(config.input)} if config.input else {},
            "outputs": sorted(outputs),
        }
        dump_json(manifest, out / "manifest.json")
    except (EMKernelError, OSError) as exc:
        print(f"emkernels {config.subcommand}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def _kernel_size(text):
    if text == "auto":
        return None
    value = int(text)
    if value < 1 or value % 2 == 0:
        raise argparse.ArgumentTypeError("kernel size must be a positive odd integer or 'auto'")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="emkernels",
        description="Electromagnetic potential/field kernels for shape and stroke analysis.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", dest="n_values", type=float, nargs="+", default=None,
                        help="dimension exponent(s); a list runs one job per value")
    common.add_argument("--kernel-size", "--size", dest="kernel_size", type=_kernel_size,
                        default=None, help="odd kernel extent or 'auto' (2N+1)")
    common.add_argument("--engine", choices=("auto", "fft", "direct"), default="auto")
    common.add_argument("-o", "--output-dir", default="emk_out")

    image = argparse.ArgumentParser(add_help=False)
    image.add_argument("input", help="PGM/PNG image or EMK1 dump")
    image.add_argument("--mode", choices=("binary", "signed", "grayscale"), default="binary")
    image.add_argument("--threshold", type=float, default=128.0,
                       help="binary mode cut-off on the 0-255 scale")

    stroke = argparse.ArgumentParser(add_help=False)
    stroke.add_argument("--smoothing", type=int, default=1, help="moving-average half-width")
    stroke.add_argument("--passes", type=int, default=3, help="number of smoothing passes")

    k = sub.add_parser("kernel", parents=[common], help="export a kernel")
    k.add_argument("--kind", choices=("monopole", "dipole_x", "dipole_y", "complex_dipole"),
                   default="monopole")
    sub.add_parser("potential", parents=[common, image], help="electric potential of an image")
    sub.add_parser("field", parents=[common, image], help="potential plus field components")
    roi = sub.add_parser("roi", parents=[common, image], help="contour regions of interest")
    roi.add_argument("--thresholds", help="JSON percentile table (defaults to the built-in table)")
    roi.add_argument("--growth-pct", type=float, default=0.05)
    sub.add_parser("stroke", parents=[common, image, stroke], help="stroke orientation CSV")
    sub.add_parser("magnetize", parents=[common, image, stroke], help="perpendicular magnetization")
    sub.add_parser("interact", parents=[common, image, stroke],
                   help="attraction and repulsion potentials")
    return parser


def config_from_args(args):
    values = vars(args).copy()
    values.pop("verbose", None)
    if values.get("n_values") is None:
        values["n_values"] = list(_DEFAULT_N.get(args.subcommand, [3.0]))
    known = JobConfig.__dataclass_fields__
    return JobConfig(**{k: v for k, v in values.items() if k in known})


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run_job(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
