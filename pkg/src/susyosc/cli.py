"""Command-line front end: figure data and verification reports.

Exit codes: 0 success, 1 a verification ran but failed, 2 configuration
error, 3 numerical failure.  Errors are reported as JSON on stderr.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np
import scipy

from . import __version__
from .coherent import (CoherentState, MeasureSpec, basis_block, density, mean_energy, measure_moments,
                       overlap, resolution_of_identity)
from .errors import ConfigError, SusyOscError
from .grid import DEFAULT_BOUNDS, GRID_POINTS_ENV, default_points, uniform_grid
from .ladder import EPS_SINGLET, LadderPair, apply_ladder, kernel_basis, kernel_residual, kernel_tail_report, pha_check
from .phase_space import PoissonState, mandel_q, wigner_grid, wigner_marginals
from .susy import equivalence_report, h2_transform

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
MIN_POINTS = 101

# thresholds used by ladder-check
COMMUTATOR_TOL = 1e-5
BRACKET_TOL = 1e-6
KERNEL_TOL = 1e-5


@dataclass
class RunConfig:
    eps: float = 0.0
    gamma: float = 2.0
    nu: int = -2
    z_re: float = 10.0
    z_im: float = 0.0
    nmax: int = 12
    grid_min: float = DEFAULT_BOUNDS[0]
    grid_max: float = DEFAULT_BOUNDS[1]
    grid_points: int = None
    t: float = 0.0
    out: str = None
    format: str = "csv"

    @property
    def z(self):
        return complex(self.z_re, self.z_im)

    def grid(self):
        return uniform_grid(self.grid_min, self.grid_max, self.grid_points)

    def validate(self):
        if not -1.5 < self.eps < 0.5:
            raise ConfigError(f"eps must lie in (-3/2, 1/2), got {self.eps}")
        if self.eps == -0.5:
            raise ConfigError("eps = -1/2 is excluded (integer Hermite order)")
        if not self.gamma > 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.nu not in (-2, 1):
            raise ConfigError(f"nu must be -2 or 1, got {self.nu}")
        if self.grid_points is None:
            self.grid_points = default_points()
        if self.grid_points < MIN_POINTS:
            raise ConfigError(f"grid points must be >= {MIN_POINTS}")
        if not self.grid_max > self.grid_min:
            raise ConfigError("grid max must exceed grid min")
        if self.nmax < 1:
            raise ConfigError("nmax must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        return self


_CONFIG_TYPES = {f.name: f.type for f in fields(RunConfig)}


def read_config_file(path):
    """key = value lines; '#' starts a comment; dashes in keys are accepted."""
    out = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key, value):
    kind = _CONFIG_TYPES[key]
    try:
        if kind in (float, "float"):
            return float(value)
        if kind in (int, "int"):
            return int(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return value


def build_config(args):
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for key in _CONFIG_TYPES:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    return cfg.validate()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def json_text(payload):
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def metadata(cfg, command):
    return {
        "command": command,
        "parameters": asdict(cfg),
        "versions": {"susyosc": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
    }


def emit(cfg, command, header, rows, report, name=None):
    """Write one dataset as CSV or JSON to cfg.out (a directory when ``name`` is set)."""
    if cfg.format == "csv":
        text = csv_text(header, rows)
    else:
        text = json_text({"meta": metadata(cfg, command), "columns": header,
                          "rows": [list(r) for r in rows], "report": report})
    if cfg.out is None:
        sys.stdout.write(text)
        return None
    path = cfg.out
    if name is not None:
        os.makedirs(cfg.out, exist_ok=True)
        path = os.path.join(cfg.out, f"{name}.{cfg.format}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def summary(payload):
    sys.stdout.write(json_text(payload))


# commands

def cmd_potential(cfg):
    x = cfg.grid()
    rep = equivalence_report(cfg.eps, cfg.gamma, x)
    rows = zip(x, rep.v1, rep.v2, rep.v2 - rep.v1)
    report = {
        "sup_deviation": rep.sup_deviation,
        "omega_deviation": rep.omega_deviation,
        "omega_samples": rep.omega_samples(),
        "phi_relation_residual": rep.phi_relation_residual,
        "annihilation_relation_residual": rep.annihilation_relation_residual,
    }
    emit(cfg, "potential", ["x", "V1", "V2", "diff"], rows, report)
    if cfg.out is not None:
        summary(report)
    return EXIT_OK


def ladder_report(pair):
    states = [pair.state(-2, n) for n in range(3)] + [pair.state(1, n) for n in range(3)]
    pha = pha_check(pair, states)
    kernel = []
    for st, physical in kernel_basis(pair):
        kernel.append({"state": st.label, "energy": st.energy, "physical": physical,
                       "lower_residual": kernel_residual(pair, st)})
    spectral = {
        "lower_coefficients_on_kernel": [apply_ladder(pair, "lower", pair.state(nu, 0))[0] for nu in (-2, 1)]
        + [apply_ladder(pair, "lower", pair.state(EPS_SINGLET))[0]],
        "raise_energy_steps": [apply_ladder(pair, "raise", s)[1].energy - s.energy for s in states],
    }
    physical = [k for k in kernel if k["physical"]]
    passed = (pha["max_commutator_residual"] < COMMUTATOR_TOL
              and pha["max_bracket_rel_error"] < BRACKET_TOL
              and all(k["lower_residual"] < KERNEL_TOL for k in physical)
              and all(c == 0.0 for c in spectral["lower_coefficients_on_kernel"])
              and all(s == 2.0 for s in spectral["raise_energy_steps"]))
    return {
        "pass": bool(passed),
        "thresholds": {"commutator": COMMUTATOR_TOL, "bracket": BRACKET_TOL, "kernel": KERNEL_TOL},
        "pha": pha,
        "kernel": kernel,
        "formal_kernel_tail": kernel_tail_report(pair),
        "spectral": spectral,
    }


def cmd_ladder_check(cfg, corrupt=False):
    pair = LadderPair(cfg.eps, cfg.gamma)
    if corrupt:
        # test hook: second transform built with a different gamma, so L+- stop being ladders
        pair.t2 = h2_transform(cfg.eps, cfg.gamma * 1.5)
    report = ladder_report(pair)
    text = json_text({"meta": metadata(cfg, "ladder-check"), "report": report})
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        summary({"pass": report["pass"]})
    return EXIT_OK if report["pass"] else EXIT_FAILED


def cmd_coherent(cfg, frames=16, zmax=100.0, zsteps=201, surface_half=8.0, surface_points=41):
    z = cfg.z
    state = CoherentState(cfg.nu, z, cfg.eps, cfg.gamma)
    # overlap modulus surface around z
    re = np.linspace(z.real - surface_half, z.real + surface_half, surface_points)
    im = np.linspace(z.imag - surface_half, z.imag + surface_half, surface_points)
    rows = []
    for a in re:
        for b in im:
            other = CoherentState(cfg.nu, complex(a, b), cfg.eps, cfg.gamma)
            rows.append((a, b, abs(overlap(other, state))))
    written = {"overlap": emit(cfg, "coherent", ["re_z", "im_z", "overlap_mod"], rows, {"z": z}, "overlap")}

    radii = np.linspace(0.0, zmax, zsteps)
    energies = [mean_energy(CoherentState(cfg.nu, r, cfg.eps, cfg.gamma)) for r in radii]
    rows = [(r, e.direct, e.closed_form_printed, e.closed_form_corrected) for r, e in zip(radii, energies)]
    written["mean_energy"] = emit(cfg, "coherent", ["|z|", "mean_energy", "closed_form_printed", "closed_form_corrected"],
                                  rows, {}, "mean_energy")

    x = cfg.grid()
    block = basis_block(state, x, cfg.nmax)
    times = np.linspace(0.0, math.pi, frames + 1)
    rows = []
    for t in times:
        rho = density(state, x, t, cfg.nmax, block)
        rows.extend((xi, t, ri) for xi, ri in zip(x, rho))
    written["density"] = emit(cfg, "coherent", ["x", "t", "rho"], rows, {"nmax": cfg.nmax}, "density")
    if cfg.out is not None:
        summary({"files": written, "mean_energy_at_z": mean_energy(state).direct})
    return EXIT_OK


def _wigner_state(cfg, which):
    pair = LadderPair(cfg.eps, cfg.gamma)
    if which == "coherent":
        return CoherentState(cfg.nu, cfg.z, cfg.eps, cfg.gamma)
    if which == "ground":
        return pair.basis_function(-2, 0)
    if which == "eps":
        return pair.basis_function(EPS_SINGLET)
    if which == "zero":
        return pair.basis_function(-2, 1)
    raise ConfigError(f"unknown state {which!r}")


def cmd_wigner(cfg, which="coherent", phase_points=301):
    state = _wigner_state(cfg, which)
    lo, hi = (-15.0, 15.0) if which == "coherent" else (-6.0, 6.0)
    axis = uniform_grid(lo, hi, phase_points)
    grid = wigner_grid(state, axis, axis, cfg.t, cfg.nmax)
    report = wigner_marginals(grid, state, cfg.t, cfg.nmax)
    report["state"] = which
    emit(cfg, "wigner", ["x", "p", "W"], grid.rows(), report)
    if cfg.out is not None:
        summary(report)
    return EXIT_OK


def cmd_mandel(cfg, zmax=100.0, zsteps=201):
    radii = np.linspace(0.0, zmax, zsteps)
    rows = [(r, mandel_q(CoherentState(cfg.nu, r, cfg.eps, cfg.gamma), limit=True)) for r in radii]
    report = {"max_q_on_1_to_max": max(q for r, q in rows if r >= 1.0),
              "poisson_control_q": mandel_q(PoissonState(3.0))}
    emit(cfg, "mandel", ["|z|", "Q"], rows, report)
    if cfg.out is not None:
        summary(report)
    return EXIT_OK


def cmd_measure(cfg, s_max=5, identity=True):
    nu = cfg.nu
    spec = MeasureSpec(nu, cfg.eps)
    rows = measure_moments(spec, s_max)
    ys = np.geomspace(1e-3, 1e4, 50)
    fvals = [float(spec.f(y)) for y in ys]
    report = {"meijer_params": spec.meijer_params, "f_min_sampled": min(fvals),
              "max_rel_error": max(r[3] for r in rows)}
    if identity:
        block = resolution_of_identity(nu, cfg.eps)
        report["identity_block_max_error"] = float(np.abs(block - np.eye(block.shape[0])).max())
    emit(cfg, "measure", ["s", "quadrature", "gamma_product", "rel_error"], rows, report)
    if cfg.out is not None:
        summary(report)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(json.dumps({"error": "ConfigError", "message": message}) + "\n")
        raise SystemExit(EXIT_CONFIG)


def _common(p):
    p.add_argument("--eps", type=float, help="position of the added level, in (-3/2, 1/2)")
    p.add_argument("--gamma", type=float, help="seed mixing parameter (> 0)")
    p.add_argument("--nu", type=int, help="ladder label: -2 or 1")
    p.add_argument("--z-re", dest="z_re", type=float)
    p.add_argument("--z-im", dest="z_im", type=float)
    p.add_argument("--nmax", type=int, help="rungs kept in densities and Wigner functions")
    p.add_argument("--grid-min", dest="grid_min", type=float)
    p.add_argument("--grid-max", dest="grid_max", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int,
                   help=f"grid points (default from {GRID_POINTS_ENV} or 2001)")
    p.add_argument("--t", type=float, help="time")
    p.add_argument("--out", help="output file (directory for 'coherent'); stdout when omitted")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--config", help="key=value file; flags override it")


def build_parser():
    parser = _Parser(prog="susyosc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("potential", help="partner potentials of both transformations and their difference")
    _common(p)
    p = sub.add_parser("ladder-check", help="algebra and kernel checks of the ladder operators")
    _common(p)
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p = sub.add_parser("coherent", help="overlap surface, mean-energy sweep and density frames")
    _common(p)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--z-max", dest="z_max", type=float, default=100.0)
    p.add_argument("--z-steps", dest="z_steps", type=int, default=201)
    p = sub.add_parser("wigner", help="Wigner function on a phase-space grid")
    _common(p)
    p.add_argument("--state", choices=("coherent", "ground", "eps", "zero"), default="coherent")
    p.add_argument("--phase-points", dest="phase_points", type=int, default=301)
    p = sub.add_parser("mandel", help="Mandel Q sweep over |z|")
    _common(p)
    p.add_argument("--z-max", dest="z_max", type=float, default=100.0)
    p.add_argument("--z-steps", dest="z_steps", type=int, default=201)
    p = sub.add_parser("measure", help="moments of the completeness measure")
    _common(p)
    p.add_argument("--s-max", dest="s_max", type=int, default=5)
    p.add_argument("--no-identity", dest="identity", action="store_false")
    return parser


def run(args):
    cfg = build_config(args)
    cmd = args.command
    if cmd == "potential":
        return cmd_potential(cfg)
    if cmd == "ladder-check":
        return cmd_ladder_check(cfg, args.corrupt)
    if cmd == "coherent":
        return cmd_coherent(cfg, args.frames, args.z_max, args.z_steps)
    if cmd == "wigner":
        return cmd_wigner(cfg, args.state, args.phase_points)
    if cmd == "mandel":
        return cmd_mandel(cfg, args.z_max, args.z_steps)
    if cmd == "measure":
        return cmd_measure(cfg, args.s_max, args.identity)
    raise ConfigError(f"unknown command {cmd}")


def _fail(code, exc):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, SusyOscError) and not isinstance(exc, ConfigError):
            return _fail(EXIT_NUMERIC, exc)
        return _fail(EXIT_CONFIG, exc)
    except (SusyOscError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERIC, exc)
    except BrokenPipeError:
        # reader closed stdout early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
