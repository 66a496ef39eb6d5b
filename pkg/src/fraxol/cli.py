"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration or system spec, 3 solver did
not converge, 4 certificate inconclusive under ``--require-certified``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from fraxol import certificates as cert
from fraxol.exterior import ConstantData, exterior_from_dict
from fraxol.geometry import BallDomain, ball_volume
from fraxol.green import solve_nonhomogeneous, spectral_radius, sup_norm_G1
from fraxol.kernel import torsion_closed_form
from fraxol.model import Box, DiscreteSystem, SpecError, SystemSpec, cached_grid, cached_operator
from fraxol.presets import PRESETS
from fraxol.report import csv_text, json_text, node_header, node_rows
from fraxol.solver import SolveReport, multistart_search, newton_solve, picard_solve, verify_solution

EXIT_OK, EXIT_CONFIG, EXIT_NO_CONVERGENCE, EXIT_INCONCLUSIVE = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Parsed command line; ``options`` holds the subcommand-specific flags."""

    subcommand: str
    spec_path: Optional[Path] = None
    resolution: Optional[int] = None
    tol: float = 1e-8
    seed: int = 0
    out: Optional[Path] = None
    options: dict = field(default_factory=dict)


class _Output:
    """Writes named reports into the output directory, or to stdout without one."""

    def __init__(self, out: Optional[Path]):
        self.out = out
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)

    def emit(self, name: str, text: str) -> None:
        if self.out is None:
            sys.stdout.write(text)
        else:
            path = self.out / name
            try:
                path.write_text(text, encoding="utf-8")
            except OSError as exc:
                raise OSError(f"cannot write {path}: {exc.strerror}") from exc


# --------------------------------------------------------------- subcommands


def _domain(opts) -> BallDomain:
    return BallDomain(opts["dim"], opts["radius"])


def _cmd_grid_info(cfg: RunConfig, out: _Output) -> int:
    dom = _domain(cfg.options)
    grid = cached_grid(dom, cfg.resolution or 32)
    out.emit("grid.csv", csv_text(node_header(dom.dim, ["weight"]), node_rows(grid.nodes, grid.weights)))
    print(f"# nodes={grid.size} weight_sum={grid.weights.sum():.12g} volume={ball_volume(dom):.12g}", file=sys.stderr)
    return EXIT_OK


def _cmd_torsion(cfg: RunConfig, out: _Output) -> int:
    dom = _domain(cfg.options)
    radii = np.linspace(0.0, dom.radius, cfg.options["points"])
    pts = np.zeros((len(radii), dom.dim))
    pts[:, 0] = radii
    vals = torsion_closed_form(pts, dom, cfg.options["s"])
    out.emit("torsion.csv", csv_text(["radius", "value"], zip(radii, vals)))
    return EXIT_OK


def _cmd_spectrum(cfg: RunConfig, out: _Output) -> int:
    dom, s = _domain(cfg.options), cfg.options["s"]
    res = cfg.resolution or 32
    op = cached_operator(dom, res, s)
    pair = spectral_radius(op, tol=cfg.options["eig_tol"])
    out.emit("spectrum.json", json_text({
        "s": s,
        "resolution": res,
        "spectral_radius": pair.spectral_radius,
        "mu": pair.mu,
        "residual": pair.residual,
        "sup_norm_G1": sup_norm_G1(op),
    }))
    return EXIT_OK


def _cmd_harmonic(cfg: RunConfig, out: _Output) -> int:
    dom, s = _domain(cfg.options), cfg.options["s"]
    zeta = cfg.options["zeta"]
    op = cached_operator(dom, cfg.resolution or 32, s)
    vals = solve_nonhomogeneous(op, cfg.options["rhs"], zeta)
    out.emit("harmonic.csv", csv_text(node_header(dom.dim, ["u"]), node_rows(op.grid.nodes, vals)))
    return EXIT_OK


def _load_spec(cfg: RunConfig) -> SystemSpec:
    if cfg.spec_path is None:
        raise ConfigError("a system spec file is required")
    try:
        text = Path(cfg.spec_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read spec {cfg.spec_path}: {exc.strerror}") from None
    spec = SystemSpec.from_json(text)
    if cfg.resolution is not None:
        spec = spec.with_parameters(resolution=cfg.resolution)
    return spec


def _box(spec: SystemSpec, opts) -> Box:
    rho = opts.get("box") or spec.box
    if rho is None:
        raise ConfigError("no box: pass --box or add 'box' to the spec")
    if len(rho) != spec.m:
        raise ConfigError(f"--box needs {spec.m} values")
    return Box(tuple(rho))


def _report_dict(system: DiscreteSystem, rep: SolveReport, box: Optional[Box]) -> dict:
    ok, diag = verify_solution(system, rep.final_state, rep.tol, box)
    return {
        "method": rep.method,
        "start": rep.start,
        "converged": rep.converged,
        "residual": rep.residual,
        "iterations": rep.iterations,
        "tol": rep.tol,
        "sup_norm": rep.sup_norm,
        "sup_norms": diag["sup_norms"],
        "exterior": rep.final_state.exterior,
        "verified": ok,
        "nonzero_positive": diag["nonzero_positive"],
        "message": rep.message,
    }


def _solution_csv(system: DiscreteSystem, rep: SolveReport) -> str:
    names = [f"u{k}" for k in range(1, system.m + 1)]
    return csv_text(node_header(system.grid.domain.dim, names),
                    node_rows(system.grid.nodes, *rep.final_state.interior))


def _solve(system: DiscreteSystem, cfg: RunConfig, out: _Output, box: Optional[Box]) -> int:
    opts = cfg.options
    method = opts.get("method", "picard")
    if method == "multistart":
        if box is None:
            raise ConfigError("multistart needs a box")
        reps = multistart_search(system, box, opts.get("n_starts", 20), cfg.seed, tol=cfg.tol,
                                 damping=opts.get("damping", 0.5), max_iter=opts.get("max_iter", 2000))
        out.emit("solve_report.json", json_text({
            "method": "multistart",
            "n_starts": opts.get("n_starts", 20),
            "seed": cfg.seed,
            "solutions": [_report_dict(system, r, box) for r in reps],
        }))
        if reps:
            out.emit("solution.csv", _solution_csv(system, reps[-1]))
        return EXIT_OK if reps else EXIT_NO_CONVERGENCE
    if opts.get("init", "corner") == "corner":
        if box is None:
            raise ConfigError("starting from the box corner needs a box")
        init = system.constant_state(box.rho)
    else:
        init = system.zero_state()
    if method == "newton":
        rep = newton_solve(system, init, cfg.tol, opts.get("max_iter", 50))
    else:
        rep = picard_solve(system, init, opts.get("damping", 0.5), cfg.tol, opts.get("max_iter", 2000))
    out.emit("solve_report.json", json_text(_report_dict(system, rep, box)))
    out.emit("solution.csv", _solution_csv(system, rep))
    return EXIT_OK if rep.converged else EXIT_NO_CONVERGENCE


def _cmd_solve(cfg: RunConfig, out: _Output) -> int:
    spec = _load_spec(cfg)
    box = Box(spec.box) if spec.box is not None or cfg.options.get("box") else None
    if cfg.options.get("box"):
        box = _box(spec, cfg.options)
    return _solve(DiscreteSystem.build(spec), cfg, out, box)


def _certify(system: DiscreteSystem, cfg: RunConfig, out: _Output, box: Box) -> int:
    opts = cfg.options
    kwargs = {}
    if opts.get("mode", "existence") == "existence":
        for key in ("delta", "rho0"):
            if opts.get(key) is not None:
                kwargs[key] = opts[key]
        if opts.get("i0") is not None:
            kwargs["i0"] = opts["i0"] - 1
    verdict = cert.certify(system, opts.get("mode", "existence"), box, opts.get("norms", "analytic"), **kwargs)
    out.emit("verdict.json", json_text(verdict.to_dict()))
    print(f"# verdict: {verdict.outcome} (min slack {verdict.min_slack:.6g})", file=sys.stderr)
    if opts.get("require_certified") and not verdict.certified:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_certify(cfg: RunConfig, out: _Output) -> int:
    spec = _load_spec(cfg)
    return _certify(DiscreteSystem.build(spec), cfg, out, _box(spec, cfg.options))


def _parse_axis(text: str):
    try:
        name, rng = text.split("=", 1)
        parts = rng.split(":")
        if len(parts) == 3:
            values = np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
        else:
            values = [float(v) for v in rng.split(",")]
    except ValueError:
        raise ConfigError(f"bad axis {text!r}; use NAME=start:stop:count or NAME=v1,v2,...") from None
    return name.strip(), [float(v) for v in values]


def _cmd_scan(cfg: RunConfig, out: _Output) -> int:
    spec = _load_spec(cfg)
    axes = dict(_parse_axis(a) for a in cfg.options.get("axis") or [])
    rows = cert.feasible_region_scan(DiscreteSystem.build(spec), axes, cfg.options.get("mode", "existence"),
                                     _box(spec, cfg.options), cfg.options.get("norms", "analytic"))
    m = spec.m
    header = [f"λ{k}" for k in range(1, m + 1)] + [f"η{k}" for k in range(1, m + 1)] + ["verdict", "min_slack"]
    out.emit("scan.csv", csv_text(header, ([*r.lambdas, *r.etas, r.verdict, r.min_slack] for r in rows)))
    return EXIT_OK


def _cmd_example(cfg: RunConfig, out: _Output) -> int:
    opts = cfg.options
    which = opts["which"]
    build = PRESETS[which]
    spec = build(resolution=cfg.resolution or 32)
    lam = [opts.get(f"lambda{k}") for k in (1, 2)]
    eta = [opts.get(f"eta{k}") for k in (1, 2)]
    spec = spec.with_parameters([l if l is not None else d for l, d in zip(lam, spec.lambdas)],
                                [e if e is not None else d for e, d in zip(eta, spec.etas)])
    out.emit("spec.json", spec.to_json())
    system = DiscreteSystem.build(spec)
    box = _box(spec, opts)
    code = EXIT_OK
    if opts.get("certify"):
        opts.setdefault("mode", "existence" if which == "existence" else "nonexistence")
        code = max(code, _certify(system, cfg, out, box))
    if opts.get("solve"):
        opts.setdefault("method", "picard" if which == "existence" else "multistart")
        code = max(code, _solve(system, cfg, out, box))
    return code


COMMANDS = {
    "grid-info": _cmd_grid_info,
    "torsion": _cmd_torsion,
    "spectrum": _cmd_spectrum,
    "harmonic": _cmd_harmonic,
    "solve": _cmd_solve,
    "certify": _cmd_certify,
    "scan": _cmd_scan,
    "example": _cmd_example,
}


def run(cfg: RunConfig) -> int:
    """Dispatch one subcommand and map failures to exit codes."""
    try:
        out = _Output(cfg.out)
        return COMMANDS[cfg.subcommand](cfg, out)
    except (ConfigError, SpecError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


# --------------------------------------------------------------------- parsing


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _zeta(text: str):
    try:
        return exterior_from_dict(json.loads(text))
    except (json.JSONDecodeError, ValueError, AttributeError) as exc:
        raise argparse.ArgumentTypeError(f"bad exterior profile {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fraxol", description="Fractional Dirichlet systems on balls: "
                                "Green operators, fixed-point solvers and existence certificates.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, spec=False):
        sp.add_argument("--resolution", type=int, help="grid resolution (cells along a diameter)")
        sp.add_argument("--out", type=Path, help="directory for report files (default: stdout)")
        if spec:
            sp.add_argument("spec", type=Path, help="system spec JSON file")
            sp.add_argument("--box", type=_floats, help="box radii rho, comma-separated")

    def geometry(sp, with_s=True):
        sp.add_argument("--dim", type=int, default=2)
        sp.add_argument("--radius", type=float, default=1.0)
        if with_s:
            sp.add_argument("--s", type=float, required=True, help="fractional order in (0, 1)")

    def solving(sp):
        sp.add_argument("--method", choices=["picard", "newton", "multistart"])
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--damping", type=float, default=0.5)
        sp.add_argument("--max-iter", type=int)
        sp.add_argument("--n-starts", type=int, default=20)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--init", choices=["corner", "zero"], default="corner")

    def certifying(sp, mode_default=None):
        sp.add_argument("--mode", choices=["existence", "nonexistence"], default=mode_default)
        sp.add_argument("--norms", choices=["analytic", "discrete"], default="analytic")
        sp.add_argument("--delta", type=float)
        sp.add_argument("--rho0", type=float)
        sp.add_argument("--i0", type=int, help="distinguished component (1-based)")
        sp.add_argument("--require-certified", action="store_true")

    sp = sub.add_parser("grid-info", help="dump quadrature nodes and weights as CSV")
    geometry(sp, with_s=False)
    common(sp)
    sp = sub.add_parser("torsion", help="closed-form torsion function along a radius")
    geometry(sp)
    sp.add_argument("--points", type=int, default=11)
    common(sp)
    sp = sub.add_parser("spectrum", help="principal eigenvalue of the discrete Green operator")
    geometry(sp)
    sp.add_argument("--eig-tol", type=float, default=1e-10)
    common(sp)
    sp = sub.add_parser("harmonic", help="solve (-Delta)^s u = f in the ball with exterior data zeta")
    geometry(sp)
    sp.add_argument("--zeta", type=_zeta, default=ConstantData(1.0), help="exterior profile as JSON")
    sp.add_argument("--rhs", type=float, default=0.0, help="constant right-hand side f")
    common(sp)
    sp = sub.add_parser("solve", help="find a fixed point of a system")
    common(sp, spec=True)
    solving(sp)
    sp = sub.add_parser("certify", help="check the existence or non-existence criterion")
    common(sp, spec=True)
    certifying(sp, "existence")
    sp = sub.add_parser("scan", help="tabulate verdicts over a parameter grid")
    common(sp, spec=True)
    certifying(sp, "existence")
    sp.add_argument("--axis", action="append", help="NAME=start:stop:count or NAME=v1,v2 (NAME like lambda1)")
    sp = sub.add_parser("example", help="run one of the two built-in examples")
    sp.add_argument("which", choices=sorted(PRESETS))
    for name in ("lambda1", "lambda2", "eta1", "eta2"):
        sp.add_argument(f"--{name}", type=float)
    sp.add_argument("--box", type=_floats)
    sp.add_argument("--solve", action="store_true")
    sp.add_argument("--certify", action="store_true")
    common(sp)
    solving(sp)
    certifying(sp)
    return p


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    cfg = RunConfig(
        subcommand=args.pop("subcommand"),
        spec_path=args.pop("spec", None),
        resolution=args.pop("resolution", None),
        tol=args.pop("tol", 1e-8),
        seed=args.pop("seed", 0),
        out=args.pop("out", None),
    )
    cfg.options = {k: v for k, v in args.items() if v is not None}
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        # argparse usage errors exit with 2, matching the configuration error code
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
