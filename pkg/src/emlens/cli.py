"""Command-line front end: ``emlens {scan,profile,resonance,uncertainty,selfcheck}``."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import backend
from .config import FIG2, ConfigError, FieldConfig, build_config, load_config
from .grid import GridSpec, worker_pool
from .io import (DEFAULT_DECADES, RunManifest, Stopwatch, manifest_path, write_map_csv,
                 write_map_pgm, write_rows_csv)

QUANTITIES = ("jmag", "jz", "gsq", "paths", "semiclassical")


class UsageError(Exception):
    pass


def _e_sweep(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        out = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError("expected start:stop:steps, e.g. 20:400:12") from None
    if not (out[0] > 0 and out[1] > 0 and out[2] >= 1):
        raise argparse.ArgumentTypeError("start and stop must be positive and steps >= 1")
    return out


def _positive(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emlens", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("field configuration (defaults: 60.8 ueV, 116 eV/m, 1 mT)")
    g.add_argument("--config", help="key=value file with E_ueV, F_eV_per_m, B_T")
    g.add_argument("--E-ueV", dest="E_ueV", type=float)
    g.add_argument("--F-eV-m", dest="F_eV_per_m", type=float)
    g.add_argument("--B-T", dest="B_T", type=float)
    common.add_argument("--tol", type=_positive, default=1e-8, help="series truncation tolerance")

    gridp = argparse.ArgumentParser(add_help=False)
    gridp.add_argument("--rho-min", type=float)
    gridp.add_argument("--rho-max", type=float)
    gridp.add_argument("--z-min", type=float)
    gridp.add_argument("--z-max", type=float)
    gridp.add_argument("--n-rho", type=int, default=200)
    gridp.add_argument("--n-z", type=int, default=400)
    gridp.add_argument("--k", type=int, default=4, help="resonance used for the default window")

    s = sub.add_parser("scan", parents=[common, gridp], help="evaluate a map on a (rho, z) grid")
    s.add_argument("--quantity", choices=QUANTITIES, default="jmag")
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("csv", "pgm"), default="csv")
    s.add_argument("--decades", type=_positive, default=DEFAULT_DECADES)
    s.add_argument("--maslov", choices=("standard", "flipped", "no-crossing"), default="standard")

    pr = sub.add_parser("profile", parents=[common], help="current along a detector plane")
    pr.add_argument("--z", type=float, required=True, help="detector plane (m, < 0)")
    pr.add_argument("--rho-min", type=float, default=0.0)
    pr.add_argument("--rho-max", type=_positive, required=True)
    pr.add_argument("--n-rho", type=int, default=400)
    pr.add_argument("--out", required=True)

    r = sub.add_parser("resonance", parents=[common], help="geometry of the k-th focus")
    r.add_argument("--k", type=int, default=4)
    r.add_argument("--out", help="optional CSV of caustic samples theta,rho_m,z_m")

    u = sub.add_parser("uncertainty", parents=[common], help="sqrt(<rho^2><p^2>)/hbar versus energy")
    u.add_argument("--E-sweep", type=_e_sweep, required=True, help="start:stop:steps in ueV (log spaced)")
    u.add_argument("--k", type=int, default=4)
    u.add_argument("--out", required=True)

    c = sub.add_parser("selfcheck", parents=[common], help="run the invariant suites")
    c.add_argument("--quick", action="store_true", help="fewer sample points")
    return p


def resolve_config(args) -> FieldConfig:
    try:
        return _resolve_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _resolve_config(args) -> FieldConfig:
    vals = dict(FIG2)
    if args.config:
        cfg = load_config(args.config)
        vals = cfg.to_input_units()
    for key in ("E_ueV", "F_eV_per_m", "B_T"):
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    return build_config(vals["E_ueV"], vals["F_eV_per_m"], vals["B_T"])


def resolve_grid(cfg: FieldConfig, args) -> GridSpec:
    from .classical import resonance_info

    lo = dict(rho_min=args.rho_min, rho_max=args.rho_max, z_min=args.z_min, z_max=args.z_max)
    if any(v is None for v in lo.values()):
        if not cfg.has_field:
            raise UsageError("--rho-min/--rho-max/--z-min/--z-max are required when B = 0")
        if args.k < 1:
            raise UsageError("--k must be >= 1")
        info = resonance_info(cfg, args.k)
        default = dict(rho_min=0.0, rho_max=2e-6, z_min=info.z_k - 2e-3, z_max=info.z_k + 2e-3)
        lo = {k: default[k] if v is None else v for k, v in lo.items()}
    try:
        return GridSpec(n_rho=args.n_rho, n_z=args.n_z, **lo)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _manifest(args, argv, cfg, **kw) -> RunManifest:
    return RunManifest(command=args.command, argv=list(argv), config=cfg.to_input_units(),
                       tolerances={"series_tol": args.tol}, backend=backend.BACKEND, **kw)


def cmd_scan(args, argv) -> int:
    from .classical import path_count_map
    from .observables import quantum_current_map
    from .semiclassical import semiclassical_current_map

    cfg = resolve_config(args)
    grid = resolve_grid(cfg, args)
    if args.quantity in ("jz",) and args.format == "pgm":
        raise UsageError("jz is signed; write it as csv")
    clock = Stopwatch()
    with worker_pool() as pool:
        if args.quantity == "paths":
            fmap = path_count_map(cfg, grid, pool=pool)
        elif args.quantity == "semiclassical":
            fmap = semiclassical_current_map(cfg, grid, maslov=args.maslov, pool=pool)
        else:
            fmap = quantum_current_map(cfg, grid, args.quantity, tol=args.tol, pool=pool)
    if args.format == "csv":
        write_map_csv(fmap, args.out)
    else:
        write_map_pgm(fmap, args.out, args.decades)
    extra = {"quantity": args.quantity, "format": args.format, "mask_fraction": fmap.mask_fraction}
    if args.format == "pgm":
        extra.update(decades=args.decades, x_max=float(np.max(np.abs(fmap.values))))
    if args.quantity == "semiclassical":
        extra["maslov"] = args.maslov
    man = _manifest(args, argv, cfg, grid=grid.as_dict(), outputs=[str(args.out)],
                    wall_time_s=clock.elapsed, failures=fmap.failures, extra=extra)
    man.write(manifest_path(args.out))
    print(f"wrote {args.out} ({grid.n_z}x{grid.n_rho}, {fmap.failures} failed cells)")
    return 0


def cmd_profile(args, argv) -> int:
    from .observables import detector_profile

    cfg = resolve_config(args)
    if not args.z < 0:
        raise UsageError("--z must be negative (detector side)")
    if args.n_rho < 2 or not args.rho_max > args.rho_min >= 0:
        raise UsageError("need 0 <= rho-min < rho-max and n-rho >= 2")
    clock = Stopwatch()
    rho = np.linspace(args.rho_min, args.rho_max, args.n_rho)
    with worker_pool() as pool:
        prof = detector_profile(cfg, args.z, rho, tol=args.tol, pool=pool)
    write_rows_csv(args.out, ["rho_m", "jmag", "jz"], prof)
    failures = sum(1 for row in prof if not all(math.isfinite(v) for v in row))
    man = _manifest(args, argv, cfg, outputs=[str(args.out)], wall_time_s=clock.elapsed,
                    failures=failures, extra={"z_plane": args.z})
    man.write(manifest_path(args.out))
    print(f"wrote {args.out} ({len(prof)} points)")
    return 0


def cmd_resonance(args, argv) -> int:
    from .classical import caustic_curve, resonance_info

    cfg = resolve_config(args)
    if not cfg.has_field:
        raise UsageError("resonances need --B-T > 0")
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    info = resonance_info(cfg, args.k)
    print(f"k        = {info.k}")
    print(f"T_k      = {info.T_k:.6e} s")
    print(f"z_k      = {info.z_k:.6f} m")
    print(f"AC = E/F = {info.width_AC * 1e6:.4f} um")
    print(f"BD       = {info.length_BD * 1e3:.4f} mm")
    print(f"rho_max  = {info.rho_max * 1e6:.4f} um")
    print(f"overlap  = {info.overlapping}")
    if args.out:
        cc = caustic_curve(cfg, args.k)
        write_rows_csv(args.out, ["theta", "rho_m", "z_m"], cc.samples)
        man = _manifest(args, argv, cfg, outputs=[str(args.out)],
                        extra={"k": info.k, "T_k": info.T_k, "z_k": info.z_k, "AC": info.width_AC,
                               "BD": info.length_BD, "rho_max": info.rho_max,
                               "overlapping": info.overlapping})
        man.write(manifest_path(args.out))
    return 0


def cmd_uncertainty(args, argv) -> int:
    from .observables import FluxError, uncertainty_product

    base = resolve_config(args)
    if not base.has_field:
        raise UsageError("the uncertainty sweep needs --B-T > 0")
    start, stop, steps = args.E_sweep
    energies = np.geomspace(start, stop, steps) if steps > 1 else np.array([start])
    clock = Stopwatch()
    rows = []
    failures = 0
    units = base.to_input_units()
    for e in energies:
        cfg = build_config(float(e), units["F_eV_per_m"], units["B_T"])
        try:
            rep = uncertainty_product(cfg, args.k)
            rows.append((float(e), rep.product / cfg.hbar, rep.classical_product / cfg.hbar))
        except (FluxError, ValueError, ArithmeticError) as exc:
            failures += 1
            print(f"E = {e:.4g} ueV: {exc}", file=sys.stderr)
            rows.append((float(e), math.nan, math.nan))
    write_rows_csv(args.out, ["E_ueV", "product_over_hbar", "classical_over_hbar"], rows)
    man = _manifest(args, argv, base, outputs=[str(args.out)], wall_time_s=clock.elapsed,
                    failures=failures, extra={"k": args.k, "E_sweep": list(args.E_sweep)})
    man.write(manifest_path(args.out))
    print(f"wrote {args.out} ({len(rows)} energies, {failures} failed)")
    return 0


def cmd_selfcheck(args, argv) -> int:
    from .selfcheck import run_selfcheck

    cfg = resolve_config(args)
    results = run_selfcheck(cfg, quick=args.quick)
    ok = True
    for name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        ok &= passed
    return 0 if ok else 1


COMMANDS = {
    "scan": cmd_scan,
    "profile": cmd_profile,
    "resonance": cmd_resonance,
    "uncertainty": cmd_uncertainty,
    "selfcheck": cmd_selfcheck,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        return COMMANDS[args.command](args, argv)
    except (UsageError, ConfigError) as exc:
        parser.error(str(exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())
