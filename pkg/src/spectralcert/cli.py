"""Command-line entry point.

Commands: certify, disks, scan, eig, bench, norms.  Each reads a JSON
config, runs the corresponding computation, and writes one canonical JSON
report (bulk data spills to CSV siblings).

Exit codes: 0 success, 1 validation error, 2 computational error,
3 certificate inconclusive.
"""

import argparse
import sys
import time

import numpy as np

from . import birman_schwinger as bs
from . import bench as bench_mod
from .config import (ConfigError, parse_config, build_potential, build_weight,
                     build_grid, COMMANDS)
from .enclosure import certify as run_certify_op, enclosure_disks, c2_constant
from .gridops import assemble_perturbed, eigenvalues
from .potential import PotentialSpec
from .report import make_report, write_report
from .weights import dyadic_norm, weighted_sup_norm

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPUTE = 2
EXIT_INCONCLUSIVE = 3


def _cert_dict(cert):
    d = {
        "theorem": cert.theorem,
        "verdict": cert.verdict,
        "norm": cert.norm,
        "tail_bound": cert.tail_bound,
        "norm_upper": cert.norm_upper,
        "constant": cert.constant,
        "threshold": cert.threshold,
        "reason": cert.reason,
        "n": cert.n,
        "m": cert.m,
        "params": cert.params,
        "potential_hash": cert.potential_hash,
    }
    if cert.disks is not None:
        d["disks"] = {
            "x0_plus": cert.disks.x0_plus,
            "x0_minus": cert.disks.x0_minus,
            "r0": cert.disks.r0,
            "V_j": cert.disks.V_j,
            "j": cert.disks.j,
            "m": cert.disks.m,
            "N_j": cert.params.get("N_j"),
            "C2": c2_constant(cert.n),
        }
    return d


def _cert_warnings(cert):
    warns = []
    if cert.tail_bound is None and cert.norm is not None:
        warns.append("tail bound unknown: reported norm covers the sampled annuli only")
    if cert.verdict == "inconclusive" and cert.reason:
        warns.append(cert.reason)
    return warns


def _do_certify(cfg):
    V = build_potential(cfg)
    cert = run_certify_op(cfg.theorem, V, m=cfg.m, eps=cfg.eps, sigma=cfg.sigma,
                          rho=build_weight(cfg))
    results = {"certificate": _cert_dict(cert)}
    code = EXIT_OK if cert.verdict in ("stable", "enclosure") else EXIT_INCONCLUSIVE
    return results, _cert_warnings(cert), {}, code


def _do_disks(cfg):
    V = build_potential(cfg, kind="dirac")
    cert = enclosure_disks(V, m=cfg.m, j=cfg.j, rho=build_weight(cfg))
    results = {"certificate": _cert_dict(cert)}
    code = EXIT_OK if cert.verdict == "enclosure" else EXIT_INCONCLUSIVE
    return results, _cert_warnings(cert), {}, code


def _do_scan(cfg):
    V = build_potential(cfg)
    grid = build_grid(cfg)
    rect = (cfg.rectangle["re_min"], cfg.rectangle["re_max"],
            cfg.rectangle["im_min"], cfg.rectangle["im_max"])
    res = (cfg.resolution["n_re"], cfg.resolution["n_im"])
    scan = bs.bs_scan(cfg.kind, cfg.m, V, grid, rect, res, seed=cfg.seed)
    box = scan.region_bounding_box()
    results = {
        "rectangle": {"re_min": rect[0], "re_max": rect[1], "im_min": rect[2], "im_max": rect[3]},
        "resolution": {"n_re": res[0], "n_im": res[1]},
        "excluded_points": int(scan.excluded.sum()),
        "max_norm_estimate": (None if np.all(scan.excluded)
                              else float(np.nanmax(scan.values))),
        "region_ge_1_bounding_box": (None if box is None else
                                     {"re_min": box[0], "re_max": box[1],
                                      "im_min": box[2], "im_max": box[3]}),
    }
    z = scan.z_lattice()
    rows = [(zz.real, zz.imag, ("nan" if ex else v), int(ex))
            for zz, v, ex in zip(z.ravel(), scan.values.ravel(), scan.excluded.ravel())]
    warns = ["some scan points excluded near the discrete symbol set"] if scan.excluded.any() else []
    return results, warns, {"scan": (("re_z", "im_z", "norm_estimate", "excluded_flag"), rows)}, EXIT_OK


def _do_eig(cfg):
    V = build_potential(cfg)
    grid = build_grid(cfg)
    H = assemble_perturbed(cfg.kind, cfg.m, V, grid)
    vals = eigenvalues(H)
    results = {
        "count": len(vals),
        "max_abs_imag": float(np.max(np.abs(vals.imag))),
        "real_range": [float(vals.real.min()), float(vals.real.max())],
    }
    rows = [(v.real, v.imag) for v in vals]
    return results, [], {"spectrum": (("re_lambda", "im_lambda"), rows)}, EXIT_OK


def _do_bench(cfg):
    grid = None
    if cfg.grid is not None:
        grid = build_grid(cfg, kind="schrodinger")
    rep = bench_mod.run_bench(cfg.estimate, grid=grid, m=cfg.m or 1.0,
                              trials=cfg.trials, seed=cfg.seed)
    results = {
        "estimate": rep.estimate,
        "trials": rep.trials,
        "discarded": rep.discarded,
        "max_ratio": rep.max_ratio,
        "paper_constant": rep.paper_constant if rep.paper_constant is not None else "non-explicit",
        "slack": rep.slack,
        "passed": rep.passed,
        "grid": {"n": rep.grid.n, "L": rep.grid.L, "M": rep.grid.M, "N": rep.grid.N},
        "m": rep.m,
    }
    warns = [] if rep.paper_constant is not None else \
        ["estimate has no explicit analytic constant; ratio reported without pass/fail"]
    return results, warns, {}, EXIT_OK


def _do_norms(cfg):
    import math
    table = {}
    if cfg.weight is not None:
        w = build_weight(cfg)
        res = dyadic_norm(None, cfg.p, cfg.q, cfg.n, radial_profile=w.radial)
        table["weight"] = _norm_dict(res)
    if cfg.potential is not None:
        V = build_potential(cfg, kind="dirac" if cfg.potential.get("N", 1) > 1 else "schrodinger")
        if V.kind == "grid-sampled":
            from .potential import pointwise_opnorm

            def f(pts):
                return pointwise_opnorm(V, pts)

            res = dyadic_norm(f, cfg.p, cfg.q, cfg.n)
        else:
            res = dyadic_norm(None, cfg.p, cfg.q, cfg.n, radial_profile=V.radial_opnorm)
        table["potential"] = _norm_dict(res)
    warns = [k + ": tail bound unknown" for k, v in table.items() if v["tail_bound"] is None]
    return {"norms": table}, warns, {}, EXIT_OK


def _norm_dict(res):
    return {
        "value": res.value,
        "p": "inf" if np.isinf(res.p) else res.p,
        "j_min": res.j_min,
        "j_max": res.j_max,
        "tail_bound": res.tail_bound,
        "samples_per_annulus": res.samples_per_annulus,
        "diverged": res.diverged,
    }


_RUNNERS = {
    "certify": _do_certify,
    "disks": _do_disks,
    "scan": _do_scan,
    "eig": _do_eig,
    "bench": _do_bench,
    "norms": _do_norms,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spectralcert",
        description="Spectral-stability certificates and Birman-Schwinger numerics "
                    "for perturbed Dirac and Klein-Gordon operators.")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=None, help="report path (default <config>_report.json)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=None,
                       help="worker hint for the computational modules (advisory)")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        cfg = parse_config(text, args.command)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.raw["seed"] = args.seed

    out = args.out or (args.config.rsplit(".json", 1)[0] + "_report.json")
    t0 = time.monotonic()
    try:
        results, warnings, siblings, code = _RUNNERS[args.command](cfg)
    except (ValueError, RuntimeError) as e:
        print(f"error: computation failed: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    elapsed = time.monotonic() - t0

    report = make_report(args.command, cfg.echo(), results, warnings)
    try:
        write_report(report, out, siblings)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    print(f"{args.command}: report written to {out} ({elapsed:.2f}s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
