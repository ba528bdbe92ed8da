"""Command-line entry point.

Every command reads a TOML config (see :mod:`sqhex.config`) and writes its
CSV, JSON and SVG outputs into ``--out``.  Exit status is 0 on success, 2 on
invalid input and 3 on a numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, limitshape, plotting
from .chains import sample_chain
from .config import RunConfig, load
from .errors import KasteleynSignError, NoPerfectMatchingError, NumericalError, ValidationError
from .kasteleyn import (
    KasteleynSampler,
    build_kasteleyn,
    enumerate_matchings,
    log_partition_function_kasteleyn,
    matching_weight,
)
from .lattice import build_lattice
from .rng import replica_rng
from .schur import log_partition_function_schur, partition_function_schur
from .signatures import chain_to_matching, expected_ne_sw_by_gap, matching_to_chain, ne_sw_by_gap

SCHEMA = "1"
MISMATCH_TOL = 1e-8


def _write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)
    return path


def _write_json(path: Path, data) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"schema": SCHEMA, **data}, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    return path


def _fmt(v: float) -> str:
    return repr(float(v))


def parse_grid(text: str) -> tuple[int, int]:
    try:
        r, c = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ValidationError(f"grid must look like 40x60, got {text!r}") from None
    if r < 4 or c < 4:
        raise ValidationError("grid needs at least 4 points in each direction")
    return r, c


def _equal_x(cfg: RunConfig) -> bool:
    x = cfg.spec.weights.x
    return all(abs(v - x[0]) < 1e-12 for v in x)


# ---------------------------------------------------------------------------


def cmd_partition(cfg: RunConfig, args) -> int:
    spec = cfg.spec
    out: dict = {"N": spec.N}
    if args.backend in ("schur", "both"):
        try:
            out["log_Z_schur"] = log_partition_function_schur(spec)
        except ValidationError:
            out["log_Z_schur"] = math.log(float(partition_function_schur(spec, backend="exact")))
    if args.backend in ("kasteleyn", "both"):
        out["log_Z_kasteleyn"] = log_partition_function_kasteleyn(build_kasteleyn(build_lattice(spec)))
    for key in ("schur", "kasteleyn"):
        if f"log_Z_{key}" in out and out[f"log_Z_{key}"] < 700:
            out[f"Z_{key}"] = math.exp(out[f"log_Z_{key}"])
    status = 0
    if args.backend == "both":
        rel = abs(math.expm1(out["log_Z_kasteleyn"] - out["log_Z_schur"]))
        out["relative_difference"] = rel
        out["agree"] = rel <= MISMATCH_TOL
        if rel > MISMATCH_TOL:
            status = 3
    _write_json(args.out / "partition.json", out)
    for k, v in out.items():
        print(f"{k}: {v}")
    return status


def _draw(cfg: RunConfig, args, g):
    """Yield ``(chain, matching)`` pairs from the selected sampler."""
    if args.sampler == "kasteleyn":
        sampler = KasteleynSampler(build_kasteleyn(g), cache=True)
        for r in range(args.samples):
            m = sampler.sample(replica_rng(args.seed, r))
            yield matching_to_chain(g, m), m
    else:
        for r in range(args.samples):
            ch = sample_chain(cfg.spec, replica_rng(args.seed, r))
            yield ch, chain_to_matching(g, ch)


def cmd_sample(cfg: RunConfig, args) -> int:
    g = build_lattice(cfg.spec)
    counts: dict[frozenset, int] = {}
    chain_rows, match_rows = [], []
    for r, (ch, m) in enumerate(_draw(cfg, args, g)):
        # every draw must carry the NE-SW counts forced by its signature sizes
        if ne_sw_by_gap(g, m) != expected_ne_sw_by_gap(ch):
            raise NumericalError(f"sample {r}: NE-SW counts disagree with the signature sizes")
        counts[m] = counts.get(m, 0) + 1
        for k, lam in enumerate(ch, start=1):
            chain_rows.append([r, k, " ".join(map(str, lam))])
        match_rows.append([r, " ".join(map(str, sorted(m)))])
        if r < args.svg:
            plotting.plot_matching(g, m, args.out / f"tiling_{r}.svg", title=f"sample {r}")
    _write_csv(args.out / "chains.csv", ["sample", "row", "parts"], chain_rows)
    _write_csv(args.out / "matchings.csv", ["sample", "edges"], match_rows)
    summary = {"samples": args.samples, "seed": args.seed, "sampler": args.sampler, "distinct": len(counts)}
    if len(g.vertices) <= 60:
        law = {}
        Z = 0.0
        for m in enumerate_matchings(g, cap=10**5):
            law[m] = matching_weight(g, m)
            Z += law[m]
        tv = 0.5 * sum(abs(counts.get(m, 0) / args.samples - w / Z) for m, w in law.items())
        summary.update(matchings=len(law), total_variation=tv)
        print(f"total variation to the exact law over {len(law)} matchings: {tv:.5f}")
    _write_json(args.out / "sample.json", summary)
    print(f"wrote {args.samples} samples to {args.out}")
    return 0


def cmd_enumerate(cfg: RunConfig, args) -> int:
    g = build_lattice(cfg.spec)
    rows, Z = [], 0.0
    for i, m in enumerate(enumerate_matchings(g, cap=args.cap)):
        w = matching_weight(g, m)
        Z += w
        rows.append([i, _fmt(w), " ".join(map(str, sorted(m)))])
    _write_csv(args.out / "enumeration.csv", ["index", "weight", "edges"], rows)
    _write_json(args.out / "enumeration.json", {"count": len(rows), "Z": Z})
    print(f"{len(rows)} matchings, Z = {Z!r}")
    return 0


def cmd_frozen_boundary(cfg: RunConfig, args) -> int:
    w = cfg.spec.weights
    if cfg.staircase is not None and not _equal_x(cfg):
        fb = limitshape.frozen_boundary_general(w, cfg.staircase)
        param, chi, kappa, tang = fb.z, fb.chi, fb.kappa, fb.tangency
        a, b, slope = [], [], 0.0
    else:
        fb = limitshape.frozen_boundary(cfg.boundary, w)
        param, chi, kappa, tang = fb.t, fb.chi, fb.kappa, fb.tangency
        a, b, slope = cfg.boundary.a, cfg.boundary.b, w.r / w.n
        t = np.linspace(min(a) - 3, max(b) + 3, 2000)
        J = limitshape.j_graph(cfg.boundary, w, t)
        _write_csv(args.out / "j_graph.csv", ["t", "J"], ([_fmt(u), _fmt(v)] for u, v in zip(t, J)))
        plotting.plot_curve(t, J, args.out / "j_graph.svg", "t", "J(t)", ylim=(-10, 10))
    ok = np.isfinite(chi)
    _write_csv(
        args.out / "frozen_boundary.csv",
        ["t", "chi", "kappa"],
        ([_fmt(p), _fmt(c), _fmt(k)] for p, c, k in zip(param[ok], chi[ok], kappa[ok])),
    )
    bottom = [x for x in tang if x[0] == "kappa=0"]
    _write_json(
        args.out / "tangency.json",
        {
            "points": [{"line": lab, "chi": c, "kappa": k} for lab, c, k in tang],
            "bottom_tangencies": len(bottom),
            "rank": getattr(fb, "rank", None),
        },
    )
    segs = []
    run: list[int] = []
    for i in range(len(chi) + 1):
        if i < len(chi) and ok[i]:
            run.append(i)
        elif run:
            if len(run) > 1:
                segs.append((chi[run], kappa[run]))
            run = []
    plotting.plot_frozen_boundary(segs, tang, args.out / "frozen_boundary.svg", a, b, slope)
    print(f"{int(ok.sum())} curve points, {len(bottom)} tangencies with kappa=0")
    return 0


def _grid(cfg: RunConfig, args) -> tuple[np.ndarray, np.ndarray]:
    R, C = parse_grid(args.grid)
    kappa = np.linspace(0.0, 1.0, R + 2)[1:-1]
    chi = np.linspace(0.0, max(cfg.boundary.b), C + 2)[1:-1]
    return chi, kappa


def _inside(cfg: RunConfig, chi: float, kappa: float) -> bool:
    w = cfg.spec.weights
    return 0 < chi < max(cfg.boundary.b) - w.r / w.n * kappa


def cmd_density(cfg: RunConfig, args) -> int:
    chi, kappa = _grid(cfg, args)
    w = cfg.spec.weights
    vals = np.full((len(kappa), len(chi)), math.nan)
    for i, k in enumerate(kappa):
        for j, c in enumerate(chi):
            if not _inside(cfg, c, k):
                continue
            if cfg.staircase is not None and not _equal_x(cfg):
                vals[i, j] = limitshape.density_at_general(c, k, w, cfg.staircase)
            else:
                vals[i, j] = limitshape.density_at(c, k, cfg.boundary, w)
    rows = ([_fmt(c), _fmt(k), _fmt(vals[i, j])] for i, k in enumerate(kappa) for j, c in enumerate(chi))
    _write_csv(args.out / "density.csv", ["chi", "kappa", "density"], rows)
    plotting.plot_field(chi, kappa, vals, args.out / "density.svg", "density")
    print(f"density on a {len(kappa)}x{len(chi)} grid written to {args.out}")
    return 0


def cmd_limit_height(cfg: RunConfig, args) -> int:
    if not _equal_x(cfg):
        raise ValidationError("limit-height needs equal x weights")
    chi, kappa = _grid(cfg, args)
    w = cfg.spec.weights
    vals = np.full((len(kappa), len(chi)), math.nan)
    for i, k in enumerate(kappa):
        for j, c in enumerate(chi):
            if _inside(cfg, c, k):
                vals[i, j] = limitshape.limit_height(c, k, cfg.boundary, w)
    rows = ([_fmt(c), _fmt(k), _fmt(vals[i, j])] for i, k in enumerate(kappa) for j, c in enumerate(chi))
    _write_csv(args.out / "limit_height.csv", ["chi", "kappa", "height"], rows)
    plotting.plot_field(chi, kappa, vals, args.out / "limit_height.svg", "rescaled height", cmap="magma")
    if args.samples > 0:
        chains = [sample_chain(cfg.spec, replica_rng(args.seed, r)) for r in range(args.samples)]
        N = cfg.spec.N
        grid = analysis.interior_grid(cfg.boundary, w, N=N)
        rep = analysis.height_lln_test(chains, cfg.spec, cfg.boundary, w, grid)
        avg = rep.mean_sup
        _write_json(
            args.out / "height_lln.json",
            {
                "N": N,
                "samples": args.samples,
                "seed": args.seed,
                "grid_points": len(grid),
                "sup_error_mean_field": avg,
                "sup_error_per_sample": rep.sup_errors.tolist(),
                "l1_error_per_sample": rep.l1_errors.tolist(),
            },
        )
        print(f"sup |h/N - limit| of the sample mean: {avg:.4f}")
    print(f"limit height written to {args.out}")
    return 0


def cmd_gue(cfg: RunConfig, args) -> int:
    spec = cfg.spec
    chains = [sample_chain(spec, replica_rng(args.seed, r)) for r in range(args.samples)]
    rep = analysis.gue_corner_test(chains, spec.N, spec.omega, spec.weights)
    _write_json(args.out / "gue.json", rep.to_dict())
    psi1, psi2 = analysis.boundary_psi(spec.omega)
    A, B = analysis.corner_constants(psi1, psi2, spec.weights)
    lvl1 = np.array([analysis.rescale_corners(analysis.corner_positions(c, 1, spec.N), spec.N, A, B)[0] for c in chains])
    lvl2 = np.array([analysis.rescale_corners(analysis.corner_positions(c, 2, spec.N), spec.N, A, B) for c in chains])
    plotting.plot_gue(lvl1, lvl2[:, 0] - lvl2[:, 1], args.out / "gue.svg", analysis.gue_spacing_pdf)
    print(f"level 1: mean {rep.mean1:.4f}, variance {rep.var1:.4f}, KS {rep.ks1:.4f}")
    print(f"level 2 gap KS {rep.ks_spacing:.4f}")
    return 0


COMMANDS = {
    "partition": cmd_partition,
    "sample": cmd_sample,
    "frozen-boundary": cmd_frozen_boundary,
    "density": cmd_density,
    "limit-height": cmd_limit_height,
    "gue": cmd_gue,
    "enumerate": cmd_enumerate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqhex", description="Dimers on contracting square-hexagon lattices.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, type=Path)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--samples", type=int, default=None)
        s.add_argument("--grid", default="40x60", help="rows x columns, e.g. 40x60")
        s.add_argument("--out", type=Path, default=Path("out"))
        s.add_argument("--backend", choices=["schur", "kasteleyn", "both"], default="both")
        s.add_argument("--sampler", choices=["chain", "kasteleyn"], default="chain")
        s.add_argument("--svg", type=int, default=1, help="number of sampled tilings to draw")
        s.add_argument("--cap", type=int, default=10**5, help="enumeration limit")
    return p


_DEFAULT_SAMPLES = {"sample": 10, "gue": 200, "limit-height": 0}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config)
        run = cfg.run
        if args.seed is None:
            args.seed = int(run.get("seed", 0))
        if args.samples is None:
            args.samples = int(run.get("samples", _DEFAULT_SAMPLES.get(args.command, 0)))
        if args.samples < 0 or args.seed < 0:
            raise ValidationError("seed and samples must be non-negative")
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args)
    except (ValidationError, NoPerfectMatchingError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, KasteleynSignError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
