"""Command line interface.

Subcommands: ``complex build|subdivide|measure``, ``verify-model``,
``grid-check``, ``spectrum``, ``partition`` and ``run`` (plan-driven
convergence experiments).  ``run`` exits 0 only when every checked invariant
passes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .catalog import catalog
from .characters import CharacterSpace, grid_check, verify_model
from .complexes import barycentric_subdivide, perturbed_subdivide
from .convergence import load_plan, run_convergence, observable_spec
from .errors import SimcharError
from .fileio import read_complex, write_complex
from .gauge import ActionSpec, GaugeFrames, ObservableSpec, partition_function
from .hodge import build_frame
from .whitney import ComplexPair


def _resolve_complex(args, strict=True):
    if getattr(args, "manifold", None):
        return catalog(args.manifold).complex
    return read_complex(args.infile, strict=strict)


def _pair(args):
    base = _resolve_complex(args)
    fine = perturbed_subdivide(base, seed=args.seed, scale=args.scale)
    return ComplexPair(base, fine)


def _write_json(obj, out):
    text = json.dumps(obj, sort_keys=True, default=float)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_complex(args) -> int:
    if args.action == "build":
        X = read_complex(args.infile, strict=not args.no_strict)
        if args.out:
            write_complex(X, args.out)
        print(f"f-vector {X.f_vector} euler {X.euler_characteristic}")
        return 0
    if args.action == "subdivide":
        X = read_complex(args.infile, strict=not args.no_strict)
        Y = (
            barycentric_subdivide(X)
            if args.plain
            else perturbed_subdivide(X, seed=args.seed, scale=args.scale)
        )
        write_complex(Y, args.out)
        print(f"subdivided: f-vector {Y.f_vector}")
        return 0
    if args.action == "measure":
        X = read_complex(args.infile, strict=not args.no_strict)
        info = {
            "f_vector": list(X.f_vector),
            "euler_characteristic": X.euler_characteristic,
            "mesh": X.mesh(),
            "fullness": X.fullness() if X.dim >= 1 else None,
            "volume": float(X.top_volumes().sum()),
        }
        _write_json(info, args.out)
        return 0
    raise ValueError(args.action)


def cmd_verify_model(args) -> int:
    pair = _pair(args)
    report = verify_model(pair, seed=args.seed)
    _write_json(report.as_dict(), args.out)
    return 0 if report.passed else 1


def cmd_grid_check(args) -> int:
    pair = _pair(args)
    space = CharacterSpace(pair, args.p, kernel_threshold=args.kernel_threshold)
    report = grid_check(space)
    _write_json(report.as_dict(), args.out)
    return 0 if report.passed else 1


def cmd_spectrum(args) -> int:
    from .hodge import harmonic_integral_basis
    from .homology import cocycle_lift

    pair = _pair(args)
    lines = []
    for k in range(pair.base.dim + 1):
        frame = build_frame(pair, k, kernel_threshold=args.kernel_threshold)
        lifts = [cocycle_lift(pair.base, k, j) for j in range(frame.betti)]
        _, h = harmonic_integral_basis(frame, lifts)
        lines.append(json.dumps({
            "degree": k,
            "betti": frame.betti,
            "eigenvalues": [float(v) for v in frame.eigenvalues],
            "harmonic_dim": int(frame.harmonic_basis.shape[1]),
            "h_matrix": [[float(v) for v in row] for row in h],
        }, sort_keys=True))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def _parse_observable(spec: str, frames: GaugeFrames) -> ObservableSpec:
    if spec in ("const", "constant", "1"):
        return ObservableSpec("constant")
    if spec.startswith("wilson:"):
        _, cyc, q = spec.split(":")
        cycle = frames.space.topology.cycles_p[:, int(cyc)]
        return ObservableSpec("wilson", cycle=cycle, charge=int(q))
    raise ValueError(f"cannot parse observable {spec!r}")


def cmd_partition(args) -> int:
    from .gauge import partition_oracle

    pair = _pair(args)
    frames = GaugeFrames(
        pair, args.p, kernel_threshold=args.kernel_threshold,
        assume_torsion_free=args.assume_torsion_free,
    )
    action = ActionSpec(kind=args.action, coupling=args.g2)
    obs = _parse_observable(args.observable, frames)
    res = partition_function(frames, action, obs, window=args.window)
    if args.oracle:
        res.oracle_value = partition_oracle(
            frames, action, obs, window=res.truncation["radius"],
            method=args.oracle,
        )
    _write_json(res.as_dict(), args.out)
    return 0


def cmd_run(args) -> int:
    from .report import config_hash, emit_report, render_figures

    plan = load_plan(args.plan)
    rows = []
    fmt = "jsonl" if plan.out.endswith(".jsonl") else "csv"
    out_path = plan.out if plan.out.endswith((".csv", ".jsonl")) \
        else plan.out + ".csv"

    def flush(row):
        rows.append(row)
        emit_report(rows, fmt, out_path, config=plan.as_dict())

    try:
        all_rows = run_convergence(plan, row_callback=flush)
    except SimcharError as err:
        print(f"run failed: {err}", file=sys.stderr)
        return 1
    emit_report(all_rows, fmt, out_path, config=plan.as_dict())
    for row in all_rows:
        print(f"level {row.level}: mesh {row.mesh:.6g} "
              f"fullness {row.fullness:.4g} wall {row.wall_time_s:.2f}s",
              file=sys.stderr)
    print(out_path)
    if plan.figures:
        prefix = out_path.rsplit(".", 1)[0]
        for p in render_figures(all_rows, prefix):
            print(p)
    print(f"config_hash {config_hash(plan.as_dict())}", file=sys.stderr)
    return 0


def _add_pair_args(sp, need_p=False):
    sp.add_argument("--manifold", help="catalog id, e.g. s1:8, t2_flat:7")
    sp.add_argument("--in", dest="infile", help="complex file instead of catalog id")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--scale", type=float, default=0.1)
    sp.add_argument("--kernel-threshold", type=float, default=1e-12)
    sp.add_argument("--out")
    if need_p:
        sp.add_argument("--p", type=int, default=0)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="simchar",
        description="simplicial differential characters and gauge partition functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("complex", help="build/subdivide/measure complex files")
    pc.add_argument("action", choices=["build", "subdivide", "measure"])
    pc.add_argument("--in", dest="infile", required=True)
    pc.add_argument("--out")
    pc.add_argument("--seed", type=int, default=1)
    pc.add_argument("--scale", type=float, default=0.1)
    pc.add_argument("--plain", action="store_true",
                    help="unperturbed barycentric subdivision")
    pc.add_argument("--no-strict", action="store_true",
                    help="skip closed-manifold checks")
    pc.set_defaults(func=cmd_complex)

    pv = sub.add_parser("verify-model", help="check the model axioms on a pair")
    _add_pair_args(pv)
    pv.set_defaults(func=cmd_verify_model)

    pg = sub.add_parser("grid-check", help="exact-sequence grid bookkeeping")
    _add_pair_args(pg, need_p=True)
    pg.set_defaults(func=cmd_grid_check)

    ps = sub.add_parser("spectrum", help="JSONL spectral report per degree")
    _add_pair_args(ps)
    ps.set_defaults(func=cmd_spectrum)

    pp = sub.add_parser("partition", help="gauge partition function")
    _add_pair_args(pp, need_p=True)
    pp.add_argument("--action", default="maxwell")
    pp.add_argument("--g2", type=float, default=1.0)
    pp.add_argument("--observable", default="const",
                    help="const or wilson:<cycle-index>:<charge>")
    pp.add_argument("--window", type=int, default=8)
    pp.add_argument("--assume-torsion-free", action="store_true")
    pp.add_argument("--oracle", choices=["quad", "mc"],
                    help="also run the brute-force oracle at the achieved window")
    pp.set_defaults(func=cmd_partition)

    pr = sub.add_parser("run", help="convergence experiment from a TOML plan")
    pr.add_argument("--plan", required=True)
    pr.set_defaults(func=cmd_run)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SimcharError, ValueError, OSError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
