"""Command-line front end.

Subcommands: gen (write snapshot matrices), basis (build a reduced basis),
select (choose interpolation points), approx (end-to-end error sweep),
bounds (evaluate closed-form constants), bench (timing comparison). All
commands exit 0 on success and nonzero with a message on stderr otherwise.
"""

import argparse
import sys

import numpy as np

from . import bounds as bounds_mod
from .exceptions import RdeimError
from .experiments import ExperimentSpec, bench_basis, generate, run_experiment
from .matio import ResultTable, emit_csv, read_matrix, write_matrix
from .projector import build_projector
from .rangefinder import OrthonormalBasis
from .selection import (
    deim_greedy_select,
    hybrid_select,
    leverage_scores,
    leverage_select,
    mixed_pmf,
    pqr_select,
    practical_sample_count,
    srrqr_select,
)

_BASIS_TOL = 1e-8


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output file path")


def _spec_args(p, basis=True, selector=True):
    p.add_argument("--rank", type=int, default=10)
    p.add_argument("--oversample", type=int, default=10)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--block", type=int, default=10)
    p.add_argument("--max-blocks", type=int, default=40)
    p.add_argument("--eta", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.9)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=None)
    if basis:
        p.add_argument(
            "--basis", choices=("svd", "basic", "subspace", "adaptive"), default="svd"
        )
    if selector:
        p.add_argument(
            "--select", choices=("greedy", "pqr", "srrqr", "leverage", "hybrid"), default="pqr"
        )


def build_parser():
    ap = argparse.ArgumentParser(prog="rdeim", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a snapshot matrix")
    p.add_argument("--example", choices=("osc", "corner", "source"), required=True)
    p.add_argument("--scale", choices=("desk", "paper"), default="desk")
    _add_common(p)

    p = sub.add_parser("basis", help="build a reduced basis from a matrix file")
    p.add_argument("--matrix", required=True, help="input RDMXMAT1 file")
    _spec_args(p, selector=False)
    _add_common(p)

    p = sub.add_parser("select", help="select interpolation points for a basis file")
    p.add_argument("--basis-file", required=True, help="orthonormal basis, RDMXMAT1")
    _spec_args(p, basis=False)
    _add_common(p)

    p = sub.add_parser("approx", help="end-to-end error sweep on a generated example")
    p.add_argument("--example", choices=("osc", "corner", "source"), required=True)
    p.add_argument("--scale", choices=("desk", "paper"), default="desk")
    p.add_argument("--n-test", type=int, default=0)
    p.add_argument("--with-bounds", action="store_true")
    _spec_args(p)
    _add_common(p)

    p = sub.add_parser("bounds", help="evaluate a closed-form constant")
    p.add_argument(
        "--kind", choices=("srrqr", "leverage", "hybrid", "deviation"), required=True
    )
    p.add_argument("--n", type=int)
    p.add_argument("--n-snapshots", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--oversample", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--eta", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.9)
    p.add_argument("--delta", type=float, default=0.1)

    p = sub.add_parser("bench", help="time exact vs randomized basis construction")
    p.add_argument("--example", choices=("osc", "corner", "source"), required=True)
    p.add_argument("--scale", choices=("desk", "paper"), default="desk")
    p.add_argument("--rank", type=int, default=10)
    p.add_argument("--oversample", type=int, default=10)
    p.add_argument("--power", type=int, default=0)
    p.add_argument("--trials", type=int, default=3)
    _add_common(p)

    return ap


def _cmd_gen(args):
    spec = ExperimentSpec(example=args.example, rank=1, scale=args.scale, seed=args.seed)
    snaps = generate(spec)
    write_matrix(args.out, snaps.matrix)
    print(f"wrote {snaps.matrix.shape[0]} x {snaps.matrix.shape[1]} matrix to {args.out}")
    return 0


def _cmd_basis(args):
    A = read_matrix(args.matrix)
    spec = ExperimentSpec(
        example="osc",  # placeholder; generation is not used here
        rank=args.rank,
        basis=args.basis,
        oversample=args.oversample,
        power=args.power,
        tol=args.tol,
        block=args.block,
        max_blocks=args.max_blocks,
        seed=args.seed,
    )
    from .experiments import build_basis

    basis = build_basis(A, spec)
    write_matrix(args.out, basis.matrix)
    print(f"wrote {basis.provenance} basis of rank {basis.rank} to {args.out}")
    return 0


def _cmd_select(args):
    W = read_matrix(args.basis_file)
    gram_err = np.max(np.abs(W.T @ W - np.eye(W.shape[1])))
    if gram_err > _BASIS_TOL:
        raise ValueError(f"{args.basis_file}: columns are not orthonormal (deviation {gram_err:.3e})")
    kind = args.select
    if kind == "greedy":
        S = deim_greedy_select(W)
    elif kind == "pqr":
        S = pqr_select(W)
    elif kind == "srrqr":
        S = srrqr_select(W, eta=args.eta)
    else:
        pmf = mixed_pmf(leverage_scores(W), W.shape[1], args.beta)
        count = args.samples if args.samples is not None else practical_sample_count(W.shape[1])
        count = min(count, W.shape[0])
        if kind == "leverage":
            S = leverage_select(W, pmf, count, args.seed)
        else:
            _, _, S = hybrid_select(W, pmf, count, eta=args.eta, seed=args.seed)
    table = ResultTable(
        columns=("position", "index", "weight"),
        rows=[(k, int(S.indices[k]), float(S.weights[k])) for k in range(S.s)],
        summary={},
    )
    emit_csv(table, args.out)
    # building the projector verifies the selection exposes full rank
    build_projector(OrthonormalBasis(W, "exact-svd"), S)
    print(f"wrote {S.s} points ({kind}) to {args.out}")
    return 0


def _cmd_approx(args):
    spec = ExperimentSpec(
        example=args.example,
        rank=args.rank,
        scale=args.scale,
        basis=args.basis,
        selector=args.select,
        oversample=args.oversample,
        power=args.power,
        tol=args.tol,
        block=args.block,
        max_blocks=args.max_blocks,
        eta=args.eta,
        beta=args.beta,
        eps=args.eps,
        delta=args.delta,
        samples=args.samples,
        seed=args.seed,
        n_test=args.n_test,
        with_bounds=args.with_bounds,
    )
    table = run_experiment(spec)
    emit_csv(table, args.out)
    mean = table.summary["rel_error_mean"]
    print(
        f"swept {int(table.summary['columns_total'])} columns: "
        f"mean rel error {mean:.3e}, error constant {table.summary['error_constant']:.3e}; "
        f"wrote {args.out}"
    )
    return 0


def _cmd_bounds(args):
    params = {}
    mapping = {
        "srrqr": ("eta", "rank", "n"),
        "leverage": ("n", "samples", "beta", "eps"),
        "hybrid": ("n", "samples", "beta", "eps", "eta", "rank"),
        "deviation": ("rank", "oversample", "delta", "n_snapshots"),
    }
    for name in mapping[args.kind]:
        val = getattr(args, name)
        if val is None:
            raise ValueError(f"--kind {args.kind} requires --{name.replace('_', '-')}")
        params[name] = val
    value = bounds_mod.constant_bound(args.kind, **params)
    print(f"{args.kind} {value!r}")
    return 0


def _cmd_bench(args):
    spec = ExperimentSpec(example=args.example, rank=args.rank, scale=args.scale, seed=args.seed)
    snaps = generate(spec)
    table = bench_basis(
        snaps.matrix,
        args.rank,
        oversample=args.oversample,
        power=args.power,
        seed=args.seed,
        trials=args.trials,
    )
    emit_csv(table, args.out)
    for row in table.rows:
        print(f"{row[0]}: {row[4]:.4f} s (rel residual {row[5]:.3e})")
    print(f"speedup {table.summary['speedup']:.2f}x; wrote {args.out}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "basis": _cmd_basis,
    "select": _cmd_select,
    "approx": _cmd_approx,
    "bounds": _cmd_bounds,
    "bench": _cmd_bench,
}


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (RdeimError, ValueError, OSError) as err:
        print(f"rdeim {args.command}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
