"""Command line front end.

Every subcommand is deterministic: identical arguments (including --seed
and --workers) produce byte-identical output, because trial streams are
assigned by trial index rather than by worker. Each run also emits a
manifest, a JSON object with the command name, the package version and
every parameter, enough to re-execute the run exactly. With --out the
manifest lands next to the output as <out>.manifest.json; without it the
CSV goes to stdout and the manifest to stderr.

Exit codes: 0 on success, 2 on configuration errors (bad flags, invalid
parameter combinations), 3 when `plan` hits a renormalized lattice that is
not fully occupied and --allow-not-full was not given.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import metadata
from typing import Optional, Sequence

from .lattice import LatticeKind
from .pathing import (
    GraphState,
    IncompletePlanError,
    apply_plan,
    build_plan,
    extract_routes,
    verify_target,
)
from .percolation import (
    PercolationParams,
    crossing_curve,
    estimate_crossing_prob,
)
from .renorm import (
    BoundConstants,
    RenormScheme,
    bound_block_size,
    build_renormalized,
    estimate_P,
    evaluate_lower_bound,
    scaling_scan,
)
from .resources import ResourceSpec, loss_budget, mixed_params_from_gates, resource_count
from .rng import RngSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_FULL = 3

# Default initial-state size per lattice kind when --size is omitted.
_DEFAULT_SIZE = {
    LatticeKind.CUBIC: 7,
    LatticeKind.DIAMOND: 5,
    LatticeKind.COVERING_CUBIC: 6,
    LatticeKind.PYROCHLORE: 4,
}


def _version() -> str:
    try:
        return metadata.version("percrenorm")
    except metadata.PackageNotFoundError:
        return "unknown"


def _ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _fmt(x: float) -> str:
    return format(x, ".10g")


def _manifest(args: argparse.Namespace) -> str:
    params = {k: v for k, v in vars(args).items() if k != "func"}
    doc = {"command": args.command, "version": _version(), "parameters": params}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(args: argparse.Namespace, body: str) -> None:
    manifest = _manifest(args)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
        with open(args.out + ".manifest.json", "w") as fh:
            fh.write(manifest)
    else:
        sys.stdout.write(body)
        sys.stderr.write(manifest)


def _csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _kind_arg(parser: argparse.ArgumentParser, required: bool = True, default: Optional[str] = None) -> None:
    parser.add_argument(
        "--kind",
        choices=[k.value for k in LatticeKind],
        required=required and default is None,
        default=default,
    )


def _common_run_args(parser: argparse.ArgumentParser, trials_default: int) -> None:
    parser.add_argument("--trials", type=int, default=trials_default)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)


def _params_from(args: argparse.Namespace) -> PercolationParams:
    return PercolationParams.mixed(args.p_site, args.p_bond)


def cmd_crossing(args: argparse.Namespace) -> int:
    kind = LatticeKind(args.kind)
    p_values = args.p if args.p is not None else args.p_bond
    if not p_values:
        raise ValueError("give at least one bond probability via --p or --p-bond")
    header = ["kind", "k", "p_site", "p_bond", "trials", "P", "stderr", "seed"]
    rows = []
    for i, k in enumerate(args.k):
        # One coupled bond-insertion sweep serves every p for this k; the
        # result matches independent per-p runs on the same streams.
        params = PercolationParams.mixed(args.p_site, p_values[0])
        rng = RngSpec(args.seed, i * args.trials)
        curve = crossing_curve(kind, k, params, p_values, args.trials, rng, workers=args.workers)
        for p, est, se in zip(p_values, curve.estimates, curve.stderrs):
            rows.append(
                [kind.value, str(k), _fmt(args.p_site), _fmt(p),
                 str(args.trials), _fmt(est), _fmt(se), str(args.seed)]
            )
    _emit(args, _csv(header, rows))
    return EXIT_OK


def cmd_scaling(args: argparse.Namespace) -> int:
    kind = LatticeKind(args.kind)
    params = _params_from(args)
    result = scaling_scan(
        kind,
        params,
        args.L,
        args.threshold,
        args.trials,
        args.k_max,
        RngSpec(args.seed),
        k_min=args.k_min,
        prescreen_trials=args.prescreen_trials,
        workers=args.workers,
    )
    header = ["kind", "L", "k", "p_site", "p_bond", "trials", "threshold",
              "P", "stderr", "status", "seed"]
    rows = []
    for res in result.per_L:
        if res.k is not None:
            hit = next(r for r in res.rows if r.k == res.k)
            k_txt, p_txt, se_txt, status = str(res.k), _fmt(hit.estimate), _fmt(hit.stderr), "ok"
        else:
            k_txt, p_txt, se_txt, status = "", "", "", "not-found"
        rows.append(
            [kind.value, str(res.L), k_txt, _fmt(args.p_site), _fmt(args.p_bond),
             str(args.trials), _fmt(args.threshold), p_txt, se_txt, status, str(args.seed)]
        )
    _emit(args, _csv(header, rows))
    return EXIT_OK


def cmd_renorm(args: argparse.Namespace) -> int:
    kind = LatticeKind(args.kind)
    params = _params_from(args)
    header = ["kind", "L", "k", "p_site", "p_bond", "trials", "P", "stderr", "seed"]
    rows = []
    for i, k in enumerate(args.k):
        scheme = RenormScheme(kind, args.L, k, params)
        est = estimate_P(scheme, args.trials, RngSpec(args.seed, i * args.trials), workers=args.workers)
        rows.append(
            [kind.value, str(args.L), str(k), _fmt(args.p_site), _fmt(args.p_bond),
             str(args.trials), _fmt(est.estimate), _fmt(est.stderr), str(args.seed)]
        )
    _emit(args, _csv(header, rows))
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    kind = LatticeKind(args.kind)
    params = _params_from(args)
    scheme = RenormScheme(kind, args.L, args.k, params)
    rl = build_renormalized(scheme, RngSpec(args.seed))
    if not rl.is_full():
        sites, bonds = rl.missing()
        for s in sites:
            sys.stderr.write(f"missing site: {s}\n")
        for b in bonds:
            sys.stderr.write(f"missing bond: {b[0]}-{b[1]}\n")
        sys.stdout.write("full: false\nverified: false\n")
        return EXIT_OK if args.allow_not_full else EXIT_NOT_FULL
    try:
        routes = extract_routes(rl)
        plan = build_plan(rl, routes)
    except IncompletePlanError as exc:
        sys.stderr.write(f"routing failed: {exc}\n")
        sys.stdout.write("full: true\nverified: false\n")
        return EXIT_OK if args.allow_not_full else 1
    ok = verify_target(apply_plan(GraphState.from_configuration(rl.config), plan), args.L)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(plan.to_text())
        with open(args.out + ".manifest.json", "w") as fh:
            fh.write(_manifest(args))
    counts = plan.counts()
    sys.stdout.write("full: true\n")
    sys.stdout.write(f"measured: {sum(v for b, v in counts.items() if b != 'KEEP')}\n")
    sys.stdout.write(f"kept: {counts['KEEP']}\n")
    sys.stdout.write(f"verified: {'true' if ok else 'false'}\n")
    return EXIT_OK if ok else 1


def cmd_bound(args: argparse.Namespace) -> int:
    constants = BoundConstants(args.a, args.c, args.d, args.epsilon, args.k0)
    header = ["L", "k", "full", "simplified"]
    rows = []
    for L in args.L:
        k = args.k if args.k is not None else max(bound_block_size(L, constants), float(args.k0))
        res = evaluate_lower_bound(L, k, constants)
        rows.append([str(L), _fmt(k), _fmt(res.full), _fmt(res.simplified)])
    _emit(args, _csv(header, rows))
    return EXIT_OK


def cmd_loss(args: argparse.Namespace) -> int:
    if args.budget:
        if not args.qubits:
            raise ValueError("--budget needs --qubits")
        header = ["p_effective", "block_nocross_prob", "qubits_in_use", "budget"]
        rows = [
            [_fmt(args.p_effective), _fmt(args.block_nocross), str(n),
             _fmt(loss_budget(args.p_effective, args.block_nocross, n))]
            for n in args.qubits
        ]
        _emit(args, _csv(header, rows))
        return EXIT_OK
    if args.kind is None or args.k is None:
        raise ValueError("crossing-under-loss mode needs --kind and --k")
    kind = LatticeKind(args.kind)
    params = _params_from(args)
    header = ["kind", "k", "p_site", "p_bond", "p_loss", "trials", "P", "stderr", "seed"]
    rows = []
    for i, k in enumerate(args.k):
        rng = RngSpec(args.seed, i * args.trials)
        est = estimate_crossing_prob(
            kind, k, params, args.trials, rng,
            p_loss=args.p_loss, loss_radius=args.radius, workers=args.workers,
        )
        rows.append(
            [kind.value, str(k), _fmt(args.p_site), _fmt(args.p_bond), _fmt(args.p_loss),
             str(args.trials), _fmt(est.estimate), _fmt(est.stderr), str(args.seed)]
        )
    _emit(args, _csv(header, rows))
    return EXIT_OK


def cmd_resources(args: argparse.Namespace) -> int:
    kind = LatticeKind(args.kind)
    size = args.size if args.size is not None else _DEFAULT_SIZE[kind]
    params = mixed_params_from_gates(ResourceSpec(kind, size, args.p_fusion))
    header = ["kind", "L", "k", "n_states", "n_qubits", "p_site", "p_bond", "p_loss"]
    rows = []
    for L in args.L:
        for k in args.k:
            n_states, n_qubits = resource_count(kind, L, k)
            rows.append(
                [kind.value, str(L), str(k), str(n_states), str(n_qubits),
                 _fmt(params.p_site), _fmt(params.p_bond), _fmt(args.p_loss)]
            )
    _emit(args, _csv(header, rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="percrenorm",
        description="Percolation renormalization: crossing estimates, block scaling, "
        "measurement planning and resource accounting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crossing", help="block-crossing probability over a p_bond sweep")
    _kind_arg(p)
    p.add_argument("--k", type=_ints, required=True, help="comma-separated block sizes")
    p.add_argument("--p", type=_floats, default=None, help="comma-separated bond probabilities")
    p.add_argument("--p-bond", type=_floats, default=None, help="alias for --p")
    p.add_argument("--p-site", type=float, default=1.0)
    _common_run_args(p, 1000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_crossing)

    p = sub.add_parser("scaling", help="minimal block size per lattice size L")
    _kind_arg(p, default=LatticeKind.DIAMOND.value)
    p.add_argument("--L", type=_ints, default=[4, 8, 16, 32])
    p.add_argument("--p-site", type=float, default=0.75)
    p.add_argument("--p-bond", type=float, default=0.5)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=16)
    p.add_argument("--prescreen-trials", type=int, default=400)
    _common_run_args(p, 1000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("renorm", help="probability that the renormalized lattice is full")
    _kind_arg(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--k", type=_ints, required=True)
    p.add_argument("--p-site", type=float, default=1.0)
    p.add_argument("--p-bond", type=float, required=True)
    _common_run_args(p, 1000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_renorm)

    p = sub.add_parser("plan", help="build and verify a measurement plan for one sample")
    _kind_arg(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p-site", type=float, default=1.0)
    p.add_argument("--p-bond", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-not-full", action="store_true",
                   help="exit 0 even when the sampled lattice is not full")
    p.add_argument("--out", default=None, help="write the per-vertex basis assignment here")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bound", help="analytic lower bound on the full-lattice probability")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--k0", type=int, default=1)
    p.add_argument("--L", type=_ints, required=True)
    p.add_argument("--k", type=float, default=None,
                   help="fixed block size; default is max(L^epsilon, k0) per L")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("loss", help="crossing under heralded loss, or the unheralded loss budget")
    _kind_arg(p, required=False)
    p.add_argument("--k", type=_ints, default=None)
    p.add_argument("--p-site", type=float, default=1.0)
    p.add_argument("--p-bond", type=float, default=0.5)
    p.add_argument("--p-loss", type=float, default=0.0)
    p.add_argument("--radius", type=int, default=1,
                   help="closure radius around each lost site")
    _common_run_args(p, 1000)
    p.add_argument("--budget", action="store_true",
                   help="tabulate the unheralded loss budget instead of sampling")
    p.add_argument("--p-effective", type=float, default=1e-5)
    p.add_argument("--block-nocross", type=float, default=4.76e-6)
    p.add_argument("--qubits", type=_ints, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("resources", help="initial states and qubits consumed per instance")
    _kind_arg(p)
    p.add_argument("--L", type=_ints, required=True)
    p.add_argument("--k", type=_ints, required=True)
    p.add_argument("--size", type=int, default=None,
                   help="initial-state size in qubits; default depends on --kind")
    p.add_argument("--p-fusion", type=float, default=0.5)
    p.add_argument("--p-loss", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_resources)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
