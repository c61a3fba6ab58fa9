"""Command-line interface.

Exit codes: 0 success (verdict true where a verdict is reported), 1 verdict
false or semantically invalid input, 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import engine, montecarlo, ndlattice, young
from .engine import LevelDistribution
from .errors import PosetChainError
from .fileio import DocumentError, dumps, load_document, poset_from_document, poset_to_document, write_csv
from .fixtures import FIXTURE_NAMES, fixture
from .poset import validate_rule


class Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def parse_grid(text: str) -> np.ndarray:
    """``"0:3:0.25"`` (inclusive of the end point) or ``"0,0.5,1"``."""
    try:
        if ":" in text:
            start, stop, step = (float(t) for t in text.split(":"))
            k = int(np.floor((stop - start) / step + 1e-9))
            return start + step * np.arange(k + 1)
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise Failure(2, f"cannot parse grid {text!r}") from None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise Failure(2, f"cannot parse number list {text!r}") from None


def emit(args, payload: dict, csv_rows=None, csv_header=None, default_format="json"):
    fmt = args.format or default_format
    if fmt == "csv":
        if csv_rows is None:
            raise Failure(1, f"{args.command} has no CSV output")
        text = write_csv(csv_rows, csv_header)
    else:
        text = dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path):
    doc = load_document(path)
    poset, up, down = poset_from_document(doc)
    return doc, poset, up, down


def cmd_validate(args) -> int:
    _, poset, up, down = _load(args.file)
    if up is None and down is None:
        raise Failure(1, "document has neither up_rule nor down_rule")
    payload = {"valid": True}
    for name, rule in (("up_rule", up), ("down_rule", down)):
        if rule is not None:
            rep = validate_rule(poset, rule, tol=args.tol)
            payload[name] = rep.to_json()
            payload["valid"] = payload["valid"] and rep.valid
    emit(args, payload)
    return 0 if payload["valid"] else 1


def _require_valid(poset, *rules):
    for rule in rules:
        rep = validate_rule(poset, rule)
        if not rep.valid:
            raise Failure(1, f"{rule.direction.value} rule is invalid: {rep.to_json()}")


def cmd_compat(args) -> int:
    doc, poset, up, down = _load(args.file)
    if up is None or down is None:
        raise Failure(1, "compat needs both up_rule and down_rule")
    _require_valid(poset, up, down)
    if args.sequence == "stationary":
        seq = engine.stationary_sequence(up, down)
    else:
        source = load_document(args.sequence_file) if args.sequence_file else doc
        if "sequence" not in source:
            raise Failure(2, "no 'sequence' field found")
        seq = engine.sequence_from_levels(poset, _parse_levels(source["sequence"]))
    report = engine.check_compatibility(up, down, seq, tol=args.tol)
    emit(args, report.to_json())
    ok = report.weakly_compatible and (report.strongly_compatible or not args.strong)
    return 0 if ok else 1


def _parse_levels(levels):
    from .fileio import parse_probability

    if not isinstance(levels, list):
        raise DocumentError("'sequence' must be an array of {label: p} objects")
    return [{str(k): parse_probability(v) for k, v in lv.items()} for lv in levels]


def _start_distribution(poset, spec: str) -> LevelDistribution:
    r = poset.min_rank
    if spec == "uniform":
        return LevelDistribution.uniform(poset, r)
    if spec.lstrip().startswith("{"):
        try:
            mapping = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise Failure(2, f"cannot parse --start: {exc}") from None
        return LevelDistribution.from_mapping(poset, _parse_levels([mapping])[0], level=r)
    return LevelDistribution.point_mass(poset, spec)


def cmd_construct_down(args) -> int:
    _, poset, up, _ = _load(args.file)
    if up is None:
        raise Failure(1, "construct-down needs an up_rule")
    _require_valid(poset, up)
    start = _start_distribution(poset, args.start)
    if start.level != poset.min_rank:
        raise Failure(1, "start distribution must live on the minimal level")
    seq = engine.propagate(up, start, poset.max_rank)
    down = engine.construct_down_rule(up, seq, tol=args.tol)
    emit(args, poset_to_document(poset, up, down, sequence=seq))
    return 0


def cmd_young(args) -> int:
    mu = args.mu
    if args.young_cmd == "exact-dist":
        n = args.level
        poset, up, _ = young.young_rules(n, mu)
        start = LevelDistribution.point_mass(poset, young.P(1))
        dist = engine.propagate(up, start, n).at(n)
        formula = {str(lam): young.row_chain_formula(lam, mu) for lam in young.partitions_of(n)}
        got = {str(k): w for k, w in dist.by_key().items()}
        dev = max(abs(got[k] - formula[k]) for k in formula)
        payload = {"mu": mu, "level": n, "distribution": got, "formula": formula, "max_deviation": dev}
        rows = [(k, got[k], formula[k]) for k in got]
        emit(args, payload, rows, ["partition", "p", "formula"])
    elif args.young_cmd == "stationary":
        i = args.level
        poset, up, down = young.young_rules(i + 1, mu)
        lo, hi = engine.stationary_ud(up, down, i)
        got = {str(k): w / 2 for d in (lo, hi) for k, w in d.by_key().items()}
        formula = {str(lam): young.stationary_ud_formula(lam, mu) for n in (i, i + 1) for lam in young.partitions_of(n)}
        dev = max(abs(got[k] - formula[k]) for k in formula)
        payload = {"mu": mu, "level": i, "distribution": got, "formula": formula, "max_deviation": dev}
        rows = [(k, got[k], formula[k]) for k in got]
        emit(args, payload, rows, ["partition", "p", "formula"])
    else:
        lam = young.Partition.from_parts(int(t) for t in args.partition.split(","))
        shape = young.scaled_shape(lam, args.a_n, parse_grid(args.grid))
        payload = {"partition": list(lam.parts), "a_n": shape.a_n, "area": shape.area,
                   "x": shape.x.tolist(), "y": shape.y.tolist()}
        emit(args, payload, zip(shape.x.tolist(), shape.y.tolist()), ["x", "y"], default_format="csv")
    return 0


def _require_seed(args):
    if args.seed is None:
        raise Failure(2, f"{args.command} needs an explicit --seed")
    return args.seed


def cmd_nd(args) -> int:
    d = args.d
    if args.nd_cmd == "uniform-check":
        ok, dev = ndlattice.uniform_level_check(d, args.n, tol=args.tol)
        emit(args, {"d": d, "n": args.n, "uniform": ok, "max_deviation": dev})
        return 0 if ok else 1
    if args.nd_cmd == "decay":
        if d != 2:
            raise Failure(1, "the decay example lives on N^2; use --d 2")
        table = ndlattice.example5_decay(args.n_max, n_min=args.n_min, start=args.start)
        payload = {"start": args.start, "decay": {str(n): p for n, p in table.items()}}
        emit(args, payload, list(table.items()), ["n", "p_max"], default_format="csv")
        return 0
    seed = _require_seed(args)
    nu = parse_floats(args.nu)
    if len(nu) != d:
        raise Failure(1, f"--nu has {len(nu)} components, expected {d}")
    cfg = montecarlo.SimulationConfig(seed=seed, replicas=args.replicas)
    est = montecarlo.estimate_limit_point(nu, args.steps, cfg)
    payload = {
        "seed": seed, "replicas": args.replicas, "steps": args.steps, "nu": list(est.nu),
        "mean": est.mean.tolist(), "stderr": est.stderr.tolist(),
        "max_deviation": est.max_deviation, "exceeds_4se": est.exceeds_4se,
    }
    emit(args, payload)
    return 0


def cmd_simulate(args) -> int:
    seed = _require_seed(args)
    cfg = montecarlo.SimulationConfig(
        seed=seed, replicas=args.replicas, burn_in=getattr(args, "burn_in", 0),
        thinning=getattr(args, "thinning", 1),
    )
    if args.sim_cmd in ("up", "down"):
        _, poset, up, down = _load(args.file)
        rule = up if args.sim_cmd == "up" else down
        if rule is None:
            raise Failure(1, f"document has no {args.sim_cmd}_rule")
        _require_valid(poset, rule)
        ends = montecarlo.simulate_chain(rule, args.start, args.target_rank, cfg)
        freq = montecarlo.frequencies(ends, labels=lambda k: poset.labels[poset.id_of(k)])
        emit(args, {"seed": seed, "replicas": args.replicas, "distribution": freq},
             list(freq.items()), ["element", "frequency"])
    elif args.sim_cmd == "ud":
        _, poset, up, down = _load(args.file)
        if up is None or down is None:
            raise Failure(1, "ud simulation needs both rules")
        _require_valid(poset, up, down)
        res = montecarlo.simulate_ud_chain(up, down, args.level, cfg, samples=args.samples, start=args.start)
        freq = res.distribution
        emit(args, {"seed": seed, "replicas": args.replicas, "distribution": freq},
             list(freq.items()), ["element", "frequency"])
    elif args.sim_cmd == "young-up":
        step = lambda lam: young.row_rule(lam, args.mu)  # noqa: E731
        ends = montecarlo.simulate_lazy_chain(step, young.P(1), args.level - 1, cfg)
        freq = montecarlo.frequencies(ends)
        emit(args, {"seed": seed, "replicas": args.replicas, "distribution": freq},
             list(freq.items()), ["partition", "frequency"])
    else:
        schedule = montecarlo.parse_schedule(args.mu_schedule)
        est = montecarlo.estimate_limit_shape(schedule, args.n, parse_grid(args.grid), cfg)
        payload = {
            "seed": seed, "replicas": args.replicas, "n": args.n, "mu": est.mu, "a_n": est.a_n,
            "shape_distances": {"sup": est.sup_distance, "l1": est.l1_distance},
            "points": [
                {"x": x, "mean_y": y, "stderr": s, "reference": r} for x, y, s, r in est.csv_rows()
            ],
        }
        emit(args, payload, est.csv_rows(), ["x", "mean_y", "stderr", "reference"], default_format="csv")
    return 0


def cmd_fixture(args) -> int:
    name = args.name
    if name == "nd-const":
        nu = parse_floats(args.nu)
        up = ndlattice.const_up_rule(nu, args.n_max)
        poset, down = up.poset, None
    elif name == "nd-level":
        up = ndlattice.level_up_rule(args.d, args.n_max)
        poset, down = up.poset, None
    elif name == "young":
        poset, up, down = young.young_rules(args.n_max, args.mu)
    elif name == "n2_example5":
        poset, up, down = fixture(name, n=args.n_max)
    else:
        poset, up, down = fixture(name)
    emit(args, poset_to_document(poset, up, down))
    return 0


def build_parser() -> argparse.ArgumentParser:
    # Shared flags live on leaf parsers only: argparse copies a nested
    # parser's defaults over values already parsed by its parent.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--seed", type=int, default=None, help="required by randomized commands")
    common.add_argument("--tol", type=float, default=1e-9)

    parser = argparse.ArgumentParser(prog="posetchains", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check rule support and row sums")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compat", parents=[common], help="weak/strong compatibility verdicts")
    p.add_argument("file")
    p.add_argument("--sequence", choices=["stationary", "file"], default="stationary")
    p.add_argument("--sequence-file", help="document with a 'sequence' field (default: the input file)")
    p.add_argument("--strong", action="store_true", help="exit 1 unless strongly compatible")
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("construct-down", parents=[common], help="Bayes down rule from an up chain")
    p.add_argument("file")
    p.add_argument("--start", required=True, help="label, 'uniform', or JSON {label: p} on the minimal level")
    p.set_defaults(func=cmd_construct_down)

    p = sub.add_parser("young", help="row(mu)/derow on Young's lattice")
    p.add_argument("--mu", type=float, default=0.5)
    ysub = p.add_subparsers(dest="young_cmd", required=True)
    q = ysub.add_parser("exact-dist", parents=[common])
    q.add_argument("--level", type=int, required=True)
    q = ysub.add_parser("stationary", parents=[common])
    q.add_argument("--level", type=int, required=True)
    q = ysub.add_parser("shape", parents=[common])
    q.add_argument("--partition", required=True, help="comma-separated parts, e.g. 4,2,2,1")
    q.add_argument("--a_n", "--a-n", dest="a_n", type=float, required=True)
    q.add_argument("--grid", default="0:3:0.25")
    p.set_defaults(func=cmd_young)

    p = sub.add_parser("nd", help="processes on N^d")
    p.add_argument("--d", type=int, required=True)
    nsub = p.add_subparsers(dest="nd_cmd", required=True)
    q = nsub.add_parser("uniform-check", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q = nsub.add_parser("decay", parents=[common])
    q.add_argument("--n-max", type=int, required=True)
    q.add_argument("--n-min", type=int, default=2)
    q.add_argument("--start", choices=["max", "uniform"], default="max")
    q = nsub.add_parser("limit-point", parents=[common])
    q.add_argument("--nu", required=True)
    q.add_argument("--steps", type=int, required=True)
    q.add_argument("--replicas", type=int, default=100)
    p.set_defaults(func=cmd_nd)

    p = sub.add_parser("simulate", help="seeded Monte Carlo")
    ssub = p.add_subparsers(dest="sim_cmd", required=True)
    for name in ("up", "down"):
        q = ssub.add_parser(name, parents=[common])
        q.add_argument("file")
        q.add_argument("--start", required=True)
        q.add_argument("--target-rank", type=int, required=True)
        q.add_argument("--replicas", type=int, default=10_000)
    q = ssub.add_parser("ud", parents=[common])
    q.add_argument("file")
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--start", default=None)
    q.add_argument("--replicas", type=int, default=10_000)
    q.add_argument("--burn-in", type=int, default=20)
    q.add_argument("--thinning", type=int, default=1)
    q.add_argument("--samples", type=int, default=1)
    q = ssub.add_parser("young-up", parents=[common])
    q.add_argument("--mu", type=float, required=True)
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--replicas", type=int, default=10_000)
    q = ssub.add_parser("shape", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mu-schedule", default="n^-0.5", help="'0.01', 'n^-0.5' or 'c*n^alpha'")
    q.add_argument("--grid", default="0:3:0.25")
    q.add_argument("--replicas", type=int, default=200)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fixture", parents=[common], help="emit a built-in poset/rule document")
    p.add_argument("name", choices=[*FIXTURE_NAMES, "nd-const", "nd-level", "young"])
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--nu", default="0.5,0.5")
    p.add_argument("--mu", type=float, default=0.5)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DocumentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PosetChainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
