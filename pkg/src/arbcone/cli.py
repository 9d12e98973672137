"""Command-line front end.

Exit codes: 0 arbitrage free (or plain success), 2 arbitrage found,
1 input error, 3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Mapping

from arbcone.cones import PolyhedralCone, base_of, is_plasterable
from arbcone.counterexample import decay_report
from arbcone.generate import random_market
from arbcone.geometry import (
    C1,
    CONDITION_NAMES,
    InternalConsistencyError,
    base_distance,
    certify_market,
    equivalence_report,
)
from arbcone.market import (
    MarketError,
    Portfolio,
    discounted_gains,
    parse_market,
    portfolio_report,
    strategy_subspace,
)
from arbcone.rational import format_rational, format_vector, parse_rational
from arbcone.space import ScenarioSpace, Subspace

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ARBITRAGE = 2
EXIT_INCONSISTENT = 3


class InputError(ValueError):
    pass


def _read_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc.msg} (line {exc.lineno})") from None


def parse_cone(doc: Mapping[str, Any]) -> PolyhedralCone:
    """Cone JSON: ``{"dimension", "weights"?, "generators"}``."""
    try:
        m = doc["dimension"]
        if not isinstance(m, int) or m < 1:
            raise InputError("dimension: must be a positive integer")
        weights = doc.get("weights")
        if weights is None:
            space = ScenarioSpace.unit(m)
        else:
            if len(weights) != m:
                raise InputError(f"weights: expected {m} entries")
            space = ScenarioSpace(tuple(parse_rational(w) for w in weights))
        gens = []
        for j, g in enumerate(doc["generators"]):
            if len(g) != m:
                raise InputError(f"generators[{j}]: expected {m} entries")
            gens.append(tuple(parse_rational(x) for x in g))
        return PolyhedralCone(space, tuple(gens))
    except KeyError as exc:
        raise InputError(f"{exc.args[0]}: missing field") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from None


def load_instance(doc: Mapping[str, Any]) -> tuple[Subspace, PolyhedralCone]:
    """Market JSON (orthant cone, gain span) or cone JSON plus ``"subspace"``."""
    if not isinstance(doc, Mapping):
        raise InputError("$: expected a JSON object")
    if "scenarios" in doc:
        mkt = parse_market(doc)
        return strategy_subspace(discounted_gains(mkt)), PolyhedralCone.orthant(mkt.space)
    cone = parse_cone(doc)
    vectors = []
    for i, v in enumerate(doc.get("subspace", [])):
        if len(v) != cone.dimension:
            raise InputError(f"subspace[{i}]: expected {cone.dimension} entries")
        try:
            vectors.append(tuple(parse_rational(x) for x in v))
        except ValueError as exc:
            raise InputError(f"subspace[{i}]: {exc}") from None
    return Subspace(tuple(vectors), cone.space), cone


def _emit(args: argparse.Namespace, payload: dict[str, Any], text: str) -> None:
    out = json.dumps(payload, indent=2) if args.format == "json" else text
    if args.out:
        Path(args.out).write_text(out + "\n")
    else:
        print(out)


def _vec(v) -> str:
    return "(" + ", ".join(format_vector(v)) + ")"


def cmd_check(args: argparse.Namespace) -> int:
    mkt = parse_market(_read_json(args.market))
    if args.portfolio is None:
        cert = certify_market(mkt)
        payload = {"arbitrage_free": cert.arbitrage_free}
        text = "arbitrage free" if cert.arbitrage_free else "arbitrage exists"
        _emit(args, payload, text)
        return EXIT_OK if cert.arbitrage_free else EXIT_ARBITRAGE
    try:
        xi = tuple(parse_rational(x) for x in args.portfolio.split(","))
        bond = parse_rational(args.bond) if args.bond is not None else None
    except ValueError as exc:
        raise InputError(f"portfolio: {exc}") from None
    rep = portfolio_report(mkt, Portfolio(xi, bond))
    payload = {
        "cost": format_rational(rep.cost),
        "values": format_vector(rep.values),
        "discounted_gains": format_vector(rep.gains),
        "is_arbitrage": rep.is_arbitrage,
    }
    text = "\n".join(
        [
            f"cost             {format_rational(rep.cost)}",
            f"value            {_vec(rep.values)}",
            f"discounted gains {_vec(rep.gains)}",
            f"is arbitrage     {'yes' if rep.is_arbitrage else 'no'}",
        ]
    )
    _emit(args, payload, text)
    return EXIT_ARBITRAGE if rep.is_arbitrage else EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    mkt = parse_market(_read_json(args.market))
    cert = certify_market(mkt)
    payload = cert.to_json()
    if cert.arbitrage_free:
        text = "\n".join(
            [
                "arbitrage free",
                f"martingale measure {_vec(cert.measure.probabilities)}",
                f"density            {_vec(cert.measure.density)}",
                f"margin             {format_rational(cert.measure.margin)}",
            ]
        )
    else:
        text = "\n".join(
            [
                "arbitrage found",
                f"portfolio        {_vec(cert.portfolio)}",
                f"discounted gains {_vec(cert.gains)}",
            ]
        )
    _emit(args, payload, text)
    return EXIT_OK if cert.arbitrage_free else EXIT_ARBITRAGE


def cmd_distance(args: argparse.Namespace) -> int:
    L, K = load_instance(_read_json(args.instance))
    v = base_distance(base_of(K), L)
    payload = {
        "distance": format_rational(v.value),
        "remote": v.holds,
        "closest_pair": {"base_point": format_vector(v.certificate["x"]), "subspace_point": format_vector(v.certificate["v"])},
    }
    text = "\n".join(
        [
            f"distance        {format_rational(v.value)}",
            f"base point      {_vec(v.certificate['x'])}",
            f"subspace point  {_vec(v.certificate['v'])}",
        ]
    )
    _emit(args, payload, text)
    return EXIT_OK if v.holds else EXIT_ARBITRAGE


def cmd_plaster(args: argparse.Namespace) -> int:
    cone = parse_cone(_read_json(args.cone))
    rep = is_plasterable(cone)
    if rep.plasterable:
        payload = {
            "plasterable": True,
            "witness": format_vector(rep.witness.coefficients),
            "margin": format_rational(rep.margin),
        }
        text = f"plasterable\nwitness {_vec(rep.witness.coefficients)}\nmargin  {format_rational(rep.margin)}"
    else:
        payload = {"plasterable": False, "counter_witness": format_vector(rep.counter_witness)}
        text = f"not plasterable\nline through {_vec(rep.counter_witness)}"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_equivalence(args: argparse.Namespace) -> int:
    L, K = load_instance(_read_json(args.instance))
    report = equivalence_report(L, K, strict=False)
    payload = report.to_json()
    lines = [f"{key:<3} {CONDITION_NAMES[key]:<22} {'holds' if v.holds else 'fails'}"
             + (f"  value={format_rational(v.value)}" if v.value is not None else "")
             for key, v in report.conditions.items()]
    if report.notice:
        lines.append(f"notice: {report.notice}")
    lines.append(f"agree: {'yes' if report.agree else 'NO'}")
    _emit(args, payload, "\n".join(lines))
    if not report.agree:
        print("internal consistency failure: conditions disagree", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK if report.conditions[C1].holds else EXIT_ARBITRAGE


def cmd_counterexample(args: argparse.Namespace) -> int:
    if args.n_max < 1:
        raise InputError("--n-max must be at least 1")
    rows = decay_report(args.n_max)
    payload = {
        "rows": [
            {
                "N": r.n,
                "no_arbitrage": r.no_arbitrage,
                "margin": format_rational(r.margin),
                "distance": format_rational(r.distance),
            }
            for r in rows
        ],
        "note": "the 1/(2N) decay is a derived property of the truncations",
    }
    lines = [f"{'N':>4}  {'C1':<5}  {'margin':>8}  {'distance':>8}"]
    lines += [
        f"{r.n:>4}  {str(r.no_arbitrage).lower():<5}  {format_rational(r.margin):>8}  {format_rational(r.distance):>8}"
        for r in rows
    ]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_random(args: argparse.Namespace) -> int:
    if args.assets < 1 or args.scenarios < 1:
        raise InputError("--assets and --scenarios must be at least 1")
    if args.count < 0:
        raise InputError("--count must be nonnegative")
    rng = random.Random(args.seed)
    outdir = Path(args.out) if args.out else None
    if outdir is not None and args.count:
        outdir.mkdir(parents=True, exist_ok=True)
    counts = {"arbitrage_free": 0, "arbitrage": 0}
    files = []
    for k in range(args.count):
        mkt = random_market(rng, args.assets, args.scenarios)
        cert = certify_market(mkt)  # raises if the alternative is violated
        counts["arbitrage_free" if cert.arbitrage_free else "arbitrage"] += 1
        if outdir is not None:
            path = outdir / f"market_{k:04d}.json"
            path.write_text(json.dumps(mkt.to_json(), indent=2) + "\n")
            files.append(str(path))
    summary = {
        "seed": args.seed,
        "count": args.count,
        **counts,
        "exclusive": args.count,
        "files": files,
    }
    text = (
        f"{args.count} markets: {counts['arbitrage_free']} arbitrage free, "
        f"{counts['arbitrage']} with arbitrage; exactly one alternative held on every instance"
    )
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--out", help="write the report to this path")

    parser = argparse.ArgumentParser(
        prog="arbcone", description="Exact no-arbitrage geometry for one-period markets."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="decide arbitrage freeness or test a portfolio")
    p.add_argument("market")
    p.add_argument("--portfolio", help="comma-separated risky positions, e.g. 1,-1/2")
    p.add_argument("--bond", help="bond position (affects cost and value only)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("certify", parents=[common], help="arbitrage portfolio or martingale measure")
    p.add_argument("market")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("distance", parents=[common], help="distance from the cone base to the subspace")
    p.add_argument("instance")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("plaster", parents=[common], help="decide plasterability of a cone")
    p.add_argument("cone")
    p.set_defaults(func=cmd_plaster)

    p = sub.add_parser("equivalence", parents=[common], help="run all six conditions")
    p.add_argument("instance")
    p.set_defaults(func=cmd_equivalence)

    p = sub.add_parser("counterexample", parents=[common], help="decay table of the truncated l1 example")
    p.add_argument("--n-max", type=int, default=10)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("random", parents=[common], help="generate and certify seeded random markets")
    p.add_argument("--assets", type=int, default=2)
    p.add_argument("--scenarios", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(func=cmd_random)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, MarketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
