"""Command-line front end.

    vqss deal        deal Shamir shares to n shareholders
    vqss run         one full session (optionally with a cheating participant)
    vqss attack      Monte Carlo (or --exhaustive exact) attack statistics
    vqss properties  MUB / unitary / secrecy self-checks

Exit codes: 0 success, 2 invalid configuration, 3 verification rejected,
4 I/O error, 5 property-suite failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import rng as rngmod
from .adversary import (
    REPORT_FIELDS,
    STRATEGIES,
    AttackError,
    FakeShare,
    InterceptResend,
    LyingMeasurer,
    StateReplacement,
    run_attack,
)
from .exhaustive import BranchCapExceeded, exact_rates
from .gf import FieldError, PrimeModulus
from .protocol import (
    ClassicalDeal,
    ProtocolError,
    SessionParams,
    Verdict,
    deal_classical,
    run_session,
)
from .properties import run_suite
from .qudit import QuditError
from .sss import SharingError, Share, component, interpolate_at_zero

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_REJECTED = 3
EXIT_IO = 4
EXIT_PROPERTIES = 5

SHARES_SCHEMA = "vqss.shares/1"
REPORT_SCHEMA = "vqss.attack-report/1"

_VALIDATION = (FieldError, SharingError, ProtocolError, AttackError, QuditError, BranchCapExceeded)


class ConfigError(ValueError):
    pass


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_session_args(p, *, with_secrets=True):
    p.add_argument("--d", type=int, default=7, help="qudit dimension (odd prime)")
    p.add_argument("--t", type=int, default=2, help="threshold")
    p.add_argument("--n", type=int, default=4, help="number of shareholders")
    p.add_argument("--m", type=int, default=None, help="participants in the line (default n)")
    p.add_argument("--xs", type=_int_list, default=None, help="public x values, default 1..n")
    if with_secrets:
        p.add_argument("--s1", type=int, default=6)
        p.add_argument("--s2", type=int, default=3, help="nonzero")
    p.add_argument("--seed", type=int, default=None, help="master seed (random if omitted, always echoed)")
    p.add_argument("--output", default=None, help="write result here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vqss", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deal", help="deal classical shares")
    _add_session_args(p, with_secrets=False)
    p.add_argument("--s", type=int, default=None, help="private value (random if omitted)")
    p.add_argument("--unsafe-dump", action="store_true", help="include s and the polynomial")

    p = sub.add_parser("run", help="run one session")
    _add_session_args(p)
    p.add_argument("--shares", default=None, help="share file from `vqss deal`")
    p.add_argument("--order", type=_int_list, default=None, help="line order by shareholder id")
    p.add_argument("--corrupt-participant", type=int, default=None, metavar="K",
                   help="line position (1-based) that uses a forged component")
    p.add_argument("--unsafe-dump", action="store_true", help="include sealed dealer data")

    p = sub.add_parser("attack", help="attack statistics")
    _add_session_args(p)
    p.add_argument("--strategy", required=True, choices=sorted(STRATEGIES))
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--position", type=int, default=None, help="link Bob_j -> Bob_j+1 (0 = dealer)")
    p.add_argument("--cheater", type=int, default=1, help="fake-share line position (1-based)")
    p.add_argument("--inclusive", action="store_true", help="samplers may return the honest value")
    p.add_argument("--per-qudit", action="store_true", help="intercept: one basis guess per qudit")
    p.add_argument("--exhaustive", action="store_true", help="exact rational rates by enumeration")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("properties", help="run the self-check suite")
    p.add_argument("--d", type=_int_list, default=[3, 5, 7, 11], help="comma-separated dimensions")
    p.add_argument("--census", default="3:2,5:2,5:3", help="d:t pairs for the secrecy census")
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return ap


def _params(args, xs=None):
    return SessionParams.build(args.d, args.t, args.n, args.m,
                               xs=xs if xs is not None else args.xs,
                               order=getattr(args, "order", None))


def _secrets(args, mod: PrimeModulus):
    if args.s2 % args.d == 0:
        raise ConfigError("--s2 must be nonzero mod d")
    return mod(args.s1), mod(args.s2)


def _flat(value):
    if isinstance(value, (list, tuple)):
        return " ".join(_flat(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return "" if value is None else str(value)


def _render(doc: dict, fmt: str, fields=None) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    fields = list(fields or doc.keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    w.writerow([_flat(doc.get(f)) for f in fields])
    return buf.getvalue()


def _emit(text: str, output: str | None, note: str | None = None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
        if note:
            print(note)
    else:
        sys.stdout.write(text)
        if note:
            print(note, file=sys.stderr)


def cmd_deal(args) -> int:
    params = _params(args)
    mod = params.d
    r = rngmod.stream(args.seed, rngmod.DEAL, 0)
    s = mod(args.s) if args.s is not None else None
    deal = deal_classical(params, r, s=s)
    doc = {
        "schema": SHARES_SCHEMA,
        "d": mod.d,
        "t": params.t,
        "n": params.n,
        "seed": args.seed,
        "shares": [{"x": sh.x.value, "y": sh.y.value} for sh in deal.shares.values()],
    }
    if args.unsafe_dump:
        doc["unsafe"] = {
            "s": deal.s.value,
            "coefficients": [c.value for c in deal.polynomial.coefficients],
        }
    if args.format == "csv":
        text = "x,y\n" + "".join(f"{sh['x']},{sh['y']}\n" for sh in doc["shares"])
    else:
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, args.output, f"dealt {params.n} shares (d={mod.d}, t={params.t}, seed={args.seed})")
    return EXIT_OK


def load_shares(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != SHARES_SCHEMA:
        raise ConfigError(f"{path}: not a share file")
    return doc


def _deal_from_file(doc, args):
    """Rebuild the dealer's view from a share file: s is the interpolant at 0."""
    args.d, args.t, args.n = int(doc["d"]), int(doc["t"]), int(doc["n"])
    params = _params(args, xs=[sh["x"] for sh in doc["shares"]])
    mod = params.d
    shares = [Share(mod(sh["x"]), mod(sh["y"])) for sh in doc["shares"]]
    base = shares[: params.t]
    for sh in shares[params.t:]:
        if not _on_curve(base, sh):
            raise ConfigError(f"share x={sh.x.value} is inconsistent with a degree < t polynomial")
    s = interpolate_at_zero(base)
    return params, ClassicalDeal(s, {p.ident: sh for p, sh in zip(params.shareholders, shares)})


def _on_curve(base, sh):
    mod = sh.modulus
    acc = mod.zero
    for i, si in enumerate(base):
        w = mod.one
        for j, sj in enumerate(base):
            if i != j:
                w = w * (sh.x - sj.x) / (si.x - sj.x)
        acc = acc + si.y * w
    return acc == sh.y


def cmd_run(args) -> int:
    if args.shares:
        params, deal = _deal_from_file(load_shares(args.shares), args)
    else:
        params = _params(args)
        deal = deal_classical(params, rngmod.stream(args.seed, rngmod.DEAL, 0))
    secrets = _secrets(args, params.d)
    hooks = None
    if args.corrupt_participant is not None:
        hooks = FakeShare(args.corrupt_participant).resolve(params).hooks(params)
    tr = run_session(params, secrets, rngmod.stream(args.seed, rngmod.SESSION, 0),
                     deal=deal, hooks=hooks)
    doc = tr.to_dict(include_secrets=args.unsafe_dump)
    doc["seed"] = args.seed
    ok = tr.verdict is Verdict.ACCEPTED and tuple(tr.recovered[:2]) == secrets
    S1, S2 = (v.value for v in tr.recovered[:2])
    note = f"verdict: {tr.verdict.value}; recovered S1={S1} S2={S2} (seed={args.seed})"
    _emit(_render(doc, args.format), args.output, note)
    return EXIT_OK if ok else EXIT_REJECTED


def _strategy(args):
    name = args.strategy
    if name == "intercept-resend":
        return InterceptResend(args.position, per_qudit=args.per_qudit)
    if name == "fake-share":
        return FakeShare(args.cheater, inclusive=args.inclusive)
    if name == "lying-measurer":
        return LyingMeasurer(inclusive=args.inclusive)
    return StateReplacement(args.position)


def _exhaustive(args, params, secrets, strategy) -> dict:
    """Exact rates for one honest configuration drawn from the seed."""
    d = params.d.d
    r = rngmod.stream(args.seed, rngmod.DEAL, 0)
    deal = deal_classical(params, r)
    xs = params.active_xs
    comps = [component(deal.shares[p.ident], xs).value for p in params.active]
    masks = [tuple(int(v) for v in r.integers(0, d, 3)) for _ in params.active]
    knobs = {}
    if isinstance(strategy, (InterceptResend, StateReplacement)):
        knobs["position"] = strategy.position
    if isinstance(strategy, InterceptResend):
        knobs["per_qudit"] = strategy.per_qudit
    if isinstance(strategy, FakeShare):
        knobs.update(cheater=strategy.cheater, inclusive=strategy.inclusive)
    if isinstance(strategy, LyingMeasurer):
        knobs["inclusive"] = strategy.inclusive
    rates = exact_rates(strategy.name, d, (secrets[0].value, secrets[1].value), deal.s.value,
                        comps, masks, **knobs)
    pred = strategy.prediction(d)
    return {
        "schema": REPORT_SCHEMA,
        "strategy": strategy.name,
        "d": d, "t": params.t, "n": params.n, "m": params.m,
        "mode": "exhaustive",
        "exact": rates.to_dict(),
        "prediction": None if pred is None else f"{pred.numerator}/{pred.denominator}",
        "seed": args.seed,
        "knobs": knobs,
    }


def cmd_attack(args) -> int:
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    params = _params(args)
    secrets = _secrets(args, params.d)
    strategy = _strategy(args).resolve(params)
    if args.exhaustive:
        doc = _exhaustive(args, params, secrets, strategy)
        note = f"{strategy.name} d={params.d.d}: exact detection {doc['exact']['detection']}"
        if args.format == "csv":
            flat = {k: v for k, v in doc.items() if k != "exact"}
            flat.update({f"exact_{k}": v for k, v in doc["exact"].items()})
            text = _render(flat, "csv")
        else:
            text = _render(doc, "json")
        _emit(text, args.output, note)
        return EXIT_OK
    rep = run_attack(strategy, params, secrets, args.trials, args.seed, workers=args.workers)
    doc = {"schema": REPORT_SCHEMA, **rep.to_dict()}
    note = (f"{rep.strategy} d={rep.d}: detection {rep.detection_rate:.4f} "
            f"(prediction {rep.prediction}), seed={args.seed}")
    _emit(_render(doc, args.format, ("schema", *REPORT_FIELDS)), args.output, note)
    return EXIT_OK


def cmd_properties(args) -> int:
    census = []
    for item in args.census.split(","):
        d, t = item.split(":")
        census.append((int(d), int(t)))
    results = run_suite(tuple(args.d), tuple(census), perturb=args.perturb,
                        cyclic_dims=tuple(d for d in args.d if d <= 7))
    passed = all(r.passed for r in results)
    doc = {
        "passed": passed,
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "passed", "detail"])
        for r in results:
            w.writerow([r.name, r.passed, r.detail])
        text = buf.getvalue()
    else:
        text = json.dumps(doc, indent=2) + "\n"
    for r in results:
        print(r.line(), file=sys.stderr)
    _emit(text, args.output)
    return EXIT_OK if passed else EXIT_PROPERTIES


COMMANDS = {"deal": cmd_deal, "run": cmd_run, "attack": cmd_attack, "properties": cmd_properties}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "seed") and args.seed is None:
        args.seed = rngmod.fresh_seed()
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ZeroDivisionError, *_VALIDATION) as e:
        print(f"vqss: invalid configuration: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"vqss: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, json.JSONDecodeError) as e:
        print(f"vqss: invalid input file: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
