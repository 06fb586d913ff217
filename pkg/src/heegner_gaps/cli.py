"""Command-line front end.

    heegner-gaps functional
    heegner-gaps admissible --d -163 --tuple 0,2
    heegner-gaps classify --d -1 --elem 3,3
    heegner-gaps sieve --d -3 --N 200 --format csv

Every subcommand takes --d, --format {json,csv,text}, --output, --config and
--threads. A config file holds ``key = value`` lines whose keys are the long
flag names (dashes or underscores); flags on the command line win. Relative
output paths are resolved against $HEEGNER_GAPS_OUTPUT_DIR when it is set.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from itertools import islice
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .arithmetic import factor_element, classify
from .box_sieve import BetaParams, census, dyadic, full, mitsui_ratio
from .field_core import make_field, norm, parse_element
from .functional import ConsistencyError, PolyF, criterion
from .gap_lab import Which, corollary_decomposition, equidist_report, find_gap_pairs
from .tuples import HTuple, NoValidResidue, choose_v0, is_admissible, is_admissible_in_Z, modulus_m
from .weights import WeightConfig, WeightTable, empirical_sums

ENV_OUTPUT_DIR = "HEEGNER_GAPS_OUTPUT_DIR"
EXIT_OK, EXIT_VALIDATION, EXIT_CONSISTENCY = 0, 2, 3


class Result:
    """Payload of one command: a JSON-able dict, CSV rows and a text rendering."""

    def __init__(self, data: dict, rows: list[dict] | None = None, text: str | None = None):
        self.data = data
        self.rows = rows
        self.text = text


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from e


def _tuple(s: str) -> HTuple:
    """"0,2,6" gives rational shifts; "0:0;1:1" gives general elements a:b."""
    try:
        if ":" in s:
            shifts = [parse_element(p.replace(":", ",")) for p in s.replace(";", " ").split()]
        else:
            shifts = [int(v) for v in s.split(",") if v.strip()]
        return HTuple(tuple(shifts))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"malformed tuple {s!r}: {e}") from e


def _field(args):
    try:
        return make_field(args.d)
    except ValueError as e:
        raise ValidationError(str(e)) from e


class ValidationError(ValueError):
    pass


def _beta_params(args) -> BetaParams:
    return BetaParams(b=args.b, yprime=args.yprime, theta=args.theta)


def _field_meta(f) -> dict:
    return {"d": f.d, "basis": ["1", f.omega_kind.value]}


# --- commands -------------------------------------------------------------------


def cmd_field_info(args) -> Result:
    f = _field(args)
    data = {
        "d": f.d,
        "disc": f.disc,
        "omega": f.omega_kind.value,
        "omega_min_poly": f"x^2 - {f.trace_omega}x + {f.norm_omega}",
        "w_K": f.w_K,
        "m_K": str(f.m_K),
        "h_K": f.h_K,
        "R_K": str(f.R_K),
        "r1": f.r1,
        "r2": f.r2,
        "c_K": {"exact": f.c_K_symbolic, "value": round(f.c_K, 15)},
    }
    text = "\n".join(f"{k}: {v}" for k, v in data.items() if k != "c_K")
    text += f"\nc_K: {f.c_K_symbolic} = {f.c_K:.15f}"
    rows = [{"key": k, "value": v if k != "c_K" else data["c_K"]["value"]} for k, v in data.items()]
    return Result(data, rows, text)


def cmd_sieve(args) -> Result:
    f = _field(args)
    box = full(args.N) if args.shell == "full" else dyadic(args.N)
    cen = census(f, box, _beta_params(args), workers=args.threads)
    data = {"N": str(args.N), "shell": args.shell, **cen.to_dict()}
    if args.shell == "full":
        data["mitsui_ratio"] = round(mitsui_ratio(f, args.N), 12)
    lines = [f"{k}: {v}" for k, v in data.items() if k != "bands"]
    lines += ["band total primes g2 beta_ones"]
    lines += [f"{b['band']} {b['total']} {b['primes']} {b['g2']} {b['beta_ones']}" for b in data["bands"]]
    return Result(data, data["bands"], "\n".join(lines))


def cmd_classify(args) -> Result:
    f = _field(args)
    x = args.elem
    c = classify(f, x)
    data = {"element": str(x), "norm": norm(f, x), "class": c.tag.value, "big_omega": c.big_omega}
    if norm(f, x):
        fac = factor_element(f, x)
        data["unit"] = str(fac.unit)
        data["factors"] = [{"prime": str(p), "exponent": e, "norm": norm(f, p)} for p, e in fac.factors]
    text = f"{x} norm={data['norm']} {c.tag.value}"
    if data.get("factors"):
        text += " = (" + data["unit"] + ")" + "".join(
            f" ({r['prime']})" + (f"^{r['exponent']}" if r["exponent"] > 1 else "") for r in data["factors"]
        )
    return Result(data, data.get("factors", []), text)


def cmd_gaps(args) -> Result:
    f = _field(args)
    pairs = find_gap_pairs(f, args.tuple, args.Nmax, workers=args.threads)
    recs = []
    for p in islice(pairs, args.limit):
        dec = corollary_decomposition(f, p)
        recs.append(
            {
                "alpha1": str(p.alpha1),
                "alpha2": str(p.alpha2),
                "diff": str(p.diff),
                "norms1": [r.norm for r in dec.factors1],
                "norms2": [r.norm for r in dec.factors2],
                "inert": dec.inert_flagged,
                "identity_holds": dec.identity_holds,
                "decomposition": dec.to_dict(),
            }
        )
    data = {"Nmax": str(args.Nmax), "tuple": [str(h) for h in args.tuple.shifts], "count": len(recs), "pairs": recs}
    rows = [
        {
            "alpha1": r["alpha1"],
            "alpha2": r["alpha2"],
            "diff": r["diff"],
            "norms1": " ".join(map(str, r["norms1"])),
            "norms2": " ".join(map(str, r["norms2"])),
            "inert": r["inert"],
            "identity_holds": r["identity_holds"],
        }
        for r in recs
    ]
    text = "\n".join(
        f"({r['alpha1']}) ({r['alpha2']}) diff={r['diff']} norms={r['norms1']}/{r['norms2']}"
        + (" inert" if r["inert"] else "")
        for r in recs
    )
    return Result(data, rows, text or "no pairs")


def cmd_admissible(args) -> Result:
    f = _field(args)
    res = is_admissible(f, args.tuple)
    data: dict[str, Any] = {
        "tuple": [str(h) for h in args.tuple.shifts],
        "admissible": res.admissible,
        "witness": None if res.witness is None else {"generator": str(res.witness.generator), "norm": res.witness.norm},
    }
    if args.tuple.is_rational():
        data["admissible_in_Z"] = is_admissible_in_Z([h.a for h in args.tuple.shifts])
    data["D0"] = args.D0
    data["modulus"] = str(modulus_m(f, args.D0))
    try:
        data["v0"] = str(choose_v0(f, args.tuple, args.D0))
    except NoValidResidue:
        data["v0"] = None
    text = "true" if res.admissible else f"false (covers every class mod {res.witness.generator}, norm {res.witness.norm})"
    return Result(data, [{k: v for k, v in data.items() if k not in ("tuple", "witness")}], text)


def _poly(args) -> PolyF:
    if args.F is None:
        if args.k != 2:
            raise ValidationError("the default F has k = 2; pass --F for other k")
        return PolyF.standard()
    try:
        return PolyF.parse(args.F, args.k)
    except Exception as e:
        raise ValidationError(f"cannot parse F: {e}") from e


def cmd_functional(args) -> Result:
    F = _poly(args)
    rep = criterion(F, args.k, args.theta, args.eta, args.rho, args.mK)
    data = rep.to_dict()
    data["F"] = str(F)
    i2 = rep.I2[0]
    text = (
        f"I1={rep.I1} ({float(rep.I1):.6f})\n"
        f"I2=({i2[1]})*log{rep.params['B'] - 1} ({i2[2]:.6f})\n"
        f"I3~{rep.I3[0][1]:.6f}\n"
        f"Itilde~{rep.Itilde:.6f}\n"
        + ("POSITIVE" if rep.positive else "NOT POSITIVE")
    )
    rows = [
        {"quantity": "I1", "value": data["I1"]["value"]},
        *({"quantity": f"I2_m{r['m']}", "value": r["value"]} for r in data["I2"]),
        *({"quantity": f"I3_m{r['m']}", "value": r["value"]} for r in data["I3"]),
        {"quantity": "Itilde", "value": data["Itilde"]},
    ]
    return Result(data, rows, text)


def cmd_weights(args) -> Result:
    f = _field(args)
    F = _poly(args)
    cfg = WeightConfig(f, args.k, float(args.R), args.D0, F, args.tuple, _beta_params(args))
    table = WeightTable(cfg)
    data: dict[str, Any] = {
        "R": str(args.R),
        "support_size": len(table.support),
        "inversion_discrepancy": table.inversion_discrepancy(),
        "lambda_max": round(table.lambda_max, 12),
        "y_max": round(table.y_max, 12),
        "growth": round(table.lambda_max / (table.y_max * table.logR**args.k), 12) if table.y_max else None,
    }
    if args.N is not None:
        s = empirical_sums(cfg, args.N, table)
        data.update({"N": str(args.N), "S1": round(s.S1, 9), "S2": round(s.S2, 9), "n_alpha": s.n_alpha, "v0": str(s.v0)})
    if args.table:
        with _open_out(args.table) as fh:
            table.write_records(fh)
    text = "\n".join(f"{k}: {v}" for k, v in data.items())
    return Result(data, [data], text)


def cmd_equidist(args) -> Result:
    f = _field(args)
    rep = equidist_report(f, args.N, args.Q, Which(args.which), _beta_params(args))
    data = rep.to_dict()
    text = rep.to_csv() + f"# total max|eps| = {rep.total_max_eps:.6f}; sampled eps* total = {rep.total_eps_star:.6f}"
    return Result(data, data["rows"], text)


# --- plumbing -----------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=-1, help="Heegner field discriminant parameter")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--output", help="file to write (default: stdout)")
    p.add_argument("--config", help="key = value parameter file")
    p.add_argument("--threads", type=int, default=1)


def _beta_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--b", type=_frac, default=Fraction(1, 2))
    p.add_argument("--yprime", type=_frac, default=Fraction(1))
    p.add_argument("--theta", type=_frac, default=Fraction(2, 5))


def _F_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--F", help="polynomial in t1..tk; default 1-(t1+t2)+(t1^2+t2^2)")


COMMANDS: dict[str, Callable[[argparse.Namespace], Result]] = {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heegner-gaps", description="Bounded-gap diagnostics over class-number-one imaginary quadratic fields.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        _common(p)
        p.set_defaults(func=fn)
        COMMANDS[name] = fn
        return p

    add("field-info", cmd_field_info, "field constants")

    p = add("sieve", cmd_sieve, "census of a norm box")
    p.add_argument("--N", type=_frac, default=Fraction(100))
    p.add_argument("--shell", choices=("full", "dyadic"), default="full")
    _beta_flags(p)

    p = add("classify", cmd_classify, "factor one element")
    p.add_argument("--elem", type=parse_element, required=True, help='coordinates "a,b" over {1, omega}')

    p = add("gaps", cmd_gaps, "G2 pairs at distance <= 2")
    p.add_argument("--tuple", type=_tuple, default=HTuple.rational([0, 2]))
    p.add_argument("--Nmax", type=_frac, default=Fraction(50))
    p.add_argument("--limit", type=int, default=100)

    p = add("admissible", cmd_admissible, "admissibility of a shift tuple")
    p.add_argument("--tuple", type=_tuple, default=HTuple.rational([0, 2]))
    p.add_argument("--D0", type=int, default=5)

    p = add("functional", cmd_functional, "positivity criterion")
    _F_flags(p)
    p.add_argument("--theta", type=_frac, default=Fraction(2, 5))
    p.add_argument("--eta", type=_frac, default=Fraction(1, 250))
    p.add_argument("--rho", type=_frac, default=Fraction(1))
    p.add_argument("--mK", type=_frac, default=Fraction(2))

    p = add("weights", cmd_weights, "sieve weights, inversion check, S1 and S2")
    _F_flags(p)
    p.add_argument("--R", type=_frac, default=Fraction(20))
    p.add_argument("--D0", type=int, default=5)
    p.add_argument("--tuple", type=_tuple, default=HTuple.rational([0, 2]))
    p.add_argument("--N", type=_frac, default=None, help="also evaluate S1, S2 over A(N)")
    p.add_argument("--table", help="write the weight table as JSON lines to this path")
    _beta_flags(p)

    p = add("equidist", cmd_equidist, "residue-class remainders")
    p.add_argument("--N", type=_frac, default=Fraction(100))
    p.add_argument("--Q", type=int, default=50)
    p.add_argument("--which", choices=("primes", "beta"), default="primes")
    _beta_flags(p)
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{ln}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.lstrip("-").replace("-", "_")] = v
    return out


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        # re-parse with the file's values placed before the explicit flags
        sub_argv = [argv[0]] if argv else []
        for k, v in cfg.items():
            if k not in vars(args):
                raise ValidationError(f"unknown config key {k!r} for {args.command}")
            sub_argv += [f"--{k}", v]
        args = parser.parse_args(sub_argv + [a for a in argv if a != argv[0]])
    return args


def _resolve(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(ENV_OUTPUT_DIR)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _open_out(path: str):
    return open(_resolve(path), "w", newline="")


def render(args, res: Result) -> str:
    if args.format == "json":
        meta = {"program": "heegner-gaps", "version": __version__, "command": args.command}
        if hasattr(args, "d") and args.command != "functional":
            meta.update(_field_meta(make_field(args.d)))
        return json.dumps({"meta": meta, "data": res.data}, indent=2, sort_keys=False) + "\n"
    if args.format == "csv":
        rows = res.rows or []
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue()
    return (res.text or "") + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        res = args.func(args)
        out = render(args, res)
    except SystemExit as e:  # argparse
        return int(e.code or 0)
    except ConsistencyError as e:
        print(f"consistency failure: {e}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (ValueError, ArithmeticError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.output:
        with _open_out(args.output) as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
