"""Command line front end.

    atlas bernstein|triangle|springer|packets --config FILE [--bound N] [--q Q] [--json|--csv]

The config file holds ``key = value`` lines; ``#`` starts a comment.

    root_datum = G2            # Cartan type, factors joined by "x"
    isogeny = sc               # sc, ad or explicit
    lattice = 1 0; 0 1         # rows of a basis of X_* (explicit isogeny only)
    character = 1/2 0          # one line per generator of c_s, values on the simple roots
    p = 5                      # residual characteristic (optional)
    bound = 4                  # denominator bound of the torus grid
    q = formal                 # or a power of p
    format = text              # text, json or csv

Exit codes: 0 on success, 2 when a computed invariant fails, 3 for bad input.
"""
import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .packets import LabelError, fiber_points, packet_report
from .params import GridTooLarge, ParameterError, enumerate_triangle, fmt_frac, fmt_point, rho_text
from .rootdata import RootDatumError, WeylOrderError, build_root_datum, max_weyl_order
from .springer import extended_springer_table, irrep_str, springer_table
from .torus import (FiniteTorusSubgroup, bernstein_data, check_condition_char, connectedness_hint,
                    identity_point, point_from_coweights)

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 2, 3
MAX_BOUND = int(os.environ.get("ATLAS_MAX_BOUND", 12))
COMMANDS = ("bernstein", "triangle", "springer", "packets")
KEYS = {"root_datum", "isogeny", "lattice", "character", "p", "bound", "q", "format"}


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass
class JobConfig:
    root_datum: str
    isogeny: str = "sc"
    lattice: list = None
    characters: list = field(default_factory=list)
    p: int = None
    bound: int = 2
    q: object = "formal"            # "formal" or a positive integer
    fmt: str = "text"


# ------------------------------------------------------------ config parsing

def _rational(text, where):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{where}: {text!r} is not a rational number")


def _int(text, where, what):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{where}: {what} must be an integer, got {text!r}")


def _parse_q(text, where):
    if text == "formal":
        return "formal"
    q = _int(text, where, "q")
    if q < 2:
        raise ConfigError(f"{where}: q must be at least 2")
    return q


def parse_config(text, name="<config>"):
    vals, lines = {}, {}
    chars = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{name}:{n}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key == "character":
            for vec in value.split(";"):
                chars.append(([_rational(x, where) for x in vec.split()], where))
            continue
        if key in vals:
            raise ConfigError(f"{where}: {key} given twice")
        vals[key], lines[key] = value, where
    if "root_datum" not in vals:
        raise ConfigError(f"{name}: root_datum is required")
    cfg = JobConfig(root_datum=vals["root_datum"])
    if "isogeny" in vals:
        if vals["isogeny"] not in ("sc", "ad", "explicit"):
            raise ConfigError(f"{lines['isogeny']}: isogeny must be sc, ad or explicit")
        cfg.isogeny = vals["isogeny"]
    if "lattice" in vals:
        w = lines["lattice"]
        cfg.lattice = [[_int(x, w, "lattice entries") for x in row.split()]
                       for row in vals["lattice"].split(";")]
    if "p" in vals:
        cfg.p = _int(vals["p"], lines["p"], "p")
        if not sympy.isprime(cfg.p):
            raise ConfigError(f"{lines['p']}: p = {cfg.p} is not prime")
    if "bound" in vals:
        cfg.bound = _int(vals["bound"], lines["bound"], "bound")
    if "q" in vals:
        cfg.q = _parse_q(vals["q"], lines["q"])
    if "format" in vals:
        if vals["format"] not in ("text", "json", "csv"):
            raise ConfigError(f"{lines['format']}: format must be text, json or csv")
        cfg.fmt = vals["format"]
    cfg.characters = chars
    return cfg


def _check_bounds(cfg):
    if not 1 <= cfg.bound <= MAX_BOUND:
        raise ConfigError(f"bound must lie in 1..{MAX_BOUND}")
    if cfg.q != "formal" and cfg.p is not None:
        if sympy.multiplicity(cfg.p, cfg.q) == 0 or cfg.p ** sympy.multiplicity(cfg.p, cfg.q) != cfg.q:
            raise ConfigError(f"q = {cfg.q} is not a power of p = {cfg.p}")


def build_job(cfg):
    """(root datum, c_s) from a parsed config."""
    try:
        rd = build_root_datum(cfg.root_datum, cfg.isogeny, cfg.lattice)
    except (RootDatumError, ValueError, KeyError) as e:
        raise ConfigError(f"bad root datum: {e}")
    pts = []
    for vec, where in cfg.characters:
        if len(vec) != rd.rank:
            raise ConfigError(f"{where}: character has {len(vec)} entries, rank is {rd.rank}")
        pts.append(point_from_coweights(rd, vec))
    return rd, FiniteTorusSubgroup(tuple(pts) or (identity_point(rd.rank),))


# ------------------------------------------------------------ output helpers

def q_power(a, q):
    """q^a exactly: symbolic for formal q, simplified for numeric q."""
    a = Fraction(a)
    if q == "formal":
        return f"q^{{{fmt_frac(a)}}}"
    return str(sympy.Integer(q) ** sympy.Rational(a.numerator, a.denominator))


def formal_point_text(t, exponent, q):
    out = []
    for a, b in zip(t.v, exponent):
        parts = []
        if a:
            parts.append(f"e({fmt_frac(a)})")
        if b:
            parts.append(q_power(b, q))
        out.append("*".join(parts) or "1")
    return "(" + ",".join(out) + ")"


def emit(rows, fmt, header=None, extra=None):
    """rows is a list of dicts with a fixed key order."""
    if fmt == "json":
        doc = {"rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=1, sort_keys=True)
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) for k in keys}
    lines = []
    if header:
        lines.append(header)
    lines.append("  ".join(k.ljust(widths[k]) for k in keys).rstrip())
    for r in rows:
        lines.append("  ".join(str(r[k]).ljust(widths[k]) for k in keys).rstrip())
    return "\n".join(lines)


# ------------------------------------------------------------ commands

def cmd_bernstein(cfg, rd, c_s):
    B = bernstein_data(rd, c_s)
    H = B.H
    hint = connectedness_hint(rd, c_s, cfg.p)
    same = len(H.roots) == len(rd.roots)
    pi = H.pi0_group
    ws = "1" if len(B.Ws) == 1 else f"order {len(B.Ws)}, {H.describe()}"
    info = {
        "root_datum": f"{rd.type_label} ({rd.isogeny})",
        "H": "G" if same else H.type_label,
        "H_type": H.type_label,
        "connected": H.is_connected,
        "pi0_order": pi.order,
        "Ws_order": len(B.Ws),
        "Ws": ws,
        "sc_criterion_applies": hint.sc_criterion_applies,
    }
    if cfg.p is not None:
        rep = check_condition_char(rd, cfg.p)
        info["condition_p"] = cfg.p
        info["condition"] = rep.ok
        info["condition_factors"] = {k: v for k, v in rep.factors}
    if cfg.fmt != "text":
        rows = [{"key": k, "value": json.dumps(v, sort_keys=True) if isinstance(v, dict) else v}
                for k, v in info.items()]
        if cfg.fmt == "json":
            return json.dumps(info, indent=1, sort_keys=True)
        return emit(rows, "csv")
    lines = [f"root datum: {info['root_datum']}"]
    if same:
        lines.append("H = G")
    lines.append(f"H: {H.type_label}, {'connected' if H.is_connected else 'disconnected'}")
    lines.append(f"pi0(H): order {pi.order}")
    lines.append(f"W^s = {ws}")
    lines.append(f"simply connected criterion applies: {'yes' if hint.sc_criterion_applies else 'no'}")
    if cfg.p is not None:
        verdict = "holds" if info["condition"] else "fails"
        bad = [k for k, v in info["condition_factors"].items() if not v]
        lines.append(f"condition at p = {cfg.p}: {verdict}" + (f" ({', '.join(bad)})" if bad else ""))
    return "\n".join(lines)


def cmd_triangle(cfg, rd, c_s):
    r = enumerate_triangle(rd, c_s, cfg.bound)
    rows = [{"orbit": fmt_point(x.t), "size": x.orbit_size, "extq2": x.extq2, "klr": x.klr,
             "match": x.ok} for x in r.rows]
    status = "match" if r.counts_match else "MISMATCH"
    if cfg.fmt == "json":
        out = json.dumps(r.to_json(), indent=1, sort_keys=True)
    else:
        out = emit(rows, cfg.fmt, header=f"# {rd.type_label} ({rd.isogeny}), bound {cfg.bound}")
        if cfg.fmt == "text":
            out += f"\ntotal: extq2 {r.extq2_total}, klr {r.klr_total}, {status}"
    if not r.counts_match:
        raise InvariantViolation(out + "\ntriangle counts do not match")
    return out


def cmd_springer(cfg, rd, c_s):
    H = bernstein_data(rd, c_s).H
    rows = [{"class": str(d.cls), "rho": rho_text(d.rho),
             "irrep": irrep_str(d.irrep) if d.geometric else "-"} for d in springer_table(H)]
    ext = [{"class": str(e.cls), "rho": rho_text(e.rho), "sigma": e.sigma,
            "orbit": e.orbit_size, "irrep": irrep_str(e.irrep)}
           for e in extended_springer_table(H)]
    if cfg.fmt == "json":
        return json.dumps({"springer": rows, "extended": ext}, indent=1, sort_keys=True)
    if cfg.fmt == "csv":
        return emit(rows, "csv")
    return emit(rows, "text", header=f"# Springer table of H = {H.type_label}") + "\n\n" + \
        emit(ext, "text", header=f"# extended table, |Irr| = {len(ext)}")


def cmd_packets(cfg, rd, c_s):
    rep = packet_report(rd, c_s, cfg.bound)
    comps = []
    for lc in rep.table.components:
        half = tuple(Fraction(x) / 2 for x in lc.h_c)
        comps.append({
            "index": lc.index, "w": lc.w, "base": fmt_point(lc.component.base), "dim": lc.dim,
            "label": lc.h_label, "h_c": "(" + ",".join(fmt_frac(x) for x in lc.h_c) + ")",
            "theta_at_sqrtq": formal_point_text(lc.component.base, half, cfg.q),
            "warning": lc.warning,
        })
    packets = [[f"[{p.w},{fmt_point(p.t)}]" for p in g] for g in rep.packets]
    if cfg.fmt == "json":
        out = json.dumps({"components": comps, "packets": packets,
                          "theta_checks": rep.theta_checks,
                          "label_mismatches": [fmt_point(t) for t in rep.label_count_mismatches]},
                         indent=1, sort_keys=True)
    elif cfg.fmt == "csv":
        out = emit(comps, "csv")
    else:
        out = emit(comps, "text", header=f"# components of T//W^s for {rd.type_label} ({rd.isogeny})")
        out += "\n\n# packets\n" + "\n".join("{" + ", ".join(g) + "}" for g in packets)
        out += f"\n\ntheta checks: {rep.theta_checks}"
    if rep.label_count_mismatches:
        raise InvariantViolation(out + "\nlabels disagree with the KLR fibres")
    return out


HANDLERS = {"bernstein": cmd_bernstein, "triangle": cmd_triangle,
            "springer": cmd_springer, "packets": cmd_packets}


# ------------------------------------------------------------ entry point

def make_parser():
    ap = argparse.ArgumentParser(prog="atlas", description="Principal series parameter tables.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="key = value job file")
    ap.add_argument("--bound", type=int, help="denominator bound of the torus grid")
    ap.add_argument("--q", help="'formal' or a prime power")
    g = ap.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true")
    g.add_argument("--csv", action="store_true")
    return ap


def run(argv, out=sys.stdout, err=sys.stderr):
    args = make_parser().parse_args(argv)
    try:
        if not os.path.isfile(args.config):
            raise ConfigError(f"{args.config}: no such file")
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read(), args.config)
        if args.bound is not None:
            cfg.bound = args.bound
        if args.q is not None:
            cfg.q = _parse_q(args.q, "--q")
        if args.json:
            cfg.fmt = "json"
        elif args.csv:
            cfg.fmt = "csv"
        _check_bounds(cfg)
        rd, c_s = build_job(cfg)
        text = HANDLERS[args.command](cfg, rd, c_s)
    except (ConfigError, GridTooLarge, WeylOrderError, ParameterError) as e:
        print(f"error: {e}", file=err)
        return EXIT_CONFIG
    except InvariantViolation as e:
        print(str(e), file=out)
        return EXIT_INVARIANT
    except (AssertionError, LabelError) as e:
        print(f"invariant violated: {e}", file=err)
        return EXIT_INVARIANT
    print(text, file=out)
    return EXIT_OK


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
