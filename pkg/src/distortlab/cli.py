"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import mpmath

from . import experiments as ex
from .config import RunConfig
from .errors import CapExceededError, DistortlabError, ValidationError
from .normkernel import (CACHE_FORMAT, MemoCache, brute_norm, cert_to_json, ell_norm, level_norm,
                         read_cache_file, run_ell_norm, run_norm, s_norm)
from .normkernel.cache import CACHE_FILE
from .tsirelson import best_family, odell_norm, t_theta_norm
from .vectorspace import load_vector, parse_runs, parse_vector, resolve_scaling, validate_scaling

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(v) -> str:
    """Human rendering: 9 decimals, trailing zeros dropped."""
    if isinstance(v, mpmath.mpf):
        v = float(v)
    if isinstance(v, float):
        s = f"{v:.9f}".rstrip("0").rstrip(".")
        return "0" if s == "-0" else s
    return str(v)


def _full(v):
    if isinstance(v, mpmath.mpf):
        return str(v)
    return v


def _theta_n(text: str) -> int:
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        if sep and num.strip() == "1":
            n = int(den)
        elif not sep:
            n = int(num)
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"theta must look like 1/n, got {text!r}") from None
    if n < 2:
        raise UsageError("theta = 1/n needs n >= 2")
    return n


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None


class Session:
    """Resolved configuration plus output helpers for one invocation."""

    def __init__(self, args, out):
        base = RunConfig.load(args.config) if args.config else RunConfig()
        output = "json" if args.json else "csv" if args.csv else None
        self.cfg = base.merged(f=args.f, tol=args.tol, precision=args.precision, seed=args.seed,
                               cache_dir=args.cache_dir, jobs=args.jobs, output=output)
        self.f = resolve_scaling(self.cfg.f)
        self.out = out
        self.cache = None
        if self.cfg.cache_dir and self.cfg.precision is None:
            self.cache = MemoCache(Path(self.cfg.cache_dir) / CACHE_FILE)

    @property
    def mode(self):
        return self.cfg.output

    def emit(self, kind, payload, header=None, rows=None, human=None):
        if self.mode == "json":
            print(ex.json_report(kind, payload, tol=self.cfg.tol), file=self.out)
        elif self.mode == "csv":
            if header is None:
                header = list(payload)
                rows = [[payload[k] for k in header]]
            print(ex.csv_report(kind, header, rows), end="", file=self.out)
        else:
            for line in human or []:
                print(line, file=self.out)

    def save_cache(self):
        if self.cache is not None and len(self.cache):
            self.cache.save(self.f)


def _vector(args):
    text = args.vector
    if args.runs or ("x" in text and not text.lstrip().startswith("{") and not text.endswith(".json")):
        return parse_runs(text)
    return load_vector(text)


def cmd_norm(s: Session, args):
    v = _vector(args)
    cfg = s.cfg
    is_runs = not hasattr(v, "entries")
    if args.ell is not None:
        if is_runs:
            val, cert = run_ell_norm(v, args.ell, s.f, run_cap=cfg.run_cap, straddle=cfg.straddle,
                                     precision=cfg.precision, tol=cfg.tol)
        else:
            val, cert = ell_norm(v, args.ell, s.f, cap=cfg.dense_cap, precision=cfg.precision, tol=cfg.tol)
    elif args.oracle:
        val, cert = brute_norm(v, s.f, cap=cfg.oracle_cap), None
    elif is_runs:
        val, cert = run_norm(v, s.f, run_cap=cfg.run_cap, straddle=cfg.straddle,
                             precision=cfg.precision, tol=cfg.tol)
    else:
        val, cert = s_norm(v, s.f, cap=cfg.dense_cap, precision=cfg.precision, tol=cfg.tol, cache=s.cache)
        s.save_cache()
    payload = {"value": _full(val), "ell": args.ell, "cert": cert_to_json(cert) if args.cert else None}
    human = [fmt(val)]
    if args.cert:
        human.append(f"cert {cert_to_json(cert)}")
    s.emit("norm", payload, ["value"], [[_full(val)]], human)


def cmd_levels(s: Session, args):
    v = load_vector(args.vector)
    rows = [(k, level_norm(v, k, s.f, cap=s.cfg.dense_cap)) for k in range(args.max_k + 1)]
    s.emit("levels", {"levels": [{"k": k, "value": x} for k, x in rows]}, ["k", "value"], rows,
           [f"{k} {fmt(x)}" for k, x in rows])


def cmd_tsirelson(s: Session, args):
    v = load_vector(args.vector)
    n = _theta_n(args.theta)
    val = t_theta_norm(v, n, cap=s.cfg.tsirelson_cap)
    fam = best_family(v, n, cap=s.cfg.tsirelson_cap) if args.cert else None
    payload = {"value": val, "theta": f"1/{n}",
               "family": [list(b) for b in fam.blocks] if fam else None}
    human = [fmt(val)] + ([f"family {payload['family']}"] if args.cert else [])
    s.emit("tsirelson", payload, ["value"], [[val]], human)


def cmd_odell(s: Session, args):
    v = load_vector(args.vector)
    n = args.n if args.n is not None else _theta_n(args.theta)
    val = odell_norm(v, n, cap=s.cfg.tsirelson_cap)
    s.emit("odell", {"value": val, "n": n}, ["value"], [[val]], [fmt(val)])


def cmd_lemma4(s: Session, args):
    rows = ex.lemma4_sweep(args.max, s.f, cap=s.cfg.dense_cap)
    payload = {"rows": [dict(zip(("n", "dp", "closed_form", "diff"), r)) for r in rows]}
    human = [f"{n} {fmt(dp)} {fmt(cf)} {d:.3g}" for n, dp, cf, d in rows]
    if args.checkpoints:
        pts = [n for n in ex.INTEGER_F_POINTS if n <= max(args.max, 127)]
        cps = ex.lemma4_checkpoints(pts, precision=s.cfg.precision or 200)
        payload["checkpoints"] = [{"n": n, "value": str(v), "exact": str(q), "digits": d} for n, v, q, d in cps]
        human += [f"checkpoint {n}: {q} matches to {d:.1f} digits" for n, v, q, d in cps]
    s.emit("lemma4", payload, ["n", "dp", "closed_form", "diff"], rows, human)


def _blocks_from_literals(literals):
    blocks, start = [], 1
    for lit in literals:
        v = parse_vector(lit)
        dense = v.to_dense()
        blocks.append(v.shift(start - 1))
        start += len(dense)
    return blocks


def cmd_l1const(s: Session, args):
    blocks = ex.unit_blocks(args.units) if args.units else _blocks_from_literals(args.blocks)
    if not blocks:
        raise UsageError("give blocks or --units N")
    br = ex.l1_lower_bracket(blocks, s.f, tol=args.l1_tol, cap=s.cfg.dense_cap)
    payload = {"value": br.value, "lower": br.lower, "point": list(br.point), "evaluations": br.evaluations}
    s.emit("l1const", payload, ["value", "lower"], [[br.value, br.lower]],
           [fmt(br.value), f"bracket [{fmt(br.lower)}, {fmt(br.value)}] at {[round(a, 6) for a in br.point]}"])


def cmd_witness(s: Session, args):
    r = ex.distortion_report(args.ell or 2, _int_list(args.z1), args.z2, s.f, straddle=s.cfg.straddle)
    d = r.as_dict()
    if not args.cert:
        d.pop("certificates")
    keys = ["ell", "norm_z1_sum", "ell_norm_z1", "ell_norm_z2", "ratio", "target", "epsilon_effective"]
    s.emit("witness", d, keys, [[d[k] for k in keys]], [f"{k} {fmt(d[k])}" for k in keys])


def cmd_lemma6(s: Session, args):
    ladder = [_int_list(t) for t in args.ladder.split(";") if t.strip()]
    tt = ex.lemma6_trend(args.ell or 2, ladder, s.f, straddle=s.cfg.straddle)
    rows = [(" ".join(map(str, r.lengths)), r.value, r.lower, r.upper, r.closed_form) for r in tt.rows]
    payload = dict(tt.as_dict(), in_bounds=tt.in_bounds(), decreasing=tt.decreasing())
    human = [f"{ls}: {fmt(v)}" + (f" (closed form {fmt(c)})" if c is not None else "") for ls, v, _, _, c in rows]
    human.append(f"bounds [{fmt(rows[0][2])}, {fmt(rows[0][3])}] respected: {tt.in_bounds()}")
    s.emit("lemma6", payload, ["lengths", "value", "lower", "upper", "closed_form"], rows, human)


def cmd_claim_fuzz(s: Session, args):
    summ = ex.claim_fuzz(args.cases, s.cfg.seed, max_support=args.max_support, tol=s.cfg.tol, jobs=s.cfg.jobs)
    s.emit("claim-fuzz", summ.as_dict(), human=[
        f"{summ.cases} cases, {summ.violations} violations, worst slack {summ.worst_slack:.3g}"])
    return EXIT_OK if summ.violations == 0 else EXIT_INVALID


def _grid(text):
    if ":" in text:
        lo, hi = (float(t) for t in text.split(":"))
        pts, x = [], lo
        while x <= hi:
            pts.append(x)
            x *= 2
        return pts
    return [float(t) for t in text.split(",")]


def cmd_validate_f(s: Session, args):
    try:
        grid = _grid(args.grid)
    except ValueError:
        raise UsageError(f"bad grid {args.grid!r}") from None
    rep = validate_scaling(s.f, grid)
    s.emit("validate-f", rep.as_dict(), ["property", "status", "detail"],
           [(c.name, c.status, c.detail) for c in rep.checks],
           [f"{c.name} {c.status}" + (f": {c.detail}" if c.detail else "") for c in rep.checks])
    return EXIT_OK if rep.passed else EXIT_INVALID


def cmd_cache(s: Session, args):
    if not s.cfg.cache_dir:
        raise UsageError("cache needs --cache-dir")
    path = Path(s.cfg.cache_dir) / CACHE_FILE
    if args.action == "clear":
        existed = path.exists()
        MemoCache(path).clear()
        s.emit("cache", {"cleared": existed, "path": str(path)}, human=[f"cleared {path}" if existed else "no cache"])
        return EXIT_OK
    if not path.exists():
        s.emit("cache", {"path": str(path), "entries": 0}, human=["no cache"])
        return EXIT_OK
    try:
        doc = read_cache_file(path)
    except ValueError as exc:
        s.emit("cache", {"path": str(path), "error": str(exc)}, human=[f"corrupt cache: {exc}"])
        return EXIT_INVALID
    info = {"path": str(path), "format": CACHE_FORMAT, "function": doc["function"], "entries": len(doc["entries"])}
    s.emit("cache", info, human=[f"{k} {v}" for k, v in info.items()])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--f", help="scaling function: log2p1 (default) or table:FILE")
    common.add_argument("--tol", type=float, help="tie tolerance, in (0, 1e-3]")
    common.add_argument("--precision", type=int, metavar="BITS", help="mpmath mantissa bits")
    fmt_group = common.add_mutually_exclusive_group()
    fmt_group.add_argument("--json", action="store_true")
    fmt_group.add_argument("--csv", action="store_true")
    common.add_argument("--seed", type=int)
    common.add_argument("--cache-dir")
    common.add_argument("--jobs", type=int)
    common.add_argument("--config", help="JSON file with RunConfig settings")
    common.add_argument("--cert", action="store_true", help="include certificates")
    common.add_argument("--ell", type=int)

    p = _Parser(prog="distortlab", description="Exact norms and distortion experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("norm", parents=[common], help="norm or ell-norm of a vector")
    q.add_argument("vector", help='dense literal "1,1/2,2", sdvec-1 JSON/file, or runs "0.5x8,0.25x64"')
    q.add_argument("--runs", action="store_true", help="treat the vector as a run literal")
    q.add_argument("--oracle", action="store_true", help="use the brute-force evaluator")
    q.set_defaults(run=cmd_norm)

    q = sub.add_parser("levels", parents=[common], help="level norms |x|_0..|x|_K")
    q.add_argument("vector")
    q.add_argument("--max-k", type=int, default=None)
    q.set_defaults(run=cmd_levels)

    q = sub.add_parser("tsirelson", parents=[common], help="Tsirelson-type norm with factor theta")
    q.add_argument("vector")
    q.add_argument("--theta", default="1/2")
    q.set_defaults(run=cmd_tsirelson)

    q = sub.add_parser("odell", parents=[common], help="block-sum norm over at most n blocks on the 1/n space")
    q.add_argument("vector")
    grp = q.add_mutually_exclusive_group(required=True)
    grp.add_argument("--n", type=int)
    grp.add_argument("--theta")
    q.set_defaults(run=cmd_odell)

    q = sub.add_parser("lemma4", parents=[common], help="constant-vector sweep n = 1..MAX")
    q.add_argument("--max", type=int, required=True)
    q.add_argument("--checkpoints", action="store_true", help="high-precision rational checkpoints")
    q.set_defaults(run=cmd_lemma4)

    q = sub.add_parser("l1const", parents=[common], help="lower l1 constant of successive blocks")
    q.add_argument("blocks", nargs="*", help="dense literals, placed one after another")
    q.add_argument("--units", type=int, help="use e_1..e_N")
    q.add_argument("--l1-tol", type=float, default=1e-6)
    q.set_defaults(run=cmd_l1const)

    q = sub.add_parser("witness", parents=[common], help="distortion witnesses z1, z2 and their ratio")
    q.add_argument("--z1", required=True, help="block lengths, e.g. 8,64")
    q.add_argument("--z2", type=int, required=True, help="length of the constant block")
    q.set_defaults(run=cmd_witness)

    q = sub.add_parser("lemma6", parents=[common], help="norms of sums of normalized blocks")
    q.add_argument("--ladder", required=True, help='tuples separated by ";", e.g. "8,16;8,32"')
    q.set_defaults(run=cmd_lemma6)

    q = sub.add_parser("claim-fuzz", parents=[common], help="randomized check of the gap-coordinate inequality")
    q.add_argument("--cases", type=int, default=10_000)
    q.add_argument("--max-support", type=int, default=4)
    q.set_defaults(run=cmd_claim_fuzz)

    q = sub.add_parser("validate-f", parents=[common], help="check a scaling function on a grid")
    q.add_argument("--grid", default="1:1048576", help="LO:HI (doubling) or a comma list")
    q.set_defaults(run=cmd_validate_f)

    q = sub.add_parser("cache", parents=[common], help="inspect or clear the norm cache")
    q.add_argument("action", choices=("inspect", "clear"))
    q.set_defaults(run=cmd_cache)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "max_k", 0) is None:
            args.max_k = len(load_vector(args.vector).entries)
        session = Session(args, out)
        code = args.run(session, args)
        return EXIT_OK if code is None else code
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, DistortlabError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
