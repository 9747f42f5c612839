"""Command-line front end: ``doublegroth <subcommand> [flags]``.

Exit codes: 0 success, 1 GKM violations found, 2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .basisexp import NotInSpan, expand_gt_in_gq_basis, expand_in_gp, gq_basis_context
from .coeffring import Context, Series, render_text, series_terms_json
from .genfun import gp_symmetrizer, gt_coeff
from .localization import LocalizationTable, gkm_check, psi_n
from .pfaffengine import gx_lambda, kernel_coeffs, required_num_b
from .weylcomb import KStrictPartition, enumerate_spk


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=0)
    common.add_argument("--type", choices=["B", "C"], default="C")
    common.add_argument("--degree", type=int, default=4, help="truncation degree D")
    common.add_argument("--num-x", type=int, default=None)
    common.add_argument("--num-a", type=int, default=None)
    common.add_argument("--num-b", type=int, default=None)
    common.add_argument("--n", type=int, default=None, help="localization rank")
    common.add_argument("--partition", default="", help='comma-separated parts, e.g. "3,1"')
    common.add_argument("--ell", type=int, default=0)
    common.add_argument("--m", type=int, default=None)
    common.add_argument("--ab-zero", action="store_true", help="set every a_i and b_i to 0 afterwards")
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--out", default=None)

    p = argparse.ArgumentParser(prog="doublegroth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gx", parents=[common], help="GT_lambda (C) or GT'_lambda (B) by the Pfaffian sum")
    sub.add_parser("gp", parents=[common], help="GP_lambda(x) by symmetrization")
    sub.add_parser("gtcoeff", parents=[common], help="one-row class of index m, l")
    sub.add_parser("localize", parents=[common], help="localization table of GX_lambda over SP^k(n)")
    chk = sub.add_parser("gkm-check", parents=[common], help="GKM divisibility of a localization table")
    chk.add_argument("table", help="JSON file written by 'localize'")
    exp = sub.add_parser("expand", parents=[common], help="expand in the GP basis (k=0, type B) or GQ basis")
    exp.add_argument("--basis", choices=["GP", "GQ"], default=None)
    sub.add_parser("enumerate", parents=[common], help="list SP^k(n)")
    ker = sub.add_parser("kernel", parents=[common], help="Laurent coefficients f_pq of the Pfaffian kernel")
    for name in ("i", "j", "size", "c_i", "c_j"):
        ker.add_argument(name, type=int)
    ker.add_argument("--pmax", type=int, default=3)
    ker.add_argument("--qmax", type=int, default=3)
    return p


def _partition(args) -> KStrictPartition:
    try:
        return KStrictPartition.parse(args.partition, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _context(args, lam: KStrictPartition | None = None, need_b: int = 0) -> Context:
    need_b = max(need_b, required_num_b(lam) if lam is not None else 0)
    num_x = args.num_x if args.num_x is not None else max(1, args.n or 0, lam.length if lam else 0)
    num_a = args.num_a if args.num_a is not None else args.k
    num_b = args.num_b if args.num_b is not None else need_b
    if num_a < args.k:
        raise UsageError(f"--num-a {num_a} is smaller than --k {args.k}")
    if num_b < need_b:
        raise UsageError(f"this computation needs --num-b >= {need_b}")
    try:
        return Context(args.degree, num_x, num_a, num_b)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _series_payload(s: Series, meta: dict) -> dict:
    return {**meta, "context": s.ctx.to_json(), "terms": series_terms_json(s)}


def _meta(args, **extra) -> dict:
    out = {"command": args.command, "k": args.k, "type": args.type}
    out.update(extra)
    return out


def run(args) -> tuple[Any, str, int]:
    """Return (json payload, text rendering, exit code)."""
    cmd = args.command
    if cmd == "enumerate":
        if args.n is None:
            raise UsageError("enumerate needs --n")
        parts = enumerate_spk(args.n, args.k)
        payload = {"command": cmd, "n": args.n, "k": args.k, "count": len(parts), "partitions": [str(p) for p in parts]}
        return payload, "\n".join(str(p) or "()" for p in parts), 0

    if cmd == "kernel":
        if not 1 <= args.i < args.j <= args.size:
            raise UsageError("kernel needs 1 <= i < j <= size")
        table = kernel_coeffs(args.i, args.j, args.size, args.c_i, args.c_j, args.pmax, args.qmax)
        payload = {"command": cmd, "i": args.i, "j": args.j, "size": args.size, "c_i": args.c_i, "c_j": args.c_j, **table.to_json()}
        beta = {0: "", 1: " * B"}
        text = "\n".join(
            f"f[{p},{q}] = {c}{beta.get(p + q, f' * B^{p + q}')}" for (p, q), c in sorted(table.entries.items())
        )
        return payload, text, 0

    if cmd == "gtcoeff":
        if args.m is None:
            raise UsageError("gtcoeff needs --m")
        ctx = _context(args, need_b=abs(args.ell))
        s = gt_coeff(args.m, args.ell, args.k, args.type, ctx)
        return _series_payload(s, _meta(args, m=args.m, ell=args.ell)), render_text(s), 0

    if cmd == "gx":
        lam = _partition(args)
        ctx = _context(args, lam)
        s = gx_lambda(lam, args.type, ctx)
        if args.ab_zero:
            s = s.set_zero("ab")
        return _series_payload(s, _meta(args, partition=str(lam))), render_text(s), 0

    if cmd == "gp":
        lam = _partition(args)
        ctx = _context(args, lam)
        s = gp_symmetrizer(lam.parts, ctx.num_x, ctx)
        return _series_payload(s, {"command": cmd, "partition": str(lam)}), render_text(s), 0

    if cmd == "localize":
        if args.n is None:
            raise UsageError("localize needs --n")
        lam = _partition(args)
        ctx = _context(args, lam, need_b=max(args.n, args.k))
        table = psi_n(gx_lambda(lam, args.type, ctx), args.n, args.k)
        payload = {**table.to_json(), "command": cmd, "type": args.type, "partition": str(lam)}
        text = "\n".join(f"{str(mu) or '()'}: {render_text(v)}" for mu, v in _sorted_entries(table))
        return payload, text, 0

    if cmd == "gkm-check":
        try:
            with open(args.table) as fh:
                data = json.load(fh)
            table = LocalizationTable.from_json(data)
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read table: {exc}") from exc
        typ = data.get("type", args.type)
        report = gkm_check(table, typ)
        payload = {"command": cmd, **report.to_json()}
        text = f"{report.edges_checked} edges, {len(report.violations)} violations"
        for v in report.violations:
            text += f"\n{v.mu} --{v.root}--> {v.target}: residue {render_text(v.residue)}"
        return payload, text, 0 if report.ok else 1

    if cmd == "expand":
        lam = _partition(args)
        basis = args.basis or ("GP" if args.k == 0 else "GQ")
        if basis == "GP":
            ctx = _context(args, lam)
            f = gx_lambda(lam, args.type, ctx)
            result = expand_in_gp(f.set_zero("ab") if args.ab_zero else f, ctx)
        else:
            if args.type != "C":
                raise UsageError("the GQ expansion is defined for type C")
            ctx = gq_basis_context(lam, _context(args, lam))
            result = expand_gt_in_gq_basis(lam, ctx)
        payload = {"command": cmd, "partition": str(lam), "k": args.k, "type": args.type, **result.to_json()}
        lines = [f"{','.join(map(str, mu)) or '()'}: {render_text(c)}" for mu, c in _sorted_coeffs(result.coeffs)]
        lines.append(f"remainder: {render_text(result.remainder)}")
        return payload, "\n".join(lines), 0

    raise UsageError(f"unknown command {cmd}")


def _sorted_entries(table: LocalizationTable):
    return sorted(table.entries.items(), key=lambda kv: (kv[0].size, tuple(-p for p in kv[0].parts)))


def _sorted_coeffs(coeffs):
    return sorted(coeffs.items(), key=lambda kv: (sum(kv[0]), tuple(-p for p in kv[0])))


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, text, code = run(args)
    except (UsageError, IndexError) as exc:
        print(f"doublegroth: error: {exc}", file=sys.stderr)
        return 2
    except NotInSpan as exc:
        print(f"doublegroth: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"doublegroth: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    out = json.dumps(payload, sort_keys=True, indent=2) if args.format == "json" else text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
