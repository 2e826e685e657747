"""Command-line entry point: ``khashbound <subcommand> ...``.

Exit status is 0 on success, 1 when a verification fails (the witness is
printed) and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds, covering, hashcode, maximizer

DEFAULT_SEED = 0


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=False))
    else:
        print(text)


def _cmd_maxpsi(args) -> int:
    res = maximizer.compute_Mk(args.k, grid_steps=args.grid)
    lines = [f"M_{args.k} = {res.value!r}  (family {res.family}, params {list(res.params)})"]
    lines += [f"  {fam}: {val!r}" for fam, val in res.candidates.items()]
    if not res.certified:
        lines.append("  case-list maximum; global optimality not established for this k")
    _emit(args, {"k": args.k, **res.to_dict()}, "\n".join(lines))
    return 0


def _cmd_globalcheck(args) -> int:
    rep = maximizer.global_check(args.k, args.samples, args.seed)
    text = (
        f"k={rep.k} starts={rep.samples} max_found={rep.max_found!r} "
        f"case_max={rep.case_max!r} exceeded={rep.exceeded}"
    )
    _emit(args, rep.to_dict(), text)
    return 1 if rep.exceeded else 0


def _cmd_bound(args) -> int:
    rep = bounds.bound_report(args.k)
    _emit(args, rep.to_dict(), bounds.format_table([rep]))
    return 0


def _cmd_table(args) -> int:
    rows = bounds.table_report(args.kmin, args.kmax)
    payload = {"rows": [r.to_dict() for r in rows]}
    if args.literature:
        payload["literature_single_subcode"] = {
            "note": "from the literature, not computed",
            "values": {str(k): v for k, v in bounds.LITERATURE_SINGLE_SUBCODE.items()},
        }
    _emit(args, payload, bounds.format_table(rows, literature=args.literature))
    return 0


def _cmd_cover(args) -> int:
    try:
        part = covering.build_cover(args.k, args.len, args.eps, args.seed, args.attempts)
    except covering.CoverageError as exc:
        _emit(args, {"ok": False, "error": str(exc)}, f"FAIL: {exc}")
        return 1
    verdict = covering.verify_partition(part)
    if args.out:
        Path(args.out).write_text(part.to_json() + "\n")
    payload = {**part.to_dict(), "verdict": verdict.to_dict()}
    text = (
        f"cover of [{part.k}]^{part.ell}: {len(part.blocks)} blocks (bound h={part.h}); "
        f"verify: {'ok' if verdict.ok else 'FAIL'}"
    )
    _emit(args, payload, text)
    return 0 if verdict.ok else 1


def _cmd_verify_cover(args) -> int:
    part = covering.CoverPartition.from_json(Path(args.infile).read_text())
    verdict = covering.verify_partition(part)
    text = "ok" if verdict.ok else "FAIL\n" + "\n".join(map(str, verdict.violations))
    _emit(args, verdict.to_dict(), text)
    return 0 if verdict.ok else 1


def _read_code(args) -> hashcode.Code:
    return hashcode.parse_code(Path(args.file).read_text(encoding="utf-8"), args.k)


def _cmd_verify_code(args) -> int:
    code = _read_code(args)
    verdict = hashcode.is_k_hash(code)
    payload = {"k": code.k, "n": code.n, "size": code.size, "rate": code.rate,
               **verdict.to_dict()}
    if verdict.ok:
        text = f"ok: {code.size} words of length {code.n} form a {code.k}-hash code (rate {code.rate!r})"
    else:
        words = ["".join(map(str, w)) for w in verdict.violations[0]["words"]]
        text = "FAIL: no coordinate separates " + " ".join(words)
    _emit(args, payload, text)
    return 0 if verdict.ok else 1


def _cmd_hansel(args) -> int:
    code = _read_code(args)
    hv = hashcode.is_k_hash(code)
    if not hv.ok:
        words = ["".join(map(str, w)) for w in hv.violations[0]["words"]]
        _emit(args, hv.to_dict(), "FAIL: not a k-hash code; witness " + " ".join(words))
        return 1
    verdict = hashcode.hansel_all_anchors(code)
    text = (
        f"{'ok' if verdict.ok else 'FAIL'}: {verdict.info.get('checked', 0)} anchor sets, "
        f"min slack {verdict.info.get('min_slack')!r}"
    )
    _emit(args, verdict.to_dict(), text)
    return 0 if verdict.ok else 1


def _cmd_constrained(args) -> int:
    res = maximizer.constrained_psi_max(args.k, args.gamma)
    text = f"max psi = {res.value!r} at beta = {res.params[0]!r} (gamma = {args.gamma!r})"
    _emit(args, {"k": args.k, "gamma": args.gamma, **res.to_dict()}, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="khashbound", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    # repeated on each subcommand so flags work on either side of it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maxpsi", parents=[common], help="compute M_k over the case families")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=_cmd_maxpsi)

    p = sub.add_parser("globalcheck", parents=[common], help="multistart ascent on Psi")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.set_defaults(func=_cmd_globalcheck)

    p = sub.add_parser("bound", parents=[common], help="rate bound for one k")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("table", parents=[common], help="bounds for a range of k")
    p.add_argument("--kmin", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--literature", action="store_true",
                   help="add the published single-subcode values (not computed)")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("cover", parents=[common], help="build a covering partition")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--attempts", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cover)

    p = sub.add_parser("verify-cover", parents=[common], help="check a partition file")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_verify_cover)

    p = sub.add_parser("verify-code", parents=[common], help="brute-force k-hash check")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("file")
    p.set_defaults(func=_cmd_verify_code)

    p = sub.add_parser("hansel", parents=[common], help="Hansel inequality for every anchor set")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("file")
    p.set_defaults(func=_cmd_hansel)

    p = sub.add_parser("constrained", parents=[common], help="max psi with f_i >= gamma")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(func=_cmd_constrained)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
