"""Command-line entry point: ``mcfarland <command> [options]``.

Exit status: 0 when the verdict holds, 1 when a verified failure is found,
2 on usage or input errors. JSON output is canonical (sorted keys), so equal
configurations give byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .designs import (
    BuildingSetFamily,
    assemble_difference_set,
    construct_building_sets,
    decompose_difference_set,
    sum_identity_check,
    verify_building_sets,
)
from .errors import InvalidArgument, McFarlandError
from .group_ring import is_difference_set, mcfarland_params
from .groups import ElementSet, make_group
from .search import ei_ej_sweep, load_checkpoint, oracle_size, oracle_size_curated, oracle_z43
from .serialize import dset_to_json, dumps, family_to_json, load_any, subgroup_to_json
from .transversals import classify_transversal


@dataclass
class RunConfig:
    command: str
    m: int | None = None
    sylow_type: str = "EA"
    odd_group: str | None = None
    field_poly: int | None = None
    workers: int = 1
    fmt: str = "json"

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise InvalidArgument("--workers must be at least 1")


def _poly(text: str) -> int:
    try:
        return int(text, 2)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--poly expects a bit string such as 1011, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall time in oracle reports")

    p = argparse.ArgumentParser(prog="mcfarland", description="Building sets and difference sets with McFarland parameters.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("params", parents=[common], help="McFarland parameters (v, k, lambda)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("construct", parents=[common], help="build a verified building-set family")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--sylow", type=str.upper, choices=("EA", "Z4"), default="EA")
    s.add_argument("--poly", type=_poly, help="irreducible field polynomial as bits, high degree first")

    for name, text in (
        ("verify", "verify a family (three conditions) or a difference set (convolution)"),
        ("decompose", "split a difference set into building sets"),
        ("classify", "classify every block of a family as type I / type II"),
    ):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--in", dest="inp", default="-", help="JSON input file ('-' for stdin)")

    s = sub.add_parser("assemble", parents=[common], help="difference set from a family")
    s.add_argument("--in", dest="inp", default="-")
    s.add_argument("--odd", help="odd group descriptor of order 2^(m-1)+1 (default cyclic)")

    s = sub.add_parser("oracle", help="exhaustive searches")
    osub = s.add_subparsers(dest="oracle", required=True)
    o = osub.add_parser("z43", parents=[common], help="no transversal of the socle of Z4^3 has all sums = 0 mod 4")
    o.add_argument("--workers", type=int, default=1)
    o.add_argument("--resume", help="checkpoint file with completed branches")
    o.add_argument("--checkpoint", help="write completed branches here as the run proceeds")
    o = osub.add_parser("size", parents=[common], help="half-modulus transversals never have |N| > |E|")
    o.add_argument("--max-order", type=int, default=32)
    o.add_argument("--sizes", type=int, nargs="+", default=[2, 4], choices=(2, 4, 8))
    o.add_argument("--workers", type=int, default=1)
    o = osub.add_parser("eiej", parents=[common], help="hypothesis-meeting transversals are of type I or II")
    o.add_argument("--max-order", type=int, default=64)
    o.add_argument("--workers", type=int, default=1)
    return p


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgument(f"cannot read JSON from {path}: {exc}") from exc


def _load(path: str, want: type):
    obj = load_any(_read_json(path))
    if not isinstance(obj, want):
        raise InvalidArgument(f"expected {'a building-set family' if want is BuildingSetFamily else 'a difference set'}")
    return obj


def _text(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, float, str)) for x in v):
                lines.append(f"{prefix}{k}:")
                lines.extend(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {json.dumps(v)}")
        return lines
    if isinstance(obj, list):
        lines = []
        for i, v in enumerate(obj):
            if isinstance(v, dict):
                lines.append(f"{prefix}- [{i}]")
                lines.extend(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}- {json.dumps(v)}")
        return lines
    return [f"{prefix}{json.dumps(obj)}"]


def _emit(report: dict, args) -> None:
    text = dumps(report) if args.format == "json" else "\n".join(_text(report)) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_params(args) -> tuple[dict, int]:
    ps = mcfarland_params(args.q, args.n)
    return {"q": args.q, "n": args.n, "v": ps.v, "k": ps.k, "lambda": ps.lam}, 0


def _cmd_construct(args) -> tuple[dict, int]:
    fam = construct_building_sets(args.m, args.sylow, args.poly)
    return family_to_json(fam), 0


def _cmd_verify(args) -> tuple[dict, int]:
    obj = load_any(_read_json(args.inp))
    if isinstance(obj, BuildingSetFamily):
        ver = verify_building_sets(obj)
        ident = sum_identity_check(obj)
        rep = {"kind": "building-sets", "group": obj.G2.descriptor, "N": subgroup_to_json(obj.N), **ver.to_json()}
        rep["sum_identity"] = ident.to_json()
        return rep, 0 if ver.verdict else 1
    res = is_difference_set(obj)
    rep = {"kind": "difference-set", "group": obj.parent.descriptor, **res.to_json()}
    return rep, 0 if res.verdict else 1


def _cmd_assemble(args) -> tuple[dict, int]:
    fam = _load(args.inp, BuildingSetFamily)
    odd = make_group(args.odd) if args.odd else None
    d = assemble_difference_set(fam, odd)
    prov = {"from": family_to_json(fam)["provenance"], "odd_group": d.parent.descriptor}
    return dset_to_json(d, prov), 0


def _cmd_decompose(args) -> tuple[dict, int]:
    d = _load(args.inp, ElementSet)
    dec = decompose_difference_set(d)
    rep = family_to_json(dec.family)
    rep["fiber_sizes"] = list(dec.fiber_sizes)
    rep["identity_fiber"] = [list(t) for t in dec.identity_fiber.tuples()]
    ver = verify_building_sets(dec.family)
    rep["verification"] = ver.to_json()
    return rep, 0 if ver.verdict else 1


def _cmd_classify(args) -> tuple[dict, int]:
    fam = _load(args.inp, BuildingSetFamily)
    blocks = []
    status = 0
    for i, blk in enumerate(fam.blocks, start=1):
        cr = classify_transversal(blk, fam.N)
        blocks.append({"block": i, **cr.to_json()})
        if cr.neither:
            status = 1
    return {"group": fam.G2.descriptor, "N": subgroup_to_json(fam.N), "blocks": blocks}, status


def _cmd_oracle(args) -> tuple[dict, int]:
    if args.oracle == "z43":
        resume = load_checkpoint(args.resume) if args.resume else ()
        rep = oracle_z43(workers=args.workers, resume=resume, checkpoint=args.checkpoint)
    elif args.oracle == "size":
        if args.sizes == [8]:
            rep = oracle_size_curated(workers=args.workers)
        elif 8 in args.sizes:
            raise InvalidArgument("--sizes 8 runs on the curated list alone; pass it separately")
        else:
            rep = oracle_size(args.max_order, tuple(args.sizes))
    else:
        rep = ei_ej_sweep(args.max_order, workers=args.workers)
    return rep.to_json(include_time=args.timing), 0 if rep.satisfying_found == 0 else 1


COMMANDS = {
    "params": _cmd_params,
    "construct": _cmd_construct,
    "verify": _cmd_verify,
    "assemble": _cmd_assemble,
    "decompose": _cmd_decompose,
    "classify": _cmd_classify,
    "oracle": _cmd_oracle,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        RunConfig(
            command=args.command,
            m=getattr(args, "m", None),
            sylow_type=getattr(args, "sylow", "EA"),
            odd_group=getattr(args, "odd", None),
            field_poly=getattr(args, "poly", None),
            workers=getattr(args, "workers", 1),
            fmt=getattr(args, "format", "json"),
        )
        report, status = COMMANDS[args.command](args)
    except McFarlandError as exc:
        print(f"mcfarland: error: {exc}", file=sys.stderr)
        return 2
    _emit(report, args)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
