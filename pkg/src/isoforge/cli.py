"""Command-line front end.

Results go to standard output (or ``--out``) as canonical JSON; a run report
with input digests, verdicts and timing goes to standard error.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 precondition failure, 4 resource cap.
"""

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import io
from .errors import InputError, IsoforgeError, NotAGroup, NotSubgroup
from .freespace import (
    ae_norm,
    fixed_vector_subgroup,
    linear_ball_symmetries,
    signed_isometry_perms,
)
from .groups import abstract_isomorphic, isometries
from .metric import KatetovMap, amalgamate, extend_by_katetov, snowflake
from .realization import group_to_space, preset_table, realize, verify_realization
from .rigidity import RigidSpec, rigid_metric, rigid_metric_path


@dataclass
class RunReport:
    command: list
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    elapsed: float = 0.0
    error: str = ""

    def read(self, path):
        data = Path(path).read_bytes() if Path(path).exists() else b""
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        return io.load_file(path)

    def verdict(self, check, ok, oracle, witness=None):
        entry = {"check": check, "ok": bool(ok), "oracle": oracle}
        if witness is not None:
            entry["witness"] = witness
        self.verdicts.append(entry)

    def to_json(self):
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "verdicts": self.verdicts,
            "elapsed_s": round(self.elapsed, 4),
        }
        if self.error:
            out["error"] = self.error
        return out


def _emit(obj, args, report):
    text = io.dumps(obj)
    if args.out:
        Path(args.out).write_text(text)
        report.outputs.append(args.out)
    else:
        sys.stdout.write(text)
        report.outputs.append("<stdout>")


def cmd_iso(args, report):
    space = io.space_from_json(report.read(args.space))
    g = isometries(space)
    report.verdict("isometry group computed", True, "pruned backtracking search")
    return io.group_to_json(g)


def _realization_json(block, emb, verify, report, iso=None):
    out = {"blockspace": io.block_to_json(block), "embedding": io.embedding_to_json(emb)}
    ok = True
    if verify:
        res, rep = verify_realization(block, emb, iso)
        ok = res.ok
        report.verdict(
            "isometry group of output equals the lifted subgroup",
            res.ok,
            rep["oracle"],
            None if res.ok else {"reason": res.reason, "witness": [list(w) if isinstance(w, tuple) else w for w in res.witness]},
        )
        out["verification"] = {"ok": res.ok, "oracle": rep["oracle"], "found_order": rep.get("found_order")}
    return out, ok


def cmd_realize(args, report):
    space = io.space_from_json(report.read(args.space))
    try:
        g = io.group_from_json(report.read(args.group))
    except NotAGroup as exc:
        # a set that is not closed cannot be a subgroup of anything
        raise NotSubgroup(f"group file is not a subgroup: {exc}") from None
    block, emb = realize(space, g, mode=args.mode, cap=args.cap)
    out, ok = _realization_json(block, emb, args.verify, report)
    return out, 0 if ok else 1


def cmd_group2space(args, report):
    if args.table:
        obj = report.read(args.table)
        table = obj.get("table") if isinstance(obj, dict) else obj
        if table is None:
            raise InputError("table file needs a 'table' array")
    elif args.preset:
        table = preset_table(args.preset)
    else:
        raise InputError("give --preset or --table")
    space, group = group_to_space(table)
    out = {"space": io.space_to_json(space), "group": io.group_to_json(group)}
    if not args.realize:
        return out, 0
    block, emb = realize(space, group, mode=args.mode, cap=args.cap)
    iso = isometries(block.space)
    real, ok = _realization_json(block, emb, True, report, iso)
    out["realization"] = real
    same, witness = abstract_isomorphic(group, iso)
    report.verdict("isometry group abstractly isomorphic to the input group", same, "generator-image backtracking with full multiplication-table check")
    out["isomorphism"] = {
        "isomorphic": same,
        "witness": [[list(a), list(b)] for a, b in sorted(witness.items())] if same else None,
    }
    return out, 0 if ok and same else 1


def cmd_rigid(args, report):
    if args.path:
        space = rigid_metric_path(args.n)
    else:
        space = rigid_metric(RigidSpec(args.n, args.a, args.b))
    return io.space_to_json(space)


def cmd_aenorm(args, report):
    space = io.space_from_json(report.read(args.space))
    m = io.molecule_from_json(report.read(args.molecule), space, base_dir=Path(args.molecule).parent)
    cert = ae_norm(m)
    report.verdict("zero duality gap", cert.check(m), "1-Lipschitz potential from residual shortest paths")
    return io.certificate_to_json(cert, space)


def cmd_ballsym(args, report):
    space = io.space_from_json(report.read(args.space))
    syms = linear_ball_symmetries(space)
    expected = signed_isometry_perms(space, isometries(space))
    match = {s.vertex_perm for s in syms} == expected
    report.verdict("ball symmetries are exactly ±AE(u)", match, "isometry search lifted to signed vertex permutations")
    if args.fix_e:
        syms = fixed_vector_subgroup(space, syms)
    return {
        "order": len(syms),
        "matches_signed_isometries": match,
        "symmetries": [io.symmetry_to_json(s) for s in syms],
    }


def cmd_snowflake(args, report):
    space = io.space_from_json(report.read(args.space))
    return io.space_to_json(snowflake(space, args.eps))


def cmd_amalgam(args, report):
    family = [io.space_from_json(report.read(p)) for p in args.spaces]
    common = [c for c in args.common.split(",") if c]
    return io.space_to_json(amalgamate(family, common))


def cmd_katetov(args, report):
    space = io.space_from_json(report.read(args.space))
    obj = report.read(args.values)
    values = obj.get("values") if isinstance(obj, dict) else obj
    if isinstance(values, dict):
        missing = [p for p in space.points if p not in values]
        if missing:
            raise InputError(f"missing Katetov values for {missing}")
        values = [values[p] for p in space.points]
    if not isinstance(values, list):
        raise InputError("values file needs a 'values' object or list")
    label = args.label or (obj.get("label") if isinstance(obj, dict) else None) or "new"
    return io.space_to_json(extend_by_katetov(KatetovMap(space, tuple(values)), label))


def build_parser():
    parser = argparse.ArgumentParser(prog="isoforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", help="write the JSON result to this file")
        p.set_defaults(func=func)
        return p

    p = add("iso", cmd_iso, "isometry group of a space")
    p.add_argument("space")

    p = add("realize", cmd_realize, "realize a subgroup as a full isometry group")
    p.add_argument("space")
    p.add_argument("group")
    p.add_argument("--mode", choices=("full", "base"), default="base")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--cap", type=int, default=None, help="point cap (default ISOFORGE_POINT_CAP or 5000)")

    p = add("group2space", cmd_group2space, "left-invariant metric on a finite group")
    p.add_argument("--preset")
    p.add_argument("--table")
    p.add_argument("--realize", action="store_true")
    p.add_argument("--mode", choices=("full", "base"), default="base")
    p.add_argument("--cap", type=int, default=None)

    p = add("rigid", cmd_rigid, "two-valued rigid metric")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", default="1")
    p.add_argument("--b", default="2")
    p.add_argument("--path", action="store_true", help="emit the truncated min(|m-n|, 2) metric instead")

    p = add("aenorm", cmd_aenorm, "Arens-Eells norm with transport certificate")
    p.add_argument("space")
    p.add_argument("molecule")

    p = add("ballsym", cmd_ballsym, "linear symmetries of the free-space unit ball")
    p.add_argument("space")
    p.add_argument("--fix-e", action="store_true", help="keep only maps fixing chi_1 - chi_0")

    p = add("snowflake", cmd_snowflake, "rational square-root metric")
    p.add_argument("space")
    p.add_argument("--eps", required=True)

    p = add("amalgam", cmd_amalgam, "glue spaces over common points")
    p.add_argument("spaces", nargs="+")
    p.add_argument("--common", required=True, help="comma-separated common labels")

    p = add("katetov", cmd_katetov, "one-point extension by a Katetov map")
    p.add_argument("space")
    p.add_argument("values")
    p.add_argument("--label")
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    report = RunReport(["isoforge"] + argv)
    start = time.perf_counter()
    code = 0
    try:
        result = args.func(args, report)
        if isinstance(result, tuple):
            result, code = result
        _emit(result, args, report)
    except IsoforgeError as exc:
        code = exc.exit_code
        report.error = f"{type(exc).__name__}: {exc}"
    except (ValueError, KeyError) as exc:
        code = 2
        report.error = f"{type(exc).__name__}: {exc}"
    report.elapsed = time.perf_counter() - start
    sys.stderr.write(json.dumps(report.to_json(), ensure_ascii=False) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
