"""Command-line entry point: ``qsground ground|query|relations|fixture``.

Exit codes: 0 success (including empty results), 1 I/O or usage problems,
2 validation failures and rule diagnostics.
"""

from __future__ import annotations

import argparse
import itertools
import re
import sys
import warnings

from . import dsl, ingest
from .config import DEFAULT_CONFIG, EngineConfig
from .engine import Engine, UnknownPredicateError, dumps, occurrences_json
from .entities import EntityError, TimeRangeError
from .relations import (
    OrientationUndefinedError,
    UnitMismatchError,
    UnsupportedPairError,
    orientation_at,
    qdc,
    size_relation,
    topology_at,
)
from .metrics import OrientationError
from .scene import PartRef, UnknownObjectError

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2
FAMILIES = ("topology", "qdc", "orientation", "size")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class Invalid(Exception):
    """Validation failure; the message is printed to stderr."""


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qsground", description="Ground qualitative spatio-temporal interactions in scenes.")
    p.add_argument("--print-config", action="store_true", help="print the default thresholds and exit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def rules_args(sp):
        sp.add_argument("--rules", help="rule file (.qsr)")
        sp.add_argument("--stdlib", action="store_true", help="use the standard interaction library")
        sp.add_argument("--config", help="JSON file with threshold overrides")

    g = sub.add_parser("ground", help="detect every interaction in a scene")
    g.add_argument("--scene", required=True)
    rules_args(g)
    g.add_argument("--out", required=True)

    q = sub.add_parser("query", help="answer one goal")
    q.add_argument("--scene", required=True)
    rules_args(q)
    q.add_argument("--goal", required=True)

    r = sub.add_parser("relations", help="print qualitative relations at a time point")
    r.add_argument("--scene", required=True)
    r.add_argument("--at", required=True, type=float)
    r.add_argument("--pair")
    r.add_argument("--family", choices=FAMILIES)
    r.add_argument("--config")

    f = sub.add_parser("fixture", help="write a synthetic scene and its ground truth")
    f.add_argument("--name", required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--sigma", type=float, default=0.0, help="Gaussian jitter in metres")
    f.add_argument("--out", required=True)
    return p


# --- shared loading -------------------------------------------------------------


def _read_config(path) -> EngineConfig:
    if not path:
        return DEFAULT_CONFIG
    try:
        return EngineConfig.load(path)
    except OSError as e:
        raise OSError(f"cannot read config {path}: {e.strerror}") from None
    except (ValueError, TypeError) as e:
        raise Invalid(f"invalid config {path}: {e}") from None


def _read_scene(path):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return ingest.load(path)
    except OSError as e:
        raise OSError(f"cannot read scene {path}: {e.strerror}") from None
    except (ingest.SceneFormatError, EntityError) as e:
        raise Invalid(f"invalid scene {path}: {e}") from None


def _read_rules(args) -> tuple[list, str]:
    if not args.rules and not args.stdlib:
        raise UsageError("give --rules FILE, --stdlib, or both")
    decls, label = [], []
    known = {}
    if args.stdlib:
        lib = dsl.load_standard_library()
        decls.extend(lib)
        known = dsl.known_names(lib)
        label.append("stdlib")
    if args.rules:
        try:
            src = dsl.parse_file(args.rules, known)
        except OSError as e:
            raise OSError(f"cannot read rules {args.rules}: {e.strerror}") from None
        if src.diagnostics:
            for d in src.diagnostics:
                print(f"{args.rules}:{d}", file=sys.stderr)
            raise Invalid(f"{len(src.diagnostics)} diagnostic(s) in {args.rules}")
        names = {d.name for d in src.declarations}
        decls = [d for d in decls if d.name not in names] + src.declarations
        label.append(args.rules)
    return decls, "+".join(label)


# --- commands -----------------------------------------------------------------


def cmd_ground(args) -> int:
    config = _read_config(args.config)
    scene = _read_scene(args.scene)
    rules, label = _read_rules(args)
    occs = Engine(scene, rules, config).detect_all()
    doc = {"scene": args.scene, "rules": label, "occurrences": occurrences_json(occs)}
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
    except OSError as e:
        raise OSError(f"cannot write {args.out}: {e.strerror}") from None
    print(f"{len(occs)} occurrence(s) written to {args.out}")
    return EXIT_OK


def _fmt_interval(iv) -> str:
    return f"[{iv.t1:g}, {iv.t2:g}]"


def cmd_query(args) -> int:
    config = _read_config(args.config)
    scene = _read_scene(args.scene)
    rules, _ = _read_rules(args)
    goal, diags = dsl.parse_goal(args.goal)
    if diags:
        for d in diags:
            print(f"goal:{d}", file=sys.stderr)
        return EXIT_INVALID
    engine = Engine(scene, rules, config)
    try:
        rows = engine.solve_goal(goal)
    except UnknownPredicateError:
        print(f"goal: error: unknown predicate {goal.atom.pred}/{len(goal.atom.args)}", file=sys.stderr)
        return EXIT_INVALID
    except (UnknownObjectError, ValueError) as e:
        print(f"goal: error: {e.args[0] if e.args else e}", file=sys.stderr)
        return EXIT_INVALID
    if not rows:
        print("no solutions")
        return EXIT_OK
    for binding, ans in rows:
        parts = [f"{k}={v}" for k, v in binding.items()]
        if goal.time is None:
            parts.append(f"{goal.ivar}={_fmt_interval(ans)}" if goal.ivar else f"@{_fmt_interval(ans)}")
        print(", ".join(parts) if parts else "true")
    return EXIT_OK


_REF = re.compile(r"body_part\(\s*(\w+)\s*,\s*(\w+)\s*\)|([A-Za-z0-9_\-.]+)")


def _parse_pair(text: str):
    refs = []
    for m in _REF.finditer(text):
        refs.append(PartRef(m.group(1), m.group(2)) if m.group(1) else m.group(3))
    if len(refs) != 2:
        raise UsageError(f"--pair needs two references separated by a comma, got {text!r}")
    return refs


def _family_label(family, a, b, t, scene, config) -> str:
    try:
        if family == "topology":
            return topology_at(a, b, t, scene, config).value
        if family == "qdc":
            return qdc(a, b, t, scene, config).value
        if family == "size":
            return size_relation(a, b, t, scene, config).value
        rel = orientation_at(a, b, t, scene, config)
        return ",".join(sorted(x.value for x in rel.labels()))
    except (UnsupportedPairError, OrientationUndefinedError, OrientationError, UnitMismatchError) as e:
        return f"undefined ({e})"


def cmd_relations(args) -> int:
    config = _read_config(args.config)
    scene = _read_scene(args.scene)
    if args.pair:
        pairs = [tuple(_parse_pair(args.pair))]
    else:
        ids = sorted(o for o in scene.object_ids() if scene.has_history(o))
        pairs = list(itertools.combinations(ids, 2))
    families = [args.family] if args.family else list(FAMILIES)
    for a, b in pairs:
        for ref in (a, b):
            try:
                scene.history(ref)
            except (UnknownObjectError, KeyError, EntityError) as e:
                raise Invalid(str(e.args[0] if e.args else e)) from None
        try:
            scene.check_time(a, args.at)
            scene.check_time(b, args.at)
        except TimeRangeError as e:
            if args.pair:
                raise Invalid(str(e)) from None
            continue
        for fam in families:
            print(f"{a},{b} {fam}: {_family_label(fam, a, b, args.at, scene, config)}")
    return EXIT_OK


def cmd_fixture(args) -> int:
    try:
        scene_path, truth = ingest.write_fixture(args.name, args.out, seed=args.seed, sigma=args.sigma)
    except ingest.UnknownFixtureError as e:
        raise Invalid(e.args[0]) from None
    except OSError as e:
        raise OSError(f"cannot write {args.out}: {e.strerror}") from None
    print(f"wrote {scene_path} and {truth}")
    return EXIT_OK


COMMANDS = {"ground": cmd_ground, "query": cmd_query, "relations": cmd_relations, "fixture": cmd_fixture}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.print_config:
            sys.stdout.write(DEFAULT_CONFIG.dumps())
            return EXIT_OK
        if not args.command:
            parser.print_usage(sys.stderr)
            raise UsageError("a command is required")
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"qsground: error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"qsground: error: {e}", file=sys.stderr)
        return EXIT_IO
    except Invalid as e:
        print(f"qsground: error: {e}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
