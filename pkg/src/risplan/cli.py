"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 scene validation error,
3 runtime/computation error.  Diagnostics go to stderr, data to files or
stdout.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import mapper
from .errors import RisPlanError, SceneInvariantError, SceneSchemaError, SceneSyntaxError
from .raytrace import trace_paths
from .scene import parse_scene, validate_scene

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCENE = 2
EXIT_RUNTIME = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _load_scene(path: str, check: bool = True):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise RisPlanError(f"cannot read scene file: {exc}") from exc
    if check:
        return parse_scene(text)
    import json as _json

    from .scene import build_scene
    try:
        data = _json.loads(text)
    except _json.JSONDecodeError as exc:
        raise SceneSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    return build_scene(data)


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError(f"expected x,y,z got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise _UsageError(f"bad coordinate in {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="risplan",
                     description="RIS uplink exposure and coverage planning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a scene file")
    p.add_argument("scene")

    p = sub.add_parser("trace", help="trace multipath between two points")
    p.add_argument("--scene", required=True)
    p.add_argument("--tx", required=True)
    p.add_argument("--rx", required=True)
    p.add_argument("--max-order", type=int, default=None)

    p = sub.add_parser("map", help="compute a coverage/exposure map")
    p.add_argument("--scene", required=True)
    p.add_argument("--variant", required=True, choices=["baseline", "with_ris"])
    p.add_argument("--weight-mode", choices=["literal", "cascade"], default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--pgm", default=None, metavar="COLUMN=FILE")

    p = sub.add_parser("classify", help="classify RIS vs baseline maps")
    p.add_argument("--baseline", required=True)
    p.add_argument("--variant", required=True)
    p.add_argument("--epsilon-db", type=float, default=mapper.REDUCTION_EPSILON_DB)
    p.add_argument("--out", required=True)

    p = sub.add_parser("summary", help="summarize a map CSV")
    p.add_argument("--map", required=True, dest="map_path")

    p = sub.add_parser("serve", help="run the local HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--state-dir", default=None)
    p.add_argument("--ui-dir", default=None)
    return parser


def _cmd_validate(args) -> int:
    scene = _load_scene(args.scene, check=False)
    issues = validate_scene(scene)
    for i in issues:
        print(f"{i.severity}: {i.code}: {i.message}", file=sys.stderr)
    if any(i.severity == "error" for i in issues):
        return EXIT_SCENE
    print("OK")
    return EXIT_OK


def _cmd_trace(args) -> int:
    scene = _load_scene(args.scene)
    tx = _parse_point(args.tx)
    rx = _parse_point(args.rx)
    trace = trace_paths(scene, tx, rx, args.max_order)
    for p in trace.paths:
        print(json.dumps({
            "length_m": round(p.length_m, 9),
            "interactions": [
                {"kind": i.kind, "wall": i.wall,
                 "point": [round(c, 9) for c in i.point]}
                for i in p.interactions
            ],
            "points": [[round(c, 9) for c in pt] for pt in p.points],
        }))
    return EXIT_OK


def _cmd_map(args) -> int:
    scene = _load_scene(args.scene)
    mode = {"literal": "literal", "cascade": "cascade_conjugate",
            None: None}[args.weight_mode]
    cmap = mapper.compute_map(scene, args.variant, weight_mode=mode,
                              threads=args.threads)
    with open(args.out, "wb") as fh:
        fh.write(mapper.export_map_csv(cmap))
    if args.pgm:
        if "=" not in args.pgm:
            raise _UsageError("--pgm expects COLUMN=FILE")
        column, dest = args.pgm.split("=", 1)
        with open(dest, "wb") as fh:
            fh.write(mapper.export_map_pgm(cmap, column))
    return EXIT_OK


def _cmd_classify(args) -> int:
    with open(args.baseline, "rb") as fh:
        base = mapper.load_map_csv(fh.read())
    with open(args.variant, "rb") as fh:
        var = mapper.load_map_csv(fh.read())
    cmap = mapper.classify(base, var, epsilon_db=args.epsilon_db)
    with open(args.out, "wb") as fh:
        fh.write(mapper.export_classification_csv(cmap))
    return EXIT_OK


def _cmd_summary(args) -> int:
    with open(args.map_path, "rb") as fh:
        data = fh.read()
    header = data.split(b"\n", 1)[0].decode("utf-8")
    if header == mapper.CLASSIFICATION_HEADER:
        import csv as _csv
        import io as _io
        rows = list(_csv.DictReader(_io.StringIO(data.decode("utf-8"))))
        cells = tuple(
            mapper.ClassifiedCell(
                float(r["x_m"]), float(r["y_m"]), float(r["z_m"]), r["category"],
                float(r["reduction_db"]) if r["reduction_db"] else None)
            for r in rows)
        grid = mapper._infer_grid([c.x_m for c in cells], [c.y_m for c in cells],
                                  cells[0].z_m if cells else 0.0)
        summary = mapper.map_summary(mapper.ClassificationMap(grid=grid, cells=cells))
    else:
        summary = mapper.map_summary(mapper.load_map_csv(data))
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(state_dir=args.state_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.bind, port=args.port, log_level="info")
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "trace": _cmd_trace,
    "map": _cmd_map,
    "classify": _cmd_classify,
    "summary": _cmd_summary,
    "serve": _cmd_serve,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SceneSyntaxError, SceneSchemaError, SceneInvariantError) as exc:
        print(f"scene error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_SCENE
    except RisPlanError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
