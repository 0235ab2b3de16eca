"""Command line entry point: ``plots render --spec fig.json``.

Exit codes follow the simulator CLI: 0 on success, 2 for unusable requests
(unreadable spec, schema violation, missing input or column), 3 when
rendering itself fails.  Errors are one JSON object per line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import jsonschema

from . import __version__
from .figures import FIGURE_KINDS, FigureSpec, render
from .io import SchemaError

_SPEC_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["kind", "input", "output"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": list(FIGURE_KINDS)},
        "input": {"type": "string", "minLength": 1},
        "output": {"type": "string", "minLength": 1},
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "title": {"type": "string"},
                "xlabel": {"type": "string"},
                "ylabel": {"type": "string"},
                "dpi": {"type": "integer", "minimum": 36, "maximum": 600},
                "bins": {"type": "integer", "minimum": 4, "maximum": 512},
                "grid": {"type": "boolean"},
                "figsize": {
                    "type": "array",
                    "items": {"type": "number", "exclusiveMinimum": 0},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
    },
}


def _error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _load_spec(path: str) -> FigureSpec:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"spec file is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(raw, _SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ValueError(f"spec does not match the schema: {exc.message}") from exc
    # input and output resolve against the spec file, so a spec directory is
    # relocatable as a unit
    base = os.path.dirname(os.path.abspath(path))
    return FigureSpec(
        kind=raw["kind"],
        input=os.path.join(base, raw["input"]),
        output=os.path.join(base, raw["output"]),
        options=raw.get("options", {}),
    )


def _cmd_render(args) -> int:
    try:
        spec = _load_spec(args.spec)
        if not os.path.isfile(spec.input):
            raise ValueError(f"input file does not exist: {spec.input}")
    except ValueError as exc:
        _error("config", str(exc))
        return 2
    try:
        out = render(spec)
    except SchemaError as exc:
        _error("config", str(exc))
        return 2
    except Exception as exc:  # pragma: no cover - depends on backend failure
        _error("runtime", f"{type(exc).__name__}: {exc}")
        return 3
    print(out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from exchange-lattice outputs."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one figure from a JSON spec")
    p_render.add_argument("--spec", required=True, help="path to the figure spec JSON")
    p_render.set_defaults(func=_cmd_render)
    args = parser.parse_args(argv)
    return args.func(args)


def console() -> None:
    raise SystemExit(main())
