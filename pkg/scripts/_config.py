"""Turn a dataclass of experiment settings into command line flags."""

from __future__ import annotations

import argparse
import dataclasses
import json


def parse(cls, description: str = ""):
    ap = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        kind = type(default)
        if kind is bool:
            ap.add_argument(f"--{f.name.replace('_', '-')}", action=argparse.BooleanOptionalAction, default=default)
        elif kind in (list, tuple):
            ap.add_argument(f"--{f.name.replace('_', '-')}", type=int, nargs="+", default=default)
        else:
            ap.add_argument(f"--{f.name.replace('_', '-')}", type=kind, default=default)
    ap.add_argument("--json", action="store_true", help="print results as JSON")
    args = vars(ap.parse_args())
    as_json = args.pop("json")
    return cls(**args), as_json


def emit(rows: list[dict], as_json: bool):
    if as_json:
        print(json.dumps(rows, indent=2))
        return
    if not rows:
        return
    keys = list(rows[0])
    print("  ".join(f"{k:>14}" for k in keys))
    for r in rows:
        print("  ".join(f"{r[k]:>14.8g}" if isinstance(r[k], float) else f"{str(r[k]):>14}" for k in keys))
