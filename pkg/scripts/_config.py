"""Turn a dataclass config into command-line flags."""
from __future__ import annotations

import argparse
import dataclasses


def parse_config(cls, argv=None, description: str | None = None):
    parser = argparse.ArgumentParser(description=description)
    for fld in dataclasses.fields(cls):
        flag = "--" + fld.name.replace("_", "-")
        default = fld.default
        if isinstance(default, bool):
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=default)
        else:
            parser.add_argument(flag, type=type(default), default=default)
    return cls(**vars(parser.parse_args(argv)))
