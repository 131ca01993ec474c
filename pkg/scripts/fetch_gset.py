#!/usr/bin/env python3
"""Download Gset benchmark instances (requires network access).

Usage:
    python3 scripts/fetch_gset.py [--dest data/gset] [NAME ...]

Defaults to the seven instances the benchmark suite knows reference values
for. Point GDFL_GSET_DIR (or --dest) at the download directory so the
acceptance suite picks the files up.
"""

from __future__ import annotations

import argparse
import sys
import urllib.request
from pathlib import Path

BASE_URL = "https://web.stanford.edu/~yyye/yyye/Gset/"
DEFAULT_NAMES = ["G14", "G15", "G22", "G49", "G50", "G55", "G70"]


def fetch(name: str, dest: Path) -> Path:
    url = BASE_URL + name
    out = dest / name
    print(f"fetching {url} -> {out}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        out.write_bytes(resp.read())
    return out


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=DEFAULT_NAMES)
    ap.add_argument("--dest", default="data/gset")
    args = ap.parse_args(argv)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name in args.names or DEFAULT_NAMES:
        try:
            fetch(name, dest)
        except OSError as exc:
            print(f"failed to fetch {name}: {exc}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
