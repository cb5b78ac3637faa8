#!/usr/bin/env python3
"""Regenerate the bundled ISO-3166 region registry from the system iso-codes data.

Reads the Debian ``iso-codes`` JSON files (package ``iso-codes``) and writes
the tab-separated registry shipped with chronomap. Run from the repo root:

    python3 scripts/build_region_registry.py

The output file is committed; this script only needs to be re-run when
upgrading to a newer iso-codes release.
"""

from __future__ import annotations

import argparse
import json
import re
import subprocess
import sys
from collections import Counter
from pathlib import Path

ISO_DIR = Path("/usr/share/iso-codes/json")
DEFAULT_OUT = Path(__file__).resolve().parent.parent / "src" / "chronomap" / "data" / "iso3166.tsv"

COUNTRY_RE = re.compile(r"[A-Z]{2}")
SUBDIV_RE = re.compile(r"[A-Z]{2}-[A-Z0-9]{1,3}")


def iso_codes_version() -> str:
    try:
        out = subprocess.run(
            ["dpkg-query", "-W", "-f=${Version}", "iso-codes"],
            capture_output=True, text=True, check=True,
        ).stdout.strip()
        return out or "unknown"
    except Exception:
        return "unknown"


def build_lines() -> list[tuple[str, str, list[str]]]:
    countries = json.loads((ISO_DIR / "iso_3166-1.json").read_text("utf-8"))["3166-1"]
    subdivisions = json.loads((ISO_DIR / "iso_3166-2.json").read_text("utf-8"))["3166-2"]

    lines: list[tuple[str, str, list[str]]] = []
    country_codes = set()
    for entry in sorted(countries, key=lambda e: e["alpha_2"]):
        code = entry["alpha_2"]
        if not COUNTRY_RE.fullmatch(code):
            raise SystemExit(f"unexpected country code {code!r}")
        name = entry["name"]
        aliases = []
        for key in ("official_name", "common_name"):
            alt = entry.get(key)
            if alt and alt != name and alt not in aliases:
                aliases.append(alt)
        aliases.append(entry["alpha_3"])
        country_codes.add(code)
        lines.append((code, name, aliases))

    for entry in sorted(subdivisions, key=lambda e: e["code"]):
        code = entry["code"]
        if not SUBDIV_RE.fullmatch(code):
            raise SystemExit(f"unexpected subdivision code {code!r}")
        if code[:2] not in country_codes:
            raise SystemExit(f"subdivision {code} has no parent country line")
        lines.append((code, entry["name"], []))

    # Aliases that map to more than one code must carry the '!' ambiguity
    # marker so the loader can tell intentional duplicates from data errors.
    counts = Counter(a.lower() for _, _, aliases in lines for a in aliases)
    marked = []
    for code, name, aliases in lines:
        aliases = [("!" + a) if counts[a.lower()] > 1 else a for a in aliases]
        for field in (name, *aliases):
            if "\t" in field or "|" in field:
                raise SystemExit(f"field {field!r} clashes with the TSV delimiters")
        marked.append((code, name, aliases))
    return marked


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = parser.parse_args()

    lines = build_lines()
    header = [
        "# chronomap region registry: ISO-3166-1 countries and ISO-3166-2 subdivisions.",
        "# Format: CODE<TAB>Official Name<TAB>alias1|alias2|...",
        "# An alias prefixed with '!' is intentionally shared by several codes.",
        f"# Edition: iso-codes {iso_codes_version()}",
    ]
    body = [f"{code}\t{name}\t{'|'.join(aliases)}" for code, name, aliases in lines]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(header + body) + "\n", "utf-8")
    n_countries = sum(1 for code, _, _ in lines if len(code) == 2)
    print(f"wrote {args.out}: {n_countries} countries, {len(lines) - n_countries} subdivisions")
    return 0


if __name__ == "__main__":
    sys.exit(main())
