"""ISO-3166 region identities and the bundled code/name registry.

Regions are identified by ISO-3166-1 alpha-2 country codes, optionally
narrowed by an ISO-3166-2 subdivision suffix (``DE`` or ``DE-BY``). The
registry ships as a static data file; nothing is looked up over the
network. Name resolution is strict: an unknown or ambiguous name is an
error, never a guess.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import AmbiguousName, MalformedCode, RegistryError, UnknownCode, Unresolvable

_CODE_RE = re.compile(r"([A-Z]{2})(?:-([A-Z0-9]{1,3}))?")


@dataclass(frozen=True)
class RegionCode:
    """Country code plus optional subdivision suffix."""

    country: str
    subdivision: str | None = None

    def __post_init__(self):
        if not re.fullmatch(r"[A-Z]{2}", self.country):
            raise MalformedCode(f"country {self.country!r} must be two uppercase letters")
        if self.subdivision is not None and not re.fullmatch(r"[A-Z0-9]{1,3}", self.subdivision):
            raise MalformedCode(f"subdivision {self.subdivision!r} must match [A-Z0-9]{{1,3}}")

    @property
    def text(self) -> str:
        """Canonical text form, ``CC`` or ``CC-SUB``."""
        if self.subdivision is None:
            return self.country
        return f"{self.country}-{self.subdivision}"

    @property
    def is_subdivision(self) -> bool:
        return self.subdivision is not None

    @property
    def country_code(self) -> "RegionCode":
        return self if self.subdivision is None else RegionCode(self.country)

    def __str__(self) -> str:
        return self.text

    @classmethod
    def from_text(cls, text: str) -> "RegionCode":
        """Parse canonical form without consulting any registry."""
        m = _CODE_RE.fullmatch(text.strip().upper())
        if not m:
            raise MalformedCode(f"{text!r} is not a CC or CC-SUB region code")
        return cls(m.group(1), m.group(2))


@dataclass(frozen=True)
class RegistryEntry:
    code: RegionCode
    name: str
    aliases: tuple[str, ...]


class RegionRegistry:
    """Lookup table from codes, official names and aliases to regions.

    Resolution order is exact code, then exact official name, then
    case-insensitive alias (official names double as implicit aliases).
    When a name matches several regions, a match on a country outranks
    matches on subdivisions; anything still ambiguous is reported with
    its candidates.
    """

    def __init__(self, entries: list[RegistryEntry]):
        self._entries: dict[str, RegistryEntry] = {}
        self._names: dict[str, list[str]] = {}
        self._aliases: dict[str, list[str]] = {}
        self._explicit_unmarked: dict[str, str] = {}
        for entry in entries:
            text = entry.code.text
            if text in self._entries:
                raise RegistryError(f"duplicate registry code {text}")
            self._entries[text] = entry
        for entry in entries:
            if entry.code.is_subdivision and entry.code.country not in self._entries:
                raise RegistryError(
                    f"subdivision {entry.code.text} has no country entry {entry.code.country}")
        for entry in entries:
            text = entry.code.text
            self._names.setdefault(entry.name, []).append(text)
            self._aliases.setdefault(entry.name.lower(), []).append(text)
            for alias in entry.aliases:
                marked = alias.startswith("!")
                alias = alias.lstrip("!")
                lower = alias.lower()
                owners = self._aliases.setdefault(lower, [])
                if text not in owners:
                    owners.append(text)
                if not marked:
                    prior = self._explicit_unmarked.get(lower)
                    if prior is not None and prior != text:
                        raise RegistryError(
                            f"alias {alias!r} maps to both {prior} and {text} without a '!' marker")
                    self._explicit_unmarked[lower] = text

    def __contains__(self, text: str) -> bool:
        return text in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    def get(self, text: str) -> RegistryEntry | None:
        return self._entries.get(text)

    def codes(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def countries(self) -> tuple[str, ...]:
        return tuple(t for t in self._entries if "-" not in t)

    def subdivisions_of(self, country: str) -> tuple[str, ...]:
        prefix = country.upper() + "-"
        return tuple(t for t in self._entries if t.startswith(prefix))

    def parse(self, text: str) -> RegionCode:
        code = RegionCode.from_text(text)
        if code.text not in self._entries:
            raise UnknownCode(f"{code.text} is not in the region registry")
        return code

    def resolve(self, text: str) -> RegionCode:
        text = text.strip()
        if not text:
            raise Unresolvable("empty region name")
        try:
            return self.parse(text)
        except (MalformedCode, UnknownCode):
            pass
        candidates = self._names.get(text)
        if not candidates:
            candidates = self._aliases.get(text.lower())
        if not candidates:
            raise Unresolvable(f"{text!r} matches no code, name, or alias")
        chosen = self._prefer_countries(candidates)
        if len(chosen) > 1:
            raise AmbiguousName(text, sorted(chosen))
        return self._entries[chosen[0]].code

    @staticmethod
    def _prefer_countries(candidates: list[str]) -> list[str]:
        countries = [c for c in candidates if "-" not in c]
        return countries or candidates

    @classmethod
    def from_lines(cls, lines: list[str]) -> "RegionRegistry":
        entries = []
        for lineno, raw in enumerate(lines, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise RegistryError(f"line {lineno}: expected 3 tab-separated fields")
            code_text, name, alias_field = parts
            try:
                code = RegionCode.from_text(code_text)
            except MalformedCode as exc:
                raise RegistryError(f"line {lineno}: {exc}") from None
            if code.text != code_text:
                raise RegistryError(f"line {lineno}: code {code_text!r} is not canonical")
            aliases = tuple(a for a in alias_field.split("|") if a)
            entries.append(RegistryEntry(code, name, aliases))
        return cls(entries)

    @classmethod
    def from_file(cls, path: str | Path) -> "RegionRegistry":
        return cls.from_lines(Path(path).read_text("utf-8").splitlines())


@lru_cache(maxsize=1)
def default_registry() -> RegionRegistry:
    """Registry loaded from the bundled ISO-3166 data file."""
    data = resources.files("chronomap.data").joinpath("iso3166.tsv").read_text("utf-8")
    return RegionRegistry.from_lines(data.splitlines())


def parse_region_code(text: str, registry: RegionRegistry | None = None) -> RegionCode:
    """Parse a canonical region code, requiring registry membership."""
    return (registry or default_registry()).parse(text)


def resolve_region_name(text: str, registry: RegionRegistry | None = None) -> RegionCode:
    """Resolve a code, official name, or alias to a region."""
    return (registry or default_registry()).resolve(text)
