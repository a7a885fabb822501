"""Series catalog: built-in entries, JSON interchange, validation.

The interchange format keeps every rational as a "num/den" string so
files stay exact.  dump_catalog(load_catalog(...)) is byte-identical
for the built-in catalog (canonical form: sorted keys, two-space
indent).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .exact import as_rational
from .series import FourierData, SeriesSpec

__all__ = [
    "CatalogEntry",
    "CatalogError",
    "load_catalog",
    "loads_catalog",
    "dump_catalog",
    "get_entry",
    "fraction_str",
]

_REQUIRED_KEYS = {"name", "m", "s", "z0", "a", "chi"}
_OPTIONAL_KEYS = {"t0", "fourier", "provenance"}


class CatalogError(ValueError):
    """Raised for malformed catalog files or invariant violations."""


@dataclass
class CatalogEntry:
    """A catalogued series plus per-field provenance notes."""

    spec: SeriesSpec
    provenance: dict[str, str] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.spec.name


def fraction_str(q: Fraction) -> str:
    """Exact string form: "n/d", or "n" for integers."""
    q = as_rational(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_fourier(obj, name: str) -> FourierData:
    if not isinstance(obj, dict) or set(obj) != {"alpha", "beta"}:
        raise CatalogError(
            f"entry {name!r}: fourier must be an object with alpha and beta"
        )

    def parse_side(side):
        out = []
        for pair in obj[side]:
            if not isinstance(pair, list) or len(pair) != 2:
                raise CatalogError(
                    f"entry {name!r}: fourier {side} entries must be "
                    "[real, imag] string pairs"
                )
            out.append((as_rational(pair[0]), as_rational(pair[1])))
        return tuple(out)

    return FourierData(alpha=parse_side("alpha"), beta=parse_side("beta"))


def _entry_from_obj(obj) -> CatalogEntry:
    if not isinstance(obj, dict):
        raise CatalogError("catalog entries must be JSON objects")
    name = obj.get("name", "<unnamed>")
    missing = _REQUIRED_KEYS - set(obj)
    if missing:
        raise CatalogError(f"entry {name!r}: missing keys {sorted(missing)}")
    unknown = set(obj) - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise CatalogError(f"entry {name!r}: unknown keys {sorted(unknown)}")
    if not isinstance(obj["m"], int) or not isinstance(obj["chi"], int):
        raise CatalogError(f"entry {name!r}: m and chi must be integers")
    provenance = obj.get("provenance", {})
    if not isinstance(provenance, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in provenance.items()
    ):
        raise CatalogError(f"entry {name!r}: provenance must map strings to strings")
    for derived in ("t0", "fourier"):
        if derived in obj and derived not in provenance:
            raise CatalogError(
                f"entry {name!r}: derived field {derived!r} requires a "
                "provenance string"
            )
    fourier = _parse_fourier(obj["fourier"], name) if "fourier" in obj else None
    try:
        spec = SeriesSpec(
            name=obj["name"],
            m=obj["m"],
            s=tuple(as_rational(x) for x in obj["s"]),
            z0=as_rational(obj["z0"]),
            a=tuple(as_rational(x) for x in obj["a"]),
            chi=obj["chi"],
            t0=as_rational(obj["t0"]) if "t0" in obj else None,
            fourier=fourier,
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise CatalogError(f"entry {name!r}: {exc}") from exc
    return CatalogEntry(spec=spec, provenance=dict(provenance))


def loads_catalog(text: str) -> list[CatalogEntry]:
    """Parse and validate a catalog from a JSON string."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise CatalogError("catalog must be a JSON array of entries")
    entries = [_entry_from_obj(obj) for obj in data]
    seen = set()
    for entry in entries:
        if entry.name in seen:
            raise CatalogError(f"duplicate series name {entry.name!r}")
        seen.add(entry.name)
    return entries


def load_catalog(path: Union[str, Path, None] = None) -> list[CatalogEntry]:
    """Load a catalog file, or the built-in catalog when path is None."""
    if path is None:
        text = (
            resources.files("ramacong").joinpath("data/catalog.json").read_text()
        )
    else:
        text = Path(path).read_text()
    return loads_catalog(text)


def _entry_to_obj(entry: CatalogEntry) -> dict:
    spec = entry.spec
    obj: dict = {
        "name": spec.name,
        "m": spec.m,
        "s": [fraction_str(x) for x in spec.s],
        "z0": fraction_str(spec.z0),
        "a": [fraction_str(x) for x in spec.a],
        "chi": spec.chi,
    }
    if spec.t0 is not None:
        obj["t0"] = fraction_str(spec.t0)
    if spec.fourier is not None:
        obj["fourier"] = {
            "alpha": [
                [fraction_str(re), fraction_str(im)] for re, im in spec.fourier.alpha
            ],
            "beta": [
                [fraction_str(re), fraction_str(im)] for re, im in spec.fourier.beta
            ],
        }
    if entry.provenance:
        obj["provenance"] = dict(sorted(entry.provenance.items()))
    return obj


def dump_catalog(entries: Sequence[CatalogEntry]) -> str:
    """Canonical JSON text for a catalog (sorted keys, exact rationals)."""
    data = [_entry_to_obj(e) for e in entries]
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def get_entry(entries: Sequence[CatalogEntry], name: str) -> CatalogEntry:
    for entry in entries:
        if entry.name == name:
            return entry
    known = ", ".join(e.name for e in entries)
    raise CatalogError(f"no series named {name!r} in catalog (known: {known})")
