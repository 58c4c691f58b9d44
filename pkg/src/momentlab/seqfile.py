"""Sequence files: the on-disk interchange format for moments and pmfs.

JSON documents with a schema_version, a kind ("moments" or "pmf"), a
backend ("exact" or "decimal"), and values as strings. Exact values are
rationals serialized "num/den" (plain integers stay plain); they are never
written as decimals. Decimal values always travel with precision_bits and
enough digits that reading them back at that precision is lossless. A
plain CSV form (header row, index/value columns) is supported for
spreadsheets; it carries no metadata, so the backend is inferred from the
value strings unless the caller overrides it.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Optional, Union

import mpmath
from mpmath import mpf

from .distributions import DiscretePMF
from .exceptions import SequenceFileError
from .moment_algebra import MomentSequence

SCHEMA_VERSION = 1

_KINDS = ("moments", "pmf")
_BACKENDS = ("exact", "decimal")


def _digits_for(bits: int) -> int:
    return max(17, int(bits * 0.30103) + 3)


def _decimal_str(x, bits: int) -> str:
    with mpmath.workprec(bits):
        return mpmath.nstr(mpf(x), _digits_for(bits), strip_zeros=False)


def _parse_decimal(s: str, bits: int):
    with mpmath.workprec(bits):
        return mpf(s)


def _parse_exact(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SequenceFileError(f"bad exact value {s!r}: {exc}") from None


def _value_strings(values, exact: bool, bits: Optional[int]) -> list:
    if exact:
        return [str(Fraction(v)) for v in values]
    return [_decimal_str(v, bits) for v in values]


def moments_to_doc(m: MomentSequence, generator: Optional[str] = None,
                   params: Optional[dict] = None,
                   tolerance: Optional[str] = None) -> dict:
    """Build the JSON document for a moment sequence, with provenance."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "moments",
        "backend": "exact" if m.exact else "decimal",
        "values": _value_strings(m.values, m.exact, m.precision_bits),
    }
    if not m.exact:
        doc["precision_bits"] = m.precision_bits
    if generator:
        doc["generator"] = generator
    if params:
        doc["params"] = params
    if tolerance:
        doc["tolerance"] = tolerance
    return doc


def pmf_to_doc(pmf: DiscretePMF, generator: Optional[str] = None,
               params: Optional[dict] = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "pmf",
        "backend": "exact" if pmf.exact else "decimal",
        "values": _value_strings(pmf.masses, pmf.exact, pmf.precision_bits),
    }
    if pmf.exact:
        if pmf.entry_error:
            doc["entry_error"] = str(Fraction(pmf.entry_error))
    else:
        doc["precision_bits"] = pmf.precision_bits
        doc["entry_error"] = _decimal_str(pmf.entry_error, pmf.precision_bits)
    if pmf.tail_mass is not None:
        doc["tail_mass"] = (str(Fraction(pmf.tail_mass)) if pmf.exact
                            else _decimal_str(pmf.tail_mass, pmf.precision_bits))
    if generator:
        doc["generator"] = generator
    if params:
        doc["params"] = params
    return doc


def doc_to_json(doc: dict) -> str:
    """Deterministic serialization: sorted keys, two-space indent."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_doc(text: Union[str, bytes, dict]) -> dict:
    """Parse and validate a sequence-file document."""
    if isinstance(text, dict):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SequenceFileError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SequenceFileError("top level must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SequenceFileError(f"unsupported schema_version "
                                f"{doc.get('schema_version')!r}")
    if doc.get("kind") not in _KINDS:
        raise SequenceFileError(f"kind must be one of {_KINDS}")
    if doc.get("backend") not in _BACKENDS:
        raise SequenceFileError(f"backend must be one of {_BACKENDS}")
    values = doc.get("values")
    if not isinstance(values, list) or not values:
        raise SequenceFileError("values must be a non-empty list")
    if not all(isinstance(v, str) for v in values):
        raise SequenceFileError("values must be strings")
    if doc["backend"] == "decimal":
        bits = doc.get("precision_bits")
        if not isinstance(bits, int) or bits < 64:
            raise SequenceFileError("decimal backend requires integer "
                                    "precision_bits >= 64")
    return doc


def sequence_from_doc(doc: dict) -> Union[MomentSequence, DiscretePMF]:
    """Materialize the document as a MomentSequence or DiscretePMF."""
    doc = parse_doc(doc)
    exact = doc["backend"] == "exact"
    bits = doc.get("precision_bits")
    if exact:
        values = [_parse_exact(s) for s in doc["values"]]
    else:
        values = [_parse_decimal(s, bits) for s in doc["values"]]
    try:
        if doc["kind"] == "moments":
            if exact:
                return MomentSequence.from_exact(values)
            return MomentSequence.from_approx(values, bits)
        entry_error = doc.get("entry_error", "0")
        tail_mass = doc.get("tail_mass")
        if exact:
            return DiscretePMF(tuple(values), exact=True,
                               entry_error=_parse_exact(entry_error),
                               tail_mass=None if tail_mass is None
                               else _parse_exact(tail_mass))
        return DiscretePMF(tuple(values), exact=False, precision_bits=bits,
                           entry_error=_parse_decimal(entry_error, bits),
                           tail_mass=None if tail_mass is None
                           else _parse_decimal(tail_mass, bits))
    except ValueError as exc:
        raise SequenceFileError(str(exc)) from None


def load_json(path: str) -> Union[MomentSequence, DiscretePMF]:
    with open(path, "r", encoding="utf-8") as fh:
        return sequence_from_doc(parse_doc(fh.read()))


def dump_json(obj: Union[MomentSequence, DiscretePMF], path: str, **meta) -> None:
    doc = (moments_to_doc(obj, **meta) if isinstance(obj, MomentSequence)
           else pmf_to_doc(obj, **meta))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(doc_to_json(doc))


# ---------------------------------------------------------------------------
# CSV convenience form


def write_csv(obj: Union[MomentSequence, DiscretePMF], path_or_buf) -> None:
    """Two columns, index and value, with a header row."""
    values = obj.values if isinstance(obj, MomentSequence) else obj.masses
    exact = obj.exact
    bits = obj.precision_bits
    strings = _value_strings(values, exact, bits)
    own = isinstance(path_or_buf, str)
    fh = open(path_or_buf, "w", newline="", encoding="utf-8") if own else path_or_buf
    try:
        w = csv.writer(fh)
        w.writerow(["index", "value"])
        for i, s in enumerate(strings):
            w.writerow([i, s])
    finally:
        if own:
            fh.close()


def read_csv(path_or_buf, kind: str = "moments", backend: Optional[str] = None,
             precision_bits: int = 128) -> Union[MomentSequence, DiscretePMF]:
    """Read the CSV form back.

    With backend=None the backend is inferred: values all parseable as
    rationals mean exact, anything with a decimal point or exponent means
    decimal at `precision_bits`.
    """
    own = isinstance(path_or_buf, str)
    fh = open(path_or_buf, "r", newline="", encoding="utf-8") if own else path_or_buf
    try:
        rows = list(csv.reader(fh))
    finally:
        if own:
            fh.close()
    if not rows or [c.strip().lower() for c in rows[0]] != ["index", "value"]:
        raise SequenceFileError("CSV must start with an 'index,value' header")
    body = [r for r in rows[1:] if r]
    if not body:
        raise SequenceFileError("CSV has no data rows")
    strings = []
    for r in body:
        if len(r) != 2:
            raise SequenceFileError(f"malformed CSV row {r!r}")
        strings.append(r[1].strip())
    if backend is None:
        plain = all(set(s) <= set("0123456789/-") for s in strings)
        backend = "exact" if plain else "decimal"
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, "backend": backend,
           "values": strings}
    if backend == "decimal":
        doc["precision_bits"] = precision_bits
    return sequence_from_doc(doc)


def csv_text(obj: Union[MomentSequence, DiscretePMF]) -> str:
    buf = io.StringIO()
    write_csv(obj, buf)
    return buf.getvalue()
