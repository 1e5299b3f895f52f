"""Instance files: parsing, validation, canonical hashing, and emission.

An instance file is TOML with exact rational strings end to end.  The
canonical payload (normalized rationals, sorted terms, no regression
block) is what gets hashed, so formatting and comment changes never
invalidate a cache entry but any mathematical change does.
"""

import hashlib
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import __version__
from .errors import InstanceError
from .forms import BinaryForm, MultiForm
from .geometry import Hypersurface, RationalCurve

SCHEMA_VERSION = 1

RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")

EXPECTED_KEYS = {
    "pullback_tangent_pn": list,
    "restricted_tangent": list,
    "normal_pn": list,
    "normal_hyp": list,
    "h1_normal_twisted": int,
    "sigma": int,
    "jacobian_image_dim": int,
    "k": int,
    "obstructed_first_order": str,
}


@dataclass(frozen=True)
class InstanceFile:
    """A parsed instance: geometric objects plus the canonical payload."""

    schema_version: int
    curve: RationalCurve
    hypersurface: Hypersurface
    lines: Optional[Tuple[MultiForm, ...]]
    expected: Dict[str, object]
    payload: Dict[str, object]

    @property
    def input_hash(self) -> str:
        return payload_hash(self.payload)


def parse_rational(value, path: str) -> Fraction:
    if not isinstance(value, str) or not RATIONAL_RE.match(value):
        raise InstanceError(
            f"expected a rational string like '3' or '-2/7', got {value!r}", path
        )
    try:
        return Fraction(value)
    except ZeroDivisionError:
        raise InstanceError("zero denominator", path) from None


def _require_int(value, path: str, minimum: Optional[int] = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InstanceError(f"expected an integer, got {value!r}", path)
    if minimum is not None and value < minimum:
        raise InstanceError(f"expected an integer >= {minimum}, got {value}", path)
    return value


def _require_table(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise InstanceError("expected a table", path)
    return value


def _require_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise InstanceError("expected an array", path)
    return value


def _check_keys(table: dict, allowed: Sequence[str], path: str):
    for key in table:
        if key not in allowed:
            raise InstanceError(
                f"unknown key {key!r} (allowed: {', '.join(allowed)})",
                f"{path}.{key}" if path else key,
            )


def _normalize_form_coeffs(raw, d: int, path: str) -> List[str]:
    entries = _require_list(raw, path)
    if len(entries) not in (0, d + 1):
        raise InstanceError(
            f"coefficient list must be empty or have {d + 1} entries, got {len(entries)}",
            path,
        )
    values = [
        parse_rational(entry, f"{path}[{k}]") for k, entry in enumerate(entries)
    ]
    if all(v == 0 for v in values):
        return []
    return [str(v) for v in values]


def _parse_curve(table, path: str) -> Tuple[dict, List[List[str]]]:
    table = _require_table(table, path)
    _check_keys(table, ("n", "d", "coords"), path)
    if "n" not in table or "d" not in table or "coords" not in table:
        raise InstanceError("curve needs keys n, d, coords", path)
    n = _require_int(table["n"], f"{path}.n", minimum=2)
    d = _require_int(table["d"], f"{path}.d", minimum=1)
    coords_raw = _require_list(table["coords"], f"{path}.coords")
    if len(coords_raw) != n + 1:
        raise InstanceError(
            f"expected {n + 1} coordinate forms, got {len(coords_raw)}",
            f"{path}.coords",
        )
    coords = [
        _normalize_form_coeffs(c, d, f"{path}.coords[{i}]")
        for i, c in enumerate(coords_raw)
    ]
    return {"n": n, "d": d, "coords": coords}, coords


def _parse_hypersurface(table, n: int, path: str) -> dict:
    table = _require_table(table, path)
    _check_keys(table, ("h", "terms"), path)
    if "h" not in table or "terms" not in table:
        raise InstanceError("hypersurface needs keys h, terms", path)
    h = _require_int(table["h"], f"{path}.h", minimum=1)
    terms_raw = _require_list(table["terms"], f"{path}.terms")
    if not terms_raw:
        raise InstanceError("hypersurface needs at least one term", f"{path}.terms")
    seen = {}
    for k, term in enumerate(terms_raw):
        tpath = f"{path}.terms[{k}]"
        term = _require_table(term, tpath)
        _check_keys(term, ("exponents", "coefficient"), tpath)
        if "exponents" not in term or "coefficient" not in term:
            raise InstanceError("term needs keys exponents, coefficient", tpath)
        exps_raw = _require_list(term["exponents"], f"{tpath}.exponents")
        if len(exps_raw) != n + 1:
            raise InstanceError(
                f"expected {n + 1} exponents, got {len(exps_raw)}",
                f"{tpath}.exponents",
            )
        exps = tuple(
            _require_int(e, f"{tpath}.exponents[{j}]", minimum=0)
            for j, e in enumerate(exps_raw)
        )
        if sum(exps) != h:
            raise InstanceError(
                f"exponents sum to {sum(exps)}, expected {h}", f"{tpath}.exponents"
            )
        coeff = parse_rational(term["coefficient"], f"{tpath}.coefficient")
        if coeff == 0:
            raise InstanceError("zero coefficient not allowed", f"{tpath}.coefficient")
        if exps in seen:
            raise InstanceError(f"duplicate exponents {list(exps)}", f"{tpath}.exponents")
        seen[exps] = coeff
    terms = [
        {"exponents": list(e), "coefficient": str(c)}
        for e, c in sorted(seen.items())
    ]
    return {"h": h, "terms": terms}


def _parse_family(table, n: int, h: int, path: str) -> dict:
    table = _require_table(table, path)
    _check_keys(table, ("lines",), path)
    if "lines" not in table:
        raise InstanceError("family needs key lines", path)
    lines_raw = _require_list(table["lines"], f"{path}.lines")
    if len(lines_raw) != h + 1:
        raise InstanceError(
            f"expected {h + 1} linear forms, got {len(lines_raw)}", f"{path}.lines"
        )
    lines = []
    for i, line in enumerate(lines_raw):
        lpath = f"{path}.lines[{i}]"
        entries = _require_list(line, lpath)
        if len(entries) != n + 1:
            raise InstanceError(
                f"expected {n + 1} coefficients, got {len(entries)}", lpath
            )
        values = [
            parse_rational(entry, f"{lpath}[{k}]") for k, entry in enumerate(entries)
        ]
        if all(v == 0 for v in values):
            raise InstanceError("linear form is zero", lpath)
        lines.append([str(v) for v in values])
    return {"lines": lines}


def _parse_expected(table, path: str) -> Dict[str, object]:
    table = _require_table(table, path)
    _check_keys(table, tuple(EXPECTED_KEYS), path)
    out: Dict[str, object] = {}
    for key, value in table.items():
        kind = EXPECTED_KEYS[key]
        if kind is list:
            entries = _require_list(value, f"{path}.{key}")
            out[key] = [
                _require_int(e, f"{path}.{key}[{i}]") for i, e in enumerate(entries)
            ]
        elif kind is int:
            out[key] = _require_int(value, f"{path}.{key}")
        else:
            if not isinstance(value, str):
                raise InstanceError(f"expected a string, got {value!r}", f"{path}.{key}")
            out[key] = value
    return out


def _form_from_strings(coeffs: Sequence[str]) -> BinaryForm:
    if not coeffs:
        return BinaryForm.zero()
    return BinaryForm([Fraction(c) for c in coeffs])


def objects_from_payload(
    payload: Dict[str, object]
) -> Tuple[RationalCurve, Hypersurface, Optional[Tuple[MultiForm, ...]]]:
    """Geometric objects from a canonical payload (raises on geometric defects)."""
    curve_part = payload["curve"]
    n, d = curve_part["n"], curve_part["d"]
    curve = RationalCurve(
        n, d, [_form_from_strings(c) for c in curve_part["coords"]]
    )
    hyp_part = payload["hypersurface"]
    terms = {
        tuple(t["exponents"]): Fraction(t["coefficient"])
        for t in hyp_part["terms"]
    }
    hyp = Hypersurface(n, hyp_part["h"], MultiForm(n + 1, hyp_part["h"], terms))
    lines = None
    if "family" in payload:
        lines = tuple(
            MultiForm(
                n + 1,
                1,
                {
                    tuple(1 if j == i else 0 for j in range(n + 1)): Fraction(c)
                    for i, c in enumerate(entry)
                    if Fraction(c) != 0
                },
            )
            for entry in payload["family"]["lines"]
        )
    return curve, hyp, lines


def parse_instance_dict(raw: dict) -> InstanceFile:
    """Validate a parsed TOML document and build the instance."""
    _check_keys(
        raw, ("schema_version", "curve", "hypersurface", "family", "expected"), ""
    )
    if "schema_version" not in raw:
        raise InstanceError("missing schema_version", "schema_version")
    version = _require_int(raw["schema_version"], "schema_version")
    if version != SCHEMA_VERSION:
        raise InstanceError(
            f"unsupported schema_version {version} (supported: {SCHEMA_VERSION})",
            "schema_version",
        )
    if "curve" not in raw:
        raise InstanceError("missing curve table", "curve")
    if "hypersurface" not in raw:
        raise InstanceError("missing hypersurface table", "hypersurface")
    curve_payload, _ = _parse_curve(raw["curve"], "curve")
    hyp_payload = _parse_hypersurface(
        raw["hypersurface"], curve_payload["n"], "hypersurface"
    )
    payload: Dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "curve": curve_payload,
        "hypersurface": hyp_payload,
    }
    if "family" in raw:
        payload["family"] = _parse_family(
            raw["family"], curve_payload["n"], hyp_payload["h"], "family"
        )
    expected = (
        _parse_expected(raw["expected"], "expected") if "expected" in raw else {}
    )
    curve, hyp, lines = objects_from_payload(payload)
    return InstanceFile(
        schema_version=SCHEMA_VERSION,
        curve=curve,
        hypersurface=hyp,
        lines=lines,
        expected=expected,
        payload=payload,
    )


def parse_instance_text(text: str) -> InstanceFile:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise InstanceError(f"invalid TOML: {exc}", "") from None
    return parse_instance_dict(raw)


def load_instance(path: str) -> InstanceFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InstanceError(f"cannot read instance file: {exc}", "") from None
    return parse_instance_text(text)


def canonical_json(payload: Dict[str, object]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def payload_hash(payload: Dict[str, object]) -> str:
    body = canonical_json(payload) + "|curvebundles-" + __version__
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Emission (fixed schema, so a tiny writer keeps the dependency surface flat).


def _toml_string(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _toml_string_array(values: Sequence[str]) -> str:
    return "[" + ", ".join(_toml_string(v) for v in values) + "]"


def form_coeff_strings(form: BinaryForm) -> List[str]:
    if form.is_zero:
        return []
    return [str(c) for c in form.coeffs]


def line_coeff_strings(line: MultiForm) -> List[str]:
    out = [Fraction(0)] * line.num_vars
    for exps, c in line.terms.items():
        out[exps.index(1)] = c
    return [str(c) for c in out]


def emit_instance(
    curve: RationalCurve,
    hyp: Hypersurface,
    lines: Optional[Sequence[MultiForm]] = None,
    expected: Optional[Dict[str, object]] = None,
) -> str:
    """Render an instance as TOML text that parses back to the same payload."""
    out = [f"schema_version = {SCHEMA_VERSION}", ""]
    out.append("[curve]")
    out.append(f"n = {curve.n}")
    out.append(f"d = {curve.d}")
    coords = ", ".join(
        _toml_string_array(form_coeff_strings(c)) for c in curve.coords
    )
    out.append(f"coords = [{coords}]")
    out.append("")
    out.append("[hypersurface]")
    out.append(f"h = {hyp.h}")
    out.append("terms = [")
    for exps, coeff in hyp.form.sorted_terms():
        exp_text = "[" + ", ".join(str(e) for e in exps) + "]"
        out.append(
            f"  {{ exponents = {exp_text}, coefficient = {_toml_string(str(coeff))} }},"
        )
    out.append("]")
    if lines is not None:
        out.append("")
        out.append("[family]")
        out.append("lines = [")
        for line in lines:
            out.append(f"  {_toml_string_array(line_coeff_strings(line))},")
        out.append("]")
    if expected:
        out.append("")
        out.append("[expected]")
        for key in sorted(expected):
            value = expected[key]
            if isinstance(value, str):
                out.append(f"{key} = {_toml_string(value)}")
            elif isinstance(value, (list, tuple)):
                out.append(f"{key} = [" + ", ".join(str(v) for v in value) + "]")
            else:
                out.append(f"{key} = {value}")
    out.append("")
    return "\n".join(out)
