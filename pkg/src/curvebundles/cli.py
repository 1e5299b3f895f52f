"""Command line interface.

Subcommands: ``report`` (one instance to one JSON envelope), ``batch``
(many instances with caching and a summary), ``generate`` (deterministic
random instance files), ``verify`` (certificate replay on an envelope).

Exit codes: 0 success, 1 precondition or verification failure (details
in the JSON payload), 2 malformed input (message names the field).
"""

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import __version__
from .errors import GeometryError, InstanceError, PreconditionError
from .geometry import random_instance
from .instancefile import (
    InstanceFile,
    emit_instance,
    load_instance,
    objects_from_payload,
    parse_instance_text,
)
from .report import envelope_json, precondition_envelope, run_report, verify_envelope


def _write_text(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _input_error(exc: InstanceError) -> int:
    payload = {"error": str(exc)}
    if exc.path:
        payload["field"] = exc.path
    sys.stderr.write(json.dumps(payload) + "\n")
    return 2


def cmd_report(args) -> int:
    try:
        instance = load_instance(args.instance)
    except InstanceError as exc:
        return _input_error(exc)
    try:
        envelope = run_report(instance, with_certificates=args.certificates)
    except (PreconditionError, GeometryError) as exc:
        _write_text(envelope_json(precondition_envelope(instance, exc)), args.out)
        return 1
    _write_text(envelope_json(envelope), args.out)
    return 0


def cmd_verify(args) -> int:
    try:
        with open(args.report, "r", encoding="utf-8") as fh:
            envelope = json.load(fh)
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": f"cannot read report: {exc}"}) + "\n")
        return 2
    except json.JSONDecodeError as exc:
        sys.stderr.write(json.dumps({"error": f"invalid JSON: {exc}"}) + "\n")
        return 2
    if not isinstance(envelope, dict):
        sys.stderr.write(json.dumps({"error": "report is not a JSON object"}) + "\n")
        return 2
    problems = verify_envelope(envelope)
    result = {"verified": not problems, "problems": problems}
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return 0 if not problems else 1


def _generate_specs(
    n: int, degrees: List[int], h: int, count: int, seed: int, coeff_bound: int
) -> List[Tuple[str, InstanceFile]]:
    """Deterministic labeled instances, ``count`` per degree value."""
    out = []
    index = 0
    for d in degrees:
        for _ in range(count):
            instance_seed = seed + index
            index += 1
            curve, hyp = random_instance(n, d, h, instance_seed, coeff_bound)
            label = f"instance_n{n}_d{d}_h{h}_s{instance_seed}"
            out.append((label, parse_instance_text(emit_instance(curve, hyp))))
    return out


def cmd_generate(args) -> int:
    try:
        specs = _generate_specs(
            args.n, args.d, args.h, args.count, args.seed, args.coeff_bound
        )
    except GeometryError as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return 1
    os.makedirs(args.out_dir, exist_ok=True)
    written = []
    for label, instance in specs:
        path = os.path.join(args.out_dir, f"{label}.toml")
        _atomic_write(
            path, emit_instance(instance.curve, instance.hypersurface)
        )
        written.append(path)
    sys.stdout.write(json.dumps({"written": written}, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# Batch.


def _batch_task(payload: Dict[str, object], expected, with_certificates: bool):
    """Compute one envelope in a worker process; failures become records."""
    curve, hyp, lines = objects_from_payload(payload)
    instance = InstanceFile(
        schema_version=payload["schema_version"],
        curve=curve,
        hypersurface=hyp,
        lines=lines,
        expected=expected or {},
        payload=payload,
    )
    try:
        return {"envelope": run_report(instance, with_certificates)}
    except (PreconditionError, GeometryError) as exc:
        failure = {"error": str(exc)}
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics is not None:
            failure["diagnostics"] = diagnostics
        return {"failure": failure}


def _batch_entry(args):
    return _batch_task(*args)


def _load_batch_config(path: str):
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise InstanceError(f"cannot read batch config: {exc}", "")
    except tomllib.TOMLDecodeError as exc:
        raise InstanceError(f"invalid TOML: {exc}", "")
    for key in raw:
        if key not in ("instances", "generator", "batch"):
            raise InstanceError(f"unknown key {key!r}", key)
    return raw


def _batch_instances(raw, config_dir: str) -> List[Tuple[str, InstanceFile]]:
    out: List[Tuple[str, InstanceFile]] = []
    entries = raw.get("instances", [])
    if not isinstance(entries, list):
        raise InstanceError("expected an array of tables", "instances")
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "path" not in entry:
            raise InstanceError("instance entry needs a path", f"instances[{i}]")
        path = entry["path"]
        if not isinstance(path, str):
            raise InstanceError("path must be a string", f"instances[{i}].path")
        resolved = path if os.path.isabs(path) else os.path.join(config_dir, path)
        try:
            out.append((path, load_instance(resolved)))
        except InstanceError as exc:
            raise InstanceError(str(exc), f"instances[{i}] -> {exc.path}")
    if "generator" in raw:
        gen = raw["generator"]
        if not isinstance(gen, dict):
            raise InstanceError("expected a table", "generator")
        for key in gen:
            if key not in ("n", "d", "h", "count", "seed", "coeff_bound"):
                raise InstanceError(f"unknown key {key!r}", f"generator.{key}")
        try:
            n = int(gen["n"])
            h = int(gen["h"])
            count = int(gen["count"])
            seed = int(gen["seed"])
            d_raw = gen["d"]
        except (KeyError, TypeError, ValueError):
            raise InstanceError("generator needs integer n, d, h, count, seed", "generator")
        degrees = [int(x) for x in d_raw] if isinstance(d_raw, list) else [int(d_raw)]
        coeff_bound = int(gen.get("coeff_bound", 10))
        out.extend(_generate_specs(n, degrees, h, count, seed, coeff_bound))
    return out


def cmd_batch(args) -> int:
    try:
        raw = _load_batch_config(args.config)
        config_dir = os.path.dirname(os.path.abspath(args.config))
        instances = _batch_instances(raw, config_dir)
    except InstanceError as exc:
        return _input_error(exc)
    except GeometryError as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return 1

    options = raw.get("batch", {})
    if not isinstance(options, dict):
        return _input_error(InstanceError("expected a table", "batch"))
    cache_dir = options.get("cache_dir")
    out_dir = options.get("out_dir")
    with_certificates = bool(options.get("certificates", False))
    jobs = args.jobs if args.jobs is not None else int(options.get("jobs", 1))
    if cache_dir is not None:
        cache_dir = (
            cache_dir
            if os.path.isabs(cache_dir)
            else os.path.join(config_dir, cache_dir)
        )
        os.makedirs(cache_dir, exist_ok=True)
    if out_dir is not None:
        out_dir = (
            out_dir if os.path.isabs(out_dir) else os.path.join(config_dir, out_dir)
        )
        os.makedirs(out_dir, exist_ok=True)

    results: List[Optional[dict]] = [None] * len(instances)
    pending: List[Tuple[int, InstanceFile]] = []
    for idx, (label, instance) in enumerate(instances):
        cached = None
        if cache_dir is not None:
            cache_path = os.path.join(cache_dir, instance.input_hash + ".json")
            if os.path.exists(cache_path):
                with open(cache_path, "r", encoding="utf-8") as fh:
                    cached = {"envelope": json.load(fh), "cached": True}
        if cached is not None:
            results[idx] = cached
        else:
            pending.append((idx, instance))

    tasks = [
        (inst.payload, inst.expected, with_certificates) for _, inst in pending
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            computed = list(pool.map(_batch_entry, tasks))
    else:
        computed = [_batch_entry(t) for t in tasks]
    for (idx, _), result in zip(pending, computed):
        results[idx] = result

    summary = {
        "count": len(instances),
        "computed": 0,
        "from_cache": 0,
        "verdicts": {},
        "k_histogram": {},
        "expected_mismatch_count": 0,
        "failures": [],
    }
    for (label, instance), result in zip(instances, results):
        if "failure" in result:
            summary["failures"].append({"instance": label, **result["failure"]})
            continue
        envelope = result["envelope"]
        if result.get("cached"):
            summary["from_cache"] += 1
        else:
            summary["computed"] += 1
            if cache_dir is not None:
                cache_path = os.path.join(cache_dir, instance.input_hash + ".json")
                _atomic_write(cache_path, envelope_json(envelope))
        if out_dir is not None:
            _atomic_write(
                os.path.join(out_dir, instance.input_hash + ".json"),
                envelope_json(envelope),
            )
        body = envelope["report"]
        verdict = body["obstructed_first_order"]
        summary["verdicts"][verdict] = summary["verdicts"].get(verdict, 0) + 1
        bound = body["bounds"]["quintic_max_twist"]
        if bound is not None:
            key = str(bound["k"])
            summary["k_histogram"][key] = summary["k_histogram"].get(key, 0) + 1
        summary["expected_mismatch_count"] += len(
            envelope.get("expected_mismatches", [])
        )
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvebundles",
        description=(
            "Exact splitting types and first-order deformation obstructions "
            "for rational curves on hypersurfaces."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"curvebundles {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_report = sub.add_parser("report", help="analyze one instance file")
    p_report.add_argument("instance", help="instance TOML file")
    p_report.add_argument("--out", help="write the JSON envelope here instead of stdout")
    p_report.add_argument(
        "--certificates",
        action="store_true",
        help="embed replayable kernel and lifting certificates",
    )
    p_report.set_defaults(func=cmd_report)

    p_batch = sub.add_parser("batch", help="run a batch config with caching")
    p_batch.add_argument("config", help="batch config TOML file")
    p_batch.add_argument("--jobs", type=int, help="worker processes")
    p_batch.set_defaults(func=cmd_batch)

    p_gen = sub.add_parser("generate", help="write deterministic random instances")
    p_gen.add_argument("--n", type=int, required=True, help="ambient dimension")
    p_gen.add_argument(
        "--d", type=int, nargs="+", required=True, help="curve degree(s)"
    )
    p_gen.add_argument("--h", type=int, required=True, help="hypersurface degree")
    p_gen.add_argument(
        "--count", type=int, required=True, help="instances per degree value"
    )
    p_gen.add_argument("--seed", type=int, required=True, help="base seed")
    p_gen.add_argument("--coeff-bound", type=int, default=10)
    p_gen.add_argument("--out-dir", default=".", help="directory for instance files")
    p_gen.set_defaults(func=cmd_generate)

    p_verify = sub.add_parser("verify", help="replay the certificates in a report")
    p_verify.add_argument("report", help="report JSON file")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
