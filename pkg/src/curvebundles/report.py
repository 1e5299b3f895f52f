"""Report envelopes: building, JSON rendering, and certificate replay.

An envelope carries the canonical instance payload, the computed
obstruction report, and (optionally) replayable certificates: kernel
generator matrices for all five kernel computations in the pipeline and
witness/refutation vectors for every lifting question asked.  ``verify``
rebuilds the defining maps from the embedded instance alone and replays
everything, so a report is self-checking without trusting the producer.
"""

import json
import time
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .bundles import (
    KernelResult,
    QuotientResult,
    SheafMap,
    SplitBundle,
    cohomology,
    factor_map,
    graded_solve,
)
from .errors import FactorError, InstanceError, PreconditionError
from .family import (
    LiftResult,
    SurjectivityVerdict,
    family_lifts_surjective,
    full_space_lifts_surjective,
    verify_lift,
)
from .forms import BinaryForm, MultiForm
from .geometry import (
    BundleSuite,
    Hypersurface,
    RationalCurve,
    compute_suite,
    derivative_inclusion,
    euler_inclusion,
    jacobian_row,
    validate_pair,
)
from .instancefile import InstanceFile, objects_from_payload, payload_hash
from .obstruction import ObstructionReport, evaluate_obstruction

ENVELOPE_SCHEMA_VERSION = 1

KERNEL_CERT_NAMES = (
    "tangent_ambient_dual",
    "jacobian_kernel",
    "restricted_tangent_dual",
    "normal_ambient_dual",
    "normal_surface",
)


def _form_json(f: BinaryForm) -> List[str]:
    return [] if f.is_zero else [str(c) for c in f.coeffs]


def _form_from_json(data) -> BinaryForm:
    return BinaryForm.zero() if not data else BinaryForm([Fraction(c) for c in data])


def _multiform_json(f: MultiForm) -> Dict[str, object]:
    return {
        "num_vars": f.num_vars,
        "degree": f.degree,
        "terms": [
            {"exponents": list(e), "coefficient": str(c)}
            for e, c in f.sorted_terms()
        ],
    }


def _multiform_from_json(data) -> MultiForm:
    return MultiForm(
        data["num_vars"],
        data["degree"],
        {
            tuple(t["exponents"]): Fraction(t["coefficient"])
            for t in data["terms"]
        },
    )


def kernel_certificate(kr: KernelResult) -> Dict[str, object]:
    return {
        "splitting": list(kr.splitting.twists),
        "window": list(kr.window),
        "generators": [
            [_form_json(entry) for entry in gen] for gen in kr.generators
        ],
    }


def _kernel_from_certificate(mp: SheafMap, cert) -> KernelResult:
    twists = tuple(int(e) for e in cert["splitting"])
    generators = tuple(
        tuple(_form_from_json(entry) for entry in gen)
        for gen in cert["generators"]
    )
    window = (int(cert["window"][0]), int(cert["window"][1]))
    return KernelResult(
        map=mp,
        splitting=SplitBundle(twists),
        generators=generators,
        window=window,
        profile={},
    )


def lift_certificate(res: LiftResult) -> Dict[str, object]:
    return {
        "label": res.label,
        "direction": _multiform_json(res.direction),
        "pullback": _form_json(res.pullback),
        "liftable": res.liftable,
        "witness": None
        if res.witness is None
        else [_form_json(w) for w in res.witness],
        "refutation": None
        if res.refutation is None
        else [str(y) for y in res.refutation],
    }


def _lift_from_certificate(cert) -> LiftResult:
    witness = cert["witness"]
    refutation = cert["refutation"]
    return LiftResult(
        label=cert["label"],
        direction=_multiform_from_json(cert["direction"]),
        pullback=_form_from_json(cert["pullback"]),
        liftable=bool(cert["liftable"]),
        witness=None
        if witness is None
        else tuple(_form_from_json(w) for w in witness),
        refutation=None
        if refutation is None
        else tuple(Fraction(y) for y in refutation),
    )


def suite_certificates(suite: BundleSuite) -> Dict[str, object]:
    return {
        "tangent_ambient_dual": kernel_certificate(suite.tangent_ambient.dual_kernel),
        "jacobian_kernel": kernel_certificate(suite.restricted.jacobian_kernel),
        "restricted_tangent_dual": kernel_certificate(
            suite.restricted.quotient.dual_kernel
        ),
        "normal_ambient_dual": kernel_certificate(suite.normal_ambient.dual_kernel),
        "normal_surface": kernel_certificate(suite.normal_surface),
    }


def surjectivity_json(verdict: SurjectivityVerdict) -> Dict[str, object]:
    return {
        "surjective": verdict.surjective,
        "lifted_count": verdict.lifted_count,
        "failing_directions": list(verdict.failing_directions),
    }


def report_json(report: ObstructionReport) -> Dict[str, object]:
    bounds = report.bounds
    return {
        "profile": {
            "n": report.profile.n,
            "h": report.profile.h,
            "d": report.profile.d,
            "g": report.profile.g,
        },
        "splittings": {k: list(v) for k, v in report.splittings.items()},
        "h1_normal_twisted": report.h1_normal_twisted,
        "sigma": report.sigma,
        "lines_disjoint_on_curve": report.lines_disjoint_on_curve,
        "section_count_inequality": report.section_count_inequality,
        "jacobian_image_dim": report.jacobian_image_dim,
        "bounds": {
            "quintic_max_twist": None
            if bounds.quintic_max_twist is None
            else {"k": bounds.quintic_max_twist.k, "holds": bounds.quintic_max_twist.holds},
            "hypersurface_degree": bounds.hypersurface_degree,
            "genus_degree": list(bounds.genus_degree),
        },
        "riemann_roch_ok": report.riemann_roch_ok,
        "obstructed_first_order": report.obstructed_first_order,
    }


def _expected_actual(key: str, body: Dict[str, object]):
    if key in body["splittings"]:
        return body["splittings"][key]
    if key == "k":
        bound = body["bounds"]["quintic_max_twist"]
        return None if bound is None else bound["k"]
    return body.get(key)


def expected_mismatches(
    expected: Dict[str, object], body: Dict[str, object]
) -> List[Dict[str, object]]:
    out = []
    for key in sorted(expected):
        actual = _expected_actual(key, body)
        if actual != expected[key]:
            out.append({"key": key, "expected": expected[key], "actual": actual})
    return out


def run_report(
    instance: InstanceFile,
    with_certificates: bool = False,
    suite: Optional[BundleSuite] = None,
) -> Dict[str, object]:
    """Compute everything for one instance and wrap it in an envelope.

    A caller that already holds the instance's BundleSuite may pass it to
    skip recomputation; it must come from this exact curve and
    hypersurface.  Raises PreconditionError (diagnostics attached) or
    GeometryError for semantically bad pairs; those map to exit code 1 at
    the CLI.
    """
    start = time.perf_counter()
    if suite is None:
        suite = compute_suite(instance.curve, instance.hypersurface)
    report = evaluate_obstruction(suite, instance.lines)
    family_verdict = None
    if instance.lines is not None:
        family_verdict = family_lifts_surjective(
            instance.curve, instance.hypersurface, instance.lines
        )
    full_verdict = full_space_lifts_surjective(instance.curve, instance.hypersurface)

    body = report_json(report)
    body["family_lifts"] = (
        None if family_verdict is None else surjectivity_json(family_verdict)
    )
    body["full_space_lifts"] = surjectivity_json(full_verdict)

    envelope: Dict[str, object] = {
        "schema_version": ENVELOPE_SCHEMA_VERSION,
        "toolkit_version": __version__,
        "input_hash": instance.input_hash,
        "instance": instance.payload,
        "diagnostics": suite.diagnostics.as_dict(),
        "report": body,
        "expected_mismatches": expected_mismatches(instance.expected, body),
    }
    if with_certificates:
        envelope["certificates"] = {
            "kernels": suite_certificates(suite),
            "lifts": {
                "family": None
                if family_verdict is None
                else [lift_certificate(r) for r in family_verdict.results],
                "full_space_failures": [
                    lift_certificate(r) for r in full_verdict.results
                ],
            },
        }
    envelope["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    return envelope


def envelope_json(envelope: Dict[str, object]) -> str:
    return json.dumps(envelope, sort_keys=True, indent=2) + "\n"


def precondition_envelope(instance: InstanceFile, exc: Exception) -> Dict[str, object]:
    """Failure payload for a well-formed instance that cannot be computed."""
    envelope: Dict[str, object] = {
        "schema_version": ENVELOPE_SCHEMA_VERSION,
        "toolkit_version": __version__,
        "input_hash": instance.input_hash,
        "instance": instance.payload,
        "error": str(exc),
    }
    diagnostics = getattr(exc, "diagnostics", None)
    if diagnostics is not None:
        envelope["diagnostics"] = diagnostics
    return envelope


# ---------------------------------------------------------------------------
# Replay.


def _replay_kernels(
    curve: RationalCurve,
    hyp: Hypersurface,
    kernels: Dict[str, object],
    body: Dict[str, object],
    problems: List[str],
):
    for name in KERNEL_CERT_NAMES:
        if name not in kernels:
            problems.append(f"certificates.kernels.{name}: missing")
            return

    def check(name: str, mp: SheafMap) -> Optional[KernelResult]:
        try:
            kr = _kernel_from_certificate(mp, kernels[name])
        except (KeyError, TypeError, ValueError, IndexError):
            problems.append(f"certificates.kernels.{name}: malformed")
            return None
        if not kr.verify():
            problems.append(f"certificates.kernels.{name}: replay failed")
            return None
        return kr

    def check_splitting(name: str, twists: Sequence[int], report_key: str):
        if list(twists) != body["splittings"][report_key]:
            problems.append(
                f"certificates.kernels.{name}: splitting disagrees with report.{report_key}"
            )

    ta = check("tangent_ambient_dual", euler_inclusion(curve).transpose_dual())
    if ta is not None:
        check_splitting(
            "tangent_ambient_dual", ta.splitting.dual().twists, "pullback_tangent_pn"
        )

    jac = jacobian_row(curve, hyp)
    jk = check("jacobian_kernel", jac)
    if jk is not None:
        euler = graded_solve(jk.inclusion(), list(curve.coords), twist=0)
        if euler is None:
            problems.append(
                "certificates.kernels.jacobian_kernel: Euler section not in certified kernel"
            )
        else:
            u = SheafMap.from_columns((0,), jk.splitting.twists, [list(euler)])
            rt = check("restricted_tangent_dual", u.transpose_dual())
            if rt is not None:
                check_splitting(
                    "restricted_tangent_dual",
                    rt.splitting.dual().twists,
                    "restricted_tangent",
                )

    deriv = derivative_inclusion(curve)
    na = check("normal_ambient_dual", deriv.transpose_dual())
    if na is not None:
        check_splitting(
            "normal_ambient_dual", na.splitting.dual().twists, "normal_pn"
        )
        locfree = na.splitting.dual()
        torsion = (sum(deriv.target) - sum(deriv.source)) - locfree.first_chern
        proj = QuotientResult(deriv, locfree, torsion, na).projection()
        try:
            factored = factor_map(jac, proj)
        except FactorError as exc:
            problems.append(f"certificates.kernels.normal_surface: {exc}")
            return
        ns = check("normal_surface", factored)
        if ns is not None:
            check_splitting("normal_surface", ns.splitting.twists, "normal_hyp")


def _replay_lifts(
    curve: RationalCurve,
    hyp: Hypersurface,
    lifts: Dict[str, object],
    body: Dict[str, object],
    problems: List[str],
):
    def replay(kind: str, certs, verdict_key: str):
        if certs is None:
            return
        failing = []
        for idx, cert in enumerate(certs):
            path = f"certificates.lifts.{kind}[{idx}]"
            try:
                result = _lift_from_certificate(cert)
            except (KeyError, TypeError, ValueError, IndexError):
                problems.append(f"{path}: malformed")
                continue
            if not verify_lift(curve, hyp, result):
                problems.append(f"{path}: replay failed")
            if not result.liftable:
                failing.append(result.label)
        verdict = body.get(verdict_key)
        if verdict is not None and sorted(failing) != sorted(
            verdict["failing_directions"]
        ):
            problems.append(
                f"certificates.lifts.{kind}: failing directions disagree with report"
            )

    replay("family", lifts.get("family"), "family_lifts")
    replay("full_space_failures", lifts.get("full_space_failures"), "full_space_lifts")


def verify_envelope(envelope: Dict[str, object]) -> List[str]:
    """Replay every certificate against the re-parsed embedded instance.

    Returns a list of human-readable problems; empty means the envelope
    is internally consistent and all certificates check out.
    """
    problems: List[str] = []
    for field in ("instance", "input_hash", "report"):
        if field not in envelope:
            return [f"{field}: missing"]
    payload = envelope["instance"]
    if payload_hash(payload) != envelope["input_hash"]:
        problems.append("input_hash: does not match the embedded instance")
    try:
        curve, hyp, _ = objects_from_payload(payload)
    except (InstanceError, KeyError, TypeError, ValueError) as exc:
        return problems + [f"instance: cannot rebuild ({exc})"]
    except Exception as exc:
        return problems + [f"instance: geometric defect ({exc})"]

    if envelope.get("diagnostics") != validate_pair(curve, hyp).as_dict():
        problems.append("diagnostics: do not match the re-parsed instance")

    body = envelope["report"]
    splittings = body.get("splittings", {})
    normal = splittings.get("normal_hyp")
    d = body.get("profile", {}).get("d")
    if normal is not None and d is not None:
        h1 = cohomology(SplitBundle(normal), d).h1
        if body.get("h1_normal_twisted") != h1:
            problems.append("report.h1_normal_twisted: disagrees with normal_hyp splitting")
        if body.get("sigma") != h1:
            problems.append("report.sigma: disagrees with normal_hyp splitting")

    certificates = envelope.get("certificates")
    if certificates is None:
        problems.append("certificates: missing (report was generated without them)")
        return problems
    _replay_kernels(curve, hyp, certificates.get("kernels", {}), body, problems)
    _replay_lifts(curve, hyp, certificates.get("lifts", {}), body, problems)
    return problems
