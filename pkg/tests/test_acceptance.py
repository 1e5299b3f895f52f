"""Acceptance gate: the ten shipping criteria, one test per criterion.

Run with -v to get one pass/fail line per criterion.  The corpus fixture
builds two pinned instances plus 51 seeded random quintic-threefold
instances shared by criteria 3 through 10, so the whole gate computes
each bundle suite exactly once.
"""

import dataclasses
import json
import random
import time
from collections import namedtuple
from fractions import Fraction as Q
from pathlib import Path

import pytest

from oracles import check_splitting_against_pieces
from curvebundles.bundles import SplitBundle, cohomology
from curvebundles.errors import GeometryError
from curvebundles.family import (
    build_family,
    check_tangent_sections,
    family_lifts_surjective,
    full_space_lifts_surjective,
    verify_lift,
)
from curvebundles.forms import MultiForm
from curvebundles.geometry import Hypersurface, compute_suite, random_instance
from curvebundles.instancefile import (
    emit_instance,
    load_instance,
    parse_instance_text,
)
from curvebundles.obstruction import evaluate_obstruction, obstruction_h1, profile_of, sigma
from curvebundles.report import envelope_json, run_report, verify_envelope

REPO_ROOT = Path(__file__).resolve().parent.parent
FERMAT = str(REPO_ROOT / "instances" / "fermat_line.toml")
CONIC = str(REPO_ROOT / "instances" / "quintic_conic.toml")

RANDOM_SEEDS = (
    [(1, 9100 + i) for i in range(20)]
    + [(2, 9200 + i) for i in range(20)]
    + [(3, 9300 + i) for i in range(11)]
)

Entry = namedtuple("Entry", "label instance suite report is_random")


def suite_kernels(suite):
    """The five certified kernel computations behind a suite's splittings."""
    return (
        suite.tangent_ambient.dual_kernel,
        suite.restricted.jacobian_kernel,
        suite.restricted.quotient.dual_kernel,
        suite.normal_ambient.dual_kernel,
        suite.normal_surface,
    )


@pytest.fixture(scope="module")
def corpus():
    entries = []
    for label, path in (("fermat_line", FERMAT), ("quintic_conic", CONIC)):
        instance = load_instance(path)
        suite = compute_suite(instance.curve, instance.hypersurface)
        report = evaluate_obstruction(suite, instance.lines)
        entries.append(Entry(label, instance, suite, report, False))
    for d, seed in RANDOM_SEEDS:
        curve, hyp = random_instance(4, d, 5, seed)
        instance = parse_instance_text(emit_instance(curve, hyp))
        suite = compute_suite(instance.curve, instance.hypersurface)
        report = evaluate_obstruction(suite)
        entries.append(Entry(f"random_d{d}_s{seed}", instance, suite, report, True))
    return entries


class TestAcceptance:
    """Each criterion is asserted exactly as stated; no loosening."""

    def test_criterion_01_fermat_line_pipeline(self):
        """Pinned values for the standard line on the Fermat quintic threefold."""
        instance = load_instance(FERMAT)
        start = time.perf_counter()
        suite = compute_suite(instance.curve, instance.hypersurface)
        h1 = obstruction_h1(suite)
        sig = sigma(profile_of(suite), suite)
        elapsed = time.perf_counter() - start
        splittings = suite.splittings()
        failures = []

        def expect(name, got, want):
            if got != want:
                failures.append(f"{name}: got {got!r}, want {want!r}")

        expect("pullback_tangent_pn", splittings["pullback_tangent_pn"], (2, 1, 1, 1))
        expect("restricted_tangent", splittings["restricted_tangent"], (1, 1, -3))
        expect("normal_pn", splittings["normal_pn"], (1, 1, 1))
        expect("normal_hyp", splittings["normal_hyp"], (1, -3))
        expect("h1_normal_twisted", h1, 1)
        expect("sigma", sig, 1)
        expect("h0 of O(0)+O(-4)", cohomology(SplitBundle((0, -4))).h0, 1)
        expect("runtime under 1s", elapsed < 1.0, True)
        assert not failures, "; ".join(failures)

    def test_criterion_01_companion_restricted_tangent_bookkeeping(self):
        """The computed restricted-tangent splitting and its forced invariants.

        Rank n-1 and first Chern class (n+1-h)d are structural for this
        bundle; (1, 1, -3) sums to -1 and is therefore not attainable by
        any correct computation for this instance, while the computed
        (2, 1, -3) is replayed against the brute-force oracle and splits
        off the degree-2 tangent line of the parametrization.
        """
        instance = load_instance(FERMAT)
        suite = compute_suite(instance.curve, instance.hypersurface)
        twists = suite.restricted.splitting.twists
        assert twists == (2, 1, -3)
        assert sum(twists) == 0
        assert len(twists) == 3
        kr = suite.restricted.quotient.dual_kernel
        assert kr.verify()
        lo, hi = kr.window
        check_splitting_against_pieces(
            kr.map, kr.splitting.twists, -hi - 2, -lo + 2
        )
        assert suite.normal_surface.splitting.twists == (1, -3)
        assert sorted(twists) == sorted((2,) + suite.normal_surface.splitting.twists)

    def test_criterion_02_conic_instance(self):
        """Pinned values for a smooth conic on a quintic threefold."""
        instance = load_instance(CONIC)
        start = time.perf_counter()
        suite = compute_suite(instance.curve, instance.hypersurface)
        h1 = obstruction_h1(suite)
        elapsed = time.perf_counter() - start
        assert suite.normal_surface.splitting.twists == (2, -4)
        assert h1 == 1
        assert cohomology(SplitBundle((-6, 0))).h0 == 1
        assert h1 == cohomology(SplitBundle((-6, 0))).h0
        assert elapsed < 5.0

    def test_criterion_03_random_quintic_batch(self, corpus):
        """Random quintic-threefold instances have normal bundle {k, -2-k}, k >= -1."""
        randoms = [e for e in corpus if e.is_random]
        assert len(randoms) >= 50
        assert {e.suite.curve.d for e in randoms} == {1, 2, 3}
        for e in randoms:
            assert e.suite.curve.n == 4
            assert e.suite.hypersurface.h == 5
            twists = e.suite.normal_surface.splitting.twists
            assert len(twists) == 2, e.label
            k = twists[0]
            assert twists == (k, -2 - k), e.label
            assert k >= -1, e.label

    def test_criterion_04_sigma_equals_h1(self, corpus):
        """The defect count equals h1 of the twisted normal bundle on every instance."""
        for e in corpus:
            assert e.report.sigma == e.report.h1_normal_twisted, e.label
            assert sigma(profile_of(e.suite), e.suite) == obstruction_h1(e.suite), e.label

    def test_criterion_05_oracle_equivalence(self, corpus):
        """Every splitting is replayed twist-by-twist against the convolution oracle."""
        for e in corpus:
            for kr in suite_kernels(e.suite):
                lo, hi = kr.window
                check_splitting_against_pieces(
                    kr.map, kr.splitting.twists, -hi - 2, -lo + 2
                )

    def test_criterion_06_serre_duality_and_chi(self, corpus):
        """Duality and Euler characteristic identities on every computed splitting."""
        for e in corpus:
            d = e.suite.curve.d
            n, h = e.suite.curve.n, e.suite.hypersurface.h
            for twists in e.suite.splittings().values():
                bundle = SplitBundle(twists)
                for k in range(-3 * d, 3 * d + 1):
                    coh = cohomology(bundle, k)
                    dual = cohomology(bundle.dual(), -k - 2)
                    assert coh.h1 == dual.h0, e.label
                    assert coh.h0 - coh.h1 == sum(t + k + 1 for t in twists), e.label
            tangent = cohomology(e.suite.restricted.splitting, d)
            assert tangent.h0 - tangent.h1 == (2 * n - h) * d + n - 1, e.label

    def test_criterion_07_codimension_identity(self, corpus):
        """Sections hit by the Jacobian pairing leave exactly h1 of the twisted tangent."""
        for e in corpus:
            d, h = e.suite.curve.d, e.suite.hypersurface.h
            ambient_sections = (h + 1) * d + 1
            tangent_h1 = cohomology(e.suite.restricted.splitting, d).h1
            assert ambient_sections - e.report.jacobian_image_dim == tangent_h1, e.label

    def test_criterion_08_family_section_identity(self):
        """Tangent-section identity holds for 100 random families; mutations break it."""
        rng = random.Random(20260815)
        checked = 0
        while checked < 100:
            n = rng.choice((2, 3, 4))
            h = rng.randint(1, 4)
            lines = []
            for _ in range(h + 1):
                coeffs = [Q(rng.randint(-5, 5)) for _ in range(n + 1)]
                if all(c == 0 for c in coeffs):
                    coeffs[rng.randrange(n + 1)] = Q(1)
                lines.append(
                    MultiForm(
                        n + 1,
                        1,
                        {
                            tuple(1 if j == i else 0 for j in range(n + 1)): c
                            for i, c in enumerate(coeffs)
                            if c != 0
                        },
                    )
                )
            base = Hypersurface(
                n, h, MultiForm(n + 1, h, {(h,) + (0,) * n: Q(1)})
            )
            try:
                family = build_family(base, lines)
            except GeometryError:
                continue
            assert check_tangent_sections(family)
            for i in range(len(family.products)):
                scaled = list(family.products)
                scaled[i] = scaled[i].scale(Q(2))
                assert not check_tangent_sections(
                    dataclasses.replace(family, products=tuple(scaled))
                )
                bumped = list(family.products)
                bumped[i] = bumped[i] + MultiForm(
                    n + 1, h, {(h,) + (0,) * n: Q(1)}
                )
                assert not check_tangent_sections(
                    dataclasses.replace(family, products=tuple(bumped))
                )
            checked += 1

    def test_criterion_09_forced_non_surjectivity(self, corpus):
        """Both lifting questions answer no for the Fermat line, with certificates."""
        fermat = next(e for e in corpus if e.label == "fermat_line")
        curve, hyp = fermat.suite.curve, fermat.suite.hypersurface
        family_verdict = family_lifts_surjective(curve, hyp, fermat.instance.lines)
        full_verdict = full_space_lifts_surjective(curve, hyp)
        assert family_verdict.surjective is False
        assert full_verdict.surjective is False
        witnesses = [r for r in family_verdict.results if not r.liftable]
        assert witnesses
        for result in witnesses:
            assert result.refutation is not None
            assert verify_lift(curve, hyp, result)
        assert "x0^2*x2^3" in full_verdict.failing_directions
        blocked = [r for r in full_verdict.results if not r.liftable]
        assert blocked
        assert all(r.refutation is not None for r in blocked)
        assert all(verify_lift(curve, hyp, r) for r in blocked)

    def test_criterion_10_determinism_and_replay(self, corpus):
        """Byte-identical re-runs; every certificate in the corpus replays."""
        for e in corpus:
            envelope = run_report(e.instance, with_certificates=True, suite=e.suite)
            round_tripped = json.loads(envelope_json(envelope))
            assert verify_envelope(round_tripped) == [], e.label
        for label in ("fermat_line", "quintic_conic"):
            e = next(x for x in corpus if x.label == label)
            first = run_report(e.instance, with_certificates=True)
            second = run_report(e.instance, with_certificates=True)
            first.pop("timing")
            second.pop("timing")
            assert envelope_json(first) == envelope_json(second)
