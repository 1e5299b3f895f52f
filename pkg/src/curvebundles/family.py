"""Deformation families of hypersurfaces and first-order lifting of directions.

A family is the base hypersurface perturbed by the h+1 products of all
but one of a chosen set of linear forms.  A deformation direction lifts
to first order along the curve exactly when its pullback lies in the
image of the Jacobian pairing on sections; witnesses and refutations are
exact and replayable.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .bundles import forms_to_vector, graded_matrix, vector_to_forms
from .errors import GeometryError
from .forms import BinaryForm, MultiForm, monomial_exponents, pullback_form
from .geometry import Hypersurface, RationalCurve, jacobian_row
from .linalg import EchelonBasis, solve_or_refute
from .obstruction import check_lines


@dataclass(frozen=True)
class UniversalFamily:
    """Base hypersurface plus the perturbation products of the chosen lines.

    ``products[i]`` is the product of every line except the i-th; the
    family member at parameters a is base + sum of a_i * products[i].
    """

    base: Hypersurface
    lines: Tuple[MultiForm, ...]
    products: Tuple[MultiForm, ...]

    def member(self, values: Sequence) -> MultiForm:
        if len(values) != len(self.products):
            raise GeometryError(
                f"expected {len(self.products)} parameters, got {len(values)}"
            )
        total = self.base.form
        for a, p in zip(values, self.products):
            total = total + p.scale(a)
        return total


def build_family(base: Hypersurface, lines: Sequence[MultiForm]) -> UniversalFamily:
    """Validate the lines and precompute the h+1 perturbation products."""
    check_lines(base.h, base.n + 1, lines)
    lines = tuple(lines)
    products = []
    for i in range(len(lines)):
        prod = MultiForm(base.n + 1, 0, {(0,) * (base.n + 1): 1})
        for j, line in enumerate(lines):
            if j != i:
                prod = prod * line
        products.append(prod)
    return UniversalFamily(base=base, lines=lines, products=tuple(products))


def check_tangent_sections(family: UniversalFamily) -> bool:
    """Symbolic identity making the section fields tangent to the family.

    For each i, the 0-th line times the 0-th product must equal the i-th
    line times the i-th product (both are the product of all lines).
    Checked on the stored products so corrupted families are caught.
    """
    reference = family.lines[0] * family.products[0]
    for i in range(1, len(family.lines)):
        if not (reference - family.lines[i] * family.products[i]).is_zero:
            return False
    return True


@dataclass(frozen=True)
class LiftResult:
    """First-order liftability of one deformation direction.

    Exactly one of witness/refutation is set: the witness is a section
    column solving the lifting equation, the refutation is a left-null
    functional of the graded Jacobian matrix that does not kill the
    direction's pullback vector.
    """

    label: str
    direction: MultiForm
    pullback: BinaryForm
    liftable: bool
    witness: Optional[Tuple[BinaryForm, ...]]
    refutation: Optional[Tuple[Fraction, ...]]


@dataclass(frozen=True)
class SurjectivityVerdict:
    """Aggregate lifting verdict over a set of directions."""

    surjective: bool
    failing_directions: Tuple[str, ...]
    lifted_count: int
    results: Tuple[LiftResult, ...]


def _check_direction(hyp: Hypersurface, direction: MultiForm):
    if direction.num_vars != hyp.n + 1:
        raise GeometryError(
            f"direction has {direction.num_vars} variables, ambient needs {hyp.n + 1}"
        )
    if direction.degree != hyp.h:
        raise GeometryError(
            f"direction degree {direction.degree} does not match hypersurface degree {hyp.h}"
        )


def lift_direction(
    curve: RationalCurve,
    hyp: Hypersurface,
    direction: MultiForm,
    label: str = "direction",
) -> LiftResult:
    """Decide the lifting equation for one degree-h direction.

    The direction lifts exactly when some coordinate column v of
    degree-d forms satisfies (pulled-back Jacobian) . v = -(direction
    pulled back).  Witnesses are re-verified symbolically before being
    returned; refutations certify infeasibility and never coexist with
    a witness.
    """
    _check_direction(hyp, direction)
    if not pullback_form(hyp.form, curve.coords).is_zero:
        raise GeometryError("hypersurface does not contain the curve")
    jac = jacobian_row(curve, hyp)
    pulled = pullback_form(direction, curve.coords)
    matrix = graded_matrix(jac, 0)
    rhs = forms_to_vector((-1 * pulled,), jac.target, 0)
    x, y = solve_or_refute(matrix, rhs)
    if x is not None:
        witness = vector_to_forms(x, jac.source, 0)
        total = -1 * pulled
        for entry, w in zip(jac.entries[0], witness):
            total = total - entry * w
        assert total.is_zero
        return LiftResult(
            label=label,
            direction=direction,
            pullback=pulled,
            liftable=True,
            witness=witness,
            refutation=None,
        )
    assert y is not None
    return LiftResult(
        label=label,
        direction=direction,
        pullback=pulled,
        liftable=False,
        witness=None,
        refutation=tuple(y),
    )


def verify_lift(curve: RationalCurve, hyp: Hypersurface, result: LiftResult) -> bool:
    """Replay one lift certificate against freshly built data."""
    try:
        _check_direction(hyp, result.direction)
    except GeometryError:
        return False
    jac = jacobian_row(curve, hyp)
    pulled = pullback_form(result.direction, curve.coords)
    if pulled != result.pullback:
        return False
    if result.liftable:
        if result.witness is None or len(result.witness) != len(jac.source):
            return False
        total = pulled
        for entry, w in zip(jac.entries[0], result.witness):
            total = total + entry * w
        return total.is_zero
    if result.refutation is None:
        return False
    matrix = graded_matrix(jac, 0)
    if len(result.refutation) != len(matrix):
        return False
    y = list(result.refutation)
    cols = len(matrix[0]) if matrix else 0
    if any(sum(y[r] * matrix[r][c] for r in range(len(matrix))) != 0 for c in range(cols)):
        return False
    rhs = forms_to_vector((-1 * pulled,), jac.target, 0)
    return sum(a * b for a, b in zip(y, rhs)) != 0


def family_lifts_surjective(
    curve: RationalCurve, hyp: Hypersurface, lines: Sequence[MultiForm]
) -> SurjectivityVerdict:
    """Lift every perturbation direction of the family built from the lines."""
    family = build_family(hyp, lines)
    results = [
        lift_direction(curve, hyp, product, label=f"family_{i}")
        for i, product in enumerate(family.products)
    ]
    failing = tuple(r.label for r in results if not r.liftable)
    return SurjectivityVerdict(
        surjective=not failing,
        failing_directions=failing,
        lifted_count=sum(r.liftable for r in results),
        results=tuple(results),
    )


def monomial_label(exps: Sequence[int]) -> str:
    parts = [
        f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e
    ]
    return "*".join(parts) or "1"


def full_space_lifts_surjective(
    curve: RationalCurve, hyp: Hypersurface
) -> SurjectivityVerdict:
    """Lift every degree-h monomial direction, in lexicographic order.

    Membership for all monomials is decided against one cached echelon
    form of the graded Jacobian's column space; only failing directions
    get individual refutation certificates in ``results``.
    """
    if not pullback_form(hyp.form, curve.coords).is_zero:
        raise GeometryError("hypersurface does not contain the curve")
    jac = jacobian_row(curve, hyp)
    matrix = graded_matrix(jac, 0)
    rows = len(matrix)
    span = EchelonBasis(rows)
    for c in range(len(matrix[0]) if matrix else 0):
        span.add([matrix[r][c] for r in range(rows)])
    lifted = 0
    failing: List[str] = []
    failures: List[LiftResult] = []
    for exps in monomial_exponents(hyp.n + 1, hyp.h):
        direction = MultiForm.monomial(exps)
        pulled = pullback_form(direction, curve.coords)
        rhs = forms_to_vector((-1 * pulled,), jac.target, 0)
        if span.contains(rhs):
            lifted += 1
            continue
        label = monomial_label(exps)
        failing.append(label)
        x, y = solve_or_refute(matrix, rhs)
        assert x is None and y is not None
        failures.append(
            LiftResult(
                label=label,
                direction=direction,
                pullback=pulled,
                liftable=False,
                witness=None,
                refutation=tuple(y),
            )
        )
    return SurjectivityVerdict(
        surjective=not failing,
        failing_directions=tuple(failing),
        lifted_count=lifted,
        results=tuple(failures),
    )
