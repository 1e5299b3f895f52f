"""Parametrized rational curves on hypersurfaces and their bundle presentations.

The central pipeline takes a degree-d map P^1 -> P^n landing inside a
degree-h hypersurface and produces exact splitting types for the pulled
back ambient tangent bundle, the restricted tangent bundle of the
hypersurface, and the normal bundles in the ambient space and in the
hypersurface, each with a replayable kernel presentation.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Dict, List, Optional, Sequence, Tuple

from .bundles import (
    KernelResult,
    QuotientResult,
    SheafMap,
    SplitBundle,
    factor_map,
    graded_solve,
    kernel_splitting,
    quotient_splitting,
)
from .errors import GeometryError, PreconditionError
from .forms import (
    BinaryForm,
    MultiForm,
    bf_gcd,
    bf_gcd_many,
    monomial_exponents,
    partials,
    pullback_form,
)
from .linalg import nullspace, solve


@dataclass(frozen=True)
class RationalCurve:
    """A degree-d parametrized rational curve in P^n, coordinates coprime.

    ``coords`` holds n+1 binary forms, each zero or of degree exactly d.
    The constructor rejects parametrizations whose coordinates share a
    zero on P^1, so the data always defines a morphism.
    """

    n: int
    d: int
    coords: Tuple[BinaryForm, ...]

    def __init__(self, n: int, d: int, coords: Sequence[BinaryForm]):
        if n < 2:
            raise GeometryError(f"ambient dimension {n} below 2")
        if d < 1:
            raise GeometryError(f"curve degree {d} below 1")
        coords = tuple(coords)
        if len(coords) != n + 1:
            raise GeometryError(
                f"expected {n + 1} coordinate forms, got {len(coords)}"
            )
        nonzero = [c for c in coords if not c.is_zero]
        if not nonzero:
            raise GeometryError("all coordinate forms vanish")
        if any(c.degree != d for c in nonzero):
            raise GeometryError(f"coordinate degrees must all equal {d}")
        if bf_gcd_many(nonzero).degree != 0:
            raise GeometryError("coordinate forms share a common zero")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "coords", coords)

    def derivative_columns(self) -> Tuple[Tuple[BinaryForm, ...], Tuple[BinaryForm, ...]]:
        ds = tuple(c.derivative_s() for c in self.coords)
        dt = tuple(c.derivative_t() for c in self.coords)
        return ds, dt


@dataclass(frozen=True)
class Hypersurface:
    """A hypersurface of degree h in P^n, given by one nonzero form."""

    n: int
    h: int
    form: MultiForm

    def __init__(self, n: int, h: int, form: MultiForm):
        if n < 2:
            raise GeometryError(f"ambient dimension {n} below 2")
        if h < 1:
            raise GeometryError(f"hypersurface degree {h} below 1")
        if form.num_vars != n + 1:
            raise GeometryError(
                f"form has {form.num_vars} variables, ambient needs {n + 1}"
            )
        if form.degree != h:
            raise GeometryError(f"form degree {form.degree} is not {h}")
        if form.is_zero:
            raise GeometryError("hypersurface form is zero")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "form", form)


@dataclass(frozen=True)
class PairDiagnostics:
    """Geometric preconditions for the bundle pipeline.

    The first three must hold before any bundle computation.  The
    injectivity flag is one-sided: True certifies the parametrization is
    injective, False only means no certificate was found.
    """

    contains_curve: bool
    immersion: bool
    smooth_along_curve: bool
    injectivity_certified: bool

    @property
    def pipeline_ready(self) -> bool:
        return self.contains_curve and self.immersion and self.smooth_along_curve

    def as_dict(self) -> Dict[str, bool]:
        return {
            "contains_curve": self.contains_curve,
            "immersion": self.immersion,
            "smooth_along_curve": self.smooth_along_curve,
            "injectivity_certified": self.injectivity_certified,
        }


def _no_common_zero(forms: Sequence[BinaryForm]) -> bool:
    nonzero = [f for f in forms if not f.is_zero]
    if not nonzero:
        return False
    return bf_gcd_many(nonzero).degree == 0


def curve_is_immersion(curve: RationalCurve) -> bool:
    """True when the derivative matrix has rank 2 at every point of P^1."""
    ds, dt = curve.derivative_columns()
    minors = []
    for i in range(len(ds)):
        for j in range(i + 1, len(ds)):
            minors.append(ds[i] * dt[j] - ds[j] * dt[i])
    return _no_common_zero(minors)


def smooth_along_curve(curve: RationalCurve, hyp: Hypersurface) -> bool:
    """True when no point of the curve is a singular point of the hypersurface."""
    pulled = [pullback_form(p, curve.coords) for p in partials(hyp.form)]
    return _no_common_zero(pulled)


def validate_pair(curve: RationalCurve, hyp: Hypersurface) -> PairDiagnostics:
    """All geometric diagnostics for a curve/hypersurface pair.

    Returns flags rather than raising; only a dimension mismatch is an
    error, since then the pair is not even a well-posed question.
    """
    if curve.n != hyp.n:
        raise GeometryError(
            f"curve lives in P^{curve.n}, hypersurface in P^{hyp.n}"
        )
    contains = pullback_form(hyp.form, curve.coords).is_zero
    return PairDiagnostics(
        contains_curve=contains,
        immersion=curve_is_immersion(curve),
        smooth_along_curve=smooth_along_curve(curve, hyp),
        injectivity_certified=certify_injectivity(curve),
    )


# ---------------------------------------------------------------------------
# Injectivity certification.
#
# Two distinct points map to the same image exactly when every 2x2 minor
# c_i(p) c_j(q) - c_j(p) c_i(q) vanishes.  Each such minor is divisible by
# the diagonal form s1*t2 - t1*s2; the quotients are bihomogeneous of
# bidegree (d-1, d-1), and the parametrization is injective when the
# quotients have no common zero on P^1 x P^1.  We certify that by showing
# the pairwise resultants (eliminating the second point) have constant gcd.


def _coeff_matrix(f: BinaryForm, g: BinaryForm, d: int) -> List[List[Q]]:
    return [
        [f.coeff(u) * g.coeff(v) - g.coeff(u) * f.coeff(v) for v in range(d + 1)]
        for u in range(d + 1)
    ]


def _divide_by_diagonal(m: List[List[Q]], d: int) -> List[List[Q]]:
    """Quotient of a bidegree-(d,d) form by s1*t2 - t1*s2, with replay check.

    Indexing is by t-powers in each factor; multiplying the quotient back
    must reproduce the input exactly, which traps indivisible inputs.
    """
    b = [[Q(0)] * d for _ in range(d)]
    for u in range(d):
        for v in range(d):
            acc = m[u][v + 1]
            if u > 0 and v + 1 < d:
                acc += b[u - 1][v + 1]
            b[u][v] = acc
    for u in range(d + 1):
        for v in range(d + 1):
            prod = Q(0)
            if 0 <= u < d and 0 <= v - 1 < d:
                prod += b[u][v - 1]
            if 0 <= u - 1 < d and 0 <= v < d:
                prod -= b[u - 1][v]
            if prod != m[u][v]:
                raise GeometryError("minor not divisible by the diagonal")
    return b


def _colinearity_quotients(curve: RationalCurve) -> List[List[List[Q]]]:
    quotients = []
    cs = curve.coords
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            m = _coeff_matrix(cs[i], cs[j], curve.d)
            if all(x == 0 for row in m for x in row):
                continue
            quotients.append(_divide_by_diagonal(m, curve.d))
    return quotients


def _det(rows: List[List[Q]]) -> Q:
    m = [row[:] for row in rows]
    size = len(m)
    det = Q(1)
    for c in range(size):
        piv = next((r for r in range(c, size) if m[r][c] != 0), None)
        if piv is None:
            return Q(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, size):
            if m[r][c] != 0:
                factor = m[r][c] * inv
                for k in range(c, size):
                    m[r][k] -= factor * m[c][k]
    return det


def _interpolate(xs: List[int], vals: List[Q]) -> List[Q]:
    a = [[Q(x) ** j for j in range(len(xs))] for x in xs]
    coeffs = solve(a, vals)
    assert coeffs is not None
    return coeffs


def _pair_resultant(p: List[List[Q]], q: List[List[Q]], e: int) -> BinaryForm:
    """Resultant in the second point of two bidegree-(e,e) forms.

    Both arguments use formal degree e in the second variable, so common
    zeros at infinity are detected too.  Computed as a Sylvester
    determinant by evaluation at 2e^2 + 1 sample points and exact
    interpolation back to a binary form in the first point.
    """
    p_cols = [BinaryForm([p[u][v] for u in range(e + 1)]) for v in range(e + 1)]
    q_cols = [BinaryForm([q[u][v] for u in range(e + 1)]) for v in range(e + 1)]
    size = 2 * e
    deg = 2 * e * e
    xs = list(range(deg + 1))
    vals = []
    for x in xs:
        pv = [f.evaluate(x, 1) for f in p_cols]
        qv = [f.evaluate(x, 1) for f in q_cols]
        m = [[Q(0)] * size for _ in range(size)]
        for r in range(e):
            for k in range(e + 1):
                m[r][r + k] = pv[k]
                m[e + r][r + k] = qv[k]
        vals.append(_det(m))
    poly = _interpolate(xs, vals)
    coeffs = [Q(0)] * (deg + 1)
    for j, c in enumerate(poly):
        coeffs[deg - j] = c
    return BinaryForm(coeffs)


def certify_injectivity(curve: RationalCurve) -> bool:
    """One-sided injectivity certificate for the parametrization.

    True means provably injective.  False means not certified (the gcd
    witness may vanish at diagonal points even for injective maps), so
    callers must treat False as inconclusive.
    """
    if curve.d == 1:
        return True
    quotients = _colinearity_quotients(curve)
    if len(quotients) < 2:
        return False
    e = curve.d - 1
    acc: Optional[BinaryForm] = None
    for a in range(len(quotients)):
        for b in range(a + 1, len(quotients)):
            res = _pair_resultant(quotients[a], quotients[b], e)
            if res.is_zero:
                continue
            acc = res.monic() if acc is None else bf_gcd(acc, res)
            if acc.degree == 0:
                return True
    return False


# ---------------------------------------------------------------------------
# Bundle presentations.


def euler_inclusion(curve: RationalCurve) -> SheafMap:
    """O -> O(d)^{n+1}, the coordinate column pulled back from the Euler sequence."""
    return SheafMap.from_columns(
        (0,), (curve.d,) * (curve.n + 1), [list(curve.coords)]
    )


def derivative_inclusion(curve: RationalCurve) -> SheafMap:
    """O(1)^2 -> O(d)^{n+1}, columns the s- and t-derivatives of the coordinates.

    The cokernel presents the normal bundle in P^n: the column span at
    each point contains the Euler line (by the degree identity
    s f_s + t f_t = d f), so the quotient collapses both tangent
    directions of the ambient Euler picture at once.
    """
    ds, dt = curve.derivative_columns()
    return SheafMap.from_columns(
        (1, 1), (curve.d,) * (curve.n + 1), [list(ds), list(dt)]
    )


def jacobian_row(curve: RationalCurve, hyp: Hypersurface) -> SheafMap:
    """O(d)^{n+1} -> O(h d), entries the pulled-back partials of the hypersurface."""
    if curve.n != hyp.n:
        raise GeometryError(
            f"curve lives in P^{curve.n}, hypersurface in P^{hyp.n}"
        )
    row = [pullback_form(p, curve.coords) for p in partials(hyp.form)]
    return SheafMap(
        (curve.d,) * (curve.n + 1), (hyp.h * curve.d,), [row]
    )


def pullback_tangent_pn(curve: RationalCurve) -> QuotientResult:
    """Splitting of the pulled-back ambient tangent bundle, with presentation."""
    res = quotient_splitting(euler_inclusion(curve))
    if res.torsion_degree != 0:
        raise GeometryError("curve coordinates share a zero")
    return res


@dataclass(frozen=True)
class RestrictedTangent:
    """Restricted tangent bundle of the hypersurface, with its full chain.

    ``jacobian_kernel`` presents the relative Euler-style bundle as the
    kernel of the Jacobian row; ``euler_in_kernel`` rewrites the
    coordinate column in the kernel's generators; the quotient by that
    line is the restricted tangent bundle.
    """

    jacobian_kernel: KernelResult
    euler_in_kernel: SheafMap
    quotient: QuotientResult

    @property
    def splitting(self) -> SplitBundle:
        return self.quotient.splitting


def restricted_tangent(curve: RationalCurve, hyp: Hypersurface) -> RestrictedTangent:
    """Splitting of the hypersurface tangent bundle pulled back to the curve."""
    ker = kernel_splitting(jacobian_row(curve, hyp))
    incl = ker.inclusion()
    euler = graded_solve(incl, list(curve.coords), twist=0)
    if euler is None:
        raise GeometryError("Euler section not in Jacobian kernel")
    u = SheafMap.from_columns((0,), ker.splitting.twists, [list(euler)])
    res = quotient_splitting(u)
    if res.torsion_degree != 0:
        raise GeometryError("curve coordinates share a zero")
    return RestrictedTangent(jacobian_kernel=ker, euler_in_kernel=u, quotient=res)


def normal_pn(curve: RationalCurve) -> QuotientResult:
    """Splitting of the normal bundle in P^n, as the derivative cokernel."""
    res = quotient_splitting(derivative_inclusion(curve))
    if res.torsion_degree != 0:
        raise GeometryError("not an immersion")
    return res


def normal_hyp(curve: RationalCurve, hyp: Hypersurface) -> KernelResult:
    """Splitting of the normal bundle inside the hypersurface.

    The Jacobian row kills the derivative columns (chain rule on the
    identically vanishing pullback), so it factors through the normal
    bundle; the normal bundle of the curve in the hypersurface is the
    kernel of that factored map.
    """
    jac = jacobian_row(curve, hyp)
    if not pullback_form(hyp.form, curve.coords).is_zero:
        raise GeometryError("hypersurface does not contain the curve")
    proj = normal_pn(curve).projection()
    return kernel_splitting(factor_map(jac, proj))


@dataclass(frozen=True)
class BundleSuite:
    """Every bundle of the pipeline for one pair, with shared presentations."""

    curve: RationalCurve
    hypersurface: Hypersurface
    diagnostics: PairDiagnostics
    tangent_ambient: QuotientResult
    restricted: RestrictedTangent
    normal_ambient: QuotientResult
    factored_jacobian: SheafMap
    normal_surface: KernelResult

    def splittings(self) -> Dict[str, Tuple[int, ...]]:
        return {
            "pullback_tangent_pn": self.tangent_ambient.splitting.twists,
            "restricted_tangent": self.restricted.splitting.twists,
            "normal_pn": self.normal_ambient.splitting.twists,
            "normal_hyp": self.normal_surface.splitting.twists,
        }


def compute_suite(curve: RationalCurve, hyp: Hypersurface) -> BundleSuite:
    """Run the full bundle pipeline after checking geometric preconditions."""
    diag = validate_pair(curve, hyp)
    if not diag.pipeline_ready:
        raise PreconditionError(
            "pair fails geometric preconditions", diagnostics=diag.as_dict()
        )
    tangent_ambient = pullback_tangent_pn(curve)
    restricted = restricted_tangent(curve, hyp)
    normal_ambient = normal_pn(curve)
    jac = restricted.jacobian_kernel.map
    factored = factor_map(jac, normal_ambient.projection())
    normal_surface = kernel_splitting(factored)

    n, d, h = curve.n, curve.d, hyp.h
    assert tangent_ambient.splitting.rank == n
    assert tangent_ambient.splitting.first_chern == (n + 1) * d
    assert restricted.splitting.rank == n - 1
    assert restricted.splitting.first_chern == (n + 1 - h) * d
    assert normal_ambient.splitting.rank == n - 1
    assert normal_ambient.splitting.first_chern == (n + 1) * d - 2
    assert normal_surface.splitting.rank == n - 2
    assert normal_surface.splitting.first_chern == (n + 1 - h) * d - 2
    return BundleSuite(
        curve=curve,
        hypersurface=hyp,
        diagnostics=diag,
        tangent_ambient=tangent_ambient,
        restricted=restricted,
        normal_ambient=normal_ambient,
        factored_jacobian=factored,
        normal_surface=normal_surface,
    )


# ---------------------------------------------------------------------------
# Random instance generation.


def _integerize(f: MultiForm) -> MultiForm:
    """Scale a nonzero form to coprime integer coefficients, sign-normalized."""
    items = f.sorted_terms()
    common = math.lcm(*(c.denominator for _, c in items))
    scaled = [int(c * common) for _, c in items]
    content = math.gcd(*scaled)
    sign = 1 if scaled[0] > 0 else -1
    return f.scale(Q(common * sign, content))


def random_instance(
    n: int,
    d: int,
    h: int,
    seed: int,
    coeff_bound: int = 10,
    max_tries: int = 200,
) -> Tuple[RationalCurve, Hypersurface]:
    """Deterministic random curve plus a hypersurface containing it.

    Curves are sampled with integer coefficients in [-coeff_bound,
    coeff_bound] until the coordinates are coprime and the map is an
    immersion.  The hypersurface is a random integer combination of a
    basis of the degree-h piece of the curve's ideal, resampled until it
    is smooth along the curve.  Raises GeometryError when either stage
    exhausts its retry budget.
    """
    if n < 3:
        raise GeometryError(f"ambient dimension {n} below 3")
    if d < 1 or h < 1:
        raise GeometryError("degrees must be positive")
    rng = random.Random(seed)

    curve = None
    for _ in range(max_tries):
        coords = [
            BinaryForm([rng.randint(-coeff_bound, coeff_bound) for _ in range(d + 1)])
            for _ in range(n + 1)
        ]
        try:
            candidate = RationalCurve(n, d, coords)
        except GeometryError:
            continue
        if curve_is_immersion(candidate):
            curve = candidate
            break
    if curve is None:
        raise GeometryError(
            f"no immersed curve found in {max_tries} draws for seed {seed}"
        )

    exps = monomial_exponents(n + 1, h)
    pulled = [
        pullback_form(MultiForm.monomial(e), curve.coords) for e in exps
    ]
    rows = [
        [pulled[k].coeff(r) for k in range(len(exps))] for r in range(h * d + 1)
    ]
    basis = nullspace(rows)
    if not basis:
        raise GeometryError(
            f"no degree-{h} hypersurface contains the sampled curve"
        )

    for _ in range(max_tries):
        weights = [rng.randint(-3, 3) for _ in basis]
        vec = [
            sum(w * v[k] for w, v in zip(weights, basis)) for k in range(len(exps))
        ]
        terms = {e: c for e, c in zip(exps, vec) if c != 0}
        if not terms:
            continue
        hyp = Hypersurface(n, h, _integerize(MultiForm(n + 1, h, terms)))
        if not pullback_form(hyp.form, curve.coords).is_zero:
            raise GeometryError("ideal basis produced a non-containing form")
        if smooth_along_curve(curve, hyp):
            return curve, hyp
    raise GeometryError(
        f"no hypersurface smooth along the curve in {max_tries} draws for seed {seed}"
    )
