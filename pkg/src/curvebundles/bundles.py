"""Split vector bundles on the projective line and exact graded-map algebra.

A map between twisted sums acts on each graded piece as a finite matrix
over Q.  Ranks of those matrices, over a provably sufficient window of
degrees, determine kernels, quotients, and cohomology exactly.  No
floating point and no Groebner machinery: binary forms plus Fraction
elimination suffice on P^1.

Twist conventions:

* An element of the degree-m piece of ``O(a_0) + ... + O(a_r)`` is a tuple
  of binary forms with ``deg v_j = a_j + m`` (components with a_j + m < 0
  must be zero).
* A matrix entry in row i, column j carries a form of degree
  ``target[i] - source[j]``; entries whose slot degree is negative must be
  the zero form.
* A rank-one summand O(e) of a kernel first contributes sections at
  degree m = -e.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    DegreeError,
    FactorError,
    GradedSystemError,
    NotInjectiveError,
    WindowBoundError,
)
from .forms import BinaryForm
from .linalg import EchelonBasis, Matrix, Q, nullspace, rank, solve, zeros

Twists = Tuple[int, ...]
FormVector = Tuple[BinaryForm, ...]


@dataclass(frozen=True)
class SplitBundle:
    """Direct sum of line bundles O(e_1) + ... + O(e_r), twists sorted descending."""

    twists: Twists

    def __init__(self, twists: Iterable[int] = ()):
        ts = tuple(sorted((int(e) for e in twists), reverse=True))
        object.__setattr__(self, "twists", ts)

    @property
    def rank(self) -> int:
        return len(self.twists)

    @property
    def first_chern(self) -> int:
        return sum(self.twists)

    @property
    def max_twist(self) -> int:
        if not self.twists:
            raise DegreeError("max twist of the zero bundle")
        return self.twists[0]

    @property
    def min_twist(self) -> int:
        if not self.twists:
            raise DegreeError("min twist of the zero bundle")
        return self.twists[-1]

    def twist(self, k: int) -> "SplitBundle":
        return SplitBundle(e + k for e in self.twists)

    def dual(self) -> "SplitBundle":
        return SplitBundle(-e for e in self.twists)

    def direct_sum(self, other: "SplitBundle") -> "SplitBundle":
        return SplitBundle(self.twists + other.twists)

    def cohomology(self, k: int = 0) -> "Cohomology":
        return cohomology(self, k)

    def __iter__(self):
        return iter(self.twists)

    def __len__(self) -> int:
        return len(self.twists)

    def __str__(self) -> str:
        return "O()" if not self.twists else " + ".join(f"O({e})" for e in self.twists)


@dataclass(frozen=True)
class Cohomology:
    """Dimensions of the two cohomology groups of a twisted split bundle."""

    h0: int
    h1: int

    @property
    def chi(self) -> int:
        return self.h0 - self.h1


def cohomology(bundle: SplitBundle, k: int = 0) -> Cohomology:
    """h^0 and h^1 of bundle(k) on P^1, by the summand-wise closed form."""
    h0 = sum(max(e + k + 1, 0) for e in bundle.twists)
    h1 = sum(max(-(e + k) - 1, 0) for e in bundle.twists)
    return Cohomology(h0, h1)


def piece_layout(twists: Sequence[int], m: int) -> List[Tuple[int, int]]:
    """Monomial basis of the degree-m piece of a twisted sum.

    Returns (component, t_power) pairs; component j with twist a contributes
    s^(a+m-u) t^u for u = 0..a+m and nothing when a + m < 0.
    """
    layout = []
    for j, a in enumerate(twists):
        for u in range(a + m + 1):
            layout.append((j, u))
    return layout


def piece_dim(twists: Sequence[int], m: int) -> int:
    return sum(max(a + m + 1, 0) for a in twists)


def forms_to_vector(
    forms: Sequence[BinaryForm], twists: Sequence[int], m: int
) -> List[Fraction]:
    """Coordinates of a form tuple in the degree-m piece basis."""
    if len(forms) != len(twists):
        raise GradedSystemError(
            f"{len(forms)} forms against {len(twists)} components"
        )
    vec: List[Fraction] = []
    for f, a in zip(forms, twists):
        d = a + m
        if d < 0:
            if not f.is_zero:
                raise GradedSystemError(
                    f"nonzero form in a component with empty degree-{m} piece"
                )
            continue
        if not f.is_zero and f.degree != d:
            raise GradedSystemError(
                f"form of degree {f.degree} where degree {d} was required"
            )
        vec.extend(f.coeff(u) for u in range(d + 1))
    return vec


def vector_to_forms(
    vec: Sequence[Fraction], twists: Sequence[int], m: int
) -> FormVector:
    """Inverse of forms_to_vector for the same layout."""
    forms = []
    pos = 0
    for a in twists:
        d = a + m
        if d < 0:
            forms.append(BinaryForm.zero())
            continue
        forms.append(BinaryForm(vec[pos:pos + d + 1]))
        pos += d + 1
    if pos != len(vec):
        raise GradedSystemError("vector length does not match piece layout")
    return tuple(forms)


@dataclass(frozen=True)
class SheafMap:
    """Matrix of binary forms between twisted sums; rows follow the target.

    Entry (i, j) must be zero or homogeneous of degree
    ``target[i] - source[j]``.
    """

    source: Twists
    target: Twists
    entries: Tuple[Tuple[BinaryForm, ...], ...]

    def __init__(
        self,
        source: Iterable[int],
        target: Iterable[int],
        entries: Sequence[Sequence[BinaryForm]],
    ):
        src = tuple(int(a) for a in source)
        tgt = tuple(int(b) for b in target)
        rows = tuple(tuple(row) for row in entries)
        if len(rows) != len(tgt):
            raise GradedSystemError(f"{len(rows)} rows for {len(tgt)} target components")
        for i, row in enumerate(rows):
            if len(row) != len(src):
                raise GradedSystemError(
                    f"row {i} has {len(row)} entries for {len(src)} source components"
                )
            for j, e in enumerate(row):
                if not isinstance(e, BinaryForm):
                    raise GradedSystemError(f"entry ({i}, {j}) is not a binary form")
                if e.is_zero:
                    continue
                want = tgt[i] - src[j]
                if e.degree != want:
                    raise GradedSystemError(
                        f"entry ({i}, {j}) has degree {e.degree}, expected {want}"
                    )
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "entries", rows)

    @staticmethod
    def zero(source: Iterable[int], target: Iterable[int]) -> "SheafMap":
        src, tgt = tuple(source), tuple(target)
        z = BinaryForm.zero()
        return SheafMap(src, tgt, [[z] * len(src) for _ in tgt])

    @staticmethod
    def from_columns(
        source: Iterable[int],
        target: Iterable[int],
        columns: Sequence[Sequence[BinaryForm]],
    ) -> "SheafMap":
        src, tgt = tuple(source), tuple(target)
        if len(columns) != len(src):
            raise GradedSystemError(f"{len(columns)} columns for {len(src)} components")
        rows = [[columns[j][i] for j in range(len(src))] for i in range(len(tgt))]
        return SheafMap(src, tgt, rows)

    @staticmethod
    def identity(twists: Iterable[int]) -> "SheafMap":
        ts = tuple(twists)
        one = BinaryForm.constant(1)
        z = BinaryForm.zero()
        rows = [[one if i == j else z for j in range(len(ts))] for i in range(len(ts))]
        return SheafMap(ts, ts, rows)

    @property
    def source_bundle(self) -> SplitBundle:
        return SplitBundle(self.source)

    @property
    def target_bundle(self) -> SplitBundle:
        return SplitBundle(self.target)

    def column(self, j: int) -> FormVector:
        return tuple(self.entries[i][j] for i in range(len(self.target)))

    def transpose_dual(self) -> "SheafMap":
        """The dual map between dualized sums; entries transpose unchanged."""
        rows = [
            [self.entries[i][j] for i in range(len(self.target))]
            for j in range(len(self.source))
        ]
        return SheafMap(
            tuple(-b for b in self.target),
            tuple(-a for a in self.source),
            rows,
        )

    def apply(self, forms: Sequence[BinaryForm]) -> FormVector:
        """Image of a source element given as a tuple of forms."""
        if len(forms) != len(self.source):
            raise GradedSystemError("element length does not match the source")
        out = []
        for row in self.entries:
            acc = BinaryForm.zero()
            for e, f in zip(row, forms):
                if not e.is_zero and not f.is_zero:
                    acc = acc + e * f
            out.append(acc)
        return tuple(out)

    def is_zero_map(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)


def compose(outer: SheafMap, inner: SheafMap) -> SheafMap:
    """outer after inner; twist tuples must match exactly in order."""
    if inner.target != outer.source:
        raise GradedSystemError(
            f"cannot compose: inner target {inner.target} != outer source {outer.source}"
        )
    rows = []
    for i in range(len(outer.target)):
        row = []
        for k in range(len(inner.source)):
            acc = BinaryForm.zero()
            for j in range(len(outer.source)):
                a, b = outer.entries[i][j], inner.entries[j][k]
                if not a.is_zero and not b.is_zero:
                    acc = acc + a * b
            row.append(acc)
        rows.append(row)
    return SheafMap(inner.source, outer.target, rows)


def graded_matrix(mp: SheafMap, m: int) -> Matrix:
    """Matrix of the degree-m piece of mp in the piece_layout bases."""
    src = piece_layout(mp.source, m)
    tgt = piece_layout(mp.target, m)
    row_index = {key: r for r, key in enumerate(tgt)}
    a = zeros(len(tgt), len(src))
    for cidx, (j, u) in enumerate(src):
        for i in range(len(mp.target)):
            e = mp.entries[i][j]
            if e.is_zero:
                continue
            for shift, coef in enumerate(e.coeffs):
                if coef != 0:
                    a[row_index[(i, u + shift)]][cidx] += coef
    return a


def graded_solve(
    mp: SheafMap,
    target_forms: Sequence[BinaryForm],
    twist: Optional[int] = None,
) -> Optional[FormVector]:
    """One exact preimage of a graded target element, or None.

    The element's twist is inferred from any nonzero component
    (deg w_i = target[i] + m); pass ``twist`` when all components vanish.
    Free coordinates are set to zero, so the preimage is deterministic.
    """
    if len(target_forms) != len(mp.target):
        raise GradedSystemError("element length does not match the target")
    m = twist
    for w, b in zip(target_forms, mp.target):
        if w.is_zero:
            continue
        inferred = w.degree - b
        if m is None:
            m = inferred
        elif m != inferred:
            raise GradedSystemError(
                f"components disagree about the twist: {m} vs {inferred}"
            )
    if m is None:
        return tuple(BinaryForm.zero() for _ in mp.source)
    rhs = forms_to_vector(target_forms, mp.target, m)
    a = graded_matrix(mp, m)
    x = solve(a, rhs)
    if x is None:
        return None
    return vector_to_forms(x, mp.source, m)


def generic_rank(mp: SheafMap) -> int:
    """Rank of mp at a general point, by exact evaluation on a sample grid.

    Every r x r minor is zero or homogeneous of degree at most
    min(rows, cols) * (max target twist - min source twist), so a nonzero
    minor survives at one of bound+1 points (x : 1).
    """
    rs, rt = len(mp.source), len(mp.target)
    if rs == 0 or rt == 0:
        return 0
    bound = max(0, min(rs, rt) * (max(mp.target) - min(mp.source)))
    best = 0
    cap = min(rs, rt)
    for x in range(bound + 1):
        sample = [[e.evaluate(x, 1) for e in row] for row in mp.entries]
        best = max(best, rank(sample))
        if best == cap:
            break
    return best


def kernel_piece_h(mp: SheafMap, m: int) -> int:
    """Dimension of the degree-m piece of the kernel module of mp."""
    return piece_dim(mp.source, m) - rank(graded_matrix(mp, m))


@dataclass(frozen=True)
class KernelResult:
    """Kernel bundle of a graded map, with explicit module generators.

    ``generators[k]`` is a tuple of source forms spanning the O(twists[k])
    summand; it first appears in degree -twists[k].  ``profile`` records
    the kernel piece dimensions over the scanned window.
    """

    map: SheafMap
    splitting: SplitBundle
    generators: Tuple[FormVector, ...]
    window: Tuple[int, int]
    profile: Dict[int, int]

    def inclusion(self) -> SheafMap:
        """The kernel's summands mapped into the source, generators as columns."""
        return SheafMap.from_columns(
            self.splitting.twists, self.map.source, list(self.generators)
        )

    def verify(self) -> bool:
        """Exact replay: membership, freeness, and completeness at the window floor.

        Checks that every generator is killed by the map, that the pushed-up
        generators span a free submodule of the expected dimension at the
        bottom of the window, and that the kernel piece there is no bigger.
        """
        if len(self.generators) != self.splitting.rank:
            return False
        if not self.generators:
            return generic_rank(self.map) == len(self.map.source)
        try:
            incl = self.inclusion()
            if not compose(self.map, incl).is_zero_map():
                return False
            m_star = -self.window[0]
            dim = piece_dim(self.map.source, m_star)
            span = EchelonBasis(dim)
            for e, gen in zip(self.splitting.twists, self.generators):
                p = m_star + e
                if p < 0:
                    return False
                for u in range(p + 1):
                    mono = BinaryForm.monomial(p, u)
                    lifted = tuple(mono * g for g in gen)
                    span.add(forms_to_vector(lifted, self.map.source, m_star))
            expected = sum(e + m_star + 1 for e in self.splitting.twists)
            if len(span) != expected:
                return False
            return kernel_piece_h(self.map, m_star) == expected
        except GradedSystemError:
            return False


def kernel_splitting(mp: SheafMap) -> KernelResult:
    """Splitting type and generators of ker(mp), by a windowed piece scan.

    The window [b_low, b_high] provably contains every kernel twist:
    b_high is the largest source twist, and b_low combines the first Chern
    class bound c1(ker) = c1(source) - c1(image) with the per-summand cap.
    Scan consistency failures raise WindowBoundError; they indicate a bug,
    not bad input.
    """
    rs = len(mp.source)
    rho = generic_rank(mp)
    rank_k = rs - rho
    if rank_k == 0:
        return KernelResult(mp, SplitBundle(()), (), (0, 0), {})
    b_high = max(mp.source)
    image_cap = sum(sorted(mp.target, reverse=True)[:rho])
    b_low = (sum(mp.source) - image_cap) - (rank_k - 1) * b_high
    if b_low > b_high:
        raise WindowBoundError(f"empty twist window [{b_low}, {b_high}]")

    if kernel_piece_h(mp, -b_high - 1) != 0:
        raise WindowBoundError("kernel sections below the proven ceiling")

    twists: List[int] = []
    generators: List[FormVector] = []
    profile: Dict[int, int] = {}
    h_prev = 0
    jump_prev = 0
    for m in range(-b_high, -b_low + 1):
        h = kernel_piece_h(mp, m)
        profile[m] = h
        jump = h - h_prev
        mult = jump - jump_prev
        if jump < jump_prev or h < h_prev:
            raise WindowBoundError(f"kernel piece profile not monotone at degree {m}")
        if mult > 0:
            dim = piece_dim(mp.source, m)
            span = EchelonBasis(dim)
            for e, gen in zip(twists, generators):
                p = m + e
                for u in range(p + 1):
                    mono = BinaryForm.monomial(p, u)
                    lifted = tuple(mono * g for g in gen)
                    span.add(forms_to_vector(lifted, mp.source, m))
            added = 0
            for vec in nullspace(graded_matrix(mp, m), cols=dim):
                if span.add(vec):
                    generators.append(vector_to_forms(vec, mp.source, m))
                    twists.append(-m)
                    added += 1
            if added != mult:
                raise WindowBoundError(
                    f"found {added} new generators at degree {m}, expected {mult}"
                )
        h_prev, jump_prev = h, jump
    if jump_prev != rank_k:
        raise WindowBoundError(
            f"window closed with jump {jump_prev}, kernel rank is {rank_k}"
        )
    if len(twists) != rank_k:
        raise WindowBoundError(
            f"reconstructed {len(twists)} twists for a rank-{rank_k} kernel"
        )
    return KernelResult(
        mp, SplitBundle(twists), tuple(generators), (b_low, b_high), profile
    )


@dataclass(frozen=True)
class QuotientResult:
    """Cokernel of a generically injective map: locally free part plus torsion length."""

    map: SheafMap
    splitting: SplitBundle
    torsion_degree: int
    dual_kernel: KernelResult

    def projection(self) -> SheafMap:
        """Target onto the locally free quotient (kills the image and torsion).

        Rows are ordered to match ``splitting.twists`` (descending).
        """
        raw = self.dual_kernel.inclusion().transpose_dual()
        order = sorted(range(len(raw.target)), key=lambda i: -raw.target[i])
        rows = tuple(raw.entries[i] for i in order)
        return SheafMap(raw.source, tuple(raw.target[i] for i in order), rows)


def quotient_splitting(mp: SheafMap) -> QuotientResult:
    """Locally free part and torsion length of coker(mp).

    Requires mp generically injective.  The locally free part is the dual
    of the kernel of the dual map; torsion length is the first Chern class
    deficit.
    """
    rs = len(mp.source)
    if generic_rank(mp) != rs:
        raise NotInjectiveError(
            "quotient requested of a map that drops rank everywhere"
        )
    dual_ker = kernel_splitting(mp.transpose_dual())
    locfree = dual_ker.splitting.dual()
    torsion = (sum(mp.target) - sum(mp.source)) - locfree.first_chern
    if torsion < 0:
        raise WindowBoundError(f"negative torsion degree {torsion}")
    return QuotientResult(mp, locfree, torsion, dual_ker)


def factor_map(mp: SheafMap, projection: SheafMap) -> SheafMap:
    """The unique X with mp == X o projection, or FactorError.

    ``projection`` must be a surjection with torsion-free kernel behaviour
    on duals (any QuotientResult.projection qualifies).  Factoring is
    solved column by column on the dual side, where the projection dualizes
    to an inclusion with zero kernel module, so X is unique when it exists.
    """
    if mp.source != projection.source:
        raise GradedSystemError(
            "map and projection must share a source to factor"
        )
    incl = projection.transpose_dual()
    dual = mp.transpose_dual()
    columns = []
    for c in range(len(dual.source)):
        x = graded_solve(incl, dual.column(c), twist=-dual.source[c])
        if x is None:
            raise FactorError(
                f"column {c} does not lie in the image of the projection's dual"
            )
        columns.append(x)
    x_dual = SheafMap.from_columns(dual.source, incl.source, columns)
    factored = x_dual.transpose_dual()
    if compose(factored, projection) != mp:
        raise FactorError("factorization check failed after solving")
    return factored
