"""Exact homogeneous polynomial arithmetic over Q.

Two representations:

* ``BinaryForm``: a homogeneous polynomial in the curve parameters (s, t),
  stored densely.  ``coeffs[i]`` is the coefficient of s^(degree-i) t^i.
  The zero form is stored as the empty tuple and has no degree, so degree
  arithmetic never sees a fake degree-0 zero.
* ``MultiForm``: a homogeneous polynomial in the ambient coordinates
  x_0..x_n, stored sparsely as a map from exponent tuples to nonzero
  rationals (monomial counts explode with n and the degree; curve data
  stays tiny either way).

All coefficients are ``fractions.Fraction``; nothing here ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .errors import DegreeError

Q = Fraction
Exponents = Tuple[int, ...]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form in (s, t); empty coeffs means the zero form."""

    coeffs: Tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        cs = tuple(_frac(c) for c in coeffs)
        if cs and all(c == 0 for c in cs):
            cs = ()
        object.__setattr__(self, "coeffs", cs)

    @staticmethod
    def zero() -> "BinaryForm":
        return BinaryForm(())

    @staticmethod
    def monomial(degree: int, t_power: int, coeff=1) -> "BinaryForm":
        """coeff * s^(degree - t_power) * t^t_power."""
        if not 0 <= t_power <= degree:
            raise DegreeError(f"t_power {t_power} outside [0, {degree}]")
        c = _frac(coeff)
        if c == 0:
            return BinaryForm.zero()
        cs = [Q(0)] * (degree + 1)
        cs[t_power] = c
        return BinaryForm(cs)

    @staticmethod
    def constant(value) -> "BinaryForm":
        return BinaryForm((_frac(value),))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self):
        """Degree of a nonzero form; None for the zero form."""
        return len(self.coeffs) - 1 if self.coeffs else None

    def coeff(self, t_power: int) -> Fraction:
        return self.coeffs[t_power] if 0 <= t_power < len(self.coeffs) else Q(0)

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.degree != other.degree:
            raise DegreeError(
                f"cannot add forms of degrees {self.degree} and {other.degree}"
            )
        return BinaryForm(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> "BinaryForm":
        return BinaryForm(-c for c in self.coeffs)

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        return self + (-other)

    def __mul__(self, other) -> "BinaryForm":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self.is_zero or other.is_zero:
            return BinaryForm.zero()
        out = [Q(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] += a * b
        return BinaryForm(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BinaryForm":
        if n < 0:
            raise DegreeError("negative power of a form")
        out = BinaryForm.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def scale(self, k) -> "BinaryForm":
        k = _frac(k)
        if k == 0 or self.is_zero:
            return BinaryForm.zero()
        return BinaryForm(k * c for c in self.coeffs)

    def evaluate(self, s0, t0) -> Fraction:
        """Value at a rational point (s0, t0); zero form gives 0."""
        s0, t0 = _frac(s0), _frac(t0)
        total = Q(0)
        d = self.degree
        if d is None:
            return total
        for i, c in enumerate(self.coeffs):
            if c != 0:
                total += c * s0 ** (d - i) * t0 ** i
        return total

    def derivative_s(self) -> "BinaryForm":
        d = self.degree
        if d is None or d == 0:
            return BinaryForm.zero()
        return BinaryForm((d - i) * self.coeffs[i] for i in range(d))

    def derivative_t(self) -> "BinaryForm":
        d = self.degree
        if d is None or d == 0:
            return BinaryForm.zero()
        return BinaryForm(i * self.coeffs[i] for i in range(1, d + 1))

    def monic(self) -> "BinaryForm":
        """Scale so the first nonzero coefficient is 1."""
        for c in self.coeffs:
            if c != 0:
                return self.scale(1 / c)
        return self

    def is_constant(self) -> bool:
        return self.is_zero or self.degree == 0

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        d = self.degree
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "".join(
                f"{v}^{p}" if p > 1 else v
                for v, p in (("s", d - i), ("t", i))
                if p > 0
            ) or "1"
            parts.append(f"{c}*{mono}" if mono != "1" else f"{c}")
        return " + ".join(parts)


def _poly_divmod(num: list, den: list):
    """divmod for dense univariate Fraction polys, ascending coefficients."""
    num = list(num)
    dn = len(den) - 1
    while den and den[-1] == 0:
        den = den[:-1]
        dn -= 1
    quot = [Q(0)] * max(len(num) - dn, 0)
    inv = 1 / den[-1]
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k] * inv
        if c != 0:
            quot[k - dn] = c
            for j in range(dn + 1):
                num[k - dn + j] -= c * den[j]
    while num and num[-1] == 0:
        num.pop()
    return quot, num


def _to_univariate(f: BinaryForm) -> list:
    # f(x, 1) with ascending coefficients; index k holds the x^k coefficient.
    d = f.degree
    return [f.coeffs[d - k] for k in range(d + 1)]


def bf_gcd(a: BinaryForm, b: BinaryForm) -> BinaryForm:
    """Monic gcd of two binary forms; degree 0 means coprime."""
    if a.is_zero and b.is_zero:
        raise DegreeError("gcd undefined for two zero forms")
    if a.is_zero:
        return b.monic()
    if b.is_zero:
        return a.monic()

    def t_mult(f: BinaryForm) -> int:
        m = 0
        while f.coeffs[m] == 0:
            m += 1
        return m

    shift = min(t_mult(a), t_mult(b))
    p, q = _to_univariate(a), _to_univariate(b)
    while q and any(c != 0 for c in q):
        _, r = _poly_divmod(p, q)
        p, q = q, r
    # homogenize p back to a form of deg(p); leading zeros would inflate it
    while p and p[-1] == 0:
        p.pop()
    dp = len(p) - 1
    coeffs = [Q(0)] * shift + [p[dp - i] for i in range(dp + 1)]
    return BinaryForm(coeffs).monic()


def bf_gcd_many(forms: Sequence[BinaryForm]) -> BinaryForm:
    """gcd of a family of forms, at least one nonzero."""
    acc = None
    for f in forms:
        if f.is_zero:
            continue
        acc = f.monic() if acc is None else bf_gcd(acc, f)
        if acc.degree == 0:
            return acc
    if acc is None:
        raise DegreeError("gcd undefined for an all-zero family")
    return acc


@dataclass(frozen=True, eq=True)
class MultiForm:
    """Homogeneous form in num_vars variables, sparse exponent map."""

    num_vars: int
    degree: int
    terms: Dict[Exponents, Fraction] = field(default_factory=dict)

    def __init__(self, num_vars: int, degree: int, terms: Mapping[Exponents, object] = ()):
        if num_vars < 1:
            raise DegreeError("need at least one variable")
        if degree < 0:
            raise DegreeError("negative degree")
        clean: Dict[Exponents, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars or any(e < 0 for e in exps):
                raise DegreeError(f"bad exponent tuple {exps} for {num_vars} variables")
            if sum(exps) != degree:
                raise DegreeError(f"exponents {exps} do not sum to degree {degree}")
            c = _frac(c)
            if c != 0:
                clean[exps] = clean.get(exps, Q(0)) + c
                if clean[exps] == 0:
                    del clean[exps]
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", clean)

    __hash__ = None

    @staticmethod
    def zero(num_vars: int, degree: int) -> "MultiForm":
        return MultiForm(num_vars, degree, {})

    @staticmethod
    def monomial(exponents: Sequence[int], coeff=1) -> "MultiForm":
        exps = tuple(int(e) for e in exponents)
        return MultiForm(len(exps), sum(exps), {exps: coeff})

    @staticmethod
    def variable(index: int, num_vars: int) -> "MultiForm":
        exps = tuple(1 if i == index else 0 for i in range(num_vars))
        return MultiForm(num_vars, 1, {exps: 1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _check_compatible(self, other: "MultiForm"):
        if self.num_vars != other.num_vars:
            raise DegreeError("variable-count mismatch")

    def __add__(self, other: "MultiForm") -> "MultiForm":
        self._check_compatible(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.degree != other.degree:
            raise DegreeError(
                f"cannot add forms of degrees {self.degree} and {other.degree}"
            )
        merged = dict(self.terms)
        for e, c in other.terms.items():
            merged[e] = merged.get(e, Q(0)) + c
        return MultiForm(self.num_vars, self.degree, merged)

    def __neg__(self) -> "MultiForm":
        return MultiForm(self.num_vars, self.degree, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiForm") -> "MultiForm":
        return self + (-other)

    def __mul__(self, other) -> "MultiForm":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_compatible(other)
        deg = self.degree + other.degree
        out: Dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Q(0)) + c1 * c2
        return MultiForm(self.num_vars, deg, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiForm":
        if n < 0:
            raise DegreeError("negative power of a form")
        out = MultiForm(self.num_vars, 0, {(0,) * self.num_vars: 1})
        for _ in range(n):
            out = out * self
        return out

    def scale(self, k) -> "MultiForm":
        k = _frac(k)
        if k == 0:
            return MultiForm.zero(self.num_vars, self.degree)
        return MultiForm(self.num_vars, self.degree, {e: k * c for e, c in self.terms.items()})

    def sorted_terms(self) -> list:
        """Terms in ascending lexicographic exponent order (deterministic)."""
        return sorted(self.terms.items())

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e
            ) or "1"
            parts.append(f"({c})*{mono}")
        return " + ".join(parts)


def partials(f: MultiForm) -> Tuple[MultiForm, ...]:
    """All first partial derivatives of f; f must be non-constant."""
    if f.degree < 1:
        raise DegreeError("partials of a constant form")
    outs = []
    for i in range(f.num_vars):
        terms: Dict[Exponents, Fraction] = {}
        for exps, c in f.terms.items():
            if exps[i] == 0:
                continue
            e = list(exps)
            e[i] -= 1
            terms[tuple(e)] = c * exps[i]
        outs.append(MultiForm(f.num_vars, f.degree - 1, terms))
    return tuple(outs)


def pullback_form(f: MultiForm, coords: Sequence[BinaryForm]) -> BinaryForm:
    """Substitute coords into f: the binary form f(c_0(s,t), ..., c_n(s,t)).

    All nonzero coordinates must share one degree d; the result is
    homogeneous of degree deg(f) * d (or zero).
    """
    if f.num_vars != len(coords):
        raise DegreeError(
            f"form in {f.num_vars} variables against {len(coords)} coordinates"
        )
    degs = {c.degree for c in coords if not c.is_zero}
    if len(degs) > 1:
        raise DegreeError(f"coordinate degrees differ: {sorted(degs)}")
    if not degs or f.is_zero:
        return BinaryForm.zero()
    d = degs.pop()
    if f.degree == 0:
        return BinaryForm.constant(next(iter(f.terms.values())))

    powers: Dict[Tuple[int, int], BinaryForm] = {}

    def power(i: int, e: int) -> BinaryForm:
        if e == 0:
            return BinaryForm.constant(1)
        key = (i, e)
        if key not in powers:
            powers[key] = power(i, e - 1) * coords[i]
        return powers[key]

    total = [Q(0)] * (f.degree * d + 1)
    for exps, c in f.terms.items():
        if any(e > 0 and coords[i].is_zero for i, e in enumerate(exps)):
            continue
        term = BinaryForm.constant(c)
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
        for k, v in enumerate(term.coeffs):
            total[k] += v
    return BinaryForm(total)

def monomial_exponents(num_vars: int, degree: int) -> Tuple[Exponents, ...]:
    """All exponent tuples of the given total degree, ascending lexicographic.

    This fixed ordering is the canonical monomial enumeration used for
    coefficient matrices and surjectivity scans.
    """
    if num_vars < 1:
        raise DegreeError("need at least one variable")
    if degree < 0:
        raise DegreeError("negative degree")
    if num_vars == 1:
        return ((degree,),)
    outs = []
    for first in range(degree + 1):
        for rest in monomial_exponents(num_vars - 1, degree - first):
            outs.append((first,) + rest)
    return tuple(outs)
