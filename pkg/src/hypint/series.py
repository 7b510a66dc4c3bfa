"""Base-indexed power series with Gamma-product coefficients.

A series lives on a layout split A = B + (A \\ B): the exponents outside
the base B index the series variables a_w, while the base exponents
carry the coefficient functions of a_1..a_n.  In the closed-form case a
term is

    scalar * prod_j Gamma(s_j) * (-a_j)**(-s_j) * prod_w a_w**m_w

with s(m) = s0 + sum_w m_w * l_w, where l_w are the exact rational
coordinates of w in the base and s0 solves sum_j s0_j * w_j = u.

The scalars and the arguments s_j are kept in exact complex-rational
arithmetic.  Differentiating with respect to a base variable then maps
Gamma(s)(-a)**(-s) to Gamma(s+1)(-a)**(-(s+1)) with the scalar
unchanged (the Gamma shift identity absorbed into the argument), so
annihilation by the generated operators is an exact cancellation of
equal Fractions, not a floating-point near-miss.

Numeric evaluation happens only at the very end, through a
reciprocal-Gamma-safe routine; the principal branch of log is used for
the powers (-a_j)**(-s_j), with the plane cut along the negative real
axis of (-a_j).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from scipy.special import gamma as _gamma, rgamma as _rgamma

from .exact import ONE, ExactComplex, solve_exact
from .lattice import Base, ExponentSet, base_coords
from .polynomials import CoeffVar, SparsePolynomial


class SeriesPoleError(ValueError):
    """A direct-form term sits on a pole of Gamma and cannot be evaluated."""


def complex_gamma(z: complex) -> complex:
    """Gamma on the complex plane via the entire reciprocal function."""
    rg = complex(_rgamma(complex(z)))
    if rg == 0:
        raise SeriesPoleError(f"Gamma pole at argument {z}")
    return 1.0 / rg


def reciprocal_gamma(z: complex) -> complex:
    return complex(_rgamma(complex(z)))


def negated_power(a: complex, rho: complex) -> complex:
    """Principal-branch (-a)**rho; rho may be complex."""
    base = -complex(a)
    if base == 0:
        if rho == 0:
            return 1.0 + 0j
        if rho.real > 0:
            return 0j
        raise ValueError("0 raised to an exponent with nonpositive real part")
    if rho.imag == 0 and float(rho.real).is_integer():
        return base ** int(rho.real)
    return cmath.exp(complex(rho) * cmath.log(base))


def multi_indices(width: int, max_total: int):
    """All tuples of ``width`` nonnegative ints with sum <= max_total,
    ordered by total then lexicographically."""
    if width == 0:
        yield ()
        return
    for total in range(max_total + 1):
        def rec(prefix, remaining, slots):
            if slots == 1:
                yield prefix + (remaining,)
                return
            for head in range(remaining + 1):
                yield from rec(prefix + (head,), remaining - head, slots - 1)
        yield from rec((), total, width)


@dataclass(frozen=True)
class SeriesLayout:
    """Variable split for a series: base variables vs series variables."""

    exponents: ExponentSet
    base: Base | None
    base_vars: tuple = field(init=False)
    series_vars: tuple = field(init=False)

    def __post_init__(self):
        if self.base is not None and self.base.parent != self.exponents:
            raise ValueError("base does not belong to the exponent set")
        base_idx = set(self.base.indices) if self.base is not None else set()
        base_vars = tuple(
            CoeffVar(0, self.exponents.members[i]) for i in
            (self.base.indices if self.base is not None else ())
        )
        series_vars = tuple(
            CoeffVar(0, w) for i, w in enumerate(self.exponents.members)
            if i not in base_idx
        )
        object.__setattr__(self, "base_vars", base_vars)
        object.__setattr__(self, "series_vars", series_vars)

    def coords(self, var: CoeffVar) -> tuple:
        """Exact coordinates of a series exponent in the base."""
        if self.base is None:
            raise ValueError("layout has no base")
        return base_coords(self.base, var.exponent)

    def role(self, var: CoeffVar) -> str:
        if var in self.base_vars:
            return "base"
        if var in self.series_vars:
            return "series"
        raise KeyError(f"{var} is not a variable of this layout")

    @property
    def all_vars(self) -> tuple:
        return self.base_vars + self.series_vars


@dataclass(frozen=True)
class GammaTermValue:
    """A raw closed-form coefficient: scalar * prod Gamma(args)(-a)**(-args)."""

    scalar: ExactComplex
    args: tuple  # one ExactComplex per base variable

    def is_pole(self) -> bool:
        return any(a.is_nonpositive_integer() for a in self.args)


@dataclass(frozen=True)
class GammaTerm:
    """A full series term in closed form (weight folded into the scalar)."""

    m: tuple
    scalar: ExactComplex
    args: tuple

    def is_pole(self) -> bool:
        return any(a.is_nonpositive_integer() for a in self.args)

    def rho(self) -> tuple:
        """Exponents of the base-variable power functions, rho_j = -s_j."""
        return tuple(-a for a in self.args)


@dataclass(frozen=True)
class OracleTerm:
    """A term whose coefficient is an opaque function of the base values."""

    m: tuple
    weight: Fraction
    coefficient: Callable


@dataclass(frozen=True)
class NumericTerm:
    """A term whose coefficient is a fixed number (standard expansion)."""

    m: tuple
    weight: Fraction
    value: complex


def _args_key(args):
    return tuple((a.re.numerator, a.re.denominator, a.im.numerator,
                  a.im.denominator) for a in args)


def merge_gamma_terms(terms):
    """Combine terms sharing (m, args), dropping exact zeros."""
    bucket = {}
    for t in terms:
        key = (t.m, _args_key(t.args))
        if key in bucket:
            prev = bucket[key]
            bucket[key] = GammaTerm(t.m, prev.scalar + t.scalar, t.args)
        else:
            bucket[key] = t
    merged = [t for t in bucket.values() if not t.scalar.is_zero()]
    merged.sort(key=lambda t: (sum(t.m), t.m, _args_key(t.args)))
    return tuple(merged)


class GammaSeries:
    """A truncated series over a layout.

    ``form`` selects the term normal form: "direct" uses Gamma factors in
    the numerator (poles are flagged), "reciprocal" uses the entire
    function 1/Gamma(1 - s) so parameter collisions give zero terms
    instead of infinities.  ``complete_below`` marks the first order that
    may be polluted by truncation when the series came out of an
    operator application.
    """

    __slots__ = ("layout", "truncation_order", "terms", "form",
                 "complete_below")

    def __init__(self, layout: SeriesLayout, truncation_order: int,
                 terms: Sequence, form: str = "direct",
                 complete_below: int | None = None):
        if truncation_order < 0:
            raise ValueError("truncation order must be >= 0")
        if form not in ("direct", "reciprocal"):
            raise ValueError(f"unknown series form {form!r}")
        terms = tuple(terms)
        for t in terms:
            if sum(t.m) > truncation_order:
                raise ValueError("term beyond the truncation order")
            if len(t.m) != len(layout.series_vars):
                raise ValueError("term multi-index does not match the layout")
        if all(isinstance(t, GammaTerm) for t in terms):
            terms = merge_gamma_terms(terms)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "truncation_order", truncation_order)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "form", form)
        object.__setattr__(
            self, "complete_below",
            truncation_order + 1 if complete_below is None else complete_below,
        )

    def __setattr__(self, name, value):
        raise AttributeError("GammaSeries is immutable")

    def is_closed_form(self) -> bool:
        return all(isinstance(t, GammaTerm) for t in self.terms)

    def terms_of_order(self, order: int):
        return tuple(t for t in self.terms if sum(t.m) == order)

    def __add__(self, other: "GammaSeries") -> "GammaSeries":
        if (self.layout != other.layout or self.form != other.form
                or self.truncation_order != other.truncation_order):
            raise ValueError("series are not compatible for addition")
        return GammaSeries(
            self.layout, self.truncation_order, self.terms + other.terms,
            form=self.form,
            complete_below=min(self.complete_below, other.complete_below),
        )

    def __eq__(self, other) -> bool:
        return (isinstance(other, GammaSeries)
                and self.layout == other.layout
                and self.truncation_order == other.truncation_order
                and self.form == other.form
                and self.terms == other.terms)

    def __repr__(self) -> str:
        return (f"GammaSeries(order={self.truncation_order}, "
                f"form={self.form}, terms={len(self.terms)})")


class CoefficientOracle:
    """Supplies the coefficient C_m for each multi-index m.

    Implementations must be deterministic: the same m (and the same base
    values, for callable payloads) always yields the same result.
    """

    deterministic = True

    def coefficient(self, m):  # -> GammaTermValue | Callable | complex
        raise NotImplementedError


def gg_gamma_coefficient(m, u, layout: SeriesLayout,
                         form: str = "direct") -> GammaTermValue:
    """Closed-form coefficient for the monomial-weight kernel.

    Solves sum_j s0_j * w_j = u over exact complex rationals, shifts by
    the base coordinates of the series exponents, and returns
    prod_j Gamma(s_j(m)) * (-a_j)**(-s_j(m)) with the overall contour
    constant fixed to 1 (fitted against quadrature separately).  Terms
    whose argument lands on a Gamma pole are flagged, not dropped.
    """
    if layout.base is None:
        raise ValueError("a base is required for the closed-form coefficient")
    n = layout.exponents.dimension
    u = tuple(u) if isinstance(u, (list, tuple)) else (u,)
    if len(u) != n:
        raise ValueError(f"parameter vector has length {len(u)}, expected {n}")
    vectors = layout.base.vectors
    rows = [[ExactComplex.from_value(vectors[j][i]) for j in range(n)]
            for i in range(n)]
    rhs = [ExactComplex.from_value(ui) for ui in u]
    s = list(solve_exact(rows, rhs))
    m = tuple(int(x) for x in m)
    if len(m) != len(layout.series_vars):
        raise ValueError("multi-index does not match the layout")
    for mw, var in zip(m, layout.series_vars):
        if mw:
            for j, lj in enumerate(layout.coords(var)):
                s[j] = s[j] + ExactComplex.from_value(lj) * mw
    return GammaTermValue(ONE, tuple(s))


class GammaFunctionOracle(CoefficientOracle):
    """The closed-form Gamma-product coefficients for given parameters u."""

    def __init__(self, layout: SeriesLayout, u, form: str = "direct"):
        self.layout = layout
        self.u = u
        self.form = form

    def coefficient(self, m) -> GammaTermValue:
        return gg_gamma_coefficient(m, self.u, self.layout, self.form)


class CallableOracle(CoefficientOracle):
    """Wraps m -> (function of the base values)."""

    def __init__(self, fn: Callable, deterministic: bool = True):
        self.fn = fn
        self.deterministic = deterministic

    def coefficient(self, m) -> Callable:
        return self.fn(m)


def _weight(m) -> Fraction:
    w = Fraction(1)
    for mw in m:
        w /= math.factorial(mw)
    return w


def expand_general(exponents: ExponentSet, base: Base,
                   oracle: CoefficientOracle, order: int,
                   form: str = "direct") -> GammaSeries:
    """Series over A \\ B to the given order, coefficients from the oracle.

    Each multi-index m with |m| <= order contributes its oracle
    coefficient times 1 / prod m_w!.
    """
    layout = SeriesLayout(exponents, base)
    terms = []
    for m in multi_indices(len(layout.series_vars), order):
        weight = _weight(m)
        payload = oracle.coefficient(m)
        if isinstance(payload, GammaTermValue):
            terms.append(GammaTerm(m, payload.scalar * weight, payload.args))
        elif callable(payload):
            terms.append(OracleTerm(m, weight, payload))
        else:
            terms.append(NumericTerm(m, weight, complex(payload)))
    return GammaSeries(layout, order, terms, form=form)


def gg_series(exponents: ExponentSet, base: Base, u, order: int,
              form: str = "direct") -> GammaSeries:
    """Closed-form series for the monomial-weight kernel with parameters u."""
    layout = SeriesLayout(exponents, base)
    return expand_general(exponents, base,
                          GammaFunctionOracle(layout, u, form), order,
                          form=form)


def standard_expansion(center: SparsePolynomial, exponents: ExponentSet,
                       moment_oracle: Callable, order: int) -> GammaSeries:
    """Expansion around a center polynomial with all of A as series variables.

    ``moment_oracle(m)`` must return the integral of t**(sum m_w * w)
    times the weight against exp(center); no base is involved.
    """
    if center.dimension != exponents.dimension:
        raise ValueError("dimension mismatch between center and exponents")
    layout = SeriesLayout(exponents, None)
    terms = []
    for m in multi_indices(len(layout.series_vars), order):
        try:
            value = complex(moment_oracle(m))
        except Exception as exc:
            raise RuntimeError(f"moment oracle failed at m={m}") from exc
        terms.append(NumericTerm(m, _weight(m), value))
    return GammaSeries(layout, order, terms)


def _normalize_assignment(layout: SeriesLayout, assignment: Mapping):
    values = {}
    for key, val in assignment.items():
        if isinstance(key, CoeffVar):
            var = key
        else:
            if isinstance(key, int):
                key = (key,)
            var = CoeffVar(0, tuple(int(e) for e in key))
        values[var] = complex(val)
    missing = [v for v in layout.all_vars if v not in values]
    if missing:
        raise ValueError(f"assignment misses variables {missing}")
    return values


def _term_value(term, layout: SeriesLayout, values, form: str) -> complex:
    series_part = 1.0 + 0j
    for mw, var in zip(term.m, layout.series_vars):
        if mw:
            series_part *= values[var] ** mw
    if isinstance(term, GammaTerm):
        coeff = complex(term.scalar)
        for arg, var in zip(term.args, layout.base_vars):
            s = complex(arg)
            if form == "direct":
                coeff *= complex_gamma(s)
            else:
                coeff *= reciprocal_gamma(1 - s)
                if coeff == 0:
                    return 0j
            coeff *= negated_power(values[var], -s)
        return coeff * series_part
    if isinstance(term, OracleTerm):
        base_values = {var: values[var] for var in layout.base_vars}
        return float(term.weight) * complex(term.coefficient(base_values)) \
            * series_part
    return float(term.weight) * term.value * series_part


def evaluate_series(series: GammaSeries, assignment: Mapping):
    """Sum the stored terms at the given variable values.

    Returns (value, tail) where tail is the magnitude of the last
    order's contribution, the only truncation indicator available (the
    expansion carries no remainder bound).  Direct-form pole terms raise
    SeriesPoleError; a zero base value under a negative-real-part
    exponent raises ValueError.
    """
    values = _normalize_assignment(series.layout, assignment)
    total = 0j
    last_order = 0j
    for term in series.terms:
        if isinstance(term, GammaTerm) and series.form == "direct" \
                and term.is_pole():
            raise SeriesPoleError(
                f"term m={term.m} has a Gamma pole (args {[str(a) for a in term.args]})"
            )
        value = _term_value(term, series.layout, values, series.form)
        total += value
        if sum(term.m) == series.truncation_order:
            last_order += value
    return total, abs(last_order)
