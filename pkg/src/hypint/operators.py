"""Formal differential operators in the coefficient variables.

An operator is a sum of terms scalar * (coefficient monomial) * (partial
derivative monomial), held in normal form with the derivatives to the
right.  The generators produced here are the box operators attached to
integer relations among exponents, the Euler (homogeneity) operators,
and the heat-type relations expressing a higher coefficient derivative
through the linear ones.

Application to a closed-form series is exact: differentiating a power
function shifts its Gamma argument (the Pochhammer factor is absorbed
by the shift identity), so generated operators annihilate the series by
exact rational cancellation up to the truncation boundary.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .exact import ExactComplex
from .lattice import ExponentSet, LatticeRelation
from .polynomials import CoeffVar
from .series import GammaSeries, GammaTerm, SeriesLayout


def _as_power_key(powers: Iterable) -> tuple:
    merged = {}
    for var, p in powers:
        if not isinstance(var, CoeffVar):
            raise TypeError(f"expected CoeffVar, got {var!r}")
        p = int(p)
        if p < 0:
            raise ValueError("negative power in operator term")
        if p:
            merged[var] = merged.get(var, 0) + p
    return tuple(sorted(merged.items()))


class DiffOperator:
    """Sum of scalar * monomial * derivative terms, in normal form.

    Terms keep their construction order (which fixes the rendered text)
    but equality and arithmetic treat the term map as unordered.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable = ()):
        normal = {}
        for mono, deriv, scalar in terms:
            key = (_as_power_key(mono), _as_power_key(deriv))
            scalar = ExactComplex.from_value(scalar)
            if key in normal:
                normal[key] = normal[key] + scalar
            else:
                normal[key] = scalar
        object.__setattr__(
            self, "terms", {k: v for k, v in normal.items() if not v.is_zero()}
        )

    def __setattr__(self, name, value):
        raise AttributeError("DiffOperator is immutable")

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> tuple:
        seen = []
        for mono, deriv in self.terms:
            for var, _ in mono + deriv:
                if var not in seen:
                    seen.append(var)
        return tuple(seen)

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        combined = [(m, d, s) for (m, d), s in self.terms.items()]
        combined += [(m, d, s) for (m, d), s in other.terms.items()]
        return DiffOperator(combined)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator([(m, d, -s) for (m, d), s in self.terms.items()])

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def __rmul__(self, factor) -> "DiffOperator":
        factor = ExactComplex.from_value(factor)
        return DiffOperator(
            [(m, d, factor * s) for (m, d), s in self.terms.items()]
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffOperator) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        return operator_text(self)

    __repr__ = __str__


def _scalar_text(scalar: ExactComplex) -> tuple:
    """Returns (sign, body or None); body None means magnitude one."""
    if scalar.im == 0:
        sign = "-" if scalar.re < 0 else "+"
        mag = abs(scalar.re)
        return sign, None if mag == 1 else str(mag)
    return "+", f"({scalar})"


def operator_text(op: DiffOperator, identity_label: str | None = None) -> str:
    """Fixed text grammar: D[cNAME]^k factors joined by '*', terms by
    ' + '/' - '; coefficient variables named c{block}_{exponents}."""
    if op.is_zero():
        return "0"
    pieces = []
    for (mono, deriv), scalar in op.terms.items():
        if not mono and not deriv and identity_label is not None:
            sign = "-" if identity_label.startswith("-") else "+"
            pieces.append((sign, identity_label.lstrip("-")))
            continue
        sign, scalar_body = _scalar_text(scalar)
        factors = [] if scalar_body is None else [scalar_body]
        factors += [
            str(var) + (f"^{p}" if p > 1 else "") for var, p in mono
        ]
        factors += [
            f"D[{var}]" + (f"^{p}" if p > 1 else "") for var, p in deriv
        ]
        if not factors:
            factors = [str(abs(scalar.re)) if scalar.im == 0 else f"({scalar})"]
        pieces.append((sign, "*".join(factors)))
    sign0, body0 = pieces[0]
    text = ("-" if sign0 == "-" else "") + body0
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def _block_vars(exponents: ExponentSet, block: int = 0) -> tuple:
    return tuple(CoeffVar(block, w) for w in exponents.members)


def box_operator(relation, variables: Sequence | None = None) -> DiffOperator:
    """The binomial operator D^(u+) - D^(u-) attached to an integer relation.

    ``relation`` is a LatticeRelation (variables default to block-0 names
    for its exponent set) or a raw coefficient sequence with explicit
    ``variables``.
    """
    if isinstance(relation, LatticeRelation):
        coeffs = relation.coefficients
        if variables is None:
            variables = _block_vars(relation.exponents)
    else:
        coeffs = tuple(int(c) for c in relation)
        if variables is None:
            raise ValueError("raw relations need explicit variables")
    variables = tuple(variables)
    if len(variables) != len(coeffs):
        raise ValueError("relation and variable list differ in length")
    if all(c == 0 for c in coeffs):
        raise ValueError("zero relation has no box operator")
    plus = [(v, c) for v, c in zip(variables, coeffs) if c > 0]
    minus = [(v, -c) for v, c in zip(variables, coeffs) if c < 0]
    return DiffOperator([((), plus, 1), ((), minus, -1)])


def _euler_vars(source) -> tuple:
    if isinstance(source, ExponentSet):
        return _block_vars(source)
    return tuple(source)


def euler_t_operator(source, axis: int, u_j) -> DiffOperator:
    """Homogeneity operator in t_axis: sum_w w^axis c_w D[c_w] + u_axis.

    ``source`` is an ExponentSet (single-polynomial variables) or a
    sequence of CoeffVar whose exponents live in the t variables.
    """
    variables = _euler_vars(source)
    if axis < 1:
        raise ValueError("axis is 1-based")
    terms = []
    for var in variables:
        if axis > len(var.exponent):
            raise ValueError(f"axis {axis} exceeds exponent length of {var}")
        weight = var.exponent[axis - 1]
        if weight:
            terms.append((((var, 1),), ((var, 1),), weight))
    terms.append(((), (), u_j))
    return DiffOperator(terms)


def euler_y_operator(source, block: int, v_i) -> DiffOperator:
    """Block homogeneity operator: sum_{w in block} c_w D[c_w] - v_block."""
    variables = _euler_vars(source)
    terms = [(((var, 1),), ((var, 1),), 1)
             for var in variables if var.block == block]
    terms.append(((), (), -ExactComplex.from_value(v_i)))
    return DiffOperator(terms)


def gg_relation_operator(omega, exponents: ExponentSet,
                         block: int | None = None) -> DiffOperator:
    """Expresses D[c_omega] through the low-order coefficient derivatives.

    Plain form: D[c_omega] - D[c_e1]^w1 ... D[c_en]^wn, requiring the
    set to contain omega and all unit exponents.  With ``block`` the
    constant-term variant is built instead:
    D[c_0]^(|omega|-1) * D[c_omega] - prod_j D[c_ej]^wj, additionally
    requiring the constant exponent in the set.
    """
    n = exponents.dimension
    if isinstance(omega, int):
        omega = (omega,)
    omega = tuple(int(e) for e in omega)
    if len(omega) != n:
        raise ValueError("omega does not match the exponent dimension")
    if omega not in exponents:
        raise ValueError(f"{omega} is not a member of the exponent set")
    units = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    missing = [e for e in units if e not in exponents]
    if missing:
        raise ValueError(f"missing linear exponents {missing}")
    blk = 0 if block is None else block
    rhs = [(CoeffVar(blk, units[j]), omega[j])
           for j in range(n) if omega[j] > 0]
    if block is None:
        lhs = [(CoeffVar(blk, omega), 1)]
    else:
        zero = tuple(0 for _ in range(n))
        if zero not in exponents:
            raise ValueError("the constant exponent is required for the "
                             "block form")
        total = sum(omega)
        if total < 1:
            raise ValueError("block form needs |omega| >= 1")
        lhs = [(CoeffVar(blk, zero), total - 1), (CoeffVar(blk, omega), 1)]
    return DiffOperator([((), lhs, 1), ((), rhs, -1)])


def _shift_down(mono, deriv, layout: SeriesLayout) -> int:
    down = 0
    for var, p in deriv:
        if layout.role(var) == "series":
            down += p
    for var, p in mono:
        if layout.role(var) == "series":
            down -= p
    return max(down, 0)


def apply_to_series(op: DiffOperator, series: GammaSeries) -> GammaSeries:
    """Apply an operator to a closed-form series, exactly.

    Derivatives act first, then the coefficient monomial.  Derivatives
    in a base variable shift the Gamma argument (scalar untouched in the
    direct form); derivatives in a series variable use the integer power
    rule on exact rational scalars.  The result is truncated to the
    input order; ``complete_below`` marks where truncation may have
    removed cancelling partners.
    """
    layout = series.layout
    if not series.is_closed_form():
        raise ValueError("operator application needs a closed-form series")
    for var in op.variables():
        layout.role(var)  # raises KeyError on a variable mismatch
    reciprocal = series.form == "reciprocal"
    series_index = {var: i for i, var in enumerate(layout.series_vars)}
    base_index = {var: j for j, var in enumerate(layout.base_vars)}

    out_terms = []
    max_down = 0
    for (mono, deriv), op_scalar in op.terms.items():
        max_down = max(max_down, _shift_down(mono, deriv, layout))
        for term in series.terms:
            m = list(term.m)
            args = list(term.args)
            scalar = term.scalar * op_scalar
            dead = False
            for var, p in deriv:
                if var in series_index:
                    i = series_index[var]
                    if m[i] < p:
                        dead = True
                        break
                    for step in range(p):
                        scalar = scalar * (m[i] - step)
                    m[i] -= p
                else:
                    j = base_index[var]
                    if reciprocal and p % 2:
                        scalar = -scalar
                    args[j] = args[j].shifted(p)
            if dead or scalar.is_zero():
                continue
            for var, p in mono:
                if var in series_index:
                    m[series_index[var]] += p
                else:
                    j = base_index[var]
                    for _ in range(p):
                        shifted = args[j].shifted(-1)
                        scalar = scalar * (shifted if reciprocal else -shifted)
                        args[j] = shifted
            if sum(m) <= series.truncation_order:
                out_terms.append(GammaTerm(tuple(m), scalar, tuple(args)))
    complete = min(series.complete_below, series.truncation_order + 1) - max_down
    return GammaSeries(layout, series.truncation_order, out_terms,
                       form=series.form, complete_below=max(complete, 0))
