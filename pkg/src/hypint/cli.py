"""Command line surface: system, series, eval and verify.

Reads a problem JSON file, runs the requested computation and writes a
report JSON document to stdout (and to --out when given).  Exit codes:
0 success / all checks passed, 1 verification failure, 2 input error,
3 numeric (divergence or accuracy) error.
"""

from __future__ import annotations

import argparse
import sys

from .lattice import Base, cayley_set, enumerate_bases, kernel_basis
from .operators import (box_operator, euler_t_operator, euler_y_operator,
                        gg_relation_operator, operator_text)
from .polynomials import CoeffVar, SparsePolynomial
from .problem_io import (Problem, ProblemFormatError, dump_report,
                         fraction_str, load_problem, make_report)
from .quadrature import (AlphaMonomial, AlphaOne, AlphaPowerProduct,
                         IntegrandSpec, QuadratureError, integrate)
from .series import GammaTerm, gg_series
from .verify import check_cayley_consistency, check_gg_system


def _op_struct(op, parameter=None, value=None) -> dict:
    terms = []
    for (mono, deriv), scalar in op.terms.items():
        c = complex(scalar)
        terms.append({
            "scalar": [c.real, c.imag],
            "monomial": [[str(v), p] for v, p in mono],
            "derivative": [[str(v), p] for v, p in deriv],
        })
    out = {"terms": terms}
    if parameter is not None:
        out["parameter"] = parameter
        out["parameter_value"] = value
    return out


def _unit_exponents(n):
    return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]


def cmd_system(problem: Problem) -> dict:
    """Operator listing: heat-type relations, box operators, Euler operators."""
    n = problem.dimension
    warnings = []
    heat, box, euler_t, euler_y = [], [], [], []

    def heat_entry(w, exponents, block=None):
        try:
            op = gg_relation_operator(w, exponents, block=block)
        except ValueError as exc:
            warnings.append(f"relation for exponent {list(w)} skipped: {exc}")
            return
        if op.is_zero():
            return
        heat.append({"omega": list(w), "text": operator_text(op),
                     **_op_struct(op)})

    if problem.blocks == 0:
        exponents = problem.exponent_sets[0]
        units_ok = all(e in exponents for e in _unit_exponents(n))
        if not units_ok:
            warnings.append(
                "linear unit exponents missing from the set: coefficient "
                "derivative relations skipped")
        else:
            for w in exponents.members:
                heat_entry(w, exponents)
        if len(exponents) > 1:
            for rel in kernel_basis(exponents):
                op = box_operator(rel)
                box.append({"relation": list(rel.coefficients),
                            "text": operator_text(op), **_op_struct(op)})
        for j in range(n):
            uj = problem.u[j] if problem.u is not None else 0j
            op = euler_t_operator(exponents, j + 1, uj)
            euler_t.append({
                "axis": j + 1,
                "text": operator_text(op, identity_label=f"u{j + 1}"),
                **_op_struct(op, parameter=f"u{j + 1}",
                             value=None if problem.u is None
                             else [uj.real, uj.imag]),
            })
    else:
        joined = cayley_set(*problem.exponent_sets)
        joined_vars = tuple(
            CoeffVar(i + 1, w)
            for i, s in enumerate(problem.exponent_sets) for w in s.members)
        zero = tuple(0 for _ in range(n))
        for i, s in enumerate(problem.exponent_sets):
            block = i + 1 if problem.blocks > 1 else 1
            if zero in s and all(e in s for e in _unit_exponents(n)):
                for w in s.members:
                    if sum(w) >= 2:
                        heat_entry(w, s, block=block)
        if len(joined) > 1:
            for rel in kernel_basis(joined):
                op = box_operator(rel.coefficients, joined_vars)
                box.append({"relation": list(rel.coefficients),
                            "text": operator_text(op), **_op_struct(op)})
        for i in range(problem.blocks):
            vi = problem.v[i] if i < len(problem.v) else 0j
            op = euler_y_operator(joined_vars, i + 1, vi)
            euler_y.append({
                "block": i + 1,
                "text": operator_text(op, identity_label=f"-v{i + 1}"),
                **_op_struct(op, parameter=f"v{i + 1}",
                             value=[vi.real, vi.imag] if i < len(problem.v)
                             else None),
            })
        for j in range(n):
            uj = problem.u[j] if problem.u is not None else 0j
            op = euler_t_operator(joined_vars, j + 1, uj)
            euler_t.append({
                "axis": j + 1,
                "text": operator_text(op, identity_label=f"u{j + 1}"),
                **_op_struct(op, parameter=f"u{j + 1}",
                             value=None if problem.u is None
                             else [uj.real, uj.imag]),
            })

    return {"heat_relations": heat, "box_operators": box,
            "euler_t_operators": euler_t, "euler_y_operators": euler_y,
            "warnings": warnings}


def cmd_series(problem: Problem, order: int | None = None,
               base_indices: tuple | None = None) -> dict:
    """Closed-form series dump to the requested order."""
    if problem.blocks != 0:
        raise ProblemFormatError(
            "series: only single-polynomial problems are supported; join "
            "the blocks into one exponent set first")
    if problem.u is None:
        raise ProblemFormatError("series: the parameter vector u is required")
    exponents = problem.exponent_sets[0]
    order = problem.order if order is None else order
    indices = base_indices if base_indices is not None else problem.base
    if indices is not None:
        try:
            base = Base(exponents, indices)
        except ValueError as exc:
            raise ProblemFormatError(f"base: {exc}") from None
    else:
        bases = enumerate_bases(exponents)
        if not bases:
            raise ProblemFormatError(
                "no base exists: no linearly independent subset of the "
                "exponent set")
        base = bases[0]

    series = gg_series(exponents, base, problem.u, order)
    terms = []
    for t in series.terms:
        assert isinstance(t, GammaTerm)
        scalar = complex(t.scalar)
        entry = {
            "m": list(t.m),
            "scalar": [scalar.real, scalar.imag],
            "scalar_exact": [fraction_str(t.scalar.re),
                             fraction_str(t.scalar.im)],
            "rho": [[fraction_str(r.re), fraction_str(r.im)]
                    for r in t.rho()],
            "flags": ["POLE"] if t.is_pole() else [],
        }
        terms.append(entry)
    return {
        "base": list(base.indices),
        "base_exponents": [list(w) for w in base.vectors],
        "series_exponents": [list(v.exponent)
                             for v in series.layout.series_vars],
        "order": order,
        "provenance": "gamma-closed-form",
        "terms": terms,
    }


def _alpha_for(problem: Problem):
    if problem.blocks == 0:
        if problem.u is None or all(x == 1 for x in problem.u):
            return AlphaOne()
        return AlphaMonomial(problem.u)
    polys = _block_polys(problem)
    if len(problem.v) != problem.blocks:
        raise ProblemFormatError("v: one exponent per block is required")
    u = problem.u if problem.u is not None else (1.0,) * problem.dimension
    return AlphaPowerProduct(polys, problem.v, u)


def _block_polys(problem: Problem):
    return tuple(
        SparsePolynomial(problem.dimension, coeffs)
        for coeffs in problem.coefficients
    )


def cmd_eval(problem: Problem, tol: float | None = None) -> dict:
    """Contour quadrature of the problem's integral."""
    if problem.contour is None:
        raise ProblemFormatError("eval: a contour is required")
    tol = problem.quad_tol if tol is None else tol
    alpha = _alpha_for(problem)
    if problem.blocks == 0:
        P = SparsePolynomial(problem.dimension, problem.coefficients[0])
    else:
        P = SparsePolynomial.zero(problem.dimension)
    value, err = integrate(IntegrandSpec(P, alpha), problem.contour, tol)
    return {"value": [value.real, value.imag], "err_estimate": err,
            "tol": tol}


def cmd_verify(problem: Problem, tol: float | None = None) -> dict:
    """Finite-difference residuals of the generated system."""
    if problem.contour is None:
        raise ProblemFormatError("verify: a contour is required")
    if problem.u is None:
        raise ProblemFormatError("verify: the parameter vector u is required")
    quad_tol = problem.quad_tol if tol is None else tol
    if problem.blocks == 0:
        reports = check_gg_system(
            problem.exponent_sets[0], problem.u,
            center=problem.coefficients[0], contour=problem.contour,
            h=problem.fd_step, tol=problem.residual_tol, quad_tol=quad_tol,
            operator_u=problem.euler_u)
    else:
        if len(problem.v) != problem.blocks:
            raise ProblemFormatError("verify: one v per block is required")
        reports = check_cayley_consistency(
            _block_polys(problem), problem.v, problem.u, problem.contour,
            exponent_sets=problem.exponent_sets, h=problem.fd_step,
            tol=problem.residual_tol, quad_tol=quad_tol,
            operator_u=problem.euler_u, operator_v=problem.euler_v)
    return {
        "reports": [r.to_dict() for r in reports],
        "all_passed": all(r.passed for r in reports),
        "residual_tol": problem.residual_tol,
    }


def _parse_base_arg(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ProblemFormatError(
            f"--base: expected comma-separated indices, got {text!r}") from None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hypint",
        description="Differential systems, series expansions and contour "
                    "quadrature for exponential-of-polynomial integrals.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("system", "emit the generated differential operators"),
        ("series", "expand the base-indexed coefficient series"),
        ("eval", "evaluate the integral by contour quadrature"),
        ("verify", "check the system against quadrature by finite differences"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("problem", help="problem JSON file")
        p.add_argument("--order", type=int, default=None,
                       help="series truncation order override")
        p.add_argument("--tol", type=float, default=None,
                       help="quadrature tolerance override")
        p.add_argument("--base", type=str, default=None,
                       help="comma-separated base member indices")
        p.add_argument("--out", type=str, default=None,
                       help="write the report JSON to this file as well")
    args = parser.parse_args(argv)

    try:
        problem = load_problem(args.problem)
        if args.command == "system":
            results = cmd_system(problem)
        elif args.command == "series":
            base = None if args.base is None else _parse_base_arg(args.base)
            results = cmd_series(problem, order=args.order, base_indices=base)
        elif args.command == "eval":
            results = cmd_eval(problem, tol=args.tol)
        else:
            results = cmd_verify(problem, tol=args.tol)
    except ProblemFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2

    report = make_report(args.command, problem, results)
    text = dump_report(report)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.command == "verify" and not results["all_passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
