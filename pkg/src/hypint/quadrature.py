"""Adaptive quadrature of exp(P) integrals on explicit product contours.

Evaluates integrals of exp(P(t)) * alpha(t) dt1..dtn for n <= 3, where
alpha is 1, a monomial t^(u-1), or a product of polynomial powers
P_1^v_1 .. P_k^v_k t^(u-1), over one parametric complex path chain per
variable.  The driver is iterated one-dimensional adaptive integration,
innermost variable first, using interval halving with an embedded
Gauss7/Kronrod15 pair so every subinterval carries its own error
estimate.

Unbounded legs are truncated where the integrand magnitude falls below
1e-18 of its on-leg maximum; before that a decay check requires
Re P < -50 within the sampled range, otherwise the integral is declared
divergent.  For multivalued factors (non-integer exponents) the
argument of each factor is continued along each leg by accumulating
argument increments between consecutive sample points on a refined
grid; quadrature nodes then pick up the winding number nearest to the
tracked argument, which makes branch-corrected evaluation independent
of the order in which the adaptive rule visits the points.  Power
products with non-integer exponents are supported in one variable
(their branch structure on higher-dimensional product contours is not
modeled); integer powers work in any dimension.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .polynomials import SparsePolynomial

TWO_PI = 2.0 * math.pi

DECAY_RE_P = -50.0          # required exponent decay on unbounded legs
MAGNITUDE_CUT = 1e-18       # truncation threshold relative to on-leg max
VANISH_TOL = 1e-12          # multivalued factor may not vanish on a leg
ABS_FLOOR = 1e-14           # below this magnitude relative error is moot


class QuadratureError(Exception):
    """Base class for numeric contour-integration failures."""


class DivergenceError(QuadratureError):
    """An unbounded leg fails the decay check."""


class AccuracyError(QuadratureError):
    """The requested tolerance was not met; carries the best estimate."""

    def __init__(self, message, value, err_estimate):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


# ----------------------------------------------------------------------
# contour description


def _check_orientation(orientation):
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex
    orientation: int = 1

    def __post_init__(self):
        _check_orientation(self.orientation)
        if complex(self.start) == complex(self.end):
            raise ValueError("segment endpoints must be distinct")


@dataclass(frozen=True)
class Ray:
    """From ``start`` to infinity along exp(i*angle)."""

    start: complex
    angle: float
    orientation: int = 1

    def __post_init__(self):
        _check_orientation(self.orientation)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    angle_start: float
    angle_end: float
    orientation: int = 1

    def __post_init__(self):
        _check_orientation(self.orientation)
        if not self.radius > 0:
            raise ValueError("arc radius must be positive")
        if self.angle_start == self.angle_end:
            raise ValueError("arc must span a nonzero angle")


@dataclass(frozen=True)
class Line:
    """The full rotated line t = exp(i*angle) * x, x real."""

    angle: float
    orientation: int = 1

    def __post_init__(self):
        _check_orientation(self.orientation)


Leg = Segment | Ray | Arc | Line

_INF = object()  # marker for an endpoint at infinity


def _leg_endpoints(leg):
    """Effective (start, end) after applying the orientation."""
    if isinstance(leg, Segment):
        ends = (complex(leg.start), complex(leg.end))
    elif isinstance(leg, Ray):
        ends = (complex(leg.start), _INF)
    elif isinstance(leg, Arc):
        ends = (
            leg.center + leg.radius * np.exp(1j * leg.angle_start),
            leg.center + leg.radius * np.exp(1j * leg.angle_end),
        )
    else:
        ends = (_INF, _INF)
    return ends if leg.orientation == 1 else ends[::-1]


def _validate_chain(chain):
    if not chain:
        raise ValueError("empty contour chain")
    for leg in chain:
        if isinstance(leg, Line) and len(chain) > 1:
            raise ValueError("a full line must be the only leg of its chain")
    for a, b in zip(chain, chain[1:]):
        end = _leg_endpoints(a)[1]
        start = _leg_endpoints(b)[0]
        if end is _INF or start is _INF:
            raise ValueError("an unbounded end must terminate its chain")
        if abs(end - start) > 1e-9 * (1.0 + abs(end)):
            raise ValueError(
                f"chain is disconnected: leg ends at {end}, next starts at {start}"
            )


@dataclass(frozen=True)
class ProductContour:
    """One leg chain per variable plus starting arguments for the
    multivalued factors (keys ("t", j) and ("P", i), 1-based)."""

    chains: tuple
    branch_data: tuple = ()

    def __init__(self, chains: Sequence, branch_data: Mapping | None = None):
        chains = tuple(tuple(chain) for chain in chains)
        for chain in chains:
            _validate_chain(chain)
        items = tuple(sorted((branch_data or {}).items()))
        object.__setattr__(self, "chains", chains)
        object.__setattr__(self, "branch_data", items)

    def start_arg(self, key):
        for k, v in self.branch_data:
            if k == key:
                return float(v)
        return None


# ----------------------------------------------------------------------
# integrand description


@dataclass(frozen=True)
class AlphaOne:
    pass


@dataclass(frozen=True)
class AlphaMonomial:
    u: tuple

    def __init__(self, u):
        u = tuple(complex(x) for x in (u if isinstance(u, (tuple, list)) else (u,)))
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class AlphaPowerProduct:
    polys: tuple
    v: tuple
    u: tuple

    def __init__(self, polys, v, u=None):
        polys = tuple(polys)
        v = tuple(complex(x) for x in v)
        if len(polys) != len(v):
            raise ValueError("need one exponent per polynomial factor")
        if u is None:
            u = (1.0,) * polys[0].dimension if polys else ()
        u = tuple(complex(x) for x in (u if isinstance(u, (tuple, list)) else (u,)))
        object.__setattr__(self, "polys", polys)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class IntegrandSpec:
    P: SparsePolynomial
    alpha: object  # AlphaOne | AlphaMonomial | AlphaPowerProduct

    def __post_init__(self):
        n = self.P.dimension
        if isinstance(self.alpha, AlphaMonomial) and len(self.alpha.u) != n:
            raise ValueError("monomial parameter length must equal the dimension")
        if isinstance(self.alpha, AlphaPowerProduct):
            if len(self.alpha.u) != n:
                raise ValueError("parameter length must equal the dimension")
            for p in self.alpha.polys:
                if p.dimension != n:
                    raise ValueError("power-product factors must share the dimension")


def _is_int(x: complex) -> bool:
    return x.imag == 0 and float(x.real).is_integer()


# ----------------------------------------------------------------------
# Gauss7/Kronrod15 rule

_XGK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])
_GAUSS_IDX = np.arange(1, 15, 2)


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _XGK
    fx = np.asarray(f(x), dtype=complex)
    kron = half * np.dot(_WGK, fx)
    gauss = half * np.dot(_WG, fx[_GAUSS_IDX])
    return kron, abs(kron - gauss)


def adaptive_quadrature(f, a, b, rel_tol, abs_floor, max_intervals=4096,
                        what="integral"):
    """Adaptive interval-halving with the embedded Gauss/Kronrod pair.

    ``f`` is evaluated on numpy arrays of points.  Returns (value, err);
    raises AccuracyError carrying the best estimate when the budget or
    the bisection depth is exhausted.
    """
    pieces = np.linspace(a, b, 9)
    heap = []
    total = 0j
    err_total = 0.0
    mass = 0.0
    stuck_err = 0.0
    tiebreak = 0
    for lo, hi in zip(pieces, pieces[1:]):
        val, err = _gk15(f, lo, hi)
        total += val
        err_total += err
        mass += abs(val)
        heapq.heappush(heap, (-err, tiebreak, lo, hi, val))
        tiebreak += 1
    count = len(heap)

    def target():
        # the roundoff floor relative to the accumulated mass is the best
        # double precision can do when the integrand cancels
        return max(abs_floor, rel_tol * abs(total), 5e-16 * mass)

    while err_total > target():
        if count >= max_intervals or not heap:
            raise AccuracyError(
                f"tolerance not met for {what} after {count} intervals "
                f"(err {err_total:.3e}, value {total:.6e})",
                total, err_total,
            )
        neg_err, _, lo, hi, val = heapq.heappop(heap)
        if hi - lo < max(1e-15 * max(abs(lo), abs(hi)), 5e-300):
            # cannot usefully subdivide; its error stays in the total
            stuck_err -= neg_err
            if stuck_err > target():
                raise AccuracyError(
                    f"bisection depth exhausted for {what} "
                    f"(err {err_total:.3e}, value {total:.6e})",
                    total, err_total,
                )
            continue
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += v1 + v2 - val
        err_total += e1 + e2 + neg_err  # neg_err subtracts the old estimate
        mass += abs(v1) + abs(v2) - abs(val)
        heapq.heappush(heap, (-e1, tiebreak, lo, mid, v1))
        heapq.heappush(heap, (-e2, tiebreak + 1, mid, hi, v2))
        tiebreak += 2
        count += 1
    return total, err_total, 5e-16 * mass


# ----------------------------------------------------------------------
# leg parametrization

class _Path:
    """A leg mapped onto tau in [0, 1], orientation already applied."""

    def __init__(self, leg, index, map_fn, dmap_fn):
        self.leg = leg
        self.index = index
        self.map = map_fn
        self.dmap = dmap_fn

    def describe(self):
        return f"leg {self.index + 1} ({type(self.leg).__name__})"


def _segment_path(leg, index, z0, z1):
    d = z1 - z0
    return _Path(leg, index, lambda t: z0 + d * t, lambda t: np.full_like(t, d, dtype=complex))


def _make_path(leg, index, cut):
    """cut: (R,) for a ray, (Rneg, Rpos) for a line, ignored otherwise."""
    if isinstance(leg, Segment):
        z0, z1 = (leg.start, leg.end) if leg.orientation == 1 else (leg.end, leg.start)
        return _segment_path(leg, index, complex(z0), complex(z1))
    if isinstance(leg, Ray):
        direction = np.exp(1j * leg.angle)
        far = complex(leg.start) + direction * cut[0]
        if leg.orientation == 1:
            return _segment_path(leg, index, complex(leg.start), far)
        return _segment_path(leg, index, far, complex(leg.start))
    if isinstance(leg, Line):
        direction = np.exp(1j * leg.angle)
        z0 = -direction * cut[0]
        z1 = direction * cut[1]
        if leg.orientation == 1:
            return _segment_path(leg, index, z0, z1)
        return _segment_path(leg, index, z1, z0)
    # Arc
    th0, th1 = leg.angle_start, leg.angle_end
    if leg.orientation == -1:
        th0, th1 = th1, th0
    span = th1 - th0
    c, r = complex(leg.center), leg.radius

    def zmap(t):
        return c + r * np.exp(1j * (th0 + span * t))

    def dmap(t):
        return 1j * r * span * np.exp(1j * (th0 + span * t))

    return _Path(leg, index, zmap, dmap)


# ----------------------------------------------------------------------
# branch tracking

def _wrap_angle(delta):
    return (delta + math.pi) % TWO_PI - math.pi


class _BranchTracker:
    """Continued argument of one factor along one already-built path."""

    def __init__(self, base_fn, path, start_arg, what):
        taus = np.linspace(1e-9, 1.0 - 1e-9, 129)
        for _ in range(14):
            vals = base_fn(path.map(taus))
            pr = np.angle(vals)
            gaps = np.abs(_wrap_angle(np.diff(pr)))
            bad = np.nonzero(gaps > 0.6)[0]
            if bad.size == 0:
                break
            mids = 0.5 * (taus[bad] + taus[bad + 1])
            taus = np.sort(np.concatenate([taus, mids]))
        else:
            raise QuadratureError(
                f"branch tracking failed to resolve the argument of {what} "
                f"on {path.describe()}"
            )
        interior = (taus > 1e-6) & (taus < 1.0 - 1e-6)
        if np.any(np.abs(vals[interior]) < VANISH_TOL):
            raise QuadratureError(
                f"{what} vanishes on {path.describe()}; the branch cannot "
                "be continued"
            )
        cont = np.empty_like(pr)
        k0 = round((start_arg - pr[0]) / TWO_PI)
        cont[0] = pr[0] + TWO_PI * k0
        cont[1:] = cont[0] + np.cumsum(_wrap_angle(np.diff(pr)))
        self.taus = taus
        self.cont = cont
        self.base_fn = base_fn

    @property
    def end_arg(self):
        return float(self.cont[-1])

    def args_at(self, taus, base_vals):
        principal = np.angle(base_vals)
        estimate = np.interp(taus, self.taus, self.cont)
        k = np.round((estimate - principal) / TWO_PI)
        return principal + TWO_PI * k


def _tracked_power(base_vals, tracker, taus, exponent):
    """base**exponent with the argument supplied by the tracker."""
    mags = np.abs(base_vals)
    args = tracker.args_at(taus, base_vals)
    return np.exp(exponent * (np.log(mags) + 1j * args))


# ----------------------------------------------------------------------
# the iterated driver

def _collapse_along(P: SparsePolynomial, fixed: dict, axis: int):
    """Partial evaluation of P: all variables fixed except ``axis``;
    returns {degree: coefficient}."""
    out = {}
    for exponent, coeff in P.terms.items():
        value = coeff
        for j, e in enumerate(exponent):
            if j != axis and e:
                value *= fixed[j] ** e
        d = exponent[axis]
        out[d] = out.get(d, 0j) + value
    return out


def _eval_collapsed(coeffs: dict, z):
    total = np.zeros_like(z, dtype=complex)
    for d, c in coeffs.items():
        total = total + (c * z ** d if d else c)
    return total


class _Run:
    def __init__(self, spec, contour, tol):
        self.spec = spec
        self.contour = contour
        self.tol = tol
        self.n = spec.P.dimension
        self.inner_rel = 0.0
        alpha = spec.alpha
        self.u = getattr(alpha, "u", None)
        self.power_polys = getattr(alpha, "polys", ())
        self.power_v = getattr(alpha, "v", ())

    def monomial_exponent(self, j):
        if self.u is None:
            return None
        rho = self.u[j] - 1.0
        return None if rho == 0 else rho


def _representatives(chain):
    points = []
    for leg in chain[:1] + chain[-1:]:
        for end in _leg_endpoints(leg):
            if end is not _INF:
                points.append(complex(end))
    first = chain[0]
    if isinstance(first, Segment):
        points.append(0.5 * (complex(first.start) + complex(first.end)))
    elif isinstance(first, Ray):
        points.append(complex(first.start) + np.exp(1j * first.angle))
    elif isinstance(first, Line):
        points.append(0j)
    else:
        points.append(complex(first.center) + first.radius
                      * np.exp(1j * 0.5 * (first.angle_start + first.angle_end)))
    unique = []
    for p in points:
        if not any(abs(p - q) < 1e-12 for q in unique):
            unique.append(p)
    return unique[:3]


def _suffix_all(mask):
    """suffix_all[i] = all(mask[i:])"""
    out = np.empty_like(mask)
    acc = True
    for i in range(len(mask) - 1, -1, -1):
        acc = acc and bool(mask[i])
        out[i] = acc
    return out


def _truncate_unbounded(run, leg, j, fixed, anchor, direction, what):
    """Find the radius along anchor + direction*r where the integrand has
    decayed for every representative slice of the inner variables."""
    radii = np.concatenate([[0.0], np.geomspace(1e-4, 1e8, 121)])
    z = anchor + direction * radii
    inner_chains = [run.contour.chains[i] for i in range(j + 1, run.n)]
    combos = [()]
    for chain in inner_chains:
        combos = [c + (p,) for c in combos for p in _representatives(chain)]

    ok_decay = np.ones(len(radii), dtype=bool)
    log_mag = np.full(len(radii), -np.inf)
    rho = run.monomial_exponent(j)
    for combo in combos:
        fixed_all = dict(fixed)
        fixed_all[j] = None
        for idx, val in zip(range(j + 1, run.n), combo):
            fixed_all[idx] = val
        coeffs = _collapse_along(run.spec.P, fixed_all, j)
        re_p = _eval_collapsed(coeffs, z).real
        ok_decay &= re_p < DECAY_RE_P
        lm = re_p.copy()
        if rho is not None:
            with np.errstate(divide="ignore"):
                lm = lm + rho.real * np.log(np.maximum(np.abs(z), 1e-300))
        if run.n == 1:
            for poly, v in zip(run.power_polys, run.power_v):
                pv = np.abs(_eval_collapsed(_collapse_along(poly, fixed_all, j), z))
                with np.errstate(divide="ignore"):
                    lm = lm + v.real * np.log(np.maximum(pv, 1e-300))
        log_mag = np.maximum(log_mag, lm)

    finite = log_mag[np.isfinite(log_mag)]
    peak = np.max(finite) if finite.size else 0.0
    small = log_mag < peak + math.log(MAGNITUDE_CUT)
    good = _suffix_all(ok_decay & small)
    idx = np.nonzero(good)[0]
    if idx.size == 0 or idx[0] == 0:
        if idx.size and idx[0] == 0:
            idx = idx[1:]
        if idx.size == 0:
            raise DivergenceError(
                f"no decay of Re P below {DECAY_RE_P} along {what}; "
                "the integral diverges on this contour"
            )
    cut = radii[min(idx[0] + 2, len(radii) - 1)]
    return cut


def _build_paths(run, j, fixed):
    paths = []
    for index, leg in enumerate(run.contour.chains[j]):
        what = f"variable {j + 1}, leg {index + 1} ({type(leg).__name__})"
        if isinstance(leg, Ray):
            cut = (_truncate_unbounded(run, leg, j, fixed, complex(leg.start),
                                       np.exp(1j * leg.angle), what),)
        elif isinstance(leg, Line):
            d = np.exp(1j * leg.angle)
            cut = (
                _truncate_unbounded(run, leg, j, fixed, 0j, -d, what + " (negative end)"),
                _truncate_unbounded(run, leg, j, fixed, 0j, d, what + " (positive end)"),
            )
        else:
            cut = ()
        paths.append(_make_path(leg, index, cut))
    return paths


def _build_trackers(run, j, paths):
    """Trackers for the multivalued factors that vary with variable j."""
    needed = []
    rho = run.monomial_exponent(j)
    if rho is not None and not _is_int(rho):
        needed.append((("t", j + 1), lambda z: z))
    if run.n == 1:
        for i, (poly, v) in enumerate(zip(run.power_polys, run.power_v)):
            if not _is_int(v):
                coeffs = _collapse_along(poly, {0: None}, 0)
                needed.append((("P", i + 1),
                               lambda z, c=coeffs: _eval_collapsed(c, z)))
    trackers = {}
    for key, base_fn in needed:
        start = run.contour.start_arg(key)
        if start is None:
            raise ValueError(
                f"branch data for factor {key} is required (non-integer "
                "exponent) but was not supplied"
            )
        per_leg = []
        arg = start
        for path in paths:
            tr = _BranchTracker(base_fn, path, arg,
                                f"factor {key[0]}{key[1]}")
            per_leg.append(tr)
            arg = tr.end_arg
        trackers[key] = (base_fn, per_leg)
    return trackers


def _level_value(run, j, fixed, rel_tol):
    paths = _build_paths(run, j, fixed)
    trackers = _build_trackers(run, j, paths)
    rho = run.monomial_exponent(j)
    innermost = j == run.n - 1
    if innermost:
        kernel_coeffs = _collapse_along(run.spec.P, {**fixed, j: None}, j)
        power_coeffs = [
            _collapse_along(poly, {**fixed, j: None}, j)
            for poly in run.power_polys
        ]

    total = 0j
    err_total = 0.0
    floor_total = 0.0
    for leg_idx, path in enumerate(paths):
        def f(taus, path=path, leg_idx=leg_idx):
            z = path.map(taus)
            val = np.ones_like(z, dtype=complex)
            if rho is not None:
                key = ("t", j + 1)
                if key in trackers:
                    val = val * _tracked_power(z, trackers[key][1][leg_idx],
                                               taus, rho)
                else:
                    val = val * z ** int(rho.real)
            if innermost:
                val = val * np.exp(_eval_collapsed(kernel_coeffs, z))
                for i, (pc, v) in enumerate(zip(power_coeffs, run.power_v)):
                    key = ("P", i + 1)
                    pvals = _eval_collapsed(pc, z)
                    if key in trackers:
                        val = val * _tracked_power(
                            pvals, trackers[key][1][leg_idx], taus, v)
                    else:
                        val = val * pvals ** int(v.real)
            else:
                inner = np.empty_like(z, dtype=complex)
                for idx, zz in enumerate(z):
                    inner[idx] = _level_value(run, j + 1, {**fixed, j: complex(zz)},
                                              rel_tol * 0.5)
                val = val * inner
            return val * path.dmap(taus)

        value, err, floor = adaptive_quadrature(
            f, 0.0, 1.0, rel_tol, ABS_FLOOR / len(paths),
            what=f"variable {j + 1}, {path.describe()}",
        )
        total += value
        err_total += err
        floor_total += floor

    if j > 0:
        # When the inner stop was governed by the absolute or roundoff
        # floor the pointwise perturbation of the outer integrand is at
        # noise level; only the excess beyond the floors matters.
        excess = err_total - 2.0 * ABS_FLOOR - floor_total
        if excess > 0 and abs(total) > 0:
            run.inner_rel = max(run.inner_rel, excess / abs(total))
    else:
        run.outer_err = err_total
        run.outer_floor = floor_total
    return total


def integrate(spec: IntegrandSpec, contour: ProductContour, tol: float = 1e-9):
    """Integrate exp(P) * alpha over the product contour.

    Returns (value, err_estimate).  Raises DivergenceError when an
    unbounded leg fails the decay check, AccuracyError when the
    tolerance cannot be met, and ValueError for structural problems
    (dimension mismatches, missing branch data).
    """
    n = spec.P.dimension
    if n > 3:
        raise ValueError("only up to three variables are supported")
    if len(contour.chains) != n:
        raise ValueError(
            f"contour has {len(contour.chains)} chains for {n} variables"
        )
    for i, (poly, v) in enumerate(
            zip(getattr(spec.alpha, "polys", ()), getattr(spec.alpha, "v", ()))):
        if not _is_int(v) and n > 1:
            raise ValueError(
                "non-integer power-product exponents are supported in one "
                "variable only"
            )
    run = _Run(spec, contour, tol)
    run.outer_err = 0.0
    run.outer_floor = 0.0
    value = _level_value(run, 0, {}, tol * 0.5)
    err = run.outer_err + run.inner_rel * abs(value)
    # saturation at the double-precision roundoff floor of a cancelling
    # integrand counts as converged: the honest error estimate is returned
    acceptable = (err <= tol * abs(value) or abs(value) <= ABS_FLOOR
                  or err <= ABS_FLOOR or err <= 2.0 * run.outer_floor)
    if not acceptable:
        raise AccuracyError(
            f"combined error estimate {err:.3e} exceeds tolerance for value "
            f"{value:.6e}", value, err,
        )
    return value, err


def proper_integral(P: SparsePolynomial, contour: ProductContour,
                    tol: float = 1e-9) -> complex:
    """Integral of exp(P) alone."""
    value, _ = integrate(IntegrandSpec(P, AlphaOne()), contour, tol)
    return value


def gg_eval(P: SparsePolynomial, u, contour: ProductContour,
            tol: float = 1e-9) -> complex:
    """Integral of exp(P) * t^(u-1); branch data is required whenever a
    component of u is not an integer."""
    alpha = AlphaMonomial(u)
    for j, uj in enumerate(alpha.u):
        if not _is_int(uj) and contour.start_arg(("t", j + 1)) is None:
            raise ValueError(
                f"u_{j + 1} = {uj} is not an integer: branch data for "
                f"('t', {j + 1}) is required"
            )
    value, _ = integrate(IntegrandSpec(P, alpha), contour, tol)
    return value


def euler_integral_eval(polys, v, u, contour: ProductContour,
                        tol: float = 1e-9) -> complex:
    """Integral of prod P_i^v_i * t^(u-1) (the kernel polynomial is zero).

    Endpoint zeros of a factor are allowed only when the corresponding
    exponent has real part > -1 (an integrable singularity).
    """
    polys = tuple(polys)
    if not polys:
        raise ValueError("need at least one polynomial factor")
    n = polys[0].dimension
    alpha = AlphaPowerProduct(polys, v, u)
    if n == 1:
        for chain in contour.chains:
            for which in (0, -1):
                end = _leg_endpoints(chain[which])[which]
                if end is _INF:
                    continue
                for poly, vi in zip(polys, alpha.v):
                    if abs(poly.evaluate(end)) < 1e-12 and vi.real <= -1:
                        raise ValueError(
                            f"factor vanishes at endpoint {end} with "
                            f"non-integrable exponent {vi}"
                        )
    value, _ = integrate(
        IntegrandSpec(SparsePolynomial.zero(n), alpha), contour, tol)
    return value
