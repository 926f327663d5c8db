"""Elementary functions constructed from certified integral enclosures.

Everything here reduces to two convex integrands:

* ``1/sqrt(1 - t^2)`` on (-1, 1) — arcsine/arccosine, the quarter-period
  constant K (= pi/2 classically), and by bisection-inversion sine and
  cosine;
* ``1/t`` on (0, inf) — the natural logarithm, and by bisection-inversion
  the exponential.

No transcendental library routines participate in any returned value: every
result is an :class:`~stepquiver.integrate.Enclosure` produced by the
midpoint/trapezoid sandwich (both integrands are convex, so the sandwich is
a certified bracket), plus analytic tail bounds at the two improper
endpoints ±1 of the circle integrand:

    on [t0, t1] ⊆ [1-ε, 1]:   2(√(1-t0) - √(1-t1))/√2  ≤  ∫  ≤  same /√(1+t0)

(from sandwiching ``1/sqrt(1+t)`` between its endpoint values), mirrored on
the left.  Arguments of sine and cosine are reduced modulo the cached
half-period ``2K̂`` using ``s(x ± 2uK) = (-1)^u s(x)``; the enclosure is
widened by the reduction slack ``2|u|·(K reference tolerance)`` so the
bracket stays honest for large arguments.
"""

from __future__ import annotations

import math
from typing import Dict

import numpy as np

from .errors import InversionFailedError, OutOfDomainError
from .integrate import Enclosure, convex_enclosure

UNIT_EPS = 1e-8          # default truncation distance at the ±1 endpoints
K_REF_TOL = 1e-9         # tolerance of the cached reference quarter-period


def _circle(ts):
    ts = np.asarray(ts, dtype=float)
    return 1.0 / np.sqrt(1.0 - ts * ts)


def _recip(ts):
    ts = np.asarray(ts, dtype=float)
    return 1.0 / ts


def _tail_pos(t0: float, t1: float) -> Enclosure:
    """Analytic bracket of ``∫_{t0}^{t1} dt/sqrt(1-t²)`` for t0 near +1."""
    s0 = math.sqrt(1.0 - t0)
    s1 = math.sqrt(max(0.0, 1.0 - t1))
    base = 2.0 * (s0 - s1)
    return Enclosure(base / math.sqrt(2.0), base / math.sqrt(1.0 + t0))


def _enclose_circle(a: float, b: float, tol: float, eps: float = UNIT_EPS) -> Enclosure:
    """Enclosure of ``∫_a^b dt/sqrt(1-t²)``, -1 <= a <= b <= 1.

    The integrand is evaluated only on [-1+δ, 1-δ]; the slivers beyond are
    bracketed analytically.  The tail width is ~0.35·δ^{3/2}, so δ is grown
    with the tolerance (δ = 0.5·tol^{2/3}, clamped to [eps, 1e-3]): spending
    a quarter of the budget on the tail keeps the numeric part away from the
    blow-up, where the sandwich would need astronomically fine cells.
    """
    if not (-1.0 <= a <= b <= 1.0):
        raise OutOfDomainError(f"[{a}, {b}] is not a subinterval of [-1, 1]")
    if a == b:
        return Enclosure(0.0, 0.0)
    delta = max(eps, min(1e-3, 0.5 * tol ** (2.0 / 3.0)))
    cut = 1.0 - delta
    total = Enclosure(0.0, 0.0)
    if a < -cut:
        # mirror the left sliver onto the right: ∫_a^c f = ∫_{-c}^{-a} f
        c = min(b, -cut)
        total = total + _tail_pos(-c, -a)
    if b > cut:
        total = total + _tail_pos(max(a, cut), b)
    lo_main = max(a, -cut)
    hi_main = min(b, cut)
    if lo_main < hi_main:
        tol_main = max(0.5 * tol, tol - total.width)
        total = total + convex_enclosure(_circle, (lo_main, hi_main), tol_main)
    return total


# ---------------------------------------------------------------------------
# arcsine / arccosine / the quarter-period constant
# ---------------------------------------------------------------------------

def asin_cat(y: float, tol: float = 1e-6) -> Enclosure:
    """``∫_0^y dt/sqrt(1-t²)`` — the arcsine, for y in [-1, 1]."""
    y = float(y)
    if not -1.0 <= y <= 1.0:
        raise OutOfDomainError(f"asin argument {y} outside [-1, 1]")
    if y >= 0.0:
        return _enclose_circle(0.0, y, tol)
    return -_enclose_circle(0.0, -y, tol)


def acos_cat(y: float, tol: float = 1e-6) -> Enclosure:
    """``∫_y^1 dt/sqrt(1-t²)`` — the arccosine, for y in [-1, 1]."""
    y = float(y)
    if not -1.0 <= y <= 1.0:
        raise OutOfDomainError(f"acos argument {y} outside [-1, 1]")
    return _enclose_circle(y, 1.0, tol)


_K_CACHE: Dict[float, Enclosure] = {}


def K_constant(tol: float = 1e-3) -> Enclosure:
    """The quarter-period ``K = ∫_0^1 dt/sqrt(1-t²)`` (classically pi/2)."""
    enc = _K_CACHE.get(tol)
    if enc is None:
        enc = _enclose_circle(0.0, 1.0, tol)
        _K_CACHE[tol] = enc
    return enc


def k_reference() -> float:
    """Midpoint of the high-accuracy cached K enclosure.

    This single number defines the period lattice used by the sine/cosine
    range reduction; tests of periodicity should use it too, so that all
    statements are relative to one consistent K.
    """
    return K_constant(K_REF_TOL).midpoint


# ---------------------------------------------------------------------------
# sine / cosine via bisection inversion of the arcsine
# ---------------------------------------------------------------------------

_MAX_ARG = 1e6


def _invert_asin(target: float, tol: float) -> Enclosure:
    """Solve ``asin(y) = target`` for y in [-1, 1] by plain bisection.

    Bisection (not Newton) keeps every step inside certified arithmetic:
    comparisons use asin enclosure midpoints at tolerance tol/4, and since
    |d asin/dy| >= 1 an asin-space error never inflates in y-space, so the
    final bracket widened by tol/4 contains the true y.
    """
    if not math.isfinite(target):
        raise InversionFailedError(f"non-finite inversion target {target!r}")
    inner = 0.25 * tol
    worst = 0.0
    lo, hi = -1.0, 1.0
    for _ in range(80):
        if hi - lo <= 0.5 * tol:
            break
        mid = 0.5 * (lo + hi)
        enc = asin_cat(mid, inner)
        worst = max(worst, 0.5 * enc.width + (0.0 if enc.converged else inner))
        if enc.midpoint < target:
            lo = mid
        else:
            hi = mid
    pad = max(inner, worst)
    return Enclosure(max(-1.0, lo - pad), min(1.0, hi + pad),
                     (hi - lo) + 2 * pad <= tol * (1 + 1e-9))


def sin_cat(x: float, tol: float = 1e-3) -> Enclosure:
    """Sine on the line, via ``s(x ± 2uK) = (-1)^u s(x)`` and inversion."""
    x = float(x)
    if not math.isfinite(x) or abs(x) > _MAX_ARG:
        raise InversionFailedError(f"sine argument {x!r} out of supported range")
    kenc = K_constant(K_REF_TOL)
    khat = kenc.midpoint
    u = math.floor((x + khat) / (2.0 * khat))
    x0 = x - 2.0 * u * khat
    enc = _invert_asin(x0, tol)
    # |khat - K| <= width/2, so the reduced argument is off by <= |u|*width
    slack = 2.0 * abs(u) * max(K_REF_TOL, 0.5 * kenc.width)
    enc = Enclosure(max(-1.0, enc.lower - slack), min(1.0, enc.upper + slack),
                    enc.converged and enc.width + 2 * slack <= tol * (1 + 1e-9))
    return -enc if u % 2 else enc


def cos_cat(x: float, tol: float = 1e-3) -> Enclosure:
    """Cosine via ``acos(y) = K - asin(y)`` on the base window [0, 2K)."""
    x = float(x)
    if not math.isfinite(x) or abs(x) > _MAX_ARG:
        raise InversionFailedError(f"cosine argument {x!r} out of supported range")
    kenc = K_constant(K_REF_TOL)
    khat = kenc.midpoint
    u = math.floor(x / (2.0 * khat))
    x0 = x - 2.0 * u * khat          # in [0, 2K): solve acos(y) = x0
    enc = _invert_asin(khat - x0, tol)
    # khat enters both the reduction and the inversion target
    slack = 2.0 * (abs(u) + 1.0) * max(K_REF_TOL, 0.5 * kenc.width)
    enc = Enclosure(max(-1.0, enc.lower - slack), min(1.0, enc.upper + slack),
                    enc.converged and enc.width + 2 * slack <= tol * (1 + 1e-9))
    return -enc if u % 2 else enc


# ---------------------------------------------------------------------------
# logarithm / exponential
# ---------------------------------------------------------------------------

LN_RES = 1e-14           # quadrature floor on ∫ dt/t at the uniform cell cap

_LN2_BEST: list = [None, math.inf]  # refined-on-demand ∫_1^2 dt/t + lowest tol tried


def _ln2_enclosure(tol: float) -> Enclosure:
    """Cached enclosure of ln 2, recomputed only for genuinely new demands.

    Demands are clamped at the binary64 resolution floor, and a demand that
    was already attempted is never retried — otherwise an unreachable
    tolerance would burn the full cell budget on every call.
    """
    tol = max(tol, LN_RES)
    best, attempted = _LN2_BEST
    if best is None or (best.width > tol and tol < 0.99 * attempted):
        best = convex_enclosure(_recip, (1.0, 2.0), 0.5 * tol)
        _LN2_BEST[0] = best
        _LN2_BEST[1] = min(attempted, tol)
    return best


def ln_cat(y: float, tol: float = 1e-6) -> Enclosure:
    """``ln y`` as ``∫_1^y dt/t`` (negated reversed integral for y < 1).

    Large and tiny arguments are reduced through the additivity of the
    logarithm: with ``y = m · 2^e`` (m in [0.5, 1)), ``ln y = e·ln 2 +
    ln m``, where ln 2 is a cached enclosure of ``∫_1^2 dt/t``.
    """
    y = float(y)
    if not math.isfinite(y) or y <= 0.0:
        raise OutOfDomainError(f"logarithm argument {y!r} outside (0, inf)")
    if y == 1.0:
        return Enclosure(0.0, 0.0)
    if 1.0 / 64.0 <= y <= 64.0:
        eff = max(tol, LN_RES)
        if y > 1.0:
            enc = convex_enclosure(_recip, (1.0, y), eff)
        else:
            enc = -convex_enclosure(_recip, (y, 1.0), eff)
        return Enclosure(enc.lower, enc.upper,
                         enc.width <= tol * (1.0 + 1e-9))
    m, e = math.frexp(y)             # y = m * 2**e, m in [0.5, 1)
    # sub-resolution demands are clamped: at this magnitude the answer has
    # no binary64 digits left to certify, and the flag reports that
    eff = max(tol, LN_RES * (1.0 + abs(e)))
    ln2 = _ln2_enclosure(0.5 * eff / max(1, abs(e)))
    main = -convex_enclosure(_recip, (m, 1.0), 0.5 * eff)
    s = ln2.scale(float(e)) + main
    return Enclosure(s.lower, s.upper, s.width <= tol * (1.0 + 1e-9))


def exp_cat(x: float, tol: float = 1e-6) -> Enclosure:
    """Inverse of :func:`ln_cat` by bisection with a doubling bracket.

    ``tol`` is an absolute width target on the result, which is realistic
    in binary64 only while the result itself is moderate; arguments are
    therefore capped at |x| <= 40.  The returned bracket is honest either
    way: its padding uses the widths the inner log enclosures actually
    achieved, and ``converged`` reports whether the target was met.
    """
    x = float(x)
    if not math.isfinite(x) or abs(x) > 40.0:
        raise InversionFailedError(f"exp argument {x!r} out of supported range")
    if x == 0.0:
        return Enclosure(1.0, 1.0)
    lo = hi = 1.0
    if x > 0:
        for _ in range(80):
            if ln_cat(hi, 1e-3).midpoint >= x + 1e-3:
                break
            hi *= 2.0
        else:
            raise InversionFailedError(f"could not bracket exp({x})")
    else:
        for _ in range(80):
            if ln_cat(lo, 1e-3).midpoint <= x - 1e-3:
                break
            lo *= 0.5
        else:
            raise InversionFailedError(f"could not bracket exp({x})")
    inner = max(tol / (8.0 * max(1.0, hi)), 1e-14)
    worst = inner
    for _ in range(400):
        if hi - lo <= max(0.5 * tol, 4.0 * math.ulp(hi)):
            break
        mid = 0.5 * (lo + hi)
        # a loose log enclosure that certainly separates mid from x decides
        # the step at zero error cost; sharpen only when it straddles
        step_tol = max(inner, min(1e-3, 0.03 * (hi - lo) / max(hi, 1.0)))
        enc = ln_cat(mid, step_tol)
        if enc.upper < x:
            lo = mid
            continue
        if enc.lower > x:
            hi = mid
            continue
        enc = ln_cat(mid, inner)
        worst = max(worst, 0.5 * enc.width + (0.0 if enc.converged else inner))
        if enc.midpoint < x:
            lo = mid
        else:
            hi = mid
    # an error delta in log space moves the preimage by at most ~y*delta
    slack = 2.0 * hi * worst
    return Enclosure(max(0.0, lo - slack), hi + slack,
                     (hi - lo) + 2 * slack <= tol * (1 + 1e-9))
