"""Intervals, boxes, dyadic segmentation and box-set normalization.

Everything downstream (step functions, integrals, posets) is built on the
types here.  Two design points worth knowing:

* Dyadic segmentation of ``[c, d]`` is generated by the two affine
  contractions ``kappa_c(x) = (x + c) / 2`` and ``kappa_d(x) = (x + d) / 2``.
  Depth-``t`` segments are enumerated by words over ``{c, d}`` of length
  ``t`` in lexicographic order with ``c < d`` and the *first* letter most
  significant, i.e. segment ``s`` (0-based) corresponds to the binary digits
  of ``s``.  The composite map for a word is applied outermost-letter-first:
  word ``(c, c, d)`` means ``kappa_c ∘ kappa_c ∘ kappa_d``.
* All segment endpoints are computed by composing exact affine pairs
  ``(a, b) -> a*x + b`` whose coefficients are dyadic rationals, so up to
  depth 40 every endpoint is an exact binary64 value and tilings telescope
  with ``==`` rather than tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .errors import (
    DepthTooLargeError,
    DimensionMismatchError,
    NonFiniteError,
    NotMonotoneError,
    OrderViolationError,
)

MAX_DEPTH = 40


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteError(f"expected a finite real, got {v!r}")


# ---------------------------------------------------------------------------
# intervals and boxes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Closed bounded interval ``[lo, hi]``; ``lo == hi`` is legal."""

    lo: float
    hi: float

    def __post_init__(self):
        _check_finite(self.lo, self.hi)
        if self.lo > self.hi:
            raise OrderViolationError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def to_json(self) -> list:
        return [self.lo, self.hi]


def make_interval(lo: float, hi: float) -> Interval:
    """Validated interval constructor (finite endpoints, ``lo <= hi``)."""
    return Interval(float(lo), float(hi))


@dataclass(frozen=True)
class Box:
    """Finite product of intervals; the n = 1 case wraps a single interval."""

    factors: tuple[Interval, ...]

    def __post_init__(self):
        if not self.factors:
            raise DimensionMismatchError("a box needs at least one factor interval")

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def measure(self) -> float:
        m = 1.0
        for f in self.factors:
            m *= f.length
        return m

    def is_degenerate(self) -> bool:
        return any(f.is_degenerate() for f in self.factors)

    def contains_point(self, x: Sequence[float]) -> bool:
        if len(x) != self.dim:
            raise DimensionMismatchError(f"point of dim {len(x)} in box of dim {self.dim}")
        return all(f.contains(xi) for f, xi in zip(self.factors, x))

    def contains_box(self, other: "Box") -> bool:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"box dims differ: {other.dim} vs {self.dim}")
        return all(f.contains_interval(g) for f, g in zip(self.factors, other.factors))

    def intersect(self, other: "Box") -> Optional["Box"]:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"box dims differ: {other.dim} vs {self.dim}")
        factors = []
        for f, g in zip(self.factors, other.factors):
            iv = f.intersect(g)
            if iv is None:
                return None
            factors.append(iv)
        return Box(tuple(factors))

    def sort_key(self):
        return tuple((f.lo, f.hi) for f in self.factors)

    def to_json(self) -> list:
        return [f.to_json() for f in self.factors]


def box(*intervals: Interval) -> Box:
    return Box(tuple(intervals))


def box1(lo: float, hi: float) -> Box:
    """One-dimensional box, the common case in examples and tests."""
    return Box((make_interval(lo, hi),))


def lebesgue_measure(b: Box) -> float:
    """Product of factor lengths; 0 for degenerate boxes."""
    return b.measure


# ---------------------------------------------------------------------------
# measurable sets (finite unions of disjoint boxes)
# ---------------------------------------------------------------------------

def _overlap_measure(a: Box, b: Box) -> float:
    cap = a.intersect(b)
    return 0.0 if cap is None else cap.measure


@dataclass(frozen=True)
class MeasurableSet:
    """Finite union of pairwise almost-disjoint boxes of one dimension.

    Boxes are stored sorted lexicographically by endpoints; overlapping input
    (beyond shared boundary facets) is rejected — use :func:`normalize_set`
    to turn an arbitrary finite union into this canonical form.
    """

    boxes: tuple[Box, ...]

    def __post_init__(self):
        bs = tuple(sorted(self.boxes, key=Box.sort_key))
        object.__setattr__(self, "boxes", bs)
        if bs:
            d = bs[0].dim
            for b in bs[1:]:
                if b.dim != d:
                    raise DimensionMismatchError("mixed box dimensions in one set")
            for i in range(len(bs)):
                for j in range(i + 1, len(bs)):
                    if _overlap_measure(bs[i], bs[j]) > 0.0:
                        raise OrderViolationError(
                            "boxes overlap with positive measure; normalize_set them first"
                        )

    @property
    def dim(self) -> int:
        return self.boxes[0].dim if self.boxes else 0

    @property
    def measure(self) -> float:
        return sum(b.measure for b in self.boxes)

    def to_json(self) -> list:
        return [b.to_json() for b in self.boxes]


def measurable_set(boxes: Iterable[Box]) -> MeasurableSet:
    return MeasurableSet(tuple(boxes))


def _merge_axis(cells: list, axis: int) -> list:
    """Merge adjacent equal-tagged ``(Box, tag)`` cells along ``axis``.

    Cells merge when their tags compare equal and every factor other than
    ``axis`` coincides; tags may be any hashable (indices, coefficients...).
    """
    def group_key(item):
        b, tag = item
        rest = tuple((f.lo, f.hi) for i, f in enumerate(b.factors) if i != axis)
        return (tag, rest)

    cells = sorted(cells, key=lambda it: (group_key(it), it[0].factors[axis].lo))
    out: list[tuple[Box, int]] = []
    for b, tag in cells:
        if out:
            pb, ptag = out[-1]
            if group_key((pb, ptag)) == group_key((b, tag)) and pb.factors[axis].hi == b.factors[axis].lo:
                merged = list(pb.factors)
                merged[axis] = Interval(pb.factors[axis].lo, b.factors[axis].hi)
                out[-1] = (Box(tuple(merged)), tag)
                continue
        out.append((b, tag))
    return out


def split_on_grid(boxes: Sequence[Box], tagged: Optional[Sequence[int]] = None):
    """Cut every box along the union of all per-coordinate endpoints.

    Returns ``(cells, tags)`` where each cell is a grid-aligned sub-box of
    exactly one input box (tags track which input, for callers that care).
    Degenerate inputs pass through uncut.
    """
    if not boxes:
        return [], []
    dim = boxes[0].dim
    grids: list[list[float]] = []
    for ax in range(dim):
        pts = set()
        for b in boxes:
            pts.add(b.factors[ax].lo)
            pts.add(b.factors[ax].hi)
        grids.append(sorted(pts))

    cells: list[Box] = []
    tags: list[int] = []
    for idx, b in enumerate(boxes):
        if b.dim != dim:
            raise DimensionMismatchError("mixed box dimensions")
        per_axis: list[list[Interval]] = []
        for ax in range(dim):
            f = b.factors[ax]
            if f.is_degenerate():
                per_axis.append([f])
                continue
            cuts = [p for p in grids[ax] if f.lo < p < f.hi]
            pts = [f.lo] + cuts + [f.hi]
            per_axis.append([Interval(a, c) for a, c in zip(pts, pts[1:])])
        # cartesian product of the per-axis pieces
        combos = [()]
        for pieces in per_axis:
            combos = [prefix + (iv,) for prefix in combos for iv in pieces]
        for combo in combos:
            cells.append(Box(combo))
            tags.append(tagged[idx] if tagged is not None else idx)
    return cells, tags


def normalize_set(boxes: Iterable[Box]) -> MeasurableSet:
    """Canonical form of a finite union of boxes (union semantics).

    Pipeline: split every box on the common per-coordinate endpoint grid,
    deduplicate cells, then greedily merge adjacent cells along axis 0, then
    axis 1, and so on.  The result is idempotent, measure-preserving, and
    sorted, e.g. ``{[0,2], [1,3]} -> {[0,3]}``.
    """
    raw = [b for b in boxes]
    if not raw:
        return MeasurableSet(())
    solid = [b for b in raw if not b.is_degenerate()]
    degenerate = [b for b in raw if b.is_degenerate()]
    cells, _ = split_on_grid(solid)
    seen = {}
    for c in cells:
        seen[c.sort_key()] = c
    merged = [(c, 0) for c in sorted(seen.values(), key=Box.sort_key)]
    dim = raw[0].dim
    for ax in range(dim):
        merged = _merge_axis(merged, ax)
    keep = [b for b, _ in merged]
    # degenerate boxes survive only if not already covered by a solid box
    for d in degenerate:
        if not any(k.contains_box(d) for k in keep):
            if not any(k.sort_key() == d.sort_key() for k in keep):
                keep.append(d)
    return MeasurableSet(tuple(keep))


# ---------------------------------------------------------------------------
# affine maps and dyadic segmentation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineMap:
    """Map ``x -> a*x + b`` stored as the exact coefficient pair ``(a, b)``."""

    a: float
    b: float

    def __call__(self, x: float) -> float:
        return self.a * x + self.b

    def compose(self, other: "AffineMap") -> "AffineMap":
        """``self ∘ other``, i.e. apply ``other`` first."""
        return AffineMap(self.a * other.a, self.a * other.b + self.b)

    def image(self, iv: Interval) -> Interval:
        u, v = self(iv.lo), self(iv.hi)
        return Interval(min(u, v), max(u, v))

    def inverse(self) -> "AffineMap":
        if self.a == 0.0:
            raise OrderViolationError("constant affine map has no inverse")
        return AffineMap(1.0 / self.a, -self.b / self.a)


IDENTITY_MAP = AffineMap(1.0, 0.0)


@dataclass(frozen=True)
class DyadicScheme:
    """The pair of halving contractions attached to an ambient interval.

    ``kappa_lo`` sends the ambient onto its lower half ``[c, xi]`` and
    ``kappa_hi`` onto the upper half ``[xi, d]``, where ``xi`` is the
    midpoint ``(c + d) / 2``.
    """

    ambient: Interval

    def __post_init__(self):
        if self.ambient.is_degenerate():
            raise OrderViolationError("dyadic scheme needs a non-degenerate ambient")

    @property
    def xi(self) -> float:
        return self.ambient.midpoint

    @property
    def kappa_lo(self) -> AffineMap:
        return AffineMap(0.5, 0.5 * self.ambient.lo)

    @property
    def kappa_hi(self) -> AffineMap:
        return AffineMap(0.5, 0.5 * self.ambient.hi)

    def word_map(self, word: Sequence[int]) -> AffineMap:
        """Composite for a word over ``{0, 1}`` (0 = lower, 1 = upper).

        The first letter is outermost: ``word_map((0, 0, 1))`` is
        ``kappa_lo ∘ kappa_lo ∘ kappa_hi``.
        """
        if len(word) > MAX_DEPTH:
            raise DepthTooLargeError(f"depth {len(word)} exceeds {MAX_DEPTH}")
        m = IDENTITY_MAP
        for letter in word:
            m = m.compose(self.kappa_hi if letter else self.kappa_lo)
        return m

    def segment(self, t: int):
        return segment(self, t)


def segment(scheme: DyadicScheme, t: int):
    """Depth-``t`` segmentation: ``2**t`` intervals with their affine maps.

    Returns ``(intervals, maps)`` in word order (binary digits of the index,
    first letter most significant), which coincides with left-to-right
    geometric order.  ``t = 0`` returns the ambient with the identity map.
    """
    if t < 0 or t != int(t):
        raise OrderViolationError(f"depth must be a non-negative integer, got {t!r}")
    t = int(t)
    if t > MAX_DEPTH:
        raise DepthTooLargeError(f"depth {t} exceeds {MAX_DEPTH}")
    amb = scheme.ambient
    intervals: list[Interval] = []
    maps: list[AffineMap] = []
    for s in range(2 ** t):
        word = [(s >> (t - 1 - k)) & 1 for k in range(t)]
        m = scheme.word_map(word)
        intervals.append(m.image(amb))
        maps.append(m)
    return intervals, maps


# ---------------------------------------------------------------------------
# Lebesgue–Stieltjes distribution data
# ---------------------------------------------------------------------------

@dataclass
class StieltjesMeasure:
    """Distribution-function data for Lebesgue–Stieltjes integration.

    ``phi`` must be non-decreasing on any interval it is integrated against
    (checked by sampling at call time).  ``phi_prime`` is optional; when
    present it enables an independent cross-check of Stieltjes sums against
    a certified enclosure of ``∫ f(t) phi'(t) dt``.
    """

    phi: Callable[[float], float]
    phi_prime: Optional[Callable[[float], float]] = None
    label: str = field(default="phi")

    def check_monotone(self, iv: Interval, samples: int = 257) -> None:
        if iv.is_degenerate():
            return
        import numpy as np

        xs = np.linspace(iv.lo, iv.hi, samples)
        vals = np.asarray([float(self.phi(float(x))) for x in xs])
        if not np.all(np.isfinite(vals)):
            raise NonFiniteError(f"{self.label} is non-finite on [{iv.lo}, {iv.hi}]")
        scale = 1.0 + float(np.max(np.abs(vals)))
        drops = np.diff(vals) < -1e-12 * scale
        if drops.any():
            i = int(np.argmax(drops))
            raise NotMonotoneError(
                f"{self.label} decreases near x = {xs[i]:.6g} on [{iv.lo}, {iv.hi}]"
            )


def log_power_measure(l: float) -> StieltjesMeasure:
    """The family ``phi_l(t) = l * ln t`` (valid on positive intervals).

    Its density is ``phi_l'(t) = l / t``, supplied so Stieltjes sums can be
    cross-checked against a certified enclosure.
    """
    return StieltjesMeasure(
        phi=lambda x: l * math.log(x),
        phi_prime=lambda x: l / x,
        label=f"{l}*ln(t)",
    )


def identity_measure() -> StieltjesMeasure:
    """``phi(t) = t``: plain Lebesgue integration as a Stieltjes measure."""
    return StieltjesMeasure(phi=lambda x: x, phi_prime=lambda x: 1.0, label="t")
