"""Simple functions, grid functions, and exact common refinements.

A SimpleFunction is a finite weighted sum of region indicators with
pairwise disjoint regions and implicit value zero elsewhere.  Lattice
operations (pointwise max and min) are computed exactly by refining
both operands onto one shared partition; the partition is built in the
radial, axis-box, or planar-polygon algebra, whichever fits all parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, DomainError
from .polytopes import (
    Polytope,
    intersect_polygons,
    polygon_weighted_measure,
    subtract_polygon,
)
from .regions import (
    Annulus,
    AxisBox,
    OriginBall,
    Region,
    part_contains,
)


class SimpleFunction:
    """Finitely many (value, region) terms over disjoint regions.

    Zero values and zero-measure regions are dropped on construction,
    so the term list is a canonical support description.
    """

    def __init__(self, dim, terms):
        kept = []
        for value, region in terms:
            if not isinstance(region, Region):
                region = Region([region])
            if region.dim != dim:
                raise DomainError("term region dimension disagrees")
            v = float(value)
            if not np.isfinite(v):
                raise DomainError("term values must be finite")
            if v == 0.0 or region.lebesgue() == 0.0:
                continue
            kept.append((v, region))
        self.dim = int(dim)
        self.terms = tuple(kept)

    @classmethod
    def indicator(cls, region, value=1.0):
        return cls(region.dim, [(value, region)])

    @classmethod
    def zero(cls, dim):
        return cls(dim, [])

    @property
    def is_zero(self):
        return not self.terms

    def scale(self, c):
        return SimpleFunction(self.dim, [(c * v, r) for v, r in self.terms])

    def evaluate(self, points):
        """Pointwise values; disjoint terms make the sum a selection."""
        pts = np.atleast_2d(np.asarray(points, float))
        out = np.zeros(len(pts))
        for v, region in self.terms:
            out += v * region.contains(pts)
        return out

    def support_box(self):
        if not self.terms:
            z = np.zeros(self.dim)
            return z, z
        boxes = [r.bounding_box() for _, r in self.terms]
        return (np.min([b[0] for b in boxes], axis=0),
                np.max([b[1] for b in boxes], axis=0))

    def check_disjoint(self, rng=None, samples=4000):
        all_parts = [p for _, r in self.terms for p in r.parts]
        Region(all_parts, dim=self.dim).check_disjoint(rng, samples)
        return True

    def to_json(self):
        return {"dim": self.dim,
                "terms": [{"value": v, "region": r.to_json()}
                          for v, r in self.terms]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["dim"], [(t["value"], Region.from_json(t["region"]))
                                for t in obj["terms"]])

    def __repr__(self):
        return f"SimpleFunction(dim={self.dim}, terms={len(self.terms)})"


@dataclass(frozen=True)
class RefinedPair:
    """Two functions on one shared disjoint partition.

    cells is a list of (part, left value, right value); the partition
    covers both supports, and both functions vanish off the listed
    cells.
    """

    dim: int
    cells: tuple

    def left(self):
        return SimpleFunction(self.dim, [(a, part) for part, a, _ in self.cells])

    def right(self):
        return SimpleFunction(self.dim, [(b, part) for part, _, b in self.cells])


def _flatten(f):
    return [(v, p) for v, region in f.terms for p in region.parts]


def _radial_interval_or_none(part):
    if isinstance(part, OriginBall):
        return 0.0, part.radius
    if isinstance(part, Annulus):
        return part.inner, part.outer
    return None


def _refine_radial(fparts, gparts, dim):
    cuts = set()
    fiv = []
    giv = []
    for v, p in fparts:
        iv = _radial_interval_or_none(p)
        cuts.update(iv)
        fiv.append((v, iv))
    for v, p in gparts:
        iv = _radial_interval_or_none(p)
        cuts.update(iv)
        giv.append((v, iv))
    cells = []
    cuts = sorted(cuts)
    for lo, hi in zip(cuts, cuts[1:]):
        mid = 0.5 * (lo + hi)
        a = sum(v for v, (s, t) in fiv if s <= mid < t)
        b = sum(v for v, (s, t) in giv if s <= mid < t)
        if a != 0.0 or b != 0.0:
            part = OriginBall(dim, hi) if lo == 0.0 else Annulus(dim, lo, hi)
            cells.append((part, a, b))
    return cells


def _refine_boxes(fparts, gparts, dim):
    cuts = [set() for _ in range(dim)]
    for _, box in fparts + gparts:
        for ax in range(dim):
            cuts[ax].update((box.lo[ax], box.hi[ax]))
    cuts = [sorted(c) for c in cuts]
    cells = []
    for idx in np.ndindex(*[len(c) - 1 for c in cuts]):
        lo = np.array([cuts[ax][i] for ax, i in enumerate(idx)])
        hi = np.array([cuts[ax][i + 1] for ax, i in enumerate(idx)])
        mid = 0.5 * (lo + hi)[None, :]
        a = sum(v for v, box in fparts if bool(part_contains(box, mid)[0]))
        b = sum(v for v, box in gparts if bool(part_contains(box, mid)[0]))
        if a != 0.0 or b != 0.0:
            cells.append((AxisBox(lo, hi), a, b))
    return cells


def _as_refinable_polygon(part):
    if isinstance(part, AxisBox) and part.dim == 2:
        return part.corners_polygon()
    if isinstance(part, Polytope) and part.dim == 2 and part.rank == 2:
        return part.vertices
    return None


def _refine_polygons(fpolys, gpolys):
    cells = []
    for va, p in fpolys:
        rest = [p]
        for vb, q in gpolys:
            inter = intersect_polygons(p, q)
            if inter is not None:
                cells.append((Polytope(inter), va, vb))
            rest = [piece for r in rest for piece in subtract_polygon(r, q)]
        for r in rest:
            cells.append((Polytope(r), va, 0.0))
    for vb, q in gpolys:
        rest = [q]
        for _, p in fpolys:
            rest = [piece for r in rest for piece in subtract_polygon(r, p)]
        for r in rest:
            cells.append((Polytope(r), 0.0, vb))
    return cells


def refine(f, g):
    """Common disjoint partition carrying both functions' values.

    Works inside one of three exact algebras: origin-centered radial
    parts, axis boxes of equal dimension, or planar polygons (2D boxes
    are promoted).  Mixing algebras raises a capability error; the
    caller can rasterize both sides onto a GridFunction instead.
    """
    if f.dim != g.dim:
        raise DomainError("dimensions disagree")
    dim = f.dim
    fparts, gparts = _flatten(f), _flatten(g)
    if all(_radial_interval_or_none(p) is not None for _, p in fparts + gparts):
        return RefinedPair(dim, tuple(_refine_radial(fparts, gparts, dim)))
    if all(isinstance(p, AxisBox) for _, p in fparts + gparts):
        return RefinedPair(dim, tuple(_refine_boxes(fparts, gparts, dim)))
    if dim == 2:
        fpolys = [(v, _as_refinable_polygon(p)) for v, p in fparts]
        gpolys = [(v, _as_refinable_polygon(p)) for v, p in gparts]
        if all(p is not None for _, p in fpolys + gpolys):
            return RefinedPair(2, tuple(_refine_polygons(fpolys, gpolys)))
    raise CapabilityError(
        "no exact common refinement for this part mix; rasterize both "
        "functions with rasterize() and use the grid-based operations")


def lattice_max_min(f, g):
    """Pointwise (max, min) of two refinable simple functions."""
    pair = refine(f, g)
    top = SimpleFunction(pair.dim,
                         [(max(a, b), part) for part, a, b in pair.cells])
    bottom = SimpleFunction(pair.dim,
                            [(min(a, b), part) for part, a, b in pair.cells])
    return top, bottom


def difference(f, g):
    """f - g as a simple function on the common refinement."""
    pair = refine(f, g)
    return SimpleFunction(pair.dim, [(a - b, part) for part, a, b in pair.cells])


def positive_negative_parts(f):
    """Split into (f max 0, f min 0); their sum reproduces f."""
    zero = SimpleFunction.zero(f.dim)
    return lattice_max_min(f, zero)


class GridFunction:
    """Piecewise-constant samples on a uniform grid over a box."""

    def __init__(self, lo, hi, values):
        self.lo = np.asarray(lo, float)
        self.hi = np.asarray(hi, float)
        self.values = np.asarray(values, float)
        if self.lo.ndim != 1 or self.lo.shape != self.hi.shape:
            raise DomainError("lo and hi must be equal-length vectors")
        if self.values.ndim != len(self.lo):
            raise DomainError("value array rank must match the dimension")
        if not np.all(self.lo < self.hi):
            raise DomainError("need lo < hi on every axis")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("grid values must be finite")
        self.dim = len(self.lo)
        self.shape = self.values.shape
        self.widths = (self.hi - self.lo) / np.array(self.shape)
        self._mu_cache = None

    @property
    def cell_volume(self):
        return float(np.prod(self.widths))

    def cell_centers(self):
        axes = [self.lo[ax] + self.widths[ax] * (np.arange(m) + 0.5)
                for ax, m in enumerate(self.shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in mesh], axis=1)

    def cell_bounds(self):
        centers = self.cell_centers()
        half = 0.5 * self.widths
        return centers - half, centers + half

    def flat_values(self):
        return self.values.reshape(-1)

    def cell_weighted_measures(self):
        """Per-cell integral of |x|, with a per-cell error bound.

        Planar cells get the exact closed form; in higher dimensions the
        midpoint value |center| * volume is used, whose error is at most
        volume times half the cell diagonal.  Cached after first use.
        """
        if self._mu_cache is None:
            los, his = self.cell_bounds()
            if self.dim == 2:
                mus = np.empty(len(los))
                for i, (lo, hi) in enumerate(zip(los, his)):
                    corners = np.array([[lo[0], lo[1]], [hi[0], lo[1]],
                                        [hi[0], hi[1]], [lo[0], hi[1]]])
                    mus[i] = polygon_weighted_measure(corners)
                errs = np.zeros(len(los))
            else:
                vol = self.cell_volume
                centers = self.cell_centers()
                mus = vol * np.linalg.norm(centers, axis=1)
                half_diag = 0.5 * float(np.linalg.norm(self.widths))
                errs = np.full(len(los), vol * half_diag)
            self._mu_cache = (mus, errs)
        return self._mu_cache

    def __repr__(self):
        return f"GridFunction(dim={self.dim}, shape={self.shape})"


def rasterize(f, shape, lo=None, hi=None, pad=0.0):
    """Sample a simple function at cell centers over its support box."""
    box_lo, box_hi = f.support_box()
    lo = box_lo - pad if lo is None else np.asarray(lo, float)
    hi = box_hi + pad if hi is None else np.asarray(hi, float)
    if np.any(lo >= hi):
        raise DomainError("empty rasterization window")
    grid = GridFunction(lo, hi, np.zeros(shape))
    vals = f.evaluate(grid.cell_centers())
    return GridFunction(lo, hi, vals.reshape(shape))
