"""Polygonal mission spaces: containment, feasibility, and line-of-sight.

The mission space is a simple polygon (the outer boundary) minus the open
interiors of simple obstacle polygons.  Agents and event locations live in the
closed feasible region, so polygon boundaries count as inside and obstacle
boundaries stay feasible.  A sight line is blocked only when it passes through
an obstacle interior (or outside the boundary) for a stretch of positive
length; grazing a vertex or sliding along an edge does not block it.

All predicates use the tolerance ``EPS`` (in length units) and assume inputs
are well separated relative to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GeometryError

# Geometric tolerance, in length units.
EPS = 1e-9


@dataclass(frozen=True)
class Point:
    """A planar location with finite coordinates."""

    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise GeometryError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


def as_xy(p) -> np.ndarray:
    """Coerce a Point, pair, or length-2 array to a float ndarray of shape (2,)."""
    if isinstance(p, Point):
        return p.as_array()
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,):
        raise GeometryError(f"expected a single (x, y) location, got shape {arr.shape}")
    return arr


def as_points_array(points) -> np.ndarray:
    """Coerce a sequence of locations to a float ndarray of shape (T, 2)."""
    arr = np.asarray(
        [as_xy(p) for p in points] if isinstance(points, (list, tuple)) else points,
        dtype=float,
    )
    if arr.ndim == 1 and arr.shape == (2,):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError(f"expected an array of (x, y) locations, got shape {arr.shape}")
    return arr


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def segments_intersect(p1, p2, q1, q2) -> bool:
    """True if the closed segments p1-p2 and q1-q2 share at least one point."""
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True

    def on_segment(a, b, c):
        # c collinear with a-b assumed; check bounding box
        return (
            min(a[0], b[0]) - EPS <= c[0] <= max(a[0], b[0]) + EPS
            and min(a[1], b[1]) - EPS <= c[1] <= max(a[1], b[1]) + EPS
        )

    if d1 == 0 and on_segment(q1, q2, p1):
        return True
    if d2 == 0 and on_segment(q1, q2, p2):
        return True
    if d3 == 0 and on_segment(p1, p2, q1):
        return True
    if d4 == 0 and on_segment(p1, p2, q2):
        return True
    return False


def closest_point_on_segment(p, a, b) -> np.ndarray:
    """Orthogonal projection of p onto segment a-b, clamped to the endpoints."""
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    if denom <= EPS * EPS:
        return a.copy()
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return a + t * ab


class Polygon:
    """A simple (non-self-intersecting) polygon with nonzero area.

    Vertices are an ordered ring; the closing edge back to the first vertex is
    implicit.  Construction validates simplicity and area and raises
    :class:`GeometryError` on violation.
    """

    def __init__(self, vertices):
        verts = as_points_array(vertices)
        if len(verts) >= 2 and np.allclose(verts[0], verts[-1]):
            verts = verts[:-1]  # tolerate an explicitly closed ring
        if len(verts) < 3:
            raise GeometryError(f"polygon needs at least 3 vertices, got {len(verts)}")
        if not np.all(np.isfinite(verts)):
            raise GeometryError("polygon vertices must be finite")
        self.vertices = verts
        self._validate_simple()
        if abs(self.signed_area) < 1e-12:
            raise GeometryError("polygon has zero area")

    @cached_property
    def signed_area(self) -> float:
        x = self.vertices[:, 0]
        y = self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """(starts, ends) arrays of shape (E, 2) for the closed ring."""
        a = self.vertices
        b = np.roll(self.vertices, -1, axis=0)
        return a, b

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        xs, ys = self.vertices[:, 0], self.vertices[:, 1]
        return float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max())

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    @cached_property
    def is_convex(self) -> bool:
        a, b = self.edges
        e = b - a
        cr = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        significant = cr[np.abs(cr) > 1e-12]
        if len(significant) == 0:
            return True
        return bool(np.all(significant > 0) or np.all(significant < 0))

    def _validate_simple(self):
        a, b = self.edges
        n = len(self.vertices)
        lengths = np.linalg.norm(b - a, axis=1)
        if np.any(lengths <= EPS):
            raise GeometryError("polygon has a zero-length edge (repeated vertex)")
        for i in range(n):
            for j in range(i + 1, n):
                adjacent = (j == i + 1) or (i == 0 and j == n - 1)
                if adjacent:
                    # consecutive edges may only share their common vertex
                    shared = b[i] if j == i + 1 else b[j]
                    other_i = a[i] if j == i + 1 else a[j]
                    other_j = b[j] if j == i + 1 else b[i]
                    d = _cross(shared, other_i, other_j)
                    edge_scale = lengths[i] * lengths[j]
                    if abs(d) <= 1e-12 * max(edge_scale, 1.0):
                        # collinear neighbours: reject if they fold back over each other
                        u = other_i - shared
                        v = other_j - shared
                        if float(u @ v) > EPS:
                            raise GeometryError(
                                f"polygon folds back on itself at vertex {tuple(shared)}"
                            )
                    continue
                if segments_intersect(a[i], b[i], a[j], b[j]):
                    raise GeometryError(
                        f"polygon is self-intersecting (edges {i} and {j} touch)"
                    )

    # -- containment ---------------------------------------------------------

    def contains_many(self, points) -> np.ndarray:
        """Closed containment test for an array of points (boundary counts as inside)."""
        pts = as_points_array(points)
        inside = self._parity(pts)
        on_b = self.on_boundary_many(pts)
        return inside | on_b

    def strictly_contains_many(self, points) -> np.ndarray:
        """True where a point is inside and farther than EPS from the boundary."""
        pts = as_points_array(points)
        return self._parity(pts) & ~self.on_boundary_many(pts)

    def on_boundary_many(self, points, tol: float = EPS) -> np.ndarray:
        pts = as_points_array(points)
        a, b = self.edges
        ab = b - a  # (E,2)
        ab2 = np.maximum(np.sum(ab * ab, axis=1), 1e-300)  # (E,)
        diff = pts[None, :, :] - a[:, None, :]  # (E,T,2)
        t = np.clip(np.einsum("etk,ek->et", diff, ab) / ab2[:, None], 0.0, 1.0)
        closest = a[:, None, :] + t[:, :, None] * ab[None, :, :].swapaxes(0, 1)
        d2 = np.sum((pts[None, :, :] - closest) ** 2, axis=-1)
        return np.any(d2 <= tol * tol, axis=0)

    def _parity(self, pts: np.ndarray) -> np.ndarray:
        """Ray-casting parity with the half-open edge rule (boundary arbitrary)."""
        x = pts[:, 0]
        y = pts[:, 1]
        a, b = self.edges
        ay = a[:, 1][:, None]
        by = b[:, 1][:, None]
        ax = a[:, 0][:, None]
        bx = b[:, 0][:, None]
        straddles = (ay > y[None, :]) != (by > y[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = ax + (y[None, :] - ay) * (bx - ax) / (by - ay)
        crossings = straddles & (x[None, :] < xint)
        return (np.sum(crossings, axis=0) % 2).astype(bool)

    # -- scalar conveniences -------------------------------------------------

    def contains(self, p) -> bool:
        return bool(self.contains_many(as_xy(p)[None, :])[0])

    def strictly_contains(self, p) -> bool:
        return bool(self.strictly_contains_many(as_xy(p)[None, :])[0])

    def on_boundary(self, p, tol: float = EPS) -> bool:
        return bool(self.on_boundary_many(as_xy(p)[None, :], tol)[0])

    def __repr__(self):
        return f"Polygon({len(self.vertices)} vertices, area={self.area:.6g})"


class MissionSpace:
    """Outer boundary polygon minus the open interiors of obstacle polygons."""

    def __init__(self, boundary: Polygon, obstacles: list[Polygon] | None = None):
        self.boundary = boundary
        self.obstacles = list(obstacles or [])
        self._validate()

    def _validate(self):
        ba, bb = self.boundary.edges
        for k, obs in enumerate(self.obstacles):
            inside = self.boundary.contains_many(obs.vertices)
            if not np.all(inside):
                v = obs.vertices[np.argmin(inside)]
                raise GeometryError(
                    f"obstacle {k} has vertex ({v[0]:g}, {v[1]:g}) outside the boundary"
                )
            oa, ob = obs.edges
            for i in range(len(oa)):
                for j in range(len(ba)):
                    if _properly_cross(oa[i], ob[i], ba[j], bb[j]):
                        raise GeometryError(
                            f"obstacle {k} crosses the boundary (edge {i})"
                        )
        # pairwise disjoint interiors: edge crossings plus sampled interior points
        rng = np.random.default_rng(0)
        samples = [self._interior_samples(obs, rng) for obs in self.obstacles]
        for k in range(len(self.obstacles)):
            for m in range(k + 1, len(self.obstacles)):
                ka, kb = self.obstacles[k].edges
                ma, mb = self.obstacles[m].edges
                for i in range(len(ka)):
                    for j in range(len(ma)):
                        if _properly_cross(ka[i], kb[i], ma[j], mb[j]):
                            raise GeometryError(
                                f"obstacles {k} and {m} overlap (crossing edges)"
                            )
                if np.any(self.obstacles[m].strictly_contains_many(samples[k])) or np.any(
                    self.obstacles[k].strictly_contains_many(samples[m])
                ):
                    raise GeometryError(f"obstacles {k} and {m} have overlapping interiors")

    @staticmethod
    def _interior_samples(poly: Polygon, rng, count: int = 16) -> np.ndarray:
        xmin, ymin, xmax, ymax = poly.bbox
        picked = []
        for _ in range(200 * count):
            p = rng.uniform((xmin, ymin), (xmax, ymax))
            if poly.strictly_contains(p):
                picked.append(p)
                if len(picked) == count:
                    break
        if not picked:
            # extremely thin obstacle: fall back to edge midpoints nudged inward
            a, b = poly.edges
            picked = [0.5 * (a[i] + b[i]) for i in range(len(a))]
        return np.asarray(picked)

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        return self.boundary.bbox

    @cached_property
    def diameter(self) -> float:
        return self.boundary.diameter

    def feasible_many(self, points) -> np.ndarray:
        """True where a point is in the closed boundary and in no obstacle interior."""
        pts = as_points_array(points)
        ok = self.boundary.contains_many(pts)
        for obs in self.obstacles:
            ok &= ~obs.strictly_contains_many(pts)
        return ok

    def __repr__(self):
        return f"MissionSpace(boundary={self.boundary!r}, obstacles={len(self.obstacles)})"


def point_in_polygon(p, poly: Polygon) -> bool:
    """Closed membership: boundary points count as inside."""
    return poly.contains(p)


def is_feasible(p, ms: MissionSpace) -> bool:
    """True iff p lies in the closed boundary and outside every obstacle interior."""
    return bool(ms.feasible_many(as_xy(p)[None, :])[0])


# -- line of sight -----------------------------------------------------------


def _properly_cross(p1, p2, q1, q2) -> bool:
    """Transversal crossing at points interior to both segments."""
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    lq = np.hypot(q2[0] - q1[0], q2[1] - q1[1])
    lp = np.hypot(p2[0] - p1[0], p2[1] - p1[1])
    if lq <= EPS or lp <= EPS:
        return False
    t1, t2 = d1 / lq, d2 / lq
    t3, t4 = d3 / lp, d4 / lp
    return (t1 * t2 < 0 and abs(t1) > EPS and abs(t2) > EPS) and (
        t3 * t4 < 0 and abs(t3) > EPS and abs(t4) > EPS
    )


def _segment_excursion(p, q, poly: Polygon, seek_outside: bool) -> bool:
    """Exact check: does p-q spend positive length outside (or inside) poly?

    Collects every contact parameter of the segment with the polygon edges and
    probes the midpoint of each gap; ``seek_outside`` chooses whether an
    excursion means leaving the closed polygon or entering its interior.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    r = q - p
    length = float(np.hypot(r[0], r[1]))
    if length <= EPS:
        return False
    eps_t = EPS / length
    ts = [0.0, 1.0]
    a, b = poly.edges
    for i in range(len(a)):
        s = b[i] - a[i]
        slen = float(np.hypot(s[0], s[1]))
        denom = r[0] * s[1] - r[1] * s[0]
        if abs(denom) > 1e-12 * length * slen:
            ap = a[i] - p
            t = (ap[0] * s[1] - ap[1] * s[0]) / denom
            u = (ap[0] * r[1] - ap[1] * r[0]) / denom
            eps_u = EPS / slen
            if -eps_t <= t <= 1 + eps_t and -eps_u <= u <= 1 + eps_u:
                ts.append(min(1.0, max(0.0, t)))
        else:
            # parallel; collect overlap endpoints when collinear
            off = abs((a[i][0] - p[0]) * r[1] - (a[i][1] - p[1]) * r[0]) / length
            if off <= EPS:
                for v in (a[i], b[i]):
                    t = float((v - p) @ r) / (length * length)
                    if -eps_t <= t <= 1 + eps_t:
                        ts.append(min(1.0, max(0.0, t)))
    ts.sort()
    for t0, t1 in zip(ts[:-1], ts[1:]):
        if (t1 - t0) * length <= 2 * EPS:
            continue
        m = p + (0.5 * (t0 + t1)) * r
        if seek_outside:
            if not poly.contains(m):
                return True
        else:
            if poly.strictly_contains(m):
                return True
    return False


def _blocked_by_polygon(source, targets, poly: Polygon, seek_outside: bool) -> np.ndarray:
    """Vectorized block test for one polygon against many targets.

    Transversal edge crossings are decided in bulk; targets with a degenerate
    contact (segment through a vertex, or both endpoints on the polygon) fall
    back to the exact scalar excursion test.
    """
    src = np.asarray(source, dtype=float)
    tgt = as_points_array(targets)
    n_t = len(tgt)
    a, b = poly.edges
    ab = b - a
    abn = np.maximum(np.linalg.norm(ab, axis=1), 1e-300)  # (E,)

    d1 = ab[:, 0] * (src[1] - a[:, 1]) - ab[:, 1] * (src[0] - a[:, 0])  # (E,)
    s1 = d1 / abn
    d2 = ab[:, 0][:, None] * (tgt[:, 1][None, :] - a[:, 1][:, None]) - ab[:, 1][
        :, None
    ] * (tgt[:, 0][None, :] - a[:, 0][:, None])  # (E,T)
    s2 = d2 / abn[:, None]

    sv = tgt - src[None, :]  # (T,2)
    svn = np.linalg.norm(sv, axis=1)  # (T,)
    svn_safe = np.maximum(svn, 1e-300)
    # cross(sv, vertex - src) for both edge endpoints
    d3 = sv[:, 0][None, :] * (a[:, 1] - src[1])[:, None] - sv[:, 1][None, :] * (
        a[:, 0] - src[0]
    )[:, None]  # (E,T)
    d4 = sv[:, 0][None, :] * (b[:, 1] - src[1])[:, None] - sv[:, 1][None, :] * (
        b[:, 0] - src[0]
    )[:, None]
    s3 = d3 / svn_safe[None, :]
    s4 = d4 / svn_safe[None, :]

    opp_edge = (s1[:, None] * s2 < 0) & (np.abs(s1) > EPS)[:, None] & (np.abs(s2) > EPS)
    opp_seg = (s3 * s4 < 0) & (np.abs(s3) > EPS) & (np.abs(s4) > EPS)
    blocked = np.any(opp_edge & opp_seg, axis=0)

    live = svn > EPS  # zero-length segments are never blocked
    blocked &= live

    # degenerate contacts: vertex on the open segment, or endpoints on the ring
    along = np.einsum("tk,ek->et", sv, a - src[None, :]) / svn_safe[None, :]  # (E,T)
    vtx_touch = (
        (np.abs(s3) <= EPS) & (along > EPS) & (along < (svn - EPS)[None, :])
    ).any(axis=0)
    suspect = vtx_touch & live & ~blocked
    if poly.on_boundary(src):
        tgt_on = poly.on_boundary_many(tgt)
        suspect |= tgt_on & live & ~blocked
    idx = np.nonzero(suspect)[0]
    for t in idx:
        if _segment_excursion(src, tgt[t], poly, seek_outside):
            blocked[t] = True
    return blocked


def line_of_sight_many(source, targets, ms: MissionSpace) -> np.ndarray:
    """True where the segment source-target stays inside the feasible region.

    Range is not considered here; combine with a distance test for full
    visibility.  Targets outside the closed boundary or strictly inside an
    obstacle are never sighted.
    """
    src = as_xy(source)
    tgt = as_points_array(targets)
    if not is_feasible(src, ms):
        return np.zeros(len(tgt), dtype=bool)
    clear = ms.boundary.contains_many(tgt)
    if not ms.boundary.is_convex:
        clear &= ~_blocked_by_polygon(src, tgt, ms.boundary, seek_outside=True)
    for obs in ms.obstacles:
        if not np.any(clear):
            break
        clear &= ~obs.strictly_contains_many(tgt)
        clear &= ~_blocked_by_polygon(src, tgt, obs, seek_outside=False)
    return clear


def visible_many(source, targets, ms: MissionSpace, radius: float) -> np.ndarray:
    """Line of sight plus the closed range constraint ``|x - source| <= radius``."""
    src = as_xy(source)
    tgt = as_points_array(targets)
    d = np.linalg.norm(tgt - src[None, :], axis=1)
    mask = d <= radius + EPS
    mask &= line_of_sight_many(src, tgt, ms)
    return mask


def is_visible(a, b, ms: MissionSpace, radius: float) -> bool:
    """True iff b is within the closed sensing range of a and the segment stays feasible."""
    return bool(visible_many(as_xy(a), as_xy(b)[None, :], ms, radius)[0])
