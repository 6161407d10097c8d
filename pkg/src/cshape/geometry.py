"""Exact rational convex geometry for digit sets and digit tiles."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidInput, InvalidState, ResourceError
from .lattice import (
    determinant,
    dot,
    identity,
    inverse,
    mat_pow,
    mat_sub,
    mat_vec,
    rational_eigenvalues,
    transpose,
    vec_add,
    vec_sub,
)

Point = tuple


def _frac(p) -> Point:
    return tuple(Fraction(x) for x in p)


def primitive(v: Sequence) -> tuple:
    """Integer vector with coprime entries on the ray of ``v``."""
    fr = [Fraction(x) for x in v]
    den = reduce(math.lcm, (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        raise InvalidInput("zero vector has no direction")
    return tuple(x // g for x in ints)


def rank(vectors: Sequence) -> int:
    rows = [list(map(Fraction, v)) for v in vectors]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def affine_dimension(points: Sequence) -> int:
    pts = [_frac(p) for p in points]
    if len(pts) <= 1:
        return 0
    return rank([vec_sub(p, pts[0]) for p in pts[1:]])


# ------------------------------------------------------------ exact simplex

def feasible_nonnegative(columns: Sequence, target: Sequence) -> bool:
    """Whether target = sum λ_j columns[j] has a solution with λ >= 0.

    Phase-one simplex over the rationals with Bland's rule.
    """
    n = len(columns)
    m = len(target)
    if n == 0:
        return all(Fraction(t) == 0 for t in target)
    rows = []
    for i in range(m):
        row = [Fraction(columns[j][i]) for j in range(n)]
        b = Fraction(target[i])
        if b < 0:
            row = [-x for x in row]
            b = -b
        rows.append(row + [Fraction(int(i == k)) for k in range(m)] + [b])
    width = n + m
    basis = [n + i for i in range(m)]
    z = [-sum(rows[i][j] for i in range(m)) for j in range(n)] + [Fraction(0)] * m
    z.append(-sum(r[-1] for r in rows))
    while True:
        enter = next((j for j in range(width) if z[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            break
        r = best[1]
        piv = rows[r][enter]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        f = z[enter]
        z = [x - f * y for x, y in zip(z, rows[r])]
        basis[r] = enter
    return z[-1] == 0


def in_hull(point: Sequence, points: Sequence) -> bool:
    cols = [tuple(p) + (1,) for p in points]
    return feasible_nonnegative(cols, tuple(point) + (1,))


def in_cone(v: Sequence, generators: Sequence) -> bool:
    return feasible_nonnegative(list(generators), tuple(v))


def extreme_points_lp(points: Iterable) -> list:
    """Extreme points by one feasibility test per point (any dimension)."""
    pts = sorted({_frac(p) for p in points})
    return [p for i, p in enumerate(pts) if not in_hull(p, pts[:i] + pts[i + 1:])]


# ---------------------------------------------------------------- polytopes

class Facet(NamedTuple):
    normal: tuple      # primitive inward integer normal u
    offset: Fraction   # u·x >= offset on the polytope
    vertices: frozenset


class Polytope:
    """Vertices plus, for d <= 3, the face lattice.

    ``faces[k]`` lists the k-dimensional faces as frozensets of vertex
    indices; the polytope itself is ``faces[dim]``.
    """

    def __init__(self, vertices, dim: int, d: int, faces: dict | None, facets: list):
        self.vertices = tuple(vertices)
        self.dim = dim
        self.d = d
        self.faces = faces
        self.facets = facets

    def __repr__(self):
        return f"Polytope(vertices={[tuple(map(str, v)) for v in self.vertices]})"

    @property
    def full(self) -> frozenset:
        return frozenset(range(len(self.vertices)))

    def face_dimension(self, face: frozenset) -> int:
        return affine_dimension([self.vertices[i] for i in face])

    def contains(self, x) -> bool:
        if self.facets and self.dim == self.d:
            return all(dot(f.normal, x) >= f.offset for f in self.facets)
        return in_hull(_frac(x), self.vertices)

    def facets_through(self, x) -> list:
        return [f for f in self.facets if dot(f.normal, x) == f.offset]

    def on_boundary(self, x) -> bool:
        return self.contains(x) and bool(self.facets_through(x))

    def smallest_face(self, x) -> frozenset:
        """Vertex set of the smallest face containing a point of the polytope."""
        fs = self.facets_through(x)
        if not fs:
            return self.full
        return frozenset.intersection(*(f.vertices for f in fs))

    def all_faces(self) -> list:
        return [f for k in sorted(self.faces) for f in self.faces[k]]


def _hull_2d(pts: list) -> list:
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]   # counter-clockwise


def _facet(normal, base, verts) -> Facet:
    u = primitive(normal)
    off = dot(u, base)
    return Facet(u, off, frozenset(i for i, v in enumerate(verts) if dot(u, v) == off))


def _polygon(pts: list) -> Polytope:
    ccw = _hull_2d(pts)
    verts = sorted(ccw)
    facets = []
    for p, q in zip(ccw, ccw[1:] + ccw[:1]):
        e = vec_sub(q, p)
        facets.append(_facet((-e[1], e[0]), p, verts))
    facets.sort()
    faces = {0: [frozenset([i]) for i in range(len(verts))],
             1: sorted((f.vertices for f in facets), key=sorted),
             2: [frozenset(range(len(verts)))]}
    return Polytope(verts, 2, 2, faces, facets)


def _cross3(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _polyhedron(pts: list) -> Polytope:
    planes = {}
    for a, b, c in itertools.combinations(pts, 3):
        n = _cross3(vec_sub(b, a), vec_sub(c, a))
        if not any(n):
            continue
        u = primitive(n)
        off = dot(u, a)
        vals = [dot(u, p) - off for p in pts]
        if all(v >= 0 for v in vals):
            planes[(u, off)] = True
        elif all(v <= 0 for v in vals):
            planes[(tuple(-x for x in u), -off)] = True
    verts = sorted(p for p in pts
                   if rank([u for (u, off) in planes if dot(u, p) == off]) == 3)
    facets = sorted(Facet(u, off, frozenset(i for i, v in enumerate(verts) if dot(u, v) == off))
                    for (u, off) in planes)
    edges = set()
    for f, g in itertools.combinations(facets, 2):
        common = f.vertices & g.vertices
        if len(common) >= 2 and rank([f.normal, g.normal]) == 2:
            edges.add(common)
    faces = {0: [frozenset([i]) for i in range(len(verts))],
             1: sorted(edges, key=sorted),
             2: sorted((f.vertices for f in facets), key=sorted),
             3: [frozenset(range(len(verts)))]}
    return Polytope(verts, 3, 3, faces, facets)


def _segment(pts: list, d: int) -> Polytope:
    lo, hi = min(pts), max(pts)
    verts = sorted({lo, hi})
    faces = {0: [frozenset([i]) for i in range(len(verts))]}
    if len(verts) == 2:
        faces[1] = [frozenset([0, 1])]
    return Polytope(verts, len(verts) - 1, d, faces, [])


def convex_hull(points: Iterable) -> Polytope:
    """Exact hull; full face lattice and inward facet normals when d <= 3."""
    pts = sorted({_frac(p) for p in points})
    if not pts:
        raise InvalidInput("empty point set")
    d = len(pts[0])
    dim = affine_dimension(pts)
    if dim <= 1:
        return _segment(pts, d)
    if d == 2:
        return _polygon(pts)
    if d == 3 and dim == 3:
        return _polyhedron(pts)
    if d == 3 and dim == 2:
        # planar set in space: hull of a coordinate projection that is injective on the plane
        for drop in range(3):
            keep = [i for i in range(3) if i != drop]
            proj = {tuple(p[i] for i in keep): p for p in pts}
            if affine_dimension(list(proj)) == 2:
                poly = _polygon(list(proj))
                verts = sorted(proj[v] for v in poly.vertices)
                faces = {0: [frozenset([i]) for i in range(len(verts))],
                         1: [], 2: [frozenset(range(len(verts)))]}
                order = {proj_v: verts.index(proj[proj_v]) for proj_v in poly.vertices}
                for f in poly.facets:
                    faces[1].append(frozenset(order[poly.vertices[i]] for i in f.vertices))
                faces[1].sort(key=sorted)
                return Polytope(verts, 2, 3, faces, [])
    verts = extreme_points_lp(pts)
    return Polytope(verts, dim, d, None, [])


def extreme_points(points: Iterable) -> list:
    return list(convex_hull(points).vertices)


# -------------------------------------------------------------- normal fans

class Cone(NamedTuple):
    generators: tuple   # primitive integer vectors, sorted
    dim: int

    def contains(self, v) -> bool:
        if not self.generators:
            return not any(v)
        return in_cone(v, self.generators)

    def interior_sample(self) -> tuple:
        if not self.generators:
            return ()
        return primitive(reduce(vec_add, self.generators))


def opposite_normal_cone(P: Polytope, face: frozenset) -> Cone:
    """Directions v whose minimum over P is attained on all of ``face``."""
    if P.dim != P.d or not P.facets:
        raise InvalidInput("normal cones need a full-dimensional polytope with d <= 3")
    gens = tuple(sorted({f.normal for f in P.facets if face <= f.vertices}))
    return Cone(gens, rank(gens) if gens else 0)


def normal_fan(P: Polytope) -> list:
    """(face, cone) for every proper nonempty face."""
    out = []
    for k in sorted(P.faces):
        if k == P.dim:
            continue
        for face in P.faces[k]:
            out.append((face, opposite_normal_cone(P, face)))
    return out


def minimizing_face(P: Polytope, v) -> frozenset:
    vals = [dot(v, x) for x in P.vertices]
    m = min(vals)
    return frozenset(i for i, x in enumerate(vals) if x == m)


# ------------------------------------------------------ digit-set polytopes

def _ext_levels(zeta, n_max: int) -> list:
    """Ext(conv(F_n)) for n = 1..n_max via conv(F_{n+1}) = conv(F1) + L conv(F_n)."""
    e1 = list(convex_hull(zeta.support).vertices)
    out = [e1]
    for _ in range(n_max - 1):
        prev = out[-1]
        cand = {vec_add(f, mat_vec(zeta.L, e)) for f in e1 for e in prev}
        out.append(list(convex_hull(cand).vertices))
    return out


def _is_scalar(L) -> bool:
    """L = λ·Id with λ > 1 (negative λ can flip extreme points between levels)."""
    return L[0][0] > 1 and all(L[i][j] == (L[0][0] if i == j else 0)
                               for i in range(len(L)) for j in range(len(L)))


class PolytopeTest(NamedTuple):
    is_polytope: bool | None   # None means unknown within the budget
    level: int | None
    counts: list               # |Ext(conv F_n)| for n = 1, 2, ...


def polytope_test(zeta, n_max: int = 6) -> PolytopeTest:
    if n_max < 2:
        raise InvalidInput("n_max must be at least 2")
    if _is_scalar(zeta.L):
        return PolytopeTest(True, 1, [len(convex_hull(zeta.support).vertices)])
    levels = _ext_levels(zeta, n_max)
    counts = [len(e) for e in levels]
    for n in range(1, n_max):
        if counts[n - 1] == counts[n]:
            return PolytopeTest(True, n, counts[: n + 1])
    return PolytopeTest(None, None, counts)


def digit_tile_hull(zeta, level: int) -> Polytope:
    """conv(T) = (L^m - Id)^{-1} conv(F_m) with m = level + 1."""
    if not _is_scalar(zeta.L):
        counts = [len(e) for e in _ext_levels(zeta, level + 1)]
        if counts[level - 1] != counts[level]:
            raise InvalidState(f"extreme-point counts do not stabilize at level {level}")
    m = level + 1
    ext = _ext_levels(zeta, m)[-1]
    inv = inverse(mat_sub(mat_pow(zeta.L, m), identity(zeta.d)))
    return convex_hull(mat_vec(inv, e) for e in ext)


# ------------------------------------------------------------------- tiles

class TileApproximation(NamedTuple):
    level: int
    points: list     # L^-n(F_n), rational points


def tile_points(zeta, n: int, cap: int = 10**7) -> TileApproximation:
    if zeta.q ** n > cap:
        raise ResourceError(f"tile approximation needs {zeta.q ** n} points, above the cap {cap}", cap)
    inv = inverse(zeta.L)
    pts = [tuple(Fraction(0) for _ in range(zeta.d))]
    for _ in range(n):
        pts = [mat_vec(inv, vec_add(p, f)) for p in pts for f in zeta.support]
    return TileApproximation(n, sorted(pts))


def _frame(points, width: int, height: int, margin: int):
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) if len(p) > 1 else 0.0 for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-12)
    scale = min(width - 2 * margin - 1, height - 2 * margin - 1) / span
    return xs, ys, x0, y0, scale


def to_pgm(points, width: int = 512, height: int = 512, margin: int = 8) -> bytes:
    """Binary PGM (P5, 8-bit): black points on white."""
    img = bytearray([255]) * (width * height)
    xs, ys, x0, y0, scale = _frame(points, width, height, margin)
    for x, y in zip(xs, ys):
        c = margin + int(round((x - x0) * scale))
        r = height - 1 - (margin + int(round((y - y0) * scale)))
        img[r * width + c] = 0
    return f"P5\n{width} {height}\n255\n".encode("ascii") + bytes(img)


def to_svg(points, level: int, det: int, d: int = 2, width: int = 512, height: int = 512,
           margin: int = 8) -> str:
    """SVG 1.1 with one square per point, side |det L|^(-level/d) in tile units."""
    xs, ys, x0, y0, scale = _frame(points, width, height, margin)
    side = scale * abs(det) ** (-level / d)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             '<g fill="black">']
    for x, y in zip(xs, ys):
        cx = margin + (x - x0) * scale
        cy = height - margin - (y - y0) * scale
        lines.append(f'<rect x="{cx - side / 2:.4f}" y="{cy - side / 2:.4f}" width="{side:.4f}" height="{side:.4f}"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def tile_raster(zeta, n: int, width: int = 512, height: int = 512, margin: int = 8, cap: int = 10**7):
    """(approximation, PGM bytes, SVG text)."""
    approx = tile_points(zeta, n, cap)
    return (approx, to_pgm(approx.points, width, height, margin),
            to_svg(approx.points, n, determinant(zeta.L), zeta.d, width, height, margin))


# ------------------------------------------------------ eigenvector checks

def parallel(u: Sequence, v: Sequence) -> bool:
    return rank([u, v]) <= 1


class FacetEigen(NamedTuple):
    normal: tuple
    power: int | None   # least k with (L*)^k u parallel to u


def facet_normal_eigencheck(zeta, k_max: int = 8, level: int = 1):
    """Per facet of conv(F_level): the least k <= k_max with (L*)^k u ∥ u;
    plus the rational eigenvalues of L."""
    ext = _ext_levels(zeta, level)[-1]
    P = convex_hull(ext)
    if P.dim != zeta.d:
        raise InvalidInput("conv(F) is not full-dimensional; use a power of the substitution")
    lt = transpose(zeta.L)
    report = []
    for f in P.facets:
        u = f.normal
        v = u
        found = None
        for k in range(1, k_max + 1):
            v = mat_vec(lt, v)
            if parallel(u, v):
                found = k
                break
        report.append(FacetEigen(u, found))
    eig = rational_eigenvalues(zeta.L)
    return report, eig, all(e.denominator == 1 for e in eig) and len(eig) == zeta.d
