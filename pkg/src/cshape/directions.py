"""Nondeterministic and deterministic directions of polytope substitutions.

Directions are primitive integer vectors v; the half-space attached to v is
H_v = {x : <x, v> < 0}. Cones come from the opposite normal fan of the
convex hull of the digit tile.
"""

from __future__ import annotations

import itertools
import json
from typing import NamedTuple

from .errors import ConsistencyError, InvalidInput, InvalidState
from .geometry import (
    Cone,
    _ext_levels,
    convex_hull,
    digit_tile_hull,
    normal_fan,
    opposite_normal_cone,
    polytope_test,
)
from .lattice import dot, integer_ball, mat_pow, mat_vec, vec_add
from .patterns import difference_sets, language_shape, normalize_shape
from .substitution import Substitution, is_bijective_on_extremities


def quotient_n(zeta: Substitution, x, n: int) -> tuple:
    """q with x = L^n(q) + f_n, f_n in F_n."""
    for _ in range(n):
        x = zeta.digits.quotient(x)
    return tuple(x)


def h1_check(zeta: Substitution, f, n: int) -> bool:
    """f + K̄ ⊆ L^n(K) + F_n."""
    K = set(zeta.k_set)
    return all(quotient_n(zeta, vec_add(f, c), n) in K for c in zeta.k_bar)


def h2_check(zeta: Substitution, f, n: int, W, v) -> bool:
    """Points of f + K̄ strictly on the H_v side of f lie in L^n(K \\ W) + F_n."""
    K = set(zeta.k_set) - set(map(tuple, W))
    return all(quotient_n(zeta, vec_add(f, c), n) in K for c in zeta.k_bar if dot(c, v) < 0)


class Certificate(NamedTuple):
    W: tuple
    k: tuple
    n: int
    f: tuple
    face: tuple           # vertices of the smallest face of Q_n containing f
    cone: Cone            # opposite normal cone of that face
    witnesses: tuple      # the two K-patterns realising W

    def to_json(self) -> dict:
        return {"W": [list(w) for w in self.W], "k": list(self.k), "n": self.n, "f": list(self.f),
                "face": [[str(x) for x in p] for p in self.face],
                "cone": [list(g) for g in self.cone.generators],
                "witnesses": [w.to_json() for w in self.witnesses]}


def _require_polytope(zeta: Substitution, n_max: int = 6):
    if zeta.d > 3:
        raise InvalidInput("direction certification needs face lattices (d <= 3)")
    test = polytope_test(zeta, max(n_max, 2))
    if not test.is_polytope:
        raise InvalidState("the digit tile hull is not certified to be a polytope")
    if not is_bijective_on_extremities(zeta):
        raise InvalidState("substitution is not bijective on extremities")
    return test


def stable_fan(zeta: Substitution, level: int | None = None) -> list:
    """Opposite normal cones of the proper faces of conv(T), as (face vertices, Cone)."""
    if level is None:
        level = _require_polytope(zeta).level
    hull = digit_tile_hull(zeta, level)
    return [(tuple(hull.vertices[i] for i in sorted(face)), cone) for face, cone in normal_fan(hull)]


def _cone_inside(inner: Cone, outer: Cone) -> bool:
    return all(outer.contains(g) for g in inner.generators)


def _boundary_points(zeta: Substitution, k, n: int, W, ext_n: list):
    Ln = mat_pow(zeta.L, n)
    P = convex_hull(vec_add(mat_vec(Ln, k), e) for e in ext_n)
    Q = convex_hull(vec_add(mat_vec(Ln, w), e) for w in W for e in ext_n)
    lo = [min(int(p[i]) for p in P.vertices) for i in range(zeta.d)]
    hi = [max(int(p[i]) for p in P.vertices) for i in range(zeta.d)]
    for f in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if P.on_boundary(f) and Q.on_boundary(f):
            yield f, Q


def certify_nondeterministic(zeta: Substitution, n_max: int, fan: list | None = None,
                             diff_sets: list | None = None) -> dict:
    """Map from fan-cone index to the first Certificate found.

    Search order: W by (|W|, W), then n, then k in W, then f in lexicographic
    order. A certificate's cone N̂_F(Q_n) certifies every fan cone it contains.
    """
    if fan is None:
        fan = stable_fan(zeta)
    if n_max <= 0:
        return {}
    if diff_sets is None:
        diff_sets = difference_sets(zeta)
    levels = _ext_levels(zeta, n_max)
    found: dict = {}
    for ds in diff_sets:
        for n in range(1, n_max + 1):
            for k in ds.W:
                for f, Q in _boundary_points(zeta, k, n, ds.W, levels[n - 1]):
                    if not h1_check(zeta, f, n):
                        continue
                    face = Q.smallest_face(f)
                    cone = opposite_normal_cone(Q, face)
                    hits = [i for i, (_, c) in enumerate(fan) if i not in found and _cone_inside(c, cone)]
                    if not hits:
                        continue
                    if not h2_check(zeta, f, n, ds.W, cone.interior_sample()):
                        raise ConsistencyError(f"H2 fails at f={f} although f lies on the boundary of Q_n")
                    cert = Certificate(ds.W, k, n, f, tuple(Q.vertices[i] for i in sorted(face)), cone,
                                       ds.witnesses)
                    for i in hits:
                        found[i] = cert
                    if len(found) == len(fan):
                        return found
    return found


def _half_shape(v, r: int, d: int) -> tuple:
    """(B(0,r) ∩ H_v, B(0,1) minus H_v) as sorted point tuples."""
    inside = tuple(sorted(p for p in integer_ball(r, d) if dot(p, v) < 0))
    near = tuple(sorted(p for p in integer_ball(1, d) if dot(p, v) >= 0))
    return inside, near


def certify_deterministic(zeta: Substitution, v, r_max: int, cap: int = 10**7) -> int | None:
    """Least r <= r_max such that language patterns on B(0,r) ∩ H_v determine
    the letters on B(0,1) minus H_v; None when no such r is found."""
    v = tuple(v)
    for r in range(1, r_max + 1):
        inside, near = _half_shape(v, r, zeta.d)
        if not inside:
            continue
        shape = normalize_shape(inside + near)
        pos = {p: i for i, p in enumerate(shape)}
        ii = [pos[p] for p in inside]
        jj = [pos[p] for p in near]
        seen: dict = {}
        ok = True
        for w in language_shape(zeta, shape, cap):
            key = tuple(w[i] for i in ii)
            val = tuple(w[j] for j in jj)
            if seen.setdefault(key, val) != val:
                ok = False
                break
        if ok:
            return r
    return None


# ------------------------------------------------------------------ report

class ConeStatus(NamedTuple):
    face: tuple
    cone: Cone
    status: str                    # nondeterministic | deterministic | unknown
    certificate: Certificate | None
    radius: int | None


class DirectionReport(NamedTuple):
    cones: list
    n_max: int
    r_max: int

    def counts(self) -> dict:
        out = {"nondeterministic": 0, "deterministic": 0, "unknown": 0}
        for c in self.cones:
            out[c.status] += 1
        return out

    def nondeterministic_cones(self) -> list:
        return [c.cone for c in self.cones if c.status == "nondeterministic"]

    def to_json(self) -> dict:
        rows = []
        for c in self.cones:
            rows.append({
                "face": [[str(x) for x in p] for p in c.face],
                "generators": [list(g) for g in c.cone.generators],
                "dim": c.cone.dim,
                "status": c.status,
                "certificate": c.certificate.to_json() if c.certificate else None,
                "coding_radius": c.radius,
            })
        return {"cones": rows, "budget": {"n_max": self.n_max, "r_max": self.r_max},
                "counts": self.counts()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def direction_report(zeta: Substitution, n_max: int = 4, r_max: int = 4,
                     cross_check: bool = True) -> DirectionReport:
    """Classify every cone of the stable fan.

    With ``cross_check`` the deterministic search is also run on cones
    certified nondeterministic; success there is a hard failure.
    """
    test = _require_polytope(zeta)
    fan = stable_fan(zeta, test.level)
    nd = certify_nondeterministic(zeta, n_max, fan)
    rows = []
    for i, (face, cone) in enumerate(fan):
        sample = cone.interior_sample()
        if i in nd:
            if cross_check and r_max > 0 and certify_deterministic(zeta, sample, r_max) is not None:
                raise ConsistencyError(f"cone {cone.generators} certified both ways")
            rows.append(ConeStatus(face, cone, "nondeterministic", nd[i], None))
            continue
        r = certify_deterministic(zeta, sample, r_max) if r_max > 0 else None
        status = "deterministic" if r is not None else "unknown"
        rows.append(ConeStatus(face, cone, status, None, r))
    return DirectionReport(rows, n_max, r_max)


# ------------------------------------------------------- soundness check

def letter_at(zeta: Substitution, seed: dict, x, N: int):
    """Letter index of zeta^N(seed) at x, or None outside L^N(dom seed) + F_N."""
    digits = []
    for _ in range(N):
        dec = zeta.digits.decompose(x)
        digits.append(dec.digit)
        x = dec.quotient
    a = seed.get(tuple(x))
    if a is None:
        return None
    for i in reversed(digits):
        a = zeta.table[a][i]
    return a


class SoundnessWitness(NamedTuple):
    level: int           # N = n + m
    centre: tuple
    agree_points: int
    disagreement: tuple


def soundness_check(zeta: Substitution, cert: Certificate, v=None, R: int = 64,
                    m_max: int = 12) -> SoundnessWitness:
    """Build the two points of the certificate near c_m = L^m f + sum_{i<m} L^i g
    and check they agree on (c_m + H_v) ∩ B(c_m, R) and differ inside B(c_m, R)."""
    v = tuple(v) if v is not None else cert.cone.interior_sample()
    K = list(zeta.k_set)
    w1 = {k: zeta.index[a] for k, a in zip(cert.witnesses[0].support, cert.witnesses[0].letters)}
    w2 = {k: zeta.index[a] for k, a in zip(cert.witnesses[1].support, cert.witnesses[1].letters)}
    if set(w1) != set(K):
        raise ConsistencyError("witness patterns are not K-patterns")
    g = min(zeta.support, key=lambda s: (dot(v, s), s))
    ball = integer_ball(R, zeta.d)
    for m in range(0, m_max + 1):
        c = tuple(int(x) for x in mat_vec(mat_pow(zeta.L, m), cert.f))
        gsum = tuple([0] * zeta.d)
        for i in range(m):
            gsum = vec_add(gsum, mat_vec(mat_pow(zeta.L, i), g))
        c = vec_add(c, gsum)
        N = cert.n + m
        agree, covered, diff = 0, True, None
        for b in ball:
            x = vec_add(c, b)
            a1, a2 = letter_at(zeta, w1, x, N), letter_at(zeta, w2, x, N)
            if dot(b, v) < 0:
                if a1 is None or a2 is None:
                    covered = False
                    break
                if a1 != a2:
                    raise ConsistencyError(f"points differ at {x} inside the half-space for v={v}")
                agree += 1
            elif diff is None and a1 is not None and a2 is not None and a1 != a2:
                diff = x
        if covered and diff is not None:
            return SoundnessWitness(N, c, agree, diff)
    raise ConsistencyError(f"no level m <= {m_max} covers the half ball for v={v}")
