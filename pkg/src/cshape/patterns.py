"""Languages, difference sets and bounded searches on substitution patches."""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidInput, ResourceError
from .lattice import integer_ball, operator_norm, inverse, vec_add, vec_sub
from .substitution import DEFAULT_CELL_CAP, Substitution, is_primitive


@dataclass(frozen=True, order=True)
class Pattern:
    """Letters on a finite support; the support is kept sorted."""

    support: tuple
    letters: tuple

    @classmethod
    def from_items(cls, items: Iterable) -> "Pattern":
        pairs = sorted((tuple(p), str(a)) for p, a in items)
        return cls(tuple(p for p, _ in pairs), tuple(a for _, a in pairs))

    @classmethod
    def from_dict(cls, mapping: dict) -> "Pattern":
        return cls.from_items(mapping.items())

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.letters))

    def restrict(self, shape: Iterable) -> "Pattern":
        d = self.as_dict()
        return Pattern.from_items((p, d[tuple(p)]) for p in shape)

    def translate(self, t: Sequence[int]) -> "Pattern":
        return Pattern.from_items((vec_add(p, t), a) for p, a in zip(self.support, self.letters))

    def to_json(self) -> dict:
        return {"support": [list(p) for p in self.support], "letters": list(self.letters)}


def patterns_to_json(patterns: Iterable[Pattern]) -> str:
    return json.dumps([p.to_json() for p in sorted(patterns)], sort_keys=True)


def normalize_shape(shape: Iterable) -> tuple:
    return tuple(sorted({tuple(int(x) for x in p) for p in shape}))


# ---------------------------------------------------------------- windows

def windows(patch: dict, shape: Sequence) -> set:
    """All letter tuples (aligned to ``shape``) of translates of ``shape``
    lying inside the patch domain."""
    s0 = shape[0]
    out = set()
    for p in patch:
        t = vec_sub(p, s0)
        try:
            out.add(tuple(patch[vec_add(t, s)] for s in shape))
        except KeyError:
            continue
    return out


def _fits_in_support(shape: Sequence, support: set) -> bool:
    s0 = shape[0]
    for p in support:
        t = vec_sub(p, s0)
        if all(vec_add(t, s) in support for s in shape):
            return True
    return False


# --------------------------------------------------------------- language

def _closure(zeta: Substitution, C: tuple, seeds: set) -> set:
    lang = set(seeds)
    frontier = set(seeds)
    while frontier:
        new = set()
        for w in frontier:
            img = zeta.apply(dict(zip(C, w)))
            new |= windows(img, C)
        frontier = new - lang
        lang |= frontier
    return lang


@lru_cache(maxsize=256)
def _cover_language(zeta: Substitution) -> tuple:
    ok, wit = is_primitive(zeta)
    if not ok:
        raise InvalidInput("language generation needs a primitive substitution")
    C = normalize_shape(zeta.fill_cover)
    level = max(wit, 1)
    previous = None
    # seed from two consecutive levels; stop once the closure is unchanged
    while True:
        p = zeta.power(level)
        seeds = set()
        for a in range(zeta.size):
            seeds |= windows(dict(zip(p.support, p.table[a])), C)
        lang = _closure(zeta, C, seeds if previous is None else seeds | previous)
        if lang and lang == previous:
            return C, frozenset(lang)
        previous = lang
        level += 1


def _level_for_shape(zeta: Substitution, shape: tuple, cap: int) -> int:
    m = 1
    while True:
        if zeta.q ** m > cap:
            raise ResourceError(f"shape needs more than {cap} cells per letter", cap)
        if _fits_in_support(shape, set(zeta.support_level(m, cap))):
            return m
        m += 1


@lru_cache(maxsize=1024)
def _language_cached(zeta: Substitution, shape: tuple, cap: int) -> frozenset:
    C, lang_c = _cover_language(zeta)
    if set(shape) == set(C):
        return lang_c
    m = _level_for_shape(zeta, shape, cap)
    zm = zeta.power(m, cap) if m > 1 else zeta
    if len(lang_c) * len(C) * zm.q > cap:
        raise ResourceError(f"language extraction needs more than {cap} cells", cap)
    out = set()
    for w in lang_c:
        out |= windows(zm.apply(dict(zip(C, w))), shape)
    return frozenset(out)


def language_shape(zeta: Substitution, shape: Iterable, cap: int = DEFAULT_CELL_CAP) -> frozenset:
    """Language on ``shape`` as letter-index tuples aligned to the sorted shape."""
    return _language_cached(zeta, normalize_shape(shape), cap)


def language(zeta: Substitution, shape: Iterable, cap: int = DEFAULT_CELL_CAP) -> list:
    """L_P(X) as a sorted list of Patterns."""
    s = normalize_shape(shape)
    return sorted(Pattern(s, tuple(zeta.alphabet[x] for x in w)) for w in language_shape(zeta, s, cap))


def is_admissible(zeta: Substitution, pattern: Pattern) -> bool:
    w = tuple(zeta.index[a] for a in pattern.letters)
    return w in language_shape(zeta, pattern.support)


# -------------------------------------------------------- difference sets

class DifferenceSet(NamedTuple):
    W: tuple
    witnesses: tuple


def difference_sets(zeta: Substitution) -> list:
    """Nonempty W ⊆ K realised as the exact disagreement set of two
    K-patterns of the language, one witness pair each."""
    K = normalize_shape(zeta.k_set)
    pats = sorted(language_shape(zeta, K))
    found = {}
    for w1, w2 in itertools.combinations(pats, 2):
        W = tuple(k for k, a, b in zip(K, w1, w2) if a != b)
        if W and W not in found:
            found[W] = (w1, w2)
    out = []
    for W in sorted(found, key=lambda w: (len(w), w)):
        w1, w2 = found[W]
        out.append(DifferenceSet(W, (Pattern(K, tuple(zeta.alphabet[x] for x in w1)),
                                     Pattern(K, tuple(zeta.alphabet[x] for x in w2)))))
    return out


# --------------------------------------------------------- recognizability

def phase_table(zeta: Substitution, R) -> dict | None:
    """Map from B(0,R)-patterns of zeta(X) to the phase index in F1, or None
    when some pattern occurs at two phases."""
    ball = integer_ball(R, zeta.d)
    quot = zeta.digits.quotient
    U = normalize_shape(quot(vec_add(f, b)) for f in zeta.support for b in ball)
    table = {}
    for w in language_shape(zeta, U):
        img = zeta.apply(dict(zip(U, w)))
        for i, f in enumerate(zeta.support):
            key = tuple(img[vec_add(f, b)] for b in ball)
            if table.setdefault(key, i) != i:
                return None
    return table


def recognizability_radius(zeta: Substitution, r_max: int):
    """Least integer R <= r_max at which phases are determined, else None."""
    for R in range(0, r_max + 1):
        if phase_table(zeta, R) is not None:
            return R
    return None


# ------------------------------------------------------------------ patches

def central_patch(zeta: Substitution, half_side: int, cap: int = DEFAULT_CELL_CAP):
    """A legal patch containing the box [-half_side, half_side]^d, obtained as
    zeta^m of a legal K-pattern. Returns (patch dict, level m)."""
    K = normalize_shape(zeta.k_set)
    seed = min(language_shape(zeta, K))
    box = list(itertools.product(range(-half_side, half_side + 1), repeat=zeta.d))
    m = 0
    while True:
        cells = len(K) * zeta.q ** m
        if cells > cap:
            raise ResourceError(f"patch needs {cells} cells, above the cell cap {cap}", cap)
        patch = dict(zip(K, seed))
        if m:
            patch = zeta.power(m, cap).apply(patch)
        if all(b in patch for b in box):
            return patch, m
        m += 1


def period_search(zeta: Substitution, N: int, cap: int = DEFAULT_CELL_CAP) -> list:
    """Periods p with 0 < ‖p‖ <= N observed on a large legal patch and
    confirmed on a patch twice as large (evidence, not proof)."""
    if N <= 0:
        return []
    side = math.ceil(4 * N * float(operator_norm(zeta.L)))
    found = None
    for half in (side, 2 * side):
        patch, _ = central_patch(zeta, half, cap)
        box = list(itertools.product(range(-half, half + 1), repeat=zeta.d))
        cands = found if found is not None else [
            p for p in integer_ball(N, zeta.d) if any(p) and p > tuple(-x for x in p)]
        found = [p for p in cands
                 if all(patch[b] == patch[q] for b in box if (q := vec_add(b, p)) in patch)]
    return sorted(found)


# ------------------------------------------------------------- repetitivity

def occurrences(patch: dict, pattern: Pattern) -> list:
    """Translations t with pattern + t contained in the patch and equal there."""
    items = list(zip(pattern.support, pattern.letters))
    s0 = pattern.support[0]
    out = []
    for p in patch:
        t = vec_sub(p, s0)
        if all(patch.get(vec_add(t, s)) == a for s, a in items):
            out.append(t)
    return sorted(out)


def pattern_free_ball(patch: dict, pattern: Pattern, radius) -> tuple | None:
    """A centre c (half-integer grid) such that every lattice point of the
    closed ball B(c, radius) lies in the patch and no occurrence of the
    pattern meets the ball. None if there is none."""
    r = Fraction(radius)
    occ_cells = {vec_add(t, s) for t in occurrences(patch, pattern) for s in pattern.support}
    d = len(next(iter(patch)))
    lo = [min(p[i] for p in patch) for i in range(d)]
    hi = [max(p[i] for p in patch) for i in range(d)]
    grids = [[Fraction(k, 2) for k in range(2 * lo[i], 2 * hi[i] + 1)] for i in range(d)]
    for c in itertools.product(*grids):
        if any(c[i] - r < lo[i] - Fraction(1, 2) or c[i] + r > hi[i] + Fraction(1, 2) for i in range(d)):
            continue
        pts = _ball_points(c, r)
        if all(p in patch for p in pts) and not any(p in occ_cells for p in pts):
            return c
    return None


def _ball_points(c, r) -> list:
    ranges = [range(math.ceil(ci - r), math.floor(ci + r) + 1) for ci in c]
    r2 = r * r
    return [p for p in itertools.product(*ranges) if sum((Fraction(x) - y) ** 2 for x, y in zip(p, c)) <= r2]


class Repetitivity(NamedTuple):
    radii: list
    values: list       # empirical M(R)
    exponent: float    # -log‖L‖ / log‖L^-1‖


def repetitivity_exponent(zeta: Substitution) -> float:
    a = operator_norm(zeta.L)
    b = operator_norm(inverse(zeta.L))
    if a * b == 1:
        return 1.0
    return -math.log(float(a)) / math.log(float(b))


def repetitivity(zeta: Substitution, radii: Sequence[int], seed: int = 0, samples: int = 64,
                 cap: int = DEFAULT_CELL_CAP) -> Repetitivity:
    """Empirical repetitivity function: for each R the largest, over sampled
    centres z, of the radius of the smallest ball around z containing an
    occurrence of every B(0,R)-pattern."""
    rng = random.Random(seed)
    values = []
    span = 2 * max(max(radii, default=1), 1) + 2
    centres = np.array([[rng.randint(-span, span) for _ in range(zeta.d)] for _ in range(samples)],
                       dtype=float)
    half = 4 * span
    for R in radii:
        ball = integer_ball(R, zeta.d)
        pats = language_shape(zeta, ball)
        while True:
            patch, _ = central_patch(zeta, half, cap)
            occ = {w: [] for w in pats}
            for t in patch:
                if all(abs(x) <= half - R for x in t):
                    w = tuple(patch[vec_add(t, b)] for b in ball)
                    if w in occ:
                        occ[w].append(t)
            if all(occ.values()):
                worst, ok = 0.0, True
                for v in occ.values():
                    a = np.array(v, dtype=float)
                    dist = np.sqrt(((centres[:, None, :] - a[None, :, :]) ** 2).sum(-1)).min(axis=1)
                    # the nearest occurrence must be closer than the patch edge
                    if np.any(dist + R > half - span):
                        ok = False
                        break
                    worst = max(worst, float(dist.max()) + R)
                if ok:
                    values.append(worst)
                    break
            half *= 2
    return Repetitivity(list(radii), values, repetitivity_exponent(zeta))
