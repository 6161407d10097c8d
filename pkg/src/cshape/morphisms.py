"""Height lattices, eigenvalues, odometer factors, automorphisms and
symmetry candidates of constant-shape substitutions."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

from .errors import ConsistencyError, InvalidInput, InvalidState, ResourceError
from .lattice import (
    Lattice,
    as_matrix,
    determinant,
    identity,
    integer_ball,
    inverse,
    mat_mul,
    mat_pow,
    mat_vec,
    max_sq_norm,
    operator_norm,
    saturate_height,
    transpose,
    vec_add,
    vec_sub,
)
from .patterns import Pattern, central_patch, language_shape, normalize_shape, phase_table
from .substitution import DEFAULT_CELL_CAP, Substitution, is_primitive


# ------------------------------------------------------------ height lattice

class HeightLattice(NamedTuple):
    lattice: Lattice
    observed: Lattice      # lattice generated by the observed return vectors
    window: int            # half-side of the last box scanned
    stable: bool           # two consecutive windows gave the same lattice


def _return_lattice(patch: dict, half: int, d: int) -> Lattice | None:
    first: dict = {}
    gens = []
    for p in itertools.product(range(-half, half + 1), repeat=d):
        a = patch[p]
        if a in first:
            gens.append(vec_sub(p, first[a]))
        else:
            first[a] = p
    try:
        return Lattice.from_generators(gens, d)
    except InvalidInput:
        return None


def height_lattice(zeta: Substitution, window: int = 4, max_window: int = 64,
                   cap: int = DEFAULT_CELL_CAP) -> HeightLattice:
    """Lattice generated by return vectors j (x_{k+j} = x_k) seen in a box of
    a legal patch, doubled until stable, then saturated under L."""
    if not is_primitive(zeta)[0]:
        raise InvalidInput("height lattice needs a primitive substitution")
    prev = None
    half = max(window, 1)
    while True:
        patch, _ = central_patch(zeta, half, cap)
        obs = _return_lattice(patch, half, zeta.d)
        if obs is not None and obs == prev:
            return HeightLattice(saturate_height(obs.basis, zeta.L), obs, half, True)
        if half * 2 > max_window:
            if obs is None:
                raise ResourceError("return vectors do not span a lattice within the window cap", max_window)
            return HeightLattice(saturate_height(obs.basis, zeta.L), obs, half, False)
        prev = obs
        half *= 2


# --------------------------------------------------------------- eigenvalues

def eigenvalue_check(x: Sequence, zeta: Substitution, height: Lattice | None = None) -> bool:
    """Whether <L^n j, x> is an integer for all large n and all j in H.

    Tracks y_n = (L*)^n x modulo Z^d, which lives in the finite group
    (D^-1 Z / Z)^d for D the denominator of x, and tests the cycle against
    the dual lattice H*.
    """
    for c in x:
        if not isinstance(c, (int, Fraction)):
            raise InvalidInput("eigenvalue candidates must be rational")
    if height is None:
        height = height_lattice(zeta).lattice
    lt = transpose(zeta.L)
    dual = height.dual()
    y = tuple(Fraction(c) % 1 for c in x)
    seen: dict = {}
    orbit = []
    while y not in seen:
        seen[y] = len(orbit)
        orbit.append(y)
        y = tuple(c % 1 for c in mat_vec(lt, y))
    cycle = orbit[seen[y]:]
    return all(v in dual for v in cycle)


# -------------------------------------------------- maximal equicontinuous

class OdometerChain(NamedTuple):
    """The lattice chain L^n(H), n >= 0."""
    H: Lattice
    L: tuple

    def level(self, n: int) -> Lattice:
        return self.H.image(mat_pow(self.L, n)) if n else self.H

    def quotient_size(self, n: int) -> int:
        return self.level(n).index()


def meq_factor(zeta: Substitution, height: Lattice | None = None) -> OdometerChain:
    if height is None:
        height = height_lattice(zeta).lattice
    return OdometerChain(height, zeta.L)


def _desubstitute(zeta: Substitution, patch: dict, base) -> dict:
    """Preimage patch y with zeta(y) = patch on base + L(q) + F1, for every q
    whose block lies inside the patch."""
    inverse_rule = {row: a for a, row in enumerate(zeta.table)}
    if len(inverse_rule) != zeta.size:
        raise InvalidInput("desubstitution needs letters with distinct images")
    out = {}
    inv = inverse(zeta.L)
    for p in patch:
        q = mat_vec(inv, vec_sub(p, base))
        if any(c.denominator != 1 for c in q):
            continue
        q = tuple(int(c) for c in q)
        cells = [vec_add(p, f) for f in zeta.support]
        if all(c in patch for c in cells):
            row = tuple(patch[c] for c in cells)
            if row not in inverse_rule:
                raise ConsistencyError("block is not the image of a letter")
            out[q] = inverse_rule[row]
    return out


def phase(zeta: Substitution, patch: dict, x, n: int, R: int | None = None):
    """π_n: the F_n position of x inside its level-n supertile, recognised
    from the patch alone. Returns None when the patch is too small."""
    from .patterns import recognizability_radius
    if R is None:
        R = recognizability_radius(zeta, 4)
        if R is None:
            raise InvalidState("no recognizability radius found")
    table = phase_table(zeta, R)
    ball = integer_ball(R, zeta.d)
    total = tuple([0] * zeta.d)
    scale = identity(zeta.d)
    x = tuple(x)
    for _ in range(n):
        try:
            key = tuple(patch[vec_add(x, b)] for b in ball)
        except KeyError:
            return None
        if key not in table:
            raise ConsistencyError("patch window not in the phase table")
        f = zeta.support[table[key]]
        base = vec_sub(x, f)
        total = vec_add(total, mat_vec(scale, f))
        scale = mat_mul(scale, zeta.L)
        patch = _desubstitute(zeta, patch, base)
        x = tuple([0] * zeta.d)     # the block at base is the preimage origin
    return tuple(int(c) for c in total)


def _chain_hits(start: Lattice, L, target: Lattice, m_cap: int):
    """Least m <= m_cap with L^m(start) ⊆ target, False if provably none,
    None if undecided within m_cap.

    A_m = L^m(start) + N Z^d with N = [Z^d : target] satisfies
    A_{m+1} = L(A_m) + N Z^d, so the sequence is eventually periodic.
    """
    N = int(target.index())
    d = start.d
    nz = [tuple(N if i == j else 0 for j in range(d)) for i in range(d)]
    A = Lattice.from_generators(list(start.basis) + nz, d)
    seen = set()
    for m in range(m_cap + 1):
        if target.contains(A):
            return m
        if A in seen:
            return False
        seen.add(A)
        A = Lattice.from_generators([mat_vec(L, b) for b in A.basis] + nz, d)
    return None


def odometer_factor_check(chain1: OdometerChain, chain2: OdometerChain, n_max: int = 8) -> bool:
    """Whether every level of chain2 (n <= n_max) contains some level of chain1."""
    for n in range(n_max + 1):
        hit = _chain_hits(chain1.H, chain1.L, chain2.level(n), 10**6)
        if hit is False or hit is None:
            return False
    return True


def normalizer_condition(M, zeta1: Substitution, zeta2: Substitution, n_max: int,
                         heights: tuple | None = None, m_cap: int | None = None) -> list:
    """Per n in 1..n_max: True / False / None (unknown within m_cap) for
    ∃m: M L1^m(H1) ⊆ L2^n(H2)."""
    M = as_matrix(M)
    if abs(determinant(M)) != 1:
        raise InvalidInput("M must be in GL(d, Z)")
    if heights is None:
        heights = (height_lattice(zeta1).lattice, height_lattice(zeta2).lattice)
    H1, H2 = heights
    out = []
    for n in range(1, n_max + 1):
        target = H2.image(mat_pow(zeta2.L, n)).preimage(M)
        cap = m_cap if m_cap is not None else int(H2.index()) * n + zeta1.d
        hit = _chain_hits(H1, zeta1.L, target, cap)
        out.append(None if hit is None else hit is not False)
    return out


# ------------------------------------------------------------- radius bounds

class RadiusBound(NamedTuple):
    factor: Fraction        # multiplies ‖F1‖
    support_sq: Fraction    # ‖F1‖² exactly
    radius: int             # ceil(factor · ‖F1‖)


def _ceil_times_sqrt(c: Fraction, s: Fraction) -> int:
    """ceil(c·sqrt(s)) for c, s >= 0, exactly."""
    t = c * c * s
    r = math.isqrt(t.numerator // t.denominator)
    while Fraction(r * r) < t:
        r += 1
    while r > 0 and Fraction((r - 1) ** 2) >= t:
        r -= 1
    return r


def radius_bound(zeta: Substitution) -> RadiusBound:
    """‖F1‖(1 + ‖L⁻¹‖(2 + 1/(1 - ‖L⁻¹‖))) with upper-bound norms."""
    a = operator_norm(inverse(zeta.L))
    if a >= 1:
        raise InvalidInput("‖L⁻¹‖ >= 1: the radius bound does not apply")
    factor = 1 + a * (2 + 1 / (1 - a))
    s = max_sq_norm(zeta.support)
    return RadiusBound(factor, s, _ceil_times_sqrt(factor, s))


def homomorphism_radius_bound(zeta: Substitution, M) -> RadiusBound:
    """‖F1‖‖L⁻¹‖(1 + ‖M‖)(2 - ‖L⁻¹‖)/(1 - ‖L⁻¹‖)."""
    a = operator_norm(inverse(zeta.L))
    if a >= 1:
        raise InvalidInput("‖L⁻¹‖ >= 1: the radius bound does not apply")
    m = operator_norm(as_matrix(M))
    factor = a * (1 + m) * (2 - a) / (1 - a)
    s = max_sq_norm(zeta.support)
    return RadiusBound(factor, s, _ceil_times_sqrt(factor, s))


# ---------------------------------------------------------------- block maps

class BlockMap(NamedTuple):
    """phi(x)_n = table[x restricted to M^-1 n + support]."""
    radius: int
    support: tuple
    table: dict              # letter tuple aligned to support -> letter
    matrix: tuple | None = None

    @classmethod
    def letter_map(cls, mapping: Mapping[str, str], d: int, M=None) -> "BlockMap":
        origin = tuple([0] * d)
        return cls(0, (origin,), {(a,): b for a, b in mapping.items()},
                   as_matrix(M) if M is not None else None)

    def apply(self, patch: dict, d: int) -> dict:
        M = self.matrix if self.matrix is not None else identity(d)
        out = {}
        for p in patch:
            try:
                key = tuple(patch[vec_add(p, s)] for s in self.support)
            except KeyError:
                continue
            out[tuple(int(c) for c in mat_vec(M, p))] = self.table[key]
        return out


class Verification(NamedTuple):
    ok: bool
    window: int
    counterexample: Pattern | None
    image: Pattern | None


def verify_homomorphism(zeta: Substitution, M, blockmap: BlockMap, window: int,
                        target: Substitution | None = None) -> Verification:
    """Check that the block map sends every language pattern on a box of
    half-side window + r to a pattern of the target language."""
    target = target or zeta
    d = zeta.d
    M = as_matrix(M) if M is not None else identity(d)
    if abs(determinant(M)) != 1:
        raise InvalidInput("M must be in GL(d, Z)")
    bm = blockmap._replace(matrix=M)
    for key in language_shape(zeta, blockmap.support):
        if tuple(zeta.alphabet[x] for x in key) not in bm.table:
            return Verification(False, 0, Pattern(blockmap.support, tuple(zeta.alphabet[x] for x in key)), None)
    ext = window + blockmap.radius
    shape = normalize_shape(itertools.product(range(-ext, ext + 1), repeat=d))
    for w in sorted(language_shape(zeta, shape)):
        patch = {p: zeta.alphabet[a] for p, a in zip(shape, w)}
        img = bm.apply(patch, d)
        if not set(img.values()) <= set(target.alphabet):
            raise InvalidInput("block map produces letters outside the target alphabet")
        img_shape = normalize_shape(img)
        code = tuple(target.index[img[p]] for p in img_shape)
        if code not in language_shape(target, img_shape):
            return Verification(False, window, Pattern(shape, tuple(patch[p] for p in shape)),
                                Pattern(img_shape, tuple(img[p] for p in img_shape)))
    return Verification(True, window, None, None)


# -------------------------------------------------------------- automorphisms

def _compose(p: tuple, q: tuple) -> tuple:
    return tuple(p[q[i]] for i in range(len(q)))


class AutomorphismGroup(NamedTuple):
    mode: str
    elements: list           # BlockMaps representing Aut/<shifts>
    complete: bool

    @property
    def order(self) -> int:
        return len(self.elements)


def centralizer(zeta: Substitution) -> list:
    """Letter permutations T (index tuples) with T∘p_f = p_f∘T for all f."""
    cols = [zeta.column(i) for i in range(zeta.q)]
    k = zeta.size
    out = []
    for b in range(k):
        T = {0: b}
        queue = [0]
        ok = True
        while queue and ok:
            a = queue.pop()
            for c in cols:
                src, dst = c[a], c[T[a]]
                if src in T:
                    if T[src] != dst:
                        ok = False
                        break
                else:
                    T[src] = dst
                    queue.append(src)
        if ok and len(T) == k and len(set(T.values())) == k:
            out.append(tuple(T[a] for a in range(k)))
    return sorted(out)


def _preserves_language(zeta: Substitution, perm: tuple, shape) -> bool:
    lang = language_shape(zeta, shape)
    return all(tuple(perm[a] for a in w) in lang for w in lang)


def automorphisms(zeta: Substitution, mode: str = "bijective", radius: int | None = None,
                  node_cap: int = 200000) -> AutomorphismGroup:
    """Representatives of Aut(X)/<shifts>."""
    d = zeta.d
    if mode == "bijective":
        from .substitution import is_bijective
        if not is_bijective(zeta):
            raise InvalidInput("bijective mode needs a bijective substitution")
        kbar = zeta.k_bar
        elems = []
        for perm in centralizer(zeta):
            if _preserves_language(zeta, perm, kbar):
                elems.append(BlockMap.letter_map(
                    {zeta.alphabet[a]: zeta.alphabet[perm[a]] for a in range(zeta.size)}, d))
        return AutomorphismGroup(mode, elems, True)
    if mode != "general":
        raise InvalidInput(f"unknown mode {mode!r}")
    r = radius if radius is not None else radius_bound(zeta).radius
    sols, complete = _general_search(zeta, r, node_cap)
    reps = _modulo_shifts(zeta, sols, r)
    return AutomorphismGroup(mode, reps, complete)


def _general_search(zeta: Substitution, r: int, node_cap: int):
    """Block maps Φ of radius r with Φ(zeta(x)|_{Lj+f-p+B}) = p_f(Φ(x|_{j+B}))
    for some p in F1, by arc consistency and backtracking."""
    d = zeta.d
    B = tuple(integer_ball(r, d))
    pats = sorted(language_shape(zeta, B))
    var = {w: i for i, w in enumerate(pats)}
    quot = zeta.digits.quotient
    solutions = []
    complete = True
    nodes = 0
    for p in zeta.support:
        U = normalize_shape(list(B) + [quot(vec_add(vec_sub(f, p), b)) for f in zeta.support for b in B])
        pos = {u: i for i, u in enumerate(U)}
        cons = set()
        for w in language_shape(zeta, U):
            img = zeta.apply(dict(zip(U, w)))
            v2 = var[tuple(w[pos[b]] for b in B)]
            for i, f in enumerate(zeta.support):
                v1 = var[tuple(img[vec_add(vec_sub(f, p), b)] for b in B)]
                cons.add((v1, i, v2))
        cons = sorted(cons)
        by_var: dict = {}
        for c in cons:
            by_var.setdefault(c[0], []).append(c)
            by_var.setdefault(c[2], []).append(c)
        cols = [zeta.column(i) for i in range(zeta.q)]

        def propagate(dom, queue):
            while queue:
                v = queue.pop()
                for (v1, i, v2) in by_var.get(v, ()):
                    col = cols[i]
                    a = {col[x] for x in dom[v2]} & dom[v1]
                    b = {x for x in dom[v2] if col[x] in dom[v1]}
                    if not a or not b:
                        return False
                    if a != dom[v1]:
                        dom[v1] = a
                        queue.append(v1)
                    if b != dom[v2]:
                        dom[v2] = b
                        queue.append(v2)
            return True

        def search(dom):
            nonlocal nodes, complete
            nodes += 1
            if nodes > node_cap:
                complete = False
                return
            open_vars = [v for v in range(len(pats)) if len(dom[v]) > 1]
            if not open_vars:
                solutions.append((p, tuple(next(iter(dom[v])) for v in range(len(pats)))))
                return
            v = min(open_vars, key=lambda u: (len(dom[u]), u))
            for a in sorted(dom[v]):
                nd = [set(s) for s in dom]
                nd[v] = {a}
                if propagate(nd, [v]):
                    search(nd)

        dom = [set(range(zeta.size)) for _ in pats]
        if propagate(dom, list(range(len(pats)))):
            search(dom)
    out = []
    for p, vals in solutions:
        table = {tuple(zeta.alphabet[x] for x in w): zeta.alphabet[vals[var[w]]] for w in pats}
        out.append((p, BlockMap(r, B, table)))
    return out, complete


def _modulo_shifts(zeta: Substitution, sols: list, r: int) -> list:
    """One block map per class of solutions differing by a shift; only
    solutions that preserve the language on a test window are kept."""
    d = zeta.d
    patch, _ = central_patch(zeta, 4 * r + 6)
    inner = [p for p in patch if all(abs(c) <= 3 * r + 4 for c in p)]
    sigs = []
    reps = []
    for _, bm in sols:
        if not verify_homomorphism(zeta, None, bm, 1).ok:
            continue
        img = bm.apply({p: zeta.alphabet[a] for p, a in patch.items()}, d)
        dup = False
        for other in sigs:
            for t in integer_ball(2 * r + 1, d):
                if all(img.get(p) == other.get(vec_add(p, t)) for p in inner if p in img and vec_add(p, t) in other):
                    dup = True
                    break
            if dup:
                break
        if not dup:
            sigs.append(img)
            reps.append(bm)
    return reps


def group_closed(zeta: Substitution, perms: list) -> bool:
    """Closure of a finite set of letter permutations (index tuples) under
    composition and inverse."""
    s = set(perms)
    for p, q in itertools.product(s, repeat=2):
        if _compose(p, q) not in s:
            return False
    for p in s:
        inv = [0] * len(p)
        for i, x in enumerate(p):
            inv[x] = i
        if tuple(inv) not in s:
            return False
    return True


# -------------------------------------------------------- symmetry candidates

class SymmetryCandidate(NamedTuple):
    M: tuple
    permutation: tuple     # image index of each normal line (with sign)
    order: int
    norm_bound: float      # ‖P‖‖Q_M‖‖P⁻¹‖
    normalizer: list       # normalizer_condition per n


def _line(v) -> tuple:
    from .geometry import primitive
    v = primitive(v)
    return v if v > tuple(-x for x in v) else tuple(-x for x in v)


def _matrix_order(M, limit: int) -> int | None:
    d = len(M)
    P = M
    for k in range(1, limit + 1):
        if P == identity(d):
            return k
        P = mat_mul(P, M)
    return None


def symmetry_candidates(zeta: Substitution, normals: Sequence, n_max: int = 3,
                        heights: tuple | None = None) -> list:
    """Matrices M in GL(d,Z) whose adjoint permutes the normal lines (with
    signs) and that pass the Normalizer Condition up to n_max."""
    from .geometry import rank
    d = zeta.d
    lines = sorted({_line(v) for v in normals})
    basis = []
    for v in lines:
        if rank(basis + [v]) > len(basis):
            basis.append(v)
        if len(basis) == d:
            break
    if len(basis) < d:
        raise InvalidState("fewer than d independent nondeterministic normals: hypothesis not met")
    P = transpose(basis)               # columns are the basis normals
    Pinv = inverse(P)
    line_set = set(lines)
    limit = 2 * math.factorial(len(lines))
    if heights is None:
        h = height_lattice(zeta).lattice
        heights = (h, h)
    out = []
    for images in itertools.permutations(lines, d):
        for signs in itertools.product((1, -1), repeat=d):
            cols = [tuple(s * x for x in u) for s, u in zip(signs, images)]
            Mstar = mat_mul(transpose(cols), Pinv)
            if any(Fraction(x).denominator != 1 for row in Mstar for x in row):
                continue
            Mstar = tuple(tuple(int(x) for x in row) for row in Mstar)
            if abs(determinant(Mstar)) != 1:
                continue
            if any(_line(mat_vec(Mstar, v)) not in line_set for v in lines):
                continue
            M = transpose(Mstar)
            perm = tuple(lines.index(_line(mat_vec(Mstar, v))) for v in lines)
            order = _matrix_order(M, limit)
            if order is None:
                raise ConsistencyError(f"candidate {M} has no order <= {limit}")
            Q = mat_mul(Pinv, mat_mul(Mstar, P))
            bound = float(operator_norm(P) * operator_norm(Q) * operator_norm(Pinv))
            cond = normalizer_condition(M, zeta, zeta, n_max, heights)
            if any(c is False for c in cond):
                continue
            out.append(SymmetryCandidate(M, perm, order, bound, cond))
    return sorted(out)


def injective_mod3(cands: Sequence[SymmetryCandidate]) -> bool:
    red = {tuple(tuple(x % 3 for x in row) for row in c.M) for c in cands}
    return len(red) == len(cands)
