"""Constant-shape substitutions: rules, iteration and combinatorial invariants."""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import ConsistencyError, InvalidInput, ResourceError
from .lattice import (
    DigitSystem,
    as_matrix,
    determinant,
    identity,
    inverse,
    is_expansion,
    mat_sub,
    mat_vec,
    operator_norm,
    quotient_representatives,
    set_norm,
    vec_add,
)

DEFAULT_CELL_CAP = 10**7


class Substitution:
    """A constant-shape substitution.

    ``rules[a][i]`` is the letter placed at ``support[i]`` in the image of
    ``a``; the support order is part of the data.
    """

    def __init__(self, alphabet: Sequence[str], L, support, rules: Mapping[str, Sequence[str]],
                 declared_aperiodic: bool = False):
        self.alphabet = tuple(str(a) for a in alphabet)
        if not self.alphabet:
            raise InvalidInput("empty alphabet")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidInput("duplicate letters in alphabet")
        self.L = as_matrix(L)
        self.d = len(self.L)
        self.support = tuple(tuple(int(x) for x in f) for f in support)
        if any(len(f) != self.d for f in self.support):
            raise InvalidInput("support vectors have the wrong dimension")
        if len(set(self.support)) != len(self.support):
            raise InvalidInput("duplicate support vectors")
        if not is_expansion(self.L):
            raise InvalidInput("expansion matrix has an eigenvalue of modulus <= 1")
        self.digits = DigitSystem(self.L, self.support)
        if tuple([0] * self.d) not in self.support:
            raise InvalidInput("support must contain the origin")
        if not self.digits.is_complete():
            raise InvalidInput("support is not a fundamental domain of L(Z^d)")
        self.index = {a: i for i, a in enumerate(self.alphabet)}
        if set(rules) != set(self.alphabet):
            raise InvalidInput("rules must be given for exactly the alphabet letters")
        table = []
        for a in self.alphabet:
            img = tuple(str(b) for b in rules[a])
            if len(img) != len(self.support):
                raise InvalidInput(f"rule for {a!r} has length {len(img)}, expected {len(self.support)}")
            for b in img:
                if b not in self.index:
                    raise InvalidInput(f"rule for {a!r} uses unknown letter {b!r}")
            table.append(tuple(self.index[b] for b in img))
        self.table = tuple(table)
        self.declared_aperiodic = bool(declared_aperiodic)
        self.origin_digit = self.support.index(tuple([0] * self.d))

    # -- basic accessors

    @property
    def size(self) -> int:
        return len(self.alphabet)

    @property
    def q(self) -> int:
        return len(self.support)

    @property
    def rules(self) -> dict:
        return {a: tuple(self.alphabet[b] for b in self.table[i]) for i, a in enumerate(self.alphabet)}

    def column(self, i: int) -> tuple:
        """The position map p_f for f = support[i], on letter indices."""
        return tuple(row[i] for row in self.table)

    def key(self) -> tuple:
        return (self.alphabet, self.L, self.support, self.table)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Substitution(alphabet={self.alphabet}, L={self.L}, support={self.support})"

    # -- geometry of supports

    def image_positions(self, positions: Iterable) -> list:
        """L(P) + F1 in block order."""
        return [vec_add(mat_vec(self.L, j), f) for j in positions for f in self.support]

    def support_level(self, n: int, cap: int = DEFAULT_CELL_CAP) -> list:
        """F_n in block order; F_0 = {0}."""
        _check_cap(self.q ** n, cap)
        pos = [tuple([0] * self.d)]
        for _ in range(n):
            pos = self.image_positions(pos)
        return pos

    def apply(self, pattern: Mapping) -> dict:
        """zeta applied to a pattern given as ``{position: letter index}``."""
        out = {}
        for j, a in pattern.items():
            base = mat_vec(self.L, j)
            row = self.table[a]
            for f, b in zip(self.support, row):
                out[vec_add(base, f)] = b
        return out

    def power(self, n: int, cap: int = DEFAULT_CELL_CAP) -> "Substitution":
        """zeta^n as a substitution with support F_n."""
        if n < 1:
            raise InvalidInput("power must be positive")
        _check_cap(self.q ** n * self.size, cap)
        pos = list(self.support)
        table = [list(r) for r in self.table]
        Ln = self.L
        for _ in range(n - 1):
            pos = [vec_add(mat_vec(self.L, j), f) for j in pos for f in self.support]
            table = [[self.table[b][k] for b in row for k in range(self.q)] for row in table]
            Ln = _matmul(self.L, Ln)
        rules = {a: [self.alphabet[b] for b in table[i]] for i, a in enumerate(self.alphabet)}
        return Substitution(self.alphabet, Ln, pos, rules, self.declared_aperiodic)

    # -- cached derived data

    @cached_property
    def k_set(self) -> list:
        return k_set(self)

    @cached_property
    def fill_cover(self) -> list:
        """Cover set C with F_n + F_n ⊆ L^n(C) + F_n for every n."""
        ff = {vec_add(f, g) for f in self.support for g in self.support}
        return cover_set(self, [tuple([0] * self.d)], ff)

    @cached_property
    def k_bar(self) -> list:
        return sorted({vec_add(k, c) for k in self.k_set for c in self.fill_cover})


def _matmul(a, b):
    from .lattice import mat_mul
    return mat_mul(a, b)


def _check_cap(cells: int, cap: int) -> None:
    if cells > cap:
        raise ResourceError(f"operation needs {cells} cells, above the cell cap {cap}", cap)


def substitution_1d(rules: Mapping[str, str | Sequence[str]], declared_aperiodic: bool = False) -> Substitution:
    """Constant-length substitution from a mapping such as ``{'0': '01', '1': '10'}``."""
    alphabet = list(rules)
    lengths = {len(v) for v in rules.values()}
    if len(lengths) != 1:
        raise InvalidInput("images must share one length")
    q = lengths.pop()
    return Substitution(alphabet, [[q]], [(i,) for i in range(q)],
                        {a: list(v) for a, v in rules.items()}, declared_aperiodic)


# ------------------------------------------------------------- iteration

def iterate(zeta: Substitution, n: int, cap: int = DEFAULT_CELL_CAP) -> dict:
    """Map letter -> Pattern of zeta^n(letter) on F_n."""
    from .patterns import Pattern
    if n < 1:
        raise InvalidInput("n must be positive")
    p = zeta.power(n, cap)
    return {a: Pattern.from_items(zip(p.support, p.rules[a])) for a in zeta.alphabet}


# ---------------------------------------------------------- predicates

def incidence(zeta: Substitution) -> list:
    """Boolean incidence matrix: ``m[a][b]`` iff b occurs in zeta(a)."""
    return [[b in set(row) for b in range(zeta.size)] for row in zeta.table]


def is_primitive(zeta: Substitution):
    """(primitive, least n with all-positive incidence of zeta^n)."""
    k = zeta.size
    m = incidence(zeta)
    bound = k * k - 2 * k + 2
    power = m
    for n in range(1, bound + 1):
        if all(all(r) for r in power):
            return True, n
        power = [[any(power[i][t] and m[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
    return False, None


def _is_perm(col: Sequence[int], k: int) -> bool:
    return len(set(col)) == k


def is_bijective(zeta: Substitution) -> bool:
    return all(_is_perm(zeta.column(i), zeta.size) for i in range(zeta.q))


def extremity_indices(zeta: Substitution) -> list:
    from .geometry import convex_hull
    hull = convex_hull(zeta.support)
    ext = set(hull.vertices)
    return [i for i, f in enumerate(zeta.support) if f in ext]


def is_bijective_on_extremities(zeta: Substitution) -> bool:
    return all(_is_perm(zeta.column(i), zeta.size) for i in extremity_indices(zeta))


# ------------------------------------------------------------ pair graph

class PairGraph(NamedTuple):
    vertices: list
    edges: dict  # (a, b) -> list of (digit index, (a', b'))


def pair_graph(zeta: Substitution) -> PairGraph:
    verts = [(a, b) for a in range(zeta.size) for b in range(zeta.size)]
    edges = {}
    for a, b in verts:
        ra, rb = zeta.table[a], zeta.table[b]
        edges[(a, b)] = [(i, (ra[i], rb[i])) for i in range(zeta.q)]
    return PairGraph(verts, edges)


def _successors(g: PairGraph) -> dict:
    return {v: sorted({w for _, w in es}) for v, es in g.edges.items()}


def _reach_closure(succ: dict, targets: set) -> set:
    """Vertices that can reach ``targets`` (targets included)."""
    pred = {v: [] for v in succ}
    for v, ws in succ.items():
        for w in ws:
            pred[w].append(v)
    seen = set(targets)
    todo = deque(targets)
    while todo:
        w = todo.popleft()
        for v in pred[w]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def _shortest_cycle(succ: dict, v) -> int | None:
    dist = {v: 0}
    todo = deque([v])
    while todo:
        u = todo.popleft()
        for w in succ[u]:
            if w == v:
                return dist[u] + 1
            if w not in dist:
                dist[w] = dist[u] + 1
                todo.append(w)
    return None


def periodic_pairs(zeta: Substitution):
    """Off-diagonal pairs lying on a cycle of the pair graph, with the lcm of
    their minimal cycle lengths (1 when there are none)."""
    succ = _successors(pair_graph(zeta))
    off = {v: [w for w in ws if w[0] != w[1]] for v, ws in succ.items() if v[0] != v[1]}
    pairs, lengths = [], []
    for v in sorted(off):
        c = _shortest_cycle(off, v)
        if c is not None:
            pairs.append((zeta.alphabet[v[0]], zeta.alphabet[v[1]]))
            lengths.append(c)
    return pairs, math.lcm(1, *lengths)


def pair_aperiodic_power(zeta: Substitution) -> Substitution:
    """zeta^n(zeta), which is pair-aperiodic."""
    _, n = periodic_pairs(zeta)
    return zeta if n == 1 else zeta.power(n)


def asymptotic_disjoint_pairs(zeta: Substitution) -> set:
    """Off-diagonal pairs with arbitrarily long off-diagonal paths."""
    succ = _successors(pair_graph(zeta))
    off = {v: [w for w in ws if w[0] != w[1]] for v, ws in succ.items() if v[0] != v[1]}
    on_cycle = {v for v in off if _shortest_cycle(off, v) is not None}
    good = _reach_closure(off, on_cycle)
    return {(zeta.alphabet[a], zeta.alphabet[b]) for a, b in good}


def _classes(size: int, related) -> list:
    parent = list(range(size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(size):
        for b in range(a + 1, size):
            if related(a, b):
                parent[find(b)] = find(a)
    groups = {}
    for a in range(size):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values())


def indistinguishable(zeta: Substitution, tau: Mapping[str, object]) -> list:
    """Partition of letters with tau(zeta^n a) == tau(zeta^n b) for all n >= 0."""
    t = [tau[a] for a in zeta.alphabet]
    succ = _successors(pair_graph(zeta))
    bad = {v for v in succ if t[v[0]] != t[v[1]]}
    dist = _reach_closure(succ, bad)
    classes = _classes(zeta.size, lambda a, b: (a, b) not in dist)
    for cl in classes:
        for a in cl:
            for b in cl:
                if (a, b) in dist:
                    raise ConsistencyError("indistinguishability is not transitive")
    return [[zeta.alphabet[a] for a in cl] for cl in classes]


# ----------------------------------------------------------- reducedness

def _solve(a: list, b: list) -> list:
    n = len(b)
    m = [list(r) + [b[i]] for i, r in enumerate(a)]
    for c in range(n):
        p = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[i][n] for i in range(n)]


def limit_distances(zeta: Substitution) -> dict:
    """Exact lim d_n(zeta^n a, zeta^n b) for every ordered letter pair.

    The pair graph with uniform weights 1/|F1| is an absorbing chain on the
    diagonal; the limit is the probability of never being absorbed.
    """
    g = pair_graph(zeta)
    succ = _successors(g)
    diag = {v for v in g.vertices if v[0] == v[1]}
    can_absorb = _reach_closure(succ, diag)
    never = [v for v in g.vertices if v not in can_absorb]
    transient = [v for v in g.vertices if v in can_absorb and v not in diag]
    pos = {v: i for i, v in enumerate(transient)}
    w = Fraction(1, zeta.q)
    a = [[Fraction(int(i == j)) for j in range(len(transient))] for i in range(len(transient))]
    rhs = [Fraction(0)] * len(transient)
    never_set = set(never)
    for v in transient:
        i = pos[v]
        for _, u in g.edges[v]:
            if u in pos:
                a[i][pos[u]] -= w
            elif u in never_set:
                rhs[i] += w
    sol = _solve(a, rhs) if transient else []
    out = {v: Fraction(0) for v in diag}
    out.update({v: Fraction(1) for v in never})
    out.update({v: sol[pos[v]] for v in transient})
    return out


def hamming_distance(zeta: Substitution, a: str, b: str, n: int) -> Fraction:
    """d_n by direct iteration (used as an oracle in tests)."""
    p = zeta.power(n) if n > 0 else None
    if p is None:
        return Fraction(int(a != b))
    ra, rb = p.table[p.index[a]], p.table[p.index[b]]
    return Fraction(sum(x != y for x, y in zip(ra, rb)), len(ra))


class Reducedness(NamedTuple):
    reduced: bool
    eta: Fraction
    classes: list


def is_reduced(zeta: Substitution) -> Reducedness:
    lim = limit_distances(zeta)
    off = [lim[(a, b)] for a in range(zeta.size) for b in range(zeta.size) if a != b]
    eta = min(off) if off else Fraction(1)
    classes = _classes(zeta.size, lambda a, b: lim[(a, b)] == 0)
    for cl in classes:
        for a in cl:
            for b in cl:
                if lim[(a, b)] != 0:
                    raise ConsistencyError("letter equivalence is not transitive")
    named = [[zeta.alphabet[a] for a in cl] for cl in classes]
    return Reducedness(all(len(c) == 1 for c in classes), eta, named)


def reduce(zeta: Substitution):
    """(reduced substitution, map letter -> class name)."""
    classes = is_reduced(zeta).classes
    name = {a: cl[0] for cl in classes for a in cl}
    rules = {}
    for cl in classes:
        images = {tuple(name[b] for b in zeta.rules[a]) for a in cl}
        if len(images) != 1:
            raise ConsistencyError("equivalent letters have inequivalent images")
        rules[cl[0]] = list(images.pop())
    red = Substitution([cl[0] for cl in classes], zeta.L, zeta.support, rules, zeta.declared_aperiodic)
    return red, name


def reduce_substitution(zeta: Substitution):
    return reduce(zeta)


# ----------------------------------------------------- K set and covers

def _functional_cycles(nodes: set, step) -> set:
    """Points of ``nodes`` lying on cycles of ``step`` (restricted to nodes)."""
    state = {}
    periodic = set()
    for start in sorted(nodes):
        if start in state:
            continue
        path = []
        pos = {}
        v = start
        while v in nodes and v not in state:
            state[v] = 1
            pos[v] = len(path)
            path.append(v)
            v = step(v)
        if v in pos:
            periodic.update(path[pos[v]:])
    return periodic


def k_set_radius(zeta: Substitution) -> float:
    """Upper bound for the norm of the points of K."""
    d = zeta.d
    return set_norm(zeta.support) * float(operator_norm(inverse(mat_sub(identity(d), zeta.L))))


def _ball_box(radius: float, d: int) -> set:
    r = math.ceil(radius) + 1
    rr = radius * radius + 1e-9
    return {v for v in itertools.product(range(-r, r + 1), repeat=d) if sum(x * x for x in v) <= rr}


def k_set(zeta: Substitution) -> list:
    """Periodic points of the digit map n -> quotient(n)."""
    nodes = _ball_box(k_set_radius(zeta), zeta.d)
    return sorted(_functional_cycles(nodes, zeta.digits.quotient))


def digit_map(zeta: Substitution, n) -> tuple:
    return zeta.digits.quotient(tuple(n))


def k_set_oracle(zeta: Substitution, m_max: int = 4) -> list:
    """Union over m <= m_max of (Id - L^m)^{-1}(F_m) ∩ Z^d."""
    out = set()
    for m in range(1, m_max + 1):
        p = zeta.power(m)
        inv = inverse(mat_sub(identity(zeta.d), p.L))
        for f in p.support:
            v = mat_vec(inv, f)
            if all(x.denominator == 1 for x in v):
                out.add(tuple(int(x) for x in v))
    return sorted(out)


def pc4_power(zeta: Substitution, max_power: int = 6):
    """Least p <= max_power with K(zeta^p) = (Id - L^p)^{-1}(F_p) ∩ Z^d, else None."""
    for p in range(1, max_power + 1):
        z = zeta.power(p)
        if z.k_set == k_set_oracle(z, 1):
            return p
    return None


def cover_set(zeta: Substitution, A: Iterable, F: Iterable) -> list:
    """Finite C containing B = {d_n : n in F + A} with C + F + A ⊆ L(C) + F1."""
    A = [tuple(a) for a in A]
    F = [tuple(f) for f in F]
    if not set(zeta.support) <= set(F):
        raise InvalidInput("F must contain the support")
    fa = {vec_add(f, a) for f in F for a in A}
    quot = zeta.digits.quotient
    union = {quot(n) for n in fa}
    frontier = set(union)
    while frontier:
        grown = {quot(vec_add(c, s)) for c in frontier for s in fa}
        frontier = grown - union
        union |= frontier
    return sorted(union)


def cover_bound(zeta: Substitution, A: Iterable, F: Iterable) -> float:
    """Norm bound ‖B‖ + ‖L⁻¹‖(‖A‖+‖F‖+‖F1‖)/(1-‖L⁻¹‖) for the cover set."""
    A, F = list(A), list(F)
    li = float(operator_norm(inverse(zeta.L)))
    quot = zeta.digits.quotient
    b = {quot(vec_add(f, a)) for f in F for a in A}
    if li >= 1:
        return math.inf
    return set_norm(b) + li * (set_norm(A) + set_norm(F) + set_norm(zeta.support)) / (1 - li)


# -------------------------------------------------------------- products

def product_substitution(factors: Sequence[Substitution]) -> Substitution:
    """Product of one-dimensional constant-length substitutions."""
    if len(factors) == 1:
        return factors[0]
    for z in factors:
        if z.d != 1:
            raise InvalidInput("product factors must be one-dimensional")
    short = all(len(a) == 1 for z in factors for a in z.alphabet)
    sep = "" if short else "."

    def name(letters):
        return sep.join(letters)

    supports = [[f[0] for f in z.support] for z in factors]
    positions = list(itertools.product(*supports))
    idx = [[z.support.index((x,)) for x, z in zip(pos, factors)] for pos in positions]
    alphabet, rules = [], {}
    for combo in itertools.product(*(z.alphabet for z in factors)):
        a = name(combo)
        alphabet.append(a)
        rules[a] = [name(tuple(z.rules[c][i] for z, c, i in zip(factors, combo, ix))) for ix in idx]
    L = [[factors[i].L[0][0] if i == j else 0 for j in range(len(factors))] for i in range(len(factors))]
    return Substitution(alphabet, L, positions, rules,
                        all(z.declared_aperiodic for z in factors))


# ------------------------------------------------------------- recoding

class Recoding(NamedTuple):
    substitution: Substitution
    shape: list            # D = L(C) + F1
    letters: dict          # new letter -> pattern (tuple of old letters on D)
    block_code: dict       # psi1: D-pattern -> new letter
    zero_code: dict        # psi2: new letter -> old letter


def recode(zeta: Substitution, r) -> Recoding:
    """Conjugate substitution on the alphabet of D-shaped language patterns."""
    from .lattice import integer_ball
    from .patterns import language_shape
    if r < 0:
        raise InvalidInput("radius must be nonnegative")
    d = zeta.d
    ball = integer_ball(r, d)
    quot = zeta.digits.quotient
    # digits of F1 + F1 must lie in A for the rule to be local
    extra = {quot(vec_add(f, g)) for f in zeta.support for g in zeta.support}
    A = sorted(set(ball) | extra)
    C = cover_set(zeta, A, zeta.support)
    D = sorted(set(zeta.image_positions(C)))
    needed = {quot(vec_add(f, p)) for f in zeta.support for p in D}
    if not needed <= set(D):
        raise ConsistencyError("recoding shape is not closed under desubstitution")
    pats = sorted(language_shape(zeta, D))
    names = {p: f"p{i}" for i, p in enumerate(pats)}
    pos = {v: i for i, v in enumerate(D)}
    rules = {}
    for p in pats:
        assign = {v: p[i] for i, v in enumerate(D)}
        img = zeta.apply(assign)
        row = []
        for f in zeta.support:
            window = tuple(img[vec_add(f, v)] for v in D)
            if window not in names:
                raise ConsistencyError("recoded image leaves the language")
            row.append(names[window])
        rules[names[p]] = row
    sub = Substitution([names[p] for p in pats], zeta.L, zeta.support, rules, zeta.declared_aperiodic)
    letters = {names[p]: tuple(zeta.alphabet[x] for x in p) for p in pats}
    block = {tuple(zeta.alphabet[x] for x in p): names[p] for p in pats}
    zero = {names[p]: zeta.alphabet[p[pos[tuple([0] * d)]]] for p in pats}
    return Recoding(sub, D, letters, block, zero)


# ------------------------------------------------- fixed points and orbits

def _seed_assignments(zeta: Substitution, points: list, step, limit: int | None = None):
    """Assignments w on ``points`` with w_k = zeta(w_{q(k)})_{f(k)} where
    ``step(k) = (q(k), digit index)``. Yields dicts of letter indices."""
    nodes = set(points)
    nxt = {k: step(k) for k in points}
    cyc = _functional_cycles(nodes, lambda k: nxt[k][0])
    cycles, seen = [], set()
    for k in sorted(cyc):
        if k in seen:
            continue
        c = [k]
        seen.add(k)
        v = nxt[k][0]
        while v != k:
            c.append(v)
            seen.add(v)
            v = nxt[v][0]
        cycles.append(c)
    choices = []
    for c in cycles:
        ok = [vals for a in range(zeta.size) if (vals := _cycle_consistent(zeta, c, nxt, a)) is not None]
        choices.append(ok)
    count = 0
    for combo in itertools.product(*choices):
        if limit is not None and count >= limit:
            return
        count += 1
        w = {}
        for vals in combo:
            w.update(vals)
        pending = [k for k in points if k not in w]
        while pending:
            rest = []
            for k in pending:
                src, i = nxt[k]
                if src in w:
                    w[k] = zeta.table[w[src]][i]
                else:
                    rest.append(k)
            if len(rest) == len(pending):
                raise ConsistencyError("seed points do not drain into cycles")
            pending = rest
        yield w


def _cycle_consistent(zeta: Substitution, cycle: list, nxt: dict, a: int):
    """Values on a digit-map cycle starting from letter ``a`` at cycle[0],
    or None if the cycle condition fails."""
    n = len(cycle)
    vals = {cycle[0]: a}
    # cycle[i] -> cycle[i+1]; w[cycle[i]] = col(f(cycle[i]))(w[cycle[i+1]])
    for i in range(n - 1, 0, -1):
        src = cycle[(i + 1) % n]
        vals[cycle[i]] = zeta.table[vals[src]][nxt[cycle[i]][1]]
    if zeta.table[vals[cycle[1 % n]]][nxt[cycle[0]][1]] != a:
        return None
    return vals


def fixed_points(zeta: Substitution) -> list:
    """Legal seeds on K of the fixed points of zeta, as Patterns on K."""
    from .patterns import Pattern, language_shape
    if not is_primitive(zeta)[0]:
        raise InvalidInput("fixed points are enumerated for primitive substitutions only")
    K = zeta.k_set
    legal = language_shape(zeta, K)
    out = []
    for w in _seed_assignments(zeta, K, lambda k: zeta.digits.decompose(k)):
        letters = tuple(w[k] for k in K)
        if letters in legal:
            out.append(Pattern(tuple(K), tuple(zeta.alphabet[x] for x in letters)))
    return sorted(out)


class OrbitSearch(NamedTuple):
    orbits: list     # (shift j, seed Pattern)
    complete: bool


def invariant_orbits(zeta: Substitution, budget: int = 10000) -> OrbitSearch:
    """Seeds of points x with zeta(x) = S^j x, one search per class of j
    modulo (L - Id)(Z^d)."""
    from .patterns import Pattern, language_shape
    if not is_primitive(zeta)[0]:
        raise InvalidInput("invariant orbits are searched for primitive substitutions only")
    d = zeta.d
    lm = mat_sub(zeta.L, identity(d))
    if abs(determinant(lm)) == 1:
        shifts = [tuple([0] * d)]
    else:
        shifts = quotient_representatives(lm)
    orbits, complete, used = [], True, 0
    inv = inverse(mat_sub(identity(d), zeta.L))
    for j in shifts:
        radius = (set_norm(zeta.support) + set_norm([j])) * float(operator_norm(inv))
        nodes = _ball_box(radius, d)

        def step(p, j=j):
            dec = zeta.digits.decompose(tuple(x - y for x, y in zip(p, j)))
            return dec.quotient, dec.digit

        pts = sorted(_functional_cycles(nodes, lambda p: step(p)[0]))
        legal = language_shape(zeta, pts)
        for w in _seed_assignments(zeta, pts, step, limit=max(budget - used, 0) + 1):
            used += 1
            if used > budget:
                complete = False
                break
            letters = tuple(w[k] for k in pts)
            if letters in legal:
                orbits.append((j, Pattern(tuple(pts), tuple(zeta.alphabet[x] for x in letters))))
        if not complete:
            break
    return OrbitSearch(orbits, complete)
