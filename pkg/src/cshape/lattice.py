"""Exact integer and rational linear algebra.

Vectors are tuples of ``int`` (or ``Fraction``) and matrices are tuples of
row tuples acting on column vectors. Everything here is exact except the
operator norms, which are only ever used as upper bounds.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidInput

Vec = tuple
Mat = tuple

NORM_MARGIN = 1e-9


# ---------------------------------------------------------------- matrices

def as_matrix(rows) -> Mat:
    m = tuple(tuple(int(x) for x in r) for r in rows)
    if not m or any(len(r) != len(m) for r in m):
        raise InvalidInput("matrix must be square and nonempty")
    return m


def identity(d: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def mat_vec(m: Mat, v: Sequence) -> Vec:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_pow(m: Mat, n: int) -> Mat:
    result = identity(len(m))
    base = m
    while n:
        if n & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        n >>= 1
    return result


def mat_sub(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def vec_add(u: Sequence, v: Sequence) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def determinant(m: Mat):
    """Exact determinant by Gaussian elimination over the rationals."""
    a = [[Fraction(x) for x in r] for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return int(det) if det.denominator == 1 else det


def inverse(m: Mat) -> Mat:
    """Rational inverse by Gauss-Jordan elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise InvalidInput("singular matrix")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return tuple(tuple(row[n:]) for row in a)


def adjugate(m: Mat) -> Mat:
    """Integer adjugate, so that ``m @ adj(m) == det(m) * I``."""
    n = len(m)
    if n == 1:
        return ((1,),)
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = tuple(tuple(m[r][c] for c in range(n) if c != j) for r in range(n) if r != i)
            cof[i][j] = (-1) ** (i + j) * determinant(minor)
    return transpose(tuple(tuple(r) for r in cof))


def charpoly(m: Mat) -> list:
    """Coefficients of det(x I - m), lowest degree first (Faddeev-LeVerrier)."""
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
    fm = tuple(tuple(Fraction(x) for x in r) for r in m)
    for k in range(1, n + 1):
        mk = mat_mul(fm, mk)
        mk = tuple(tuple(x + (coeffs[n - k + 1] if i == j else 0) for j, x in enumerate(r)) for i, r in enumerate(mk))
        am = mat_mul(fm, mk)
        coeffs[n - k] = -sum(am[i][i] for i in range(n)) / k
    return [int(c) if c.denominator == 1 else c for c in coeffs]


def _roots_inside_unit_disk(coeffs: Sequence) -> bool:
    """Schur-Cohn recursion on a real polynomial given lowest degree first."""
    p = [Fraction(c) for c in coeffs]
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    while len(p) > 1:
        a0, an = p[0], p[-1]
        if abs(a0) >= abs(an):
            return False
        n = len(p) - 1
        p = [an * p[k] - a0 * p[n - k] for k in range(1, n + 1)]
    return True


def is_expansion(L) -> bool:
    """True iff every complex eigenvalue of ``L`` has modulus > 1."""
    L = as_matrix(L)
    if determinant(L) == 0:
        raise InvalidInput("singular matrix")
    # roots of the reversed polynomial are the reciprocal eigenvalues
    return _roots_inside_unit_disk(list(reversed(charpoly(L))))


def rational_eigenvalues(m: Mat) -> list:
    """Rational roots of the characteristic polynomial, with multiplicity."""
    coeffs = [Fraction(c) for c in charpoly(m)]
    den = reduce(math.lcm, (c.denominator for c in coeffs), 1)
    ints = [int(c * den) for c in coeffs]
    roots = []
    while len(ints) > 1:
        if ints[0] == 0:
            roots.append(Fraction(0))
            ints = ints[1:]
            continue
        found = None
        for p in _divisors(abs(ints[0])):
            for q in _divisors(abs(ints[-1])):
                for s in (1, -1):
                    r = Fraction(s * p, q)
                    if sum(c * r ** k for k, c in enumerate(ints)) == 0:
                        found = r
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        ints = _deflate(ints, found)
    return sorted(roots)


def _divisors(n: int) -> list:
    return [k for k in range(1, n + 1) if n % k == 0]


def _deflate(coeffs: list, r: Fraction) -> list:
    # synthetic division by (x - r), highest degree first internally
    hi = list(reversed(coeffs))
    out = [Fraction(hi[0])]
    for c in hi[1:-1]:
        out.append(c + out[-1] * r)
    res = list(reversed(out))
    den = reduce(math.lcm, (Fraction(c).denominator for c in res), 1)
    return [int(Fraction(c) * den) for c in res]


# ------------------------------------------------------------------ norms

def _is_diagonal(m) -> bool:
    return all(m[i][j] == 0 for i in range(len(m)) for j in range(len(m)) if i != j)


def operator_norm(m) -> Fraction:
    """Upper bound for the spectral norm of ``m``.

    Exact for diagonal matrices, otherwise the floating value inflated by a
    relative margin of ``NORM_MARGIN``.
    """
    if _is_diagonal(m):
        return max(abs(Fraction(m[i][i])) for i in range(len(m)))
    a = np.array([[float(x) for x in r] for r in m])
    top = float(np.sqrt(np.max(np.linalg.eigvalsh(a.T @ a))))
    return Fraction(top * (1 + NORM_MARGIN))


def inverse_norm(m) -> Fraction:
    return operator_norm(inverse(m))


def max_sq_norm(points: Iterable) -> Fraction:
    """Largest squared Euclidean norm in a finite vector set (exact)."""
    return max((sum(Fraction(x) ** 2 for x in p) for p in points), default=Fraction(0))


def set_norm(points: Iterable) -> float:
    """Upper bound for the largest Euclidean norm of a finite vector set."""
    return math.sqrt(float(max_sq_norm(points))) * (1 + NORM_MARGIN)


def integer_ball(radius, d: int) -> list:
    """Lattice points of the closed Euclidean ball B(0, radius), sorted."""
    r = Fraction(radius)
    r2 = r * r
    k = math.floor(r)
    return [v for v in itertools.product(range(-k, k + 1), repeat=d) if sum(x * x for x in v) <= r2]


# ---------------------------------------------------------- digit systems

class DigitDecomposition(NamedTuple):
    quotient: Vec
    digit: int


class DigitSystem:
    """Residue bookkeeping for an expansion ``L`` with digit set ``support``.

    ``n`` and ``m`` are congruent mod L(Z^d) iff ``adj(L) n == adj(L) m``
    modulo ``|det L|`` componentwise, which gives a cheap residue key.
    """

    def __init__(self, L, support):
        self.L = as_matrix(L)
        self.d = len(self.L)
        self.det = determinant(self.L)
        if self.det == 0:
            raise InvalidInput("singular matrix")
        self.adj = adjugate(self.L)
        self.support = tuple(tuple(int(x) for x in f) for f in support)
        self._index = {}
        for i, f in enumerate(self.support):
            self._index.setdefault(self.residue(f), i)

    def residue(self, n) -> Vec:
        m = abs(self.det)
        return tuple(x % m for x in mat_vec(self.adj, n))

    def is_complete(self) -> bool:
        return len(self._index) == len(self.support) == abs(self.det)

    def decompose(self, n) -> DigitDecomposition:
        i = self._index[self.residue(n)]
        diff = vec_sub(n, self.support[i])
        q = tuple(x // self.det for x in mat_vec(self.adj, diff))
        return DigitDecomposition(q, i)

    def quotient(self, n) -> Vec:
        return self.decompose(n).quotient


def coset_representatives(L) -> list:
    """Canonical coset representatives of Z^d / L(Z^d) in L([0,1)^d)."""
    L = as_matrix(L)
    if not is_expansion(L):
        raise InvalidInput("matrix is not expanding")
    h = Lattice.from_generators(transpose(L))
    diag = [h.rows[i][i] for i in range(len(L))]
    inv = inverse(L)
    reps = set()
    for v in itertools.product(*(range(k) for k in diag)):
        coords = mat_vec(inv, v)
        shift = tuple(math.floor(c) for c in coords)
        reps.add(vec_sub(v, mat_vec(L, shift)))
    return sorted(reps)


def is_fundamental_domain(F, L) -> bool:
    F = [tuple(f) for f in F]
    if not F:
        raise InvalidInput("empty digit set")
    d = len(L)
    if tuple([0] * d) not in F or len(set(F)) != len(F):
        return False
    return DigitSystem(L, F).is_complete()


def decompose(n, L, F) -> DigitDecomposition:
    """Unique ``(q, i)`` with ``n == L q + F[i]``."""
    return DigitSystem(L, F).decompose(tuple(n))


# --------------------------------------------------------------- lattices

def _hnf_rows(rows: list, d: int) -> list:
    """Row Hermite normal form: upper triangular, positive pivots,
    entries above a pivot reduced into [0, pivot)."""
    a = [list(r) for r in rows if any(r)]
    r = 0
    for c in range(d):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            clean = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    clean = clean and a[i][c] == 0
            if clean:
                break
        if r < len(a) and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
            a = a[:r] + [row for row in a[r:] if any(row)]
    return [row for row in a[:r]]


class Lattice:
    """Full-rank lattice in Q^d stored as ``rows / den`` with ``rows`` in
    Hermite normal form. Equal lattices have equal fields."""

    __slots__ = ("d", "den", "rows")

    def __init__(self, den: int, rows):
        self.den = den
        self.rows = tuple(tuple(r) for r in rows)
        self.d = len(self.rows)

    @classmethod
    def from_generators(cls, gens, d: int | None = None) -> "Lattice":
        gens = [tuple(Fraction(x) for x in g) for g in gens]
        if d is None:
            if not gens:
                raise InvalidInput("no generators")
            d = len(gens[0])
        den = reduce(math.lcm, (x.denominator for g in gens for x in g), 1)
        ints = [[int(x * den) for x in g] for g in gens]
        h = _hnf_rows(ints, d)
        if len(h) != d:
            raise InvalidInput("generators are rank deficient")
        g = reduce(math.gcd, (x for r in h for x in r), den)
        return cls(den // g, [[x // g for x in r] for r in h])

    @classmethod
    def standard(cls, d: int) -> "Lattice":
        return cls(1, identity(d))

    @property
    def basis(self) -> tuple:
        if self.den == 1:
            return self.rows
        return tuple(tuple(Fraction(x, self.den) for x in r) for r in self.rows)

    def is_integral(self) -> bool:
        return self.den == 1

    def __eq__(self, other):
        return isinstance(other, Lattice) and (self.den, self.rows) == (other.den, other.rows)

    def __hash__(self):
        return hash((self.den, self.rows))

    def __repr__(self):
        return f"Lattice(basis={[list(map(str, r)) for r in self.basis]})"

    def coordinates(self, v) -> tuple:
        """Coordinates of ``v`` in the basis (rationals)."""
        x = [Fraction(c) * self.den for c in v]
        coords = [Fraction(0)] * self.d
        for i in range(self.d):
            c = x[i] / self.rows[i][i]
            coords[i] = c
            x = [a - c * b for a, b in zip(x, self.rows[i])]
        return tuple(coords)

    def __contains__(self, v) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(v))

    def contains(self, other: "Lattice") -> bool:
        return all(b in self for b in other.basis)

    def join(self, other: "Lattice") -> "Lattice":
        return Lattice.from_generators(list(self.basis) + list(other.basis), self.d)

    def index(self) -> Fraction:
        """Covolume; equals [Z^d : self] for integer lattices."""
        v = Fraction(math.prod(self.rows[i][i] for i in range(self.d)), self.den ** self.d)
        return int(v) if v.denominator == 1 else v

    def dual(self) -> "Lattice":
        b = tuple(tuple(Fraction(x, self.den) for x in r) for r in self.rows)
        return Lattice.from_generators(inverse(transpose(b)), self.d)   # rows of B^-T

    def meet(self, other: "Lattice") -> "Lattice":
        return self.dual().join(other.dual()).dual()

    def image(self, m) -> "Lattice":
        return Lattice.from_generators([mat_vec(m, b) for b in self.basis], self.d)

    def preimage(self, m) -> "Lattice":
        inv = inverse(m)
        return Lattice.from_generators([mat_vec(inv, b) for b in self.basis], self.d)


def join(a: Lattice, b: Lattice) -> Lattice:
    return a.join(b)


def contains(a: Lattice, b: Lattice) -> bool:
    """True iff ``b`` is a sublattice of ``a``."""
    return a.contains(b)


def index(a: Lattice):
    return a.index()


def dual(a: Lattice) -> Lattice:
    return a.dual()


def saturate_height(generators, L) -> Lattice:
    """Smallest lattice H containing the generators with
    H ∩ L(Z^d) ⊆ L(H)."""
    L = as_matrix(L)
    d = len(L)
    h = Lattice.from_generators(generators, d)
    image = Lattice.standard(d).image(L)
    inv = inverse(L)
    while True:
        inter = h.meet(image)
        new = [mat_vec(inv, b) for b in inter.basis]
        missing = [v for v in new if v not in h]
        if not missing:
            return h
        h = Lattice.from_generators(list(h.basis) + missing, d)


def quotient_representatives(m) -> list:
    """One representative per coset of Z^d / m(Z^d), taken from the
    triangular box of the Hermite form (not canonical under change of m)."""
    m = as_matrix(m)
    if determinant(m) == 0:
        raise InvalidInput("singular matrix")
    h = Lattice.from_generators(transpose(m))
    return sorted(itertools.product(*(range(h.rows[i][i]) for i in range(len(m)))))
