"""Exact integer linear algebra: Smith normal form, quotient groups Z^E/K,
the image characteristic monoid with its partial order, and the
relative-valuativity test for monoid homomorphisms.

A :class:`LatticeQuotient` is the group Z^E / (row lattice of K) together
with the image of the free monoid N^E.  Generators of the image monoid that
are invertible (their negative is again in the monoid) are quotiented away
by *sharpening*; generators that die in the sharpened monoid are flagged
degenerate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import AmbientTooLarge
from .lp import LinearSystem, nullspace, rref

MEMBERSHIP_AMBIENT_LIMIT = 16
_BOX_GUARD = 2_000_000


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(m: Sequence[Sequence[int]]):
    """Smith normal form with transforms.

    Returns (U, D, V) with U @ m @ V == D, U and V unimodular, and the
    diagonal of D nonnegative with d1 | d2 | ... .
    """
    A = [[int(x) for x in row] for row in m]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U = _identity(rows)
    V = _identity(cols)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def addmul_row(dst, src, q):
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def addmul_col(dst, src, q):
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    t = 0
    while t < min(rows, cols):
        # locate a pivot in the remaining block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < best):
                    best = abs(A[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            # clear column t
            for i in range(t + 1, rows):
                while A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    addmul_row(i, t, -q)
                    if A[i][t] != 0:
                        swap_rows(t, i)
            # clear row t (may dirty the column again)
            for j in range(t + 1, cols):
                while A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    addmul_col(j, t, -q)
                    if A[t][j] != 0:
                        swap_cols(t, j)
            if all(A[i][t] == 0 for i in range(t + 1, rows)):
                break
        # divisibility fix
        fixed = True
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if A[i][j] % A[t][t] != 0:
                    addmul_row(t, i, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, A, V


def _int_inverse(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    n = len(M)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    red, pivots = rref(aug)
    assert pivots == list(range(n)), "matrix is singular"
    inv = []
    for i in range(n):
        row = red[i][n:]
        assert all(x.denominator == 1 for x in row), "matrix is not unimodular"
        inv.append([int(x) for x in row])
    return inv


def _matvec(vec: Sequence[int], M: Sequence[Sequence[int]]) -> list[int]:
    """Row vector times matrix."""
    return [sum(vec[i] * M[i][j] for i in range(len(vec))) for j in range(len(M[0]))] if M else []


# ---------------------------------------------------------------------------
# Quotient groups and the characteristic monoid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QElt:
    """Canonical form of an element of a quotient group: free coordinates
    plus torsion coordinates (reduced modulo the quotient's moduli)."""

    free: tuple[int, ...]
    torsion: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.torsion)


class LatticeQuotient:
    """Z^E modulo the subgroup generated by integer relation vectors."""

    def __init__(self, ambient_rank: int, relations: Sequence[Sequence[int]], _sharp_level: int = 0):
        self.ambient_rank = int(ambient_rank)
        E = self.ambient_rank
        rels = tuple(tuple(int(x) for x in r) for r in relations)
        for r in rels:
            if len(r) != E:
                raise ValueError("relation vector length must equal the ambient rank")
        self.relations = rels
        if rels:
            _, D, V = smith_normal_form(rels)
            diag = [D[i][i] for i in range(min(len(rels), E))]
        else:
            V = _identity(E)
            diag = []
        k = sum(1 for d in diag if d != 0)
        self._V = V
        self._Vinv = _int_inverse(V)
        self._diag = [diag[i] for i in range(k)]
        self.torsion_index = [i for i in range(k) if self._diag[i] > 1]
        self.moduli = tuple(self._diag[i] for i in self.torsion_index)
        self.free_index = list(range(k, E))
        self.free_rank = E - k
        self.kernel_rank = k
        # basis of the relation lattice: d_i times row i of V^{-1}
        self._kernel_basis = [
            [self._diag[i] * self._Vinv[i][j] for j in range(E)] for i in range(k)
        ]
        self.generator_images = tuple(self.reduce([int(j == e) for j in range(E)]) for e in range(E))
        self.degenerate = frozenset(self._find_unit_generators())
        self.sharp = all(self.generator_images[e].is_zero() for e in self.degenerate)
        if not self.degenerate or _sharp_level > 0:
            self._sharpened: LatticeQuotient = self
        else:
            axes = tuple(
                tuple(int(j == e) for j in range(E)) for e in sorted(self.degenerate)
            )
            self._sharpened = LatticeQuotient(E, rels + axes, _sharp_level=1)
        self._member_cache: dict[QElt, bool] = {}
        self._proj_basis_cache: Optional[list[list[int]]] = None

    # -- group arithmetic ----------------------------------------------------

    def zero(self) -> QElt:
        return QElt((0,) * self.free_rank, (0,) * len(self.moduli))

    def reduce(self, vec: Sequence[int]) -> QElt:
        """Canonical form of a vector of Z^E in the quotient."""
        z = _matvec(list(vec), self._V) if self.ambient_rank else []
        free = tuple(z[i] for i in self.free_index)
        tor = tuple(z[i] % m for i, m in zip(self.torsion_index, self.moduli))
        return QElt(free, tor)

    def lift(self, x: QElt) -> list[int]:
        """An integer vector of Z^E mapping to x."""
        z = [0] * self.ambient_rank
        for i, c in zip(self.free_index, x.free):
            z[i] = c
        for i, c in zip(self.torsion_index, x.torsion):
            z[i] = c
        return _matvec(z, self._Vinv) if self.ambient_rank else []

    def generator(self, e: int) -> QElt:
        return self.generator_images[e]

    def add(self, x: QElt, y: QElt) -> QElt:
        return QElt(
            tuple(a + b for a, b in zip(x.free, y.free)),
            tuple((a + b) % m for a, b, m in zip(x.torsion, y.torsion, self.moduli)),
        )

    def neg(self, x: QElt) -> QElt:
        return QElt(
            tuple(-a for a in x.free),
            tuple((-a) % m for a, m in zip(x.torsion, self.moduli)),
        )

    def sub(self, x: QElt, y: QElt) -> QElt:
        return self.add(x, self.neg(y))

    def scale(self, c: int, x: QElt) -> QElt:
        return QElt(
            tuple(c * a for a in x.free),
            tuple((c * a) % m for a, m in zip(x.torsion, self.moduli)),
        )

    # -- sharpening ----------------------------------------------------------

    @property
    def sharpened(self) -> "LatticeQuotient":
        """The quotient by the unit subgroup of the image monoid."""
        return self._sharpened

    def sharpen_elt(self, x: QElt) -> QElt:
        if self._sharpened is self:
            return x
        return self._sharpened.reduce(self.lift(x))

    def _find_unit_generators(self) -> list[int]:
        """Generators e with a nonnegative relation-lattice vector positive at e.

        Such a vector certifies that -gen(e) lies in the image monoid, so
        gen(e) is invertible there.  Rational feasibility suffices: any
        rational certificate scales to an integral one inside the lattice.
        """
        k = self.kernel_rank
        if k == 0:
            return []
        units = []
        for e in range(self.ambient_rank):
            ls = LinearSystem(k)
            for j in range(self.ambient_rank):
                ls.add_ge([self._kernel_basis[i][j] for i in range(k)])
            ls.add_ge([self._kernel_basis[i][e] for i in range(k)], rhs=1)
            if ls.feasible_point() is not None:
                units.append(e)
        return units

    # -- monoid membership ---------------------------------------------------

    def _projected_kernel_basis(self) -> list[list[int]]:
        """Lattice basis of the relation lattice projected away from the
        degenerate coordinates (kept at full length, with zeroed entries)."""
        if self._proj_basis_cache is not None:
            return self._proj_basis_cache
        cols = [j for j in range(self.ambient_rank) if j not in self.degenerate]
        restricted = [[row[j] for j in cols] for row in self._kernel_basis]
        basis: list[list[int]] = []
        if restricted and any(any(r) for r in restricted):
            _, D, V = smith_normal_form(restricted)
            Vinv = _int_inverse(V)
            for i in range(min(len(restricted), len(cols))):
                d = D[i][i]
                if d == 0:
                    break
                full = [0] * self.ambient_rank
                for jj, j in enumerate(cols):
                    full[j] = d * Vinv[i][jj]
                basis.append(full)
        self._proj_basis_cache = basis
        return basis

    def monoid_member(self, x: QElt) -> bool:
        """True iff x is a nonnegative integer combination of the generator
        images (exact integer-feasibility decision)."""
        if self.ambient_rank > MEMBERSHIP_AMBIENT_LIMIT:
            raise AmbientTooLarge(
                f"ambient rank {self.ambient_rank} exceeds {MEMBERSHIP_AMBIENT_LIMIT}"
            )
        S = self._sharpened
        if S is not self:
            return S.monoid_member(self.sharpen_elt(x))
        if any(x.torsion):
            # the sharpened image monoid has no torsion certificate unless a
            # lattice solution exists; fall through to the generic search
            pass
        cached = self._member_cache.get(x)
        if cached is not None:
            return cached
        result = self._member_search(x)
        self._member_cache[x] = result
        return result

    def _member_search(self, x: QElt) -> bool:
        n0 = self.lift(x)
        cols = [j for j in range(self.ambient_rank) if j not in self.degenerate]
        basis = self._projected_kernel_basis()
        if not basis:
            return all(n0[j] >= 0 for j in cols)
        kdim = len(basis)
        ls = LinearSystem(kdim)
        for j in cols:
            ls.add_ge([basis[i][j] for i in range(kdim)], rhs=-n0[j])
        if ls.feasible_point() is None:
            return False
        ranges = []
        size = 1
        for i in range(kdim):
            ext = ls.extremes([int(ii == i) for ii in range(kdim)])
            if ext is None:
                return False
            lo, hi = ext
            assert lo is not None and hi is not None, "sharp membership polytope must be bounded"
            ranges.append(range(math.ceil(lo), math.floor(hi) + 1))
            size *= max(len(ranges[-1]), 1)
        if size > _BOX_GUARD:
            raise AmbientTooLarge("membership search box too large")
        for mu in itertools.product(*ranges):
            if all(n0[j] + sum(mu[i] * basis[i][j] for i in range(kdim)) >= 0 for j in cols):
                return True
        return False

    def membership_witness(self, x: QElt) -> Optional[list[int]]:
        """A nonnegative coefficient vector for x, for sharp quotients
        without degenerate generators; None if x is not in the monoid."""
        if self.degenerate:
            raise ValueError("witness extraction requires no degenerate generators")
        n0 = self.lift(x)
        basis = self._projected_kernel_basis()
        if not basis:
            return n0 if all(c >= 0 for c in n0) else None
        kdim = len(basis)
        ls = LinearSystem(kdim)
        for j in range(self.ambient_rank):
            ls.add_ge([basis[i][j] for i in range(kdim)], rhs=-n0[j])
        if ls.feasible_point() is None:
            return None
        ranges = []
        for i in range(kdim):
            ext = ls.extremes([int(ii == i) for ii in range(kdim)])
            if ext is None:
                return None
            lo, hi = ext
            ranges.append(range(math.ceil(lo), math.floor(hi) + 1))
        for mu in itertools.product(*ranges):
            cand = [n0[j] + sum(mu[i] * basis[i][j] for i in range(kdim)) for j in range(self.ambient_rank)]
            if all(c >= 0 for c in cand):
                return cand
        return None

    def membership_bound(self, x: QElt) -> int:
        """Certified bound B: if x is in the monoid at all, some coefficient
        vector with coordinate sum <= B expresses it.  Only meaningful for
        quotients without degenerate generators (bounded representation
        polytope)."""
        if self.degenerate:
            raise ValueError("certified bound requires no degenerate generators")
        n0 = self.lift(x)
        basis = self._projected_kernel_basis()
        if not basis:
            return max(0, sum(n0))
        kdim = len(basis)
        ls = LinearSystem(kdim)
        for j in range(self.ambient_rank):
            ls.add_ge([basis[i][j] for i in range(kdim)], rhs=-n0[j])
        obj = [sum(basis[i]) for i in range(kdim)]
        ext = ls.extremes(obj, const=sum(n0))
        if ext is None:
            return 0
        hi = ext[1]
        assert hi is not None
        return max(0, math.floor(hi))

    def leq(self, x: QElt, y: QElt) -> bool:
        """Partial order: x <= y iff y - x lies in the image monoid."""
        return self.monoid_member(self.sub(y, x))

    def comparable(self, x: QElt, y: QElt) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    # -- serialization -------------------------------------------------------

    def element_to_json(self, x: QElt) -> dict:
        return {
            "free": list(x.free),
            "torsion": [[c, m] for c, m in zip(x.torsion, self.moduli)],
        }

    def to_json(self) -> dict:
        return {
            "ambient_rank": self.ambient_rank,
            "relations": [list(r) for r in self.relations],
            "free_rank": self.free_rank,
            "moduli": list(self.moduli),
            "generator_images": [self.element_to_json(g) for g in self.generator_images],
            "degenerate_generators": sorted(self.degenerate),
            "sharp": self.sharp,
        }


def quotient(ambient_rank: int, relations: Sequence[Sequence[int]]) -> LatticeQuotient:
    """The quotient of Z^E by the subgroup generated by the relations,
    with its image characteristic monoid."""
    return LatticeQuotient(ambient_rank, relations)


# ---------------------------------------------------------------------------
# Monoid homomorphisms and relative valuativity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonoidHom:
    """A homomorphism N^s -> Z^t given by its matrix (columns are the images
    of the generators, required to lie in the nonnegative orthant)."""

    source_rank: int
    target_rank: int
    matrix: tuple[tuple[int, ...], ...]  # target_rank rows, source_rank columns

    def __post_init__(self):
        if len(self.matrix) != self.target_rank or any(
            len(row) != self.source_rank for row in self.matrix
        ):
            raise ValueError("matrix shape must be target_rank x source_rank")
        for j in range(self.source_rank):
            if any(self.matrix[i][j] < 0 for i in range(self.target_rank)):
                raise ValueError(f"generator image {j} lies outside the target cone")

    def kernel_basis(self) -> list[tuple[Fraction, ...]]:
        return nullspace([list(row) for row in self.matrix], self.source_rank)


def is_relatively_valuative(f: MonoidHom) -> bool:
    """True iff every group element killed by f is comparable to 0, i.e. the
    rational kernel is covered by the source cone and its negative.

    The source cone is the nonnegative orthant, which is pointed, so the
    kernel cone has trivial lineality; the covering condition holds exactly
    when the kernel has dimension at most 1 and is spanned by a sign-pure
    vector.
    """
    basis = f.kernel_basis()
    if not basis:
        return True
    if len(basis) > 1:
        return False
    v = basis[0]
    return all(c >= 0 for c in v) or all(c <= 0 for c in v)
