"""Exact rational linear algebra and Fourier-Motzkin elimination.

Everything here works over ``fractions.Fraction`` so that feasibility and
bound computations are exact.  The systems that show up in this project are
tiny (at most a dozen variables), so the potential blowup of Fourier-Motzkin
elimination is not a concern; a light redundancy filter keeps intermediate
constraint sets small.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence


def _F(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    mat = [[_F(x) for x in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: Optional[int] = None) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel {x : rows @ x = 0}."""
    if not rows:
        if not ncols:
            return []
        return [tuple(Fraction(i == j) for i in range(ncols)) for j in range(ncols)]
    ncols = len(rows[0])
    red, pivots = rref(rows)
    basis = []
    for j in range(ncols):
        if j in pivots:
            continue
        v = [Fraction(0)] * ncols
        v[j] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][j]
        basis.append(tuple(v))
    return basis


def solve_linear(rows: Sequence[Sequence], rhs: Sequence):
    """Solve rows @ x = rhs over Q.

    Returns (particular solution, kernel basis), or None if inconsistent.
    """
    if not rows:
        return (), []
    ncols = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = red[i][ncols]
    return tuple(x), nullspace(rows, ncols)


def _normalize(row: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale a constraint row to primitive integer form (for deduping)."""
    den = 1
    for x in row:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in row]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints)


class LinearSystem:
    """A system of exact affine constraints over Q^n.

    Constraints are ``coeffs . x == rhs`` (equalities) and
    ``coeffs . x >= rhs`` (optionally strict).  Supports finding a point
    satisfying all constraints including the strict ones, and exact
    minimisation/maximisation of a linear objective over the closure.
    """

    def __init__(self, nvars: int):
        self.n = nvars
        # internal form: row of length n+1, meaning row . (x, 1)  (>=|==)  0
        self._eqs: list[list[Fraction]] = []
        self._ineqs: list[tuple[list[Fraction], bool]] = []

    def add_eq(self, coeffs: Iterable, rhs=0) -> None:
        row = [_F(c) for c in coeffs]
        assert len(row) == self.n
        self._eqs.append(row + [-_F(rhs)])

    def add_ge(self, coeffs: Iterable, rhs=0, strict: bool = False) -> None:
        row = [_F(c) for c in coeffs]
        assert len(row) == self.n
        self._ineqs.append((row + [-_F(rhs)], strict))

    # -- internals -----------------------------------------------------------

    def _eliminate_equalities(self):
        """Substitute pivot variables of the equality subsystem.

        Returns (subs, ineqs, freevars) or None if inconsistent.  ``subs``
        maps pivot variable p to an affine row e with x_p = e . (x, 1).
        """
        red, pivots = rref(self._eqs) if self._eqs else ([], [])
        if self.n in pivots:  # 0 == nonzero
            return None
        subs = {}
        for i, p in enumerate(pivots):
            expr = [-c for c in red[i]]
            expr[p] = Fraction(0)
            subs[p] = expr
        ineqs = []
        for row, strict in self._ineqs:
            cur = list(row)
            for p, expr in subs.items():
                if cur[p] != 0:
                    f = cur[p]
                    cur[p] = Fraction(0)
                    cur = [a + f * b for a, b in zip(cur, expr)]
            ineqs.append((cur, strict))
        freevars = [j for j in range(self.n) if j not in subs]
        return subs, ineqs, freevars

    @staticmethod
    def _fm_eliminate(ineqs, var):
        """One Fourier-Motzkin step on variable index ``var``."""
        lowers, uppers, rest = [], [], []
        for row, strict in ineqs:
            c = row[var]
            if c > 0:
                lowers.append((row, strict))
            elif c < 0:
                uppers.append((row, strict))
            else:
                rest.append((row, strict))
        seen = {(_normalize(r), s) for r, s in rest}
        for lo, ls in lowers:
            for up, us in uppers:
                comb = [a * (-up[var]) + b * lo[var] for a, b in zip(lo, up)]
                comb[var] = Fraction(0)
                key = (_normalize(comb), ls or us)
                if key not in seen:
                    seen.add(key)
                    rest.append((comb, ls or us))
        return rest, lowers, uppers

    @staticmethod
    def _eval_rest(row, var, x):
        return sum(a * b for i, (a, b) in enumerate(zip(row, x)) if i != var)

    def feasible_point(self) -> Optional[tuple[Fraction, ...]]:
        """A rational point satisfying every constraint (strict included)."""
        elim = self._eliminate_equalities()
        if elim is None:
            return None
        subs, ineqs, freevars = elim
        steps = []
        for var in reversed(freevars):
            ineqs, lowers, uppers = self._fm_eliminate(ineqs, var)
            steps.append((var, lowers, uppers))
        for row, strict in ineqs:
            c = row[self.n]
            if c < 0 or (strict and c == 0):
                return None
        x = [Fraction(0)] * (self.n + 1)
        x[self.n] = Fraction(1)
        for var, lowers, uppers in reversed(steps):
            lo = hi = None
            for row, strict in lowers:
                v = -self._eval_rest(row, var, x) / row[var]
                if lo is None or v > lo:
                    lo = v
            for row, strict in uppers:
                v = -self._eval_rest(row, var, x) / row[var]
                if hi is None or v < hi:
                    hi = v
            if lo is not None and hi is not None:
                x[var] = (lo + hi) / 2 if lo != hi else lo
            elif lo is not None:
                x[var] = lo + 1
            elif hi is not None:
                x[var] = hi - 1
            else:
                x[var] = Fraction(0)
        for p in sorted(subs, reverse=True):
            x[p] = sum(a * b for a, b in zip(subs[p], x))
        point = tuple(x[: self.n])
        if not self.contains(point, strict=True):
            return None
        return point

    def contains(self, point, strict: bool = False) -> bool:
        """Check a point against the system (strict=False ignores strictness)."""
        xs = list(point) + [Fraction(1)]
        for row in self._eqs:
            if sum(a * b for a, b in zip(row, xs)) != 0:
                return False
        for row, st in self._ineqs:
            v = sum(a * b for a, b in zip(row, xs))
            if v < 0 or (strict and st and v == 0):
                return False
        return True

    def extremes(self, objective: Iterable, const=0):
        """Exact (min, max) of an objective over the closure of the system.

        Each bound is a Fraction or None when unbounded in that direction.
        Returns None when the closed system is infeasible.
        """
        obj = [_F(c) for c in objective]
        assert len(obj) == self.n
        sys2 = LinearSystem(self.n + 1)
        for row in self._eqs:
            sys2._eqs.append(row[: self.n] + [Fraction(0), row[self.n]])
        for row, _ in self._ineqs:
            sys2._ineqs.append((row[: self.n] + [Fraction(0), row[self.n]], False))
        sys2._eqs.append([-c for c in obj] + [Fraction(1), -_F(const)])
        elim = sys2._eliminate_equalities()
        if elim is None:
            return None
        subs, ineqs, freevars = elim
        tvar = self.n
        for var in [v for v in freevars if v != tvar]:
            ineqs, _, _ = self._fm_eliminate(ineqs, var)
        lo = hi = None
        for row, _ in ineqs:
            c = row[tvar]
            if c == 0:
                if row[sys2.n] < 0:
                    return None
                continue
            bound = -row[sys2.n] / c
            if c > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if tvar in subs:
            # objective is constant on the equality locus: rref pivots prefer
            # the x columns, so a pivot at t means t = const.
            val = subs[tvar][sys2.n]
            if (lo is not None and val < lo) or (hi is not None and val > hi):
                return None
            return val, val
        if lo is not None and hi is not None and lo > hi:
            return None
        return lo, hi
