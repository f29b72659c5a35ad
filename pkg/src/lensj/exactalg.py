"""Exact integer linear algebra over Z.

Normal forms (Hermite, Smith), row lattices, finitely presented abelian
groups Z^n / L and the orders of their elements.  Everything works on
Python integers, so entries may grow without bound.

Vectors are row vectors.  A lattice is the row span of a (possibly
redundant) list of integer rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

INFINITE = math.inf

# unimodularity of transforms is only verified up to this size
DET_CHECK_MAX_DIM = 64


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def p_valuation(n: int, p: int) -> int:
    """Largest e with p**e dividing n."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    e = 0
    # peel off squared powers first; q**(2n) - 1 can have thousands of bits
    step, pk = 1, p
    while n % pk == 0:
        n //= pk
        e += step
        step, pk = step * 2, pk * pk
    while n % p == 0:
        n //= p
        e += 1
    return e


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major.  Zero rows or columns are allowed."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("column count required for a matrix without rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> IntMatrix:
        return IntMatrix(
            self.cols, self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = [other.entries[j::other.cols] for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.extend(sum(a * b for a, b in zip(r, c)) for c in ocols)
        return IntMatrix(self.rows, other.cols, tuple(out))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_diagonal(self) -> bool:
        return all(
            self[i, j] == 0
            for i in range(self.rows) for j in range(self.cols) if i != j
        )

    def diagonal(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            akk, rk = a[k][k], a[k]
            for i in range(k + 1, n):
                ri = a[i]
                aik = ri[k]
                for j in range(k + 1, n):
                    ri[j] = (ri[j] * akk - aik * rk[j]) // prev
            prev = akk
        return sign * a[n - 1][n - 1]


def _identity_rows(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _combine(x: list[int], y: list[int], a: int, b: int, c: int, d: int):
    """Return (a*x + b*y, c*x + d*y)."""
    return ([a * u + b * v for u, v in zip(x, y)],
            [c * u + d * v for u, v in zip(x, y)])


# ---------------------------------------------------------------------------
# Hermite normal form


def _hnf(a: list[list[int]], ncols: int, track: bool):
    """Row-style Hermite normal form, in place.

    Returns (a, T, pivots): the first len(pivots) rows of ``a`` are in
    echelon form with positive pivots and reduced entries above each pivot,
    the remaining rows are zero, and T @ original == a when ``track``.
    """
    m = len(a)
    T = _identity_rows(m) if track else None
    pivots: list[int] = []
    pr = 0
    for j in range(ncols):
        if pr == m:
            break
        for i in range(pr, m):
            if a[i][j]:
                break
        else:
            continue
        if i != pr:
            a[pr], a[i] = a[i], a[pr]
            if track:
                T[pr], T[i] = T[i], T[pr]
        for i in range(pr + 1, m):
            y = a[i][j]
            if y == 0:
                continue
            x = a[pr][j]
            if y % x == 0:
                f = y // x
                a[i] = [u - f * v for u, v in zip(a[i], a[pr])]
                if track:
                    T[i] = [u - f * v for u, v in zip(T[i], T[pr])]
                continue
            g, s, t = xgcd(x, y)
            c, d = -y // g, x // g
            a[pr], a[i] = _combine(a[pr], a[i], s, t, c, d)
            if track:
                T[pr], T[i] = _combine(T[pr], T[i], s, t, c, d)
        if a[pr][j] < 0:
            a[pr] = [-u for u in a[pr]]
            if track:
                T[pr] = [-u for u in T[pr]]
        _reduce_above(a, pr, j, T)
        pivots.append(j)
        pr += 1
    return a, T, pivots


def _reduce_above(a, pr, j, T=None):
    h = a[pr][j]
    for i in range(pr):
        f = a[i][j] // h
        if f:
            a[i] = [u - f * v for u, v in zip(a[i], a[pr])]
            if T is not None:
                T[i] = [u - f * v for u, v in zip(T[i], T[pr])]


def _hnf_mod(rows: Sequence[Sequence[int]], n: int, e: int) -> list[list[int]]:
    """HNF (n x n) of rowspan(rows) + e Z^n, with all entries kept below e."""
    active = [[x % e for x in r] for r in rows]
    active = [r for r in active if any(r)]
    out: list[list[int]] = []
    for j in range(n):
        piv = None
        rest = []
        for r in active:
            if r[j] == 0:
                rest.append(r)
            elif piv is None:
                piv = r
            else:
                x, y = piv[j], r[j]
                g, s, t = xgcd(x, y)
                piv, other = _combine(piv, r, s, t, -y // g, x // g)
                piv = [u % e for u in piv]
                other = [u % e for u in other]
                if any(other):
                    rest.append(other)
        if piv is None:
            piv = [0] * n
            piv[j] = e
        else:
            # fold in e * e_j; the complementary row keeps (e/g) * piv
            g, s, _ = xgcd(piv[j], e)
            other = [(-(e // g) * u) % e for u in piv]
            other[j] = 0
            if any(other):
                rest.append(other)
            piv = [(s * u) % e for u in piv]
            piv[j] = g
        out.append(piv)
        _reduce_above(out, j, j)
        active = rest
    return out


def hermite_normal_form(A: IntMatrix) -> IntMatrix:
    """Nonzero rows of the row-style HNF of A (same row lattice as A)."""
    a, _, pivots = _hnf(A.to_rows(), A.cols, False)
    return IntMatrix.from_rows(a[:len(pivots)], A.cols)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V == D with U, V unimodular and D in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    invariants: tuple[int, ...]
    V_inverse: IntMatrix | None = None


def _sym(x: int, e: int) -> int:
    x %= e
    return x - e if 2 * x > e else x


def _smith(a: list[list[int]], m: int, n: int, track_u: bool, track_v: bool,
           mod: int | None = None):
    """Smith form in place; returns (a, U, V, Vinv).

    The pivot is a nonzero entry of least absolute value in the remaining
    block.  With ``mod`` = e the input must generate a lattice containing
    e Z^n: entries and V, Vinv are kept modulo e and the true invariant
    factors are gcd(a[t][t], e).
    """
    U = _identity_rows(m) if track_u else None
    V = _identity_rows(n) if track_v else None
    Vi = _identity_rows(n) if track_v else None
    if mod:
        for r in a:
            r[:] = [_sym(x, mod) for x in r]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if track_u:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        if track_v:
            for r in V:
                r[j], r[k] = r[k], r[j]
            Vi[j], Vi[k] = Vi[k], Vi[j]

    def add_row(i, k, f):  # row_i += f * row_k
        a[i] = [u + f * v for u, v in zip(a[i], a[k])]
        if mod:
            a[i] = [_sym(u, mod) for u in a[i]]
        if track_u:
            U[i] = [u + f * v for u, v in zip(U[i], U[k])]

    def add_col(j, k, f):  # col_j += f * col_k
        for r in a:
            r[j] += f * r[k]
            if mod:
                r[j] = _sym(r[j], mod)
        if track_v:
            for r in V:
                r[j] += f * r[k]
                if mod:
                    r[j] %= mod
            Vi[k] = [u - f * v for u, v in zip(Vi[k], Vi[j])]
            if mod:
                Vi[k] = [u % mod for u in Vi[k]]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            clean = True
            piv = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // piv))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // piv))
                    if a[t][j]:
                        clean = False
            if clean:
                bad = next(
                    (i for i in range(t + 1, m)
                     if any(a[i][j] % piv for j in range(t + 1, n))),
                    None,
                )
                if bad is None:
                    break
                add_row(t, bad, 1)
                continue
            # a remainder survived: move the smallest one onto the diagonal
            _, i, j = min(
                [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
                + [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            )
            swap_rows(t, i)
            swap_cols(t, j)
        if a[t][t] < 0 and not mod:
            a[t] = [-u for u in a[t]]
            if track_u:
                U[t] = [-u for u in U[t]]
    return a, U, V, Vi


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    m, n = A.shape
    d, U, V, Vi = _smith(A.to_rows(), m, n, True, True)
    D = IntMatrix.from_rows(d, n)
    return SmithDecomposition(
        U=IntMatrix.from_rows(U, m),
        D=D,
        V=IntMatrix.from_rows(V, n),
        invariants=tuple(D.diagonal()),
        V_inverse=IntMatrix.from_rows(Vi, n),
    )


def invariant_factors(A: IntMatrix) -> tuple[int, ...]:
    d, *_ = _smith(A.to_rows(), A.rows, A.cols, False, False)
    return tuple(d[i][i] for i in range(min(A.rows, A.cols)))


# ---------------------------------------------------------------------------
# lattices and quotient groups


class Membership(NamedTuple):
    member: bool
    witness: tuple[int, ...] | None


@dataclass(frozen=True)
class CyclicDecomposition:
    """Z/d_1 + ... + Z/d_m + Z^free_rank with d_i | d_{i+1}, every d_i > 1."""

    torsion: tuple[int, ...]
    free_rank: int = 0
    generators: tuple[tuple[int, ...], ...] | None = None

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | float:
        if self.free_rank:
            return INFINITE
        return math.prod(self.torsion)

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and not self.free_rank


@dataclass(frozen=True)
class _Coordinates:
    # z lies in the lattice iff (z @ V)_i == 0 mod d_i; d_i = 0 past the rank.
    # With a modulus, V and Vinv are only meaningful modulo it.
    invariants: tuple[int, ...]
    V: list[list[int]]
    Vinv: list[list[int]]


@dataclass(frozen=True)
class Lattice:
    """Row span of ``basis`` inside Z^ambient_dim.

    ``modulus``, when given, is a positive integer e with e Z^n inside the
    lattice; it lets every normal form run with entries reduced mod e.
    """

    ambient_dim: int
    basis: IntMatrix
    modulus: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.basis.cols != self.ambient_dim:
            raise ValueError(
                f"basis rows have length {self.basis.cols}, expected {self.ambient_dim}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ambient_dim: int,
                  modulus: int | None = None) -> Lattice:
        return cls(ambient_dim, IntMatrix.from_rows(rows, ambient_dim), modulus)

    @cached_property
    def _echelon(self) -> tuple[list[list[int]], list[int]]:
        n = self.ambient_dim
        if self.modulus:
            return _hnf_mod(self.basis.to_rows(), n, self.modulus), list(range(n))
        a, _, pivots = _hnf(self.basis.to_rows(), n, False)
        return a[:len(pivots)], pivots

    @cached_property
    def _transform(self) -> tuple[list[list[int]], list[list[int]], list[int]]:
        a, T, pivots = _hnf(self.basis.to_rows(), self.ambient_dim, True)
        return a[:len(pivots)], T, pivots

    @property
    def hnf(self) -> IntMatrix:
        return IntMatrix.from_rows(self._echelon[0], self.ambient_dim)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(self._echelon[1])

    @property
    def rank(self) -> int:
        return len(self._echelon[1])

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    @cached_property
    def exponent_bound(self) -> int | None:
        """Some e > 0 with e Z^n in the lattice (None when the index is infinite)."""
        if self.modulus:
            return self.modulus
        if not self.is_full_rank:
            return None
        return math.prod(r[j] for r, j in zip(*self._echelon))

    def pivot_at(self, col: int) -> int:
        """HNF pivot in column ``col`` (0 if the column has none)."""
        for r, j in zip(*self._echelon):
            if j == col:
                return r[col]
        return 0

    def project(self, m: int) -> Lattice:
        """Image under the projection onto the first m coordinates."""
        return Lattice.from_rows([r[:m] for r in self._echelon[0]], m, self.modulus)

    def reduce(self, v: Sequence[int]) -> tuple[list[int], int | None]:
        """Greedy echelon reduction of v by the HNF rows.

        Returns (residual, stuck) where ``stuck`` is the first coordinate
        whose residual entry cannot be cleared (None when v is a member).
        Everything left of ``stuck`` in the residual is zero.
        """
        self._check_dim(v)
        x = list(v)
        pivot_row = {j: r for r, j in zip(*self._echelon)}
        for j in range(self.ambient_dim):
            if x[j] == 0:
                continue
            h = pivot_row.get(j)
            if h is None or x[j] % h[j]:
                return x, j
            f = x[j] // h[j]
            x = [u - f * w for u, w in zip(x, h)]
        return x, None

    def contains(self, v: Sequence[int]) -> bool:
        return self.reduce(v)[1] is None

    @cached_property
    def _coordinates(self) -> _Coordinates:
        rows = [list(r) for r in self._echelon[0]]
        n = self.ambient_dim
        e = self.exponent_bound
        if e:
            d, _, V, Vi = _smith(rows, n, n, False, True, mod=e)
            invs = tuple(math.gcd(d[i][i], e) for i in range(n))
        else:
            d, _, V, Vi = _smith(rows, len(rows), n, False, True)
            invs = tuple(d[i][i] for i in range(len(rows))) + (0,) * (n - len(rows))
        return _Coordinates(invs, V, Vi)

    def _check_dim(self, v: Sequence[int]):
        if len(v) != self.ambient_dim:
            raise ValueError(
                f"vector of length {len(v)} in a lattice of dimension {self.ambient_dim}"
            )


def lattice_contains(L: Lattice, v: Sequence[int]) -> Membership:
    """Decide v in L; the witness w satisfies w @ L.basis == v."""
    if not L.contains(v):
        return Membership(False, None)
    rows, T, pivots = L._transform
    x = list(v)
    witness = [0] * L.basis.rows
    for h, j, t in zip(rows, pivots, T):
        f = x[j] // h[j]
        if f:
            x = [u - f * w for u, w in zip(x, h)]
            witness = [u + f * w for u, w in zip(witness, t)]
    return Membership(True, tuple(witness))


def quotient_decomposition(relations: Lattice, with_generators: bool = False) -> CyclicDecomposition:
    """Cyclic decomposition of Z^n / relations."""
    c = relations._coordinates
    keep = [i for i, d in enumerate(c.invariants) if d != 1]
    torsion = tuple(c.invariants[i] for i in keep if c.invariants[i])
    free = sum(1 for i in keep if c.invariants[i] == 0)
    gens = None
    if with_generators:
        e = relations.exponent_bound
        gens = tuple(
            tuple(x % e for x in c.Vinv[i]) if e else tuple(c.Vinv[i])
            for i in keep if c.invariants[i]
        )
    return CyclicDecomposition(torsion, free, gens)


def element_order(v: Sequence[int], relations: Lattice) -> int | float:
    """Order of the class of v in Z^n / relations (INFINITE if unbounded)."""
    relations._check_dim(v)
    c = relations._coordinates
    order = 1
    for i, d in enumerate(c.invariants):
        y = sum(a * row[i] for a, row in zip(v, c.V) if a)
        if d == 0:
            if y:
                return INFINITE
            continue
        order = math.lcm(order, d // math.gcd(d, y))
    return order


def express_in_basis(M: Lattice, vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Coordinates of each vector with respect to the HNF basis of M."""
    rows, pivots = M._echelon
    out = []
    for v in vectors:
        x = list(v)
        coords = []
        for h, j in zip(rows, pivots):
            if x[j] % h[j]:
                raise ValueError("vector is not in the lattice")
            f = x[j] // h[j]
            coords.append(f)
            if f:
                x = [u - f * w for u, w in zip(x, h)]
        if any(x):
            raise ValueError("vector is not in the lattice")
        out.append(coords)
    return out


def subgroup_quotient(M: Lattice, R: Lattice) -> CyclicDecomposition:
    """Decomposition of M / R for R inside M; generators are ambient vectors."""
    if M.ambient_dim != R.ambient_dim:
        raise ValueError("lattices live in different ambient spaces")
    try:
        coords = express_in_basis(M, R._echelon[0])
    except ValueError:
        raise ValueError("R is not contained in M") from None
    # e Z^n in R and M in Z^n give e M in R
    inner = Lattice.from_rows(coords, M.rank, R.exponent_bound)
    dec = quotient_decomposition(inner, with_generators=True)
    B = M._echelon[0]
    gens = tuple(
        tuple(sum(g[i] * B[i][j] for i in range(len(B))) for j in range(M.ambient_dim))
        for g in dec.generators
    )
    return CyclicDecomposition(dec.torsion, dec.free_rank, gens)


def left_kernel(A: IntMatrix) -> Lattice:
    """Lattice of integer row vectors x with x @ A == 0 (no modular tricks)."""
    _, T, pivots = _hnf(A.to_rows(), A.cols, True)
    return Lattice.from_rows(T[len(pivots):], A.rows)


def _congruence_kernel(vals: Sequence[int], d: int) -> list[list[int]]:
    """Basis of {y : y . vals == 0 mod d}."""
    col = [[v] for v in vals] + [[d]]
    _, T, _ = _hnf(col, 1, True)
    return [t[:len(vals)] for t in T[1:]]


def kernel_of_induced_endomorphism(A: IntMatrix, relations: Lattice):
    """Kernel of x -> A x on the finite group Z^n / relations.

    Returns (decomposition of M / relations, M) with
    M = {x : A x in relations}.
    """
    n = relations.ambient_dim
    if A.shape != (n, n):
        raise ValueError(f"endomorphism of shape {A.shape} on Z^{n}")
    if not relations.is_full_rank:
        raise ValueError("quotient is infinite; kernel computation needs full-rank relations")
    if n == 0:
        return CyclicDecomposition((), 0, ()), relations
    for row in relations._echelon[0]:
        if not relations.contains([sum(A[i, j] * row[j] for j in range(n)) for i in range(n)]):
            raise ValueError("A does not preserve the relation lattice")
    e = relations.exponent_bound
    c = relations._coordinates
    # x lies in M iff (x A^T V)_i == 0 mod d_i for every i; impose one congruence at a time
    At = A.transpose().to_rows()
    C = [[sum(At[l][m] * c.V[m][i] for m in range(n)) % e for i in range(n)] for l in range(n)]
    B = _identity_rows(n)
    for i, d in enumerate(c.invariants):
        if d == 1:
            continue
        vals = [sum(b[l] * C[l][i] for l in range(n)) % d for b in B]
        if not any(vals):
            continue
        Y = _congruence_kernel(vals, d)
        B = _hnf_mod([[sum(y[a] * B[a][j] for a in range(n)) for j in range(n)] for y in Y], n, e)
    M = Lattice.from_rows(B, n, e)
    return subgroup_quotient(M, relations), M
