"""Independent reference computations used only by the tests.

None of these reuse the package's normal-form code: group structure comes
from sympy or from explicit enumeration of finite groups.
"""
from __future__ import annotations

import math
from itertools import combinations

import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf


def sympy_invariants(rows, ncols):
    """Nonzero invariant factors of the integer matrix (sympy, over ZZ)."""
    if not rows:
        return ()
    M = sympy.Matrix(rows)
    D = sympy_snf(M, domain=sympy.ZZ)
    diag = [abs(int(D[i, i])) for i in range(min(D.shape))]
    return tuple(sorted(d for d in diag if d))


def determinantal_invariants(rows, ncols):
    """Invariant factors from gcds of minors: d_i = D_i / D_{i-1}."""
    M = sympy.Matrix(rows)
    m, n = M.shape
    out, prev = [], 1
    for size in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), size):
            for cs in combinations(range(n), size):
                g = math.gcd(g, int(M.extract(list(rs), list(cs)).det()))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return tuple(out)


class FiniteQuotient:
    """Z^n / L for a full-rank square basis, enumerated explicitly.

    x lies in L iff x adj(B) == 0 mod det(B), so x -> x adj(B) mod D embeds
    the quotient into (Z/D)^n.
    """

    def __init__(self, basis_rows):
        B = sympy.Matrix(basis_rows)
        self.n = B.shape[0]
        self.D = abs(int(B.det()))
        if self.D == 0:
            raise ValueError("singular basis")
        self.adj = [[int(x) for x in row] for row in B.adjugate().tolist()]

    def key(self, x):
        n, D = self.n, self.D
        return tuple(sum(x[i] * self.adj[i][j] for i in range(n)) % D for j in range(n))

    def elements(self):
        """All elements, as keys; BFS over the images of the unit vectors."""
        gens = [self.key([int(i == j) for j in range(self.n)]) for i in range(self.n)]
        zero = (0,) * self.n
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = tuple((a + b) % self.D for a, b in zip(x, g))
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def order_of_key(self, y):
        g = self.D
        for a in y:
            g = math.gcd(g, a)
        return self.D // g


def invariants_from_orders(orders, p):
    """Invariant factors of a finite abelian p-group given all element orders."""
    total = len(orders)
    # c[j] = number of elements killed by p^j
    c = [sum(1 for o in orders if o == 1)]
    while c[-1] < total:
        j = len(c)
        c.append(sum(1 for o in orders if (p ** j) % o == 0))
    return invariants_from_counts(c + [total], p)


def brute_kernel_invariants(relation_rows, image_rows, p):
    """Kernel of x -> sum_i x_i image_rows[i] on Z^n / <relation_rows>."""
    G = FiniteQuotient(relation_rows)
    n = G.n
    # image of each unit vector, as a key
    img = [G.key(image_rows[i]) for i in range(n)]
    # express each element through its coordinates; enumerate coordinate boxes instead
    # of keys so the endomorphism can be applied linearly
    box = _coordinate_box(G)
    orders = []
    for coords in box:
        y = [0] * n
        for c, im in zip(coords, img):
            if c:
                y = [(a + c * b) % G.D for a, b in zip(y, im)]
        if not any(y):
            orders.append(G.order_of_key(G.key(coords)))
    return invariants_from_orders(orders, p)


def _coordinate_box(G):
    """One coordinate vector per element of G, found by BFS over unit steps."""
    n = G.n
    zero_key = (0,) * n
    reps = {zero_key: (0,) * n}
    frontier = [(zero_key, (0,) * n)]
    while frontier:
        nxt = []
        for key, coords in frontier:
            for i in range(n):
                c2 = tuple(c + (j == i) for j, c in enumerate(coords))
                k2 = G.key(c2)
                if k2 not in reps:
                    reps[k2] = c2
                    nxt.append((k2, c2))
        frontier = nxt
    return list(reps.values())


def chebyshev_adams_w(i, cap):
    """Coefficients of psi^i(w) in w, from eta^i + eta^-i - 2 = 2 T_i((w+2)/2) - 2."""
    w = sympy.symbols("w")
    poly = sympy.Poly(sympy.expand(2 * sympy.chebyshevt(i, (w + 2) / 2) - 2), w)
    coeffs = [int(poly.coeff_monomial(w ** j)) for j in range(1, cap + 1)]
    assert poly.coeff_monomial(1) == 0
    return coeffs


def sympy_primitive_root_set(p, r):
    m = p ** r
    phi = m - m // p
    return {g for g in range(1, m) if math.gcd(g, p) == 1 and sympy.n_order(g, m) == phi}


def _quotient_order(rows, ncols):
    inv = sympy_invariants(rows, ncols)
    assert len(inv) == ncols, "quotient is infinite"
    return math.prod(inv)


def kernel_invariants_via_counts(relation_rows, image_rows, p, max_j=64):
    """Kernel of x -> x @ image_rows on Z^n / <relation_rows>, via sympy only.

    The number of kernel elements killed by p^j is the kernel size of
    x -> (phi(x), p^j x) from G into G + G, i.e. |coker| / |G|.
    """
    n = len(relation_rows)
    G = _quotient_order(relation_rows, n)
    counts = []
    for j in range(max_j):
        rows = [list(r) + [0] * n for r in relation_rows]
        rows += [[0] * n + list(r) for r in relation_rows]
        rows += [list(image_rows[i]) + [p ** j * (i == m) for m in range(n)] for i in range(n)]
        c = _quotient_order(rows, 2 * n) // G
        counts.append(c)
        if j and c == counts[-2]:
            break
    return invariants_from_counts(counts, p)


def invariants_from_counts(c, p):
    """c[j] = number of elements killed by p^j, until it stabilises.

    The number of cyclic factors of order >= p^j is log_p(c[j] / c[j-1]).
    """
    at_least = []
    for j in range(1, len(c)):
        ratio = c[j] // c[j - 1]
        if ratio == 1:
            break
        at_least.append(round(math.log(ratio, p)))
    factors = []
    for j, cnt in enumerate(at_least, 1):
        nxt = at_least[j] if j < len(at_least) else 0
        factors += [p ** j] * (cnt - nxt)
    return tuple(sorted(factors))


def cokernel_invariants(relation_rows, image_rows):
    n = len(relation_rows)
    inv = sympy_invariants([list(r) for r in relation_rows] + [list(r) for r in image_rows], n)
    return tuple(d for d in inv if d > 1)
