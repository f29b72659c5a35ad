"""KO(L) and K(L) of the lens-space skeleton L = L^{2k} mod p^r.

Elements of the reduced rings are truncated integer polynomials in
w (real) or mu = eta - 1 (complex).  Additive questions about the quotient
rings are answered by lattice algebra over the spanning family
{x^j * relation : j >= 0} inside Z^cap.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .exactalg import Lattice

REAL = "w"
COMPLEX = "mu"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_parameters(p: int, r: int, k: int) -> None:
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if r < 1:
        raise ValueError("r must be at least 1")
    if k < 0:
        raise ValueError("k must be nonnegative")


@dataclass(frozen=True)
class TruncatedIntPoly:
    """c_0 + c_1 x + ... + c_cap x^cap with x in {w, mu}.

    ``coeffs[i]`` is the coefficient of x^(i+1); reduced classes keep
    ``constant`` at 0.
    """

    variable: str
    cap: int
    coeffs: tuple[int, ...]
    constant: int = 0

    def __post_init__(self):
        if len(self.coeffs) != self.cap:
            raise ValueError(f"expected {self.cap} coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_dense(cls, variable: str, cap: int, dense: Sequence[int]) -> TruncatedIntPoly:
        """Build from [c_0, c_1, ...]; terms above ``cap`` are dropped."""
        dense = list(dense[:cap + 1]) + [0] * max(0, cap + 1 - len(dense))
        return cls(variable, cap, tuple(dense[1:]), dense[0] if dense else 0)

    @classmethod
    def zero(cls, variable: str, cap: int) -> TruncatedIntPoly:
        return cls(variable, cap, (0,) * cap)

    @classmethod
    def monomial(cls, variable: str, n: int, cap: int, c: int = 1) -> TruncatedIntPoly:
        dense = [0] * (cap + 1)
        if n <= cap:
            dense[n] = c
        return cls.from_dense(variable, cap, dense)

    @property
    def dense(self) -> list[int]:
        return [self.constant, *self.coeffs]

    def coefficient(self, n: int) -> int:
        if n == 0:
            return self.constant
        return self.coeffs[n - 1] if n <= self.cap else 0

    @property
    def filtration(self) -> int | None:
        """Lowest degree with a nonzero coefficient (None for zero)."""
        for n, c in enumerate(self.dense):
            if c:
                return n
        return None

    def is_zero(self) -> bool:
        return self.constant == 0 and not any(self.coeffs)

    def _check(self, other: TruncatedIntPoly):
        if (self.variable, self.cap) != (other.variable, other.cap):
            raise ValueError("polynomials in different truncated rings")

    def __add__(self, other: TruncatedIntPoly) -> TruncatedIntPoly:
        self._check(other)
        return TruncatedIntPoly(
            self.variable, self.cap,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            self.constant + other.constant,
        )

    def __neg__(self) -> TruncatedIntPoly:
        return self.scale(-1)

    def __sub__(self, other: TruncatedIntPoly) -> TruncatedIntPoly:
        return self + (-other)

    def scale(self, c: int) -> TruncatedIntPoly:
        return TruncatedIntPoly(
            self.variable, self.cap, tuple(c * a for a in self.coeffs), c * self.constant
        )

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        a, b = self.dense, other.dense
        out = [0] * (self.cap + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(self.cap + 1 - i):
                    out[i + j] += x * b[j]
        return TruncatedIntPoly.from_dense(self.variable, self.cap, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> TruncatedIntPoly:
        result = TruncatedIntPoly.monomial(self.variable, 0, self.cap)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, j: int) -> TruncatedIntPoly:
        """Multiply by x^j."""
        return TruncatedIntPoly.from_dense(self.variable, self.cap, [0] * j + self.dense)

    def truncate(self, cap: int) -> TruncatedIntPoly:
        return TruncatedIntPoly.from_dense(self.variable, cap, self.dense)


# ---------------------------------------------------------------------------
# real Adams operations


def _adams_coefficient(i: int, j: int) -> int:
    q, rem = divmod(comb(i, j) * comb(i + j - 1, j), comb(2 * j - 1, j))
    assert rem == 0, f"psi^{i}(w): coefficient of w^{j} is not integral"
    return q


def real_adams_w(i: int, cap: int) -> TruncatedIntPoly:
    """psi^i(w) = sum_j C(i,j) C(i+j-1,j) / C(2j-1,j) w^j, truncated at cap."""
    if i < 1:
        raise ValueError("Adams operations need degree >= 1")
    top = min(i, cap)
    return TruncatedIntPoly(
        REAL, cap,
        tuple(_adams_coefficient(i, j) if j <= top else 0 for j in range(1, cap + 1)),
    )


def f_poly(n: int, cap: int) -> TruncatedIntPoly:
    """f_n(w) = psi^((n+1)/2)(w) - psi^((n-1)/2)(w) for odd n >= 3."""
    if n < 3 or n % 2 == 0:
        raise ValueError("f_n needs an odd n >= 3")
    return real_adams_w((n + 1) // 2, cap) - real_adams_w((n - 1) // 2, cap)


def apply_real_adams(i: int, e: TruncatedIntPoly) -> TruncatedIntPoly:
    """psi^i(e), substituting psi^i(w) for w."""
    if e.variable != REAL:
        raise ValueError("real Adams operation applied to a complex class")
    image = real_adams_w(i, e.cap)
    out = TruncatedIntPoly.monomial(REAL, 0, e.cap, e.constant)
    power = TruncatedIntPoly.monomial(REAL, 0, e.cap)
    for c in e.coeffs:
        power = power * image
        if power.is_zero():
            break
        if c:
            out = out + power.scale(c)
    return out


def complex_adams(i: int, e: TruncatedIntPoly) -> TruncatedIntPoly:
    """psi^i on the mu basis: mu -> (1+mu)^i - 1."""
    if e.variable != COMPLEX:
        raise ValueError("complex Adams operation applied to a real class")
    image = TruncatedIntPoly.from_dense(COMPLEX, e.cap, [comb(i, j) for j in range(e.cap + 1)])
    image = image - TruncatedIntPoly.monomial(COMPLEX, 0, e.cap)
    out = TruncatedIntPoly.monomial(COMPLEX, 0, e.cap, e.constant)
    power = TruncatedIntPoly.monomial(COMPLEX, 0, e.cap)
    for c in e.coeffs:
        power = power * image
        if c:
            out = out + power.scale(c)
    return out


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class RingPresentation:
    """Z[x] / (main_relation, x^(cap+1)), reduced part as Z^cap / relation_lattice."""

    p: int
    r: int
    k: int
    flavor: str  # "KO" or "K"
    cap: int
    main_relation: TruncatedIntPoly
    relation_lattice: Lattice

    @property
    def variable(self) -> str:
        return REAL if self.flavor == "KO" else COMPLEX

    def basis_vector(self, n: int) -> tuple[int, ...]:
        """Coefficient vector of x^n, 1 <= n <= cap."""
        return tuple(int(i == n - 1) for i in range(self.cap))

    def reduced(self, e: TruncatedIntPoly) -> tuple[int, ...]:
        if (e.variable, e.cap) != (self.variable, self.cap):
            raise ValueError("element does not belong to this presentation")
        return e.coeffs


def _shift_family(rel: TruncatedIntPoly) -> list[tuple[int, ...]]:
    D = rel.cap
    if D == 0:
        return []
    # f has no constant term, so x^j f vanishes under truncation once j >= D
    assert rel.constant == 0 and rel.filtration == 1
    assert rel.shift(D).is_zero()
    return [rel.shift(j).coeffs for j in range(D)]


def _shift_lattice(rel: TruncatedIntPoly, lead: int) -> Lattice:
    # the shifts are upper triangular with diagonal ``lead``, so the index is lead^D
    assert rel.cap == 0 or rel.coeffs[0] == lead
    return Lattice.from_rows(_shift_family(rel), rel.cap, lead ** rel.cap)


def build_ko_presentation(p: int, r: int, k: int) -> RingPresentation:
    """KO(L) = Z[w] / (f_{p^r}(w), w^(floor(k/2)+1))."""
    check_parameters(p, r, k)
    D = k // 2
    f = f_poly(p ** r, D)
    return RingPresentation(p, r, k, "KO", D, f, _shift_lattice(f, p ** r))


def build_k_presentation(p: int, r: int, k: int) -> RingPresentation:
    """K(L) = Z[mu] / ((1+mu)^{p^r} - 1, mu^(k+1))."""
    check_parameters(p, r, k)
    m = p ** r
    rel = TruncatedIntPoly(COMPLEX, k, tuple(comb(m, j) for j in range(1, k + 1)))
    return RingPresentation(p, r, k, "K", k, rel, _shift_lattice(rel, m))


def equal_in_presentation(a: TruncatedIntPoly, b: TruncatedIntPoly, P: RingPresentation) -> bool:
    if a.constant != b.constant:
        return False
    return P.relation_lattice.contains(P.reduced(a - b))


def filtration_in(lattice: Lattice, v: Sequence[int]) -> int | None:
    """Largest n with v in lattice + span{x^m : m >= n}; None if v is in the lattice."""
    _, stuck = lattice.reduce(v)
    return None if stuck is None else stuck + 1


def leading_class(lattice: Lattice, v: Sequence[int], top: int) -> tuple[int, int] | None:
    """Solve v == c x^top modulo lattice + span{x^m : m > top}.

    Returns (c, g): c is determined modulo g, the order of x^top modulo the
    higher terms (g == 0 when unbounded).  None when no such c exists.
    """
    cut = lattice.project(top)
    residual, stuck = cut.reduce(list(v[:top]))
    if stuck is None:
        return 0, cut.pivot_at(top - 1)
    if stuck != top - 1:
        return None
    g = cut.pivot_at(top - 1)
    c = residual[top - 1]
    return (c % g if g else c), g


# ---------------------------------------------------------------------------
# the group ring Z[Z/p^r]


@dataclass(frozen=True)
class GroupRingElement:
    """sum_s a_s eta^s with eta^(p^r) = 1."""

    p: int
    r: int
    coeffs: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.p ** self.r

    def __post_init__(self):
        if len(self.coeffs) != self.p ** self.r:
            raise ValueError("group ring element needs p^r coefficients")

    def _check(self, other: GroupRingElement):
        if (self.p, self.r) != (other.p, other.r):
            raise ValueError("group ring elements over different cyclic groups")

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        self._check(other)
        return GroupRingElement(self.p, self.r, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: GroupRingElement) -> GroupRingElement:
        return self + other.scale(-1)

    def scale(self, c: int) -> GroupRingElement:
        return GroupRingElement(self.p, self.r, tuple(c * a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        m = self.modulus
        out = [0] * m
        nz = [(t, b) for t, b in enumerate(other.coeffs) if b]
        for s, a in enumerate(self.coeffs):
            if a:
                for t, b in nz:
                    out[(s + t) % m] += a * b
        return GroupRingElement(self.p, self.r, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> GroupRingElement:
        out = groupring_from_eta_powers([(0, 1)], self.p, self.r)
        for _ in range(e):
            out = out * self
        return out

    def adams(self, i: int) -> GroupRingElement:
        """psi^i: eta^s -> eta^(i s)."""
        m = self.modulus
        out = [0] * m
        for s, a in enumerate(self.coeffs):
            out[(i * s) % m] += a
        return GroupRingElement(self.p, self.r, tuple(out))

    @property
    def augmentation(self) -> int:
        return sum(self.coeffs)

    def divide_exact(self, d: int) -> GroupRingElement:
        if any(a % d for a in self.coeffs):
            raise ArithmeticError(f"group ring element is not divisible by {d}")
        return GroupRingElement(self.p, self.r, tuple(a // d for a in self.coeffs))


def groupring_from_eta_powers(terms: Iterable[tuple[int, int]], p: int, r: int) -> GroupRingElement:
    m = p ** r
    out = [0] * m
    for s, c in terms:
        out[s % m] += c
    return GroupRingElement(p, r, tuple(out))


def groupring_multiply(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    return a * b


def groupring_to_mu(a: GroupRingElement, cap: int) -> TruncatedIntPoly:
    """Expand eta^s = (1+mu)^s; the augmentation lands in the constant field."""
    coeffs = [0] * cap
    for s, c in enumerate(a.coeffs):
        if c:
            for j in range(1, min(s, cap) + 1):
                coeffs[j - 1] += c * comb(s, j)
    return TruncatedIntPoly(COMPLEX, cap, tuple(coeffs), a.augmentation)
