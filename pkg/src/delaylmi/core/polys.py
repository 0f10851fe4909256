"""
Exact discrete orthogonal polynomials.

Polynomials p_{m0}, ..., p_{m,nu} are orthogonal on the support {0, ..., N-1}
under the weight r_{N,m-1}(i) = (m-1)! * C(N-1+m-1-i, m-1). All arithmetic is
done in ``fractions.Fraction`` so coefficients and norms are exact.
"""

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Dict, List, Sequence, Tuple, Union

from ..errors import ArgumentError, DegreeOverflowError, DomainError
from ..models.core import Normalization

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction]


def _as_rational(x: Scalar) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Poly:
    """Polynomial with exact coefficients; coeffs[i] multiplies x**i."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        c = [_as_rational(v) for v in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def constant(cls, value: Scalar) -> "Poly":
        return cls((_as_rational(value),))

    @classmethod
    def monomial(cls, degree: int, coefficient: Scalar = 1) -> "Poly":
        return cls((Fraction(0),) * degree + (_as_rational(coefficient),))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial"""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: Scalar) -> Fraction:
        return eval(self, x)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: Union["Poly", Scalar]) -> "Poly":
        if not isinstance(other, Poly):
            s = _as_rational(other)
            return Poly(tuple(c * s for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return Poly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def scaled(self, s: Scalar) -> "Poly":
        return self * s

    def shifted(self, d: Scalar) -> "Poly":
        """Return q with q(x) = p(x + d)"""
        d = _as_rational(d)
        result = Poly(())
        step = Poly((d, Fraction(1)))
        # Horner in the shifted variable
        for c in reversed(self.coeffs):
            result = result * step + Poly.constant(c)
        return result


def eval(p: Poly, x: Scalar) -> Fraction:  # noqa: A001
    """Exact Horner evaluation"""
    x = _as_rational(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def weight(N: int, m: int, i: int) -> Fraction:
    """r_{N,m}(i) = m! * C(N-1+m-i, m) for i in {0, ..., N-1}"""
    if N < 1:
        raise DomainError(f"horizon N must be positive, got {N}", field="N", value=N)
    if m < 0:
        raise DomainError(f"m must be nonnegative, got {m}", field="m", value=m)
    if not 0 <= i <= N - 1:
        raise DomainError(
            f"weight index {i} outside support 0..{N - 1}", field="i", value=i
        )
    return Fraction(factorial(m) * comb(N - 1 + m - i, m))


def weight_poly(N: int, m: int) -> Poly:
    """r_{N,m} as the polynomial prod_{k<m} (N + k - x); agrees with weight() on the support"""
    if N < 1 or m < 0:
        raise DomainError(f"invalid weight parameters N={N}, m={m}")
    result = Poly.constant(1)
    for k in range(m):
        result = result * Poly((Fraction(N + k), Fraction(-1)))
    return result


def _mul_values(a, b):
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        if len(a) != len(b):
            raise ArgumentError("vector values have mismatched lengths")
        return [x * y for x, y in zip(a, b)]
    if isinstance(a, (list, tuple)):
        return [x * b for x in a]
    if isinstance(b, (list, tuple)):
        return [a * y for y in b]
    return a * b


def _add_values(acc, v):
    if acc is None:
        return v
    if isinstance(acc, list):
        return [x + y for x, y in zip(acc, v)]
    return acc + v


def inner_product(
    f: Callable[[int], object], g: Callable[[int], object], N: int, m: int
):
    """<f, g>_m = sum_{i<N} r_{N,m-1}(i) f(i) g(i), componentwise for vector values.

    Divide by (m-1)! to obtain the normalized product used by the
    nested-sum functional.
    """
    if m < 1:
        raise DomainError(f"multiplicity m must be positive, got {m}", field="m", value=m)
    acc = None
    for i in range(N):
        acc = _add_values(acc, _mul_values(weight(N, m - 1, i), _mul_values(f(i), g(i))))
    return acc if acc is not None else Fraction(0)


@dataclass(frozen=True)
class OrthoBasis:
    """p_{m0..m,nu} with their norm-squares under <.,.>_m"""

    N: int
    m: int
    nu: int
    polys: Tuple[Poly, ...]
    norm_sq: Tuple[Fraction, ...]
    normalization: Normalization

    def chi(self, j: int) -> Fraction:
        return 1 / self.norm_sq[j]

    def rescaled(self, scales: Sequence[Scalar]) -> "OrthoBasis":
        """Multiply p_{mj} by scales[j]; norm-squares scale by the square"""
        if len(scales) != len(self.polys):
            raise ArgumentError("one scale per polynomial required")
        factors = [_as_rational(s) for s in scales]
        if any(s == 0 for s in factors):
            raise ArgumentError("scales must be nonzero")
        return OrthoBasis(
            self.N,
            self.m,
            self.nu,
            tuple(p * s for p, s in zip(self.polys, factors)),
            tuple(n * s * s for n, s in zip(self.norm_sq, factors)),
            self.normalization,
        )


_BASIS_CACHE: Dict[Tuple[int, int, int, Normalization], OrthoBasis] = {}
_BASIS_LOCK = threading.Lock()


def clear_basis_cache() -> None:
    with _BASIS_LOCK:
        _BASIS_CACHE.clear()


def _gram_schmidt(
    N: int, m: int, nu: int, normalization: Normalization
) -> OrthoBasis:
    w = [weight(N, m - 1, i) for i in range(N)]

    def dot(u: List[Fraction], v: List[Fraction]) -> Fraction:
        return sum((a * b * c for a, b, c in zip(w, u, v)), Fraction(0))

    polys: List[Poly] = []
    values: List[List[Fraction]] = []
    norms: List[Fraction] = []
    for j in range(nu + 1):
        mono = [Fraction(i**j) for i in range(N)]
        p = Poly.monomial(j)
        vals = list(mono)
        for pk, vk, nk in zip(polys, values, norms):
            c = dot(mono, vk) / nk
            p = p - pk * c
            vals = [a - c * b for a, b in zip(vals, vk)]
        polys.append(p)
        values.append(vals)
        norms.append(dot(vals, vals))

    if normalization is Normalization.SIGN_AT_MINUS_ONE:
        for j, p in enumerate(polys):
            at = p(-1)
            if at == 0:
                raise ArgumentError(f"p_{m}{j} vanishes at -1; cannot normalize")
            s = Fraction((-1) ** j) / at
            polys[j] = p * s
            norms[j] = norms[j] * s * s

    return OrthoBasis(N, m, nu, tuple(polys), tuple(norms), normalization)


def build_basis(
    N: int,
    m: int,
    nu: int,
    normalization: Normalization = Normalization.SIGN_AT_MINUS_ONE,
) -> OrthoBasis:
    """Orthogonal polynomials of degree 0..nu for <.,.>_m on {0..N-1}.

    Gram-Schmidt over the monomials, then rescaled per ``normalization``.
    Results are memoized per (N, m, nu, normalization).
    """
    if N < 1:
        raise DomainError(f"horizon N must be positive, got {N}", field="N", value=N)
    if m < 1:
        raise DomainError(f"multiplicity m must be positive, got {m}", field="m", value=m)
    if nu < 0:
        raise DomainError(f"degree must be nonnegative, got {nu}", field="nu", value=nu)
    if nu >= N:
        raise DegreeOverflowError(
            f"degree {nu} needs more than N={N} support points", field="nu", value=nu
        )

    key = (N, m, nu, normalization)
    with _BASIS_LOCK:
        cached = _BASIS_CACHE.get(key)
    if cached is not None:
        logger.debug(f"Basis cache hit for N={N}, m={m}, nu={nu}")
        return cached

    basis = _gram_schmidt(N, m, nu, normalization)
    with _BASIS_LOCK:
        basis = _BASIS_CACHE.setdefault(key, basis)
    logger.debug(f"Built basis N={N}, m={m}, nu={nu}, {normalization.value}")
    return basis


def expand_in_basis(q: Poly, basis: OrthoBasis, length: int = 0) -> List[Fraction]:
    """Exact coefficients a with q = sum_l a[l] * basis.polys[l].

    Solved top-down on the triangular degree structure. The result is
    zero-padded to ``length``.
    """
    if q.degree > basis.nu:
        raise ArgumentError(
            f"degree {q.degree} exceeds basis degree {basis.nu}", field="q"
        )
    size = max(length, q.degree + 1)
    out = [Fraction(0)] * size
    rest = q
    for d in range(q.degree, -1, -1):
        c = (rest.coeffs[d] if d < len(rest.coeffs) else Fraction(0)) / basis.polys[
            d
        ].leading
        if c != 0:
            out[d] = c
            rest = rest - basis.polys[d] * c
    if not rest.is_zero():
        raise ArgumentError("expansion left a nonzero remainder")
    return out
