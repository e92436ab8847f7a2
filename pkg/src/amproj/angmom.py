"""Angular-momentum special functions on doubled-integer labels.

Half-integer quantum numbers are carried as doubled integers (two_j, two_m)
so label arithmetic is exact.  The rotation convention is
R(beta) = exp(-i beta J_y) with Condon-Shortley phases, which makes every
small-d matrix element real.  Factorial ratios are evaluated with exact
Python integers and converted to float once per term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "InvalidLabel",
    "PoleInC",
    "AngMomLabel",
    "QuadratureRule",
    "wigner_small_d",
    "rotation_matrix",
    "ladder_apply",
    "clebsch_gordan",
    "jacobi_polynomial",
    "hypergeom_2f1_terminating",
    "gauss_legendre",
]


class InvalidLabel(ValueError):
    """two_j/two_m fail the parity or range constraints."""


class PoleInC(ValueError):
    """The lower Pochhammer (c)_k vanished before the series terminated."""


def check_label(two_j: int, two_m: int) -> None:
    if two_j < 0:
        raise InvalidLabel(f"two_j = {two_j} must be non-negative")
    if (two_j + two_m) % 2 != 0:
        raise InvalidLabel(f"two_j = {two_j} and two_m = {two_m} differ in parity")
    if abs(two_m) > two_j:
        raise InvalidLabel(f"|two_m| = {abs(two_m)} exceeds two_j = {two_j}")


@dataclass(frozen=True)
class AngMomLabel:
    """A |j m> label with j, m stored doubled."""

    two_j: int
    two_m: int

    def __post_init__(self):
        check_label(self.two_j, self.two_m)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes on (0, pi); weights sum to pi.

    The sin(beta) measure of the rotational integrals is NOT folded into the
    weights; callers apply it explicitly.
    """

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def npoints(self) -> int:
        return len(self.nodes)


def wigner_small_d(two_j: int, two_mp: int, two_m: int, beta: float) -> float:
    """d^j_{m'm}(beta) = <j m'| exp(-i beta J_y) |j m>, real.

    Explicit factorial sum; term coefficients are exact integer ratios
    rounded once, so the result is accurate to a few ulp for desk-scale j.
    """
    check_label(two_j, two_mp)
    check_label(two_j, two_m)
    jpm = (two_j + two_m) // 2
    jmm = (two_j - two_m) // 2
    jpmp = (two_j + two_mp) // 2
    jmmp = (two_j - two_mp) // 2
    dm = (two_mp - two_m) // 2  # m' - m
    num = (math.factorial(jpm) * math.factorial(jmm)
           * math.factorial(jpmp) * math.factorial(jmmp))
    cb = math.cos(0.5 * beta)
    sb = math.sin(0.5 * beta)
    total = 0.0
    for k in range(max(0, -dm), min(jpm, jmmp) + 1):
        den = (math.factorial(k) * math.factorial(jpm - k)
               * math.factorial(jmmp - k) * math.factorial(dm + k))
        coeff = math.sqrt(float(Fraction(num, den * den)))
        if (dm + k) % 2:
            coeff = -coeff
        total += coeff * cb ** (two_j - dm - 2 * k) * sb ** (dm + 2 * k)
    return total


def rotation_matrix(labels, beta: float, shells=None) -> np.ndarray:
    """Matrix of exp(-i beta J_y) over a list of AngMomLabel orbitals.

    J_y is block-diagonal in shells: entry (i, j) is a small-d element when
    the two orbitals share a shell tag and a j value, else exactly 0.  With
    shells omitted, orbitals are grouped by j alone.
    """
    labels = list(labels)
    if not labels:
        raise InvalidLabel("orbital list must be non-empty")
    if shells is None:
        shells = [None] * len(labels)
    shells = list(shells)
    if len(shells) != len(labels):
        raise InvalidLabel("shells list must match the orbital list")
    n = len(labels)
    out = np.zeros((n, n))
    for i, (li, si) in enumerate(zip(labels, shells)):
        for j, (lj, sj) in enumerate(zip(labels, shells)):
            if si == sj and li.two_j == lj.two_j:
                out[i, j] = wigner_small_d(li.two_j, li.two_m, lj.two_m, beta)
    return out


def ladder_apply(direction: str, state: AngMomLabel) -> tuple[float, AngMomLabel | None]:
    """Apply J_+ or J_- to |j m>.

    Returns (coefficient, new label); the label is None and the coefficient
    0 when the state is annihilated (m = +j under J_+, m = -j under J_-).
    """
    if direction not in ("+", "-"):
        raise ValueError(f"direction must be '+' or '-', got {direction!r}")
    two_j, two_m = state.two_j, state.two_m
    if direction == "+":
        if two_m == two_j:
            return 0.0, None
        # (j - m)(j + m + 1)
        coeff = ((two_j - two_m) // 2) * ((two_j + two_m) // 2 + 1)
        return math.sqrt(coeff), AngMomLabel(two_j, two_m + 2)
    if two_m == -two_j:
        return 0.0, None
    coeff = ((two_j + two_m) // 2) * ((two_j - two_m) // 2 + 1)
    return math.sqrt(coeff), AngMomLabel(two_j, two_m - 2)


def clebsch_gordan(two_j1: int, two_m1: int, two_j2: int, two_m2: int,
                   two_j: int, two_m: int) -> float:
    """Condon-Shortley Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M>.

    Racah's closed-form sum over exact integers.  Returns 0 for M != m1+m2
    or a violated triangle condition.
    """
    check_label(two_j1, two_m1)
    check_label(two_j2, two_m2)
    check_label(two_j, two_m)
    if two_m1 + two_m2 != two_m:
        return 0.0
    if not abs(two_j1 - two_j2) <= two_j <= two_j1 + two_j2:
        return 0.0
    if (two_j1 + two_j2 - two_j) % 2 != 0:
        return 0.0
    f = math.factorial
    a = (two_j1 + two_j2 - two_j) // 2
    b = (two_j1 - two_j2 + two_j) // 2
    c = (-two_j1 + two_j2 + two_j) // 2
    pref = Fraction(
        (two_j + 1) * f(a) * f(b) * f(c)
        * f((two_j + two_m) // 2) * f((two_j - two_m) // 2)
        * f((two_j1 - two_m1) // 2) * f((two_j1 + two_m1) // 2)
        * f((two_j2 - two_m2) // 2) * f((two_j2 + two_m2) // 2),
        f((two_j1 + two_j2 + two_j) // 2 + 1),
    )
    t1 = (two_j - two_j2 + two_m1) // 2
    t2 = (two_j - two_j1 - two_m2) // 2
    k_lo = max(0, -t1, -t2)
    k_hi = min(a, (two_j1 - two_m1) // 2, (two_j2 + two_m2) // 2)
    total = Fraction(0)
    for k in range(k_lo, k_hi + 1):
        den = (f(k) * f(a - k) * f((two_j1 - two_m1) // 2 - k)
               * f((two_j2 + two_m2) // 2 - k) * f(t1 + k) * f(t2 + k))
        total += Fraction(-1 if k % 2 else 1, den)
    if total == 0:
        return 0.0
    mag = math.sqrt(float(pref * total * total))
    return mag if total > 0 else -mag


def jacobi_polynomial(n: int, alpha, beta_param, x):
    """P_n^{(alpha, beta)}(x) via the three-term recurrence.

    Works over floats or exact rationals: with Fraction arguments the whole
    recurrence stays exact.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n == 0:
        return x * 0 + 1
    p_prev = x * 0 + 1
    ab = alpha + beta_param
    p_curr = (alpha + 1) + (ab + 2) * (x - 1) / 2
    for m in range(2, n + 1):
        c1 = 2 * m * (m + ab) * (2 * m + ab - 2)
        c2 = (2 * m + ab - 1) * ((2 * m + ab) * (2 * m + ab - 2) * x
                                 + alpha * alpha - beta_param * beta_param)
        c3 = 2 * (m + alpha - 1) * (m + beta_param - 1) * (2 * m + ab)
        p_curr, p_prev = (c2 * p_curr - c3 * p_prev) / c1, p_curr
    return p_curr


def hypergeom_2f1_terminating(a, b, c, z):
    """2F1(a, b; c; z) for non-positive integer a (a terminating series).

    The sum runs to k = -a; arithmetic stays exact (Fraction) whenever b, c
    and z are exact, which is how the z = 1 annihilation identities evaluate
    to literal zero.  Raises PoleInC when c + k hits zero inside the sum.
    """
    if a > 0 or int(a) != a:
        raise ValueError(f"first parameter must be a non-positive integer, got {a!r}")
    nterms = -int(a)
    exact = not any(isinstance(v, float) for v in (b, c, z))
    total = term = Fraction(1) if exact else 1.0
    for k in range(nterms):
        if c + k == 0:
            raise PoleInC(f"(c)_k vanished at k = {k + 1} with c = {c}")
        term = term * (a + k) * (b + k) * z / ((c + k) * (k + 1))
        total = total + term
    return total


def _legendre_pair(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P_n(x), P_n'(x)) by upward recurrence, for interior points only."""
    p_prev = np.ones_like(x)
    p_curr = x.copy()
    for k in range(2, n + 1):
        p_prev, p_curr = p_curr, ((2 * k - 1) * x * p_curr - (k - 1) * p_prev) / k
    if n == 1:
        return p_curr, np.ones_like(x)
    dp = n * (x * p_curr - p_prev) / (x * x - 1.0)
    return p_curr, dp


def gauss_legendre(npoints: int) -> QuadratureRule:
    """Gauss-Legendre rule mapped from [-1, 1] onto [0, pi].

    Nodes are Newton-refined Legendre roots (to 1e-15); weights exclude the
    sin(beta) factor and sum to pi.
    """
    if npoints < 1:
        raise ValueError("need at least one quadrature point")
    i = np.arange(npoints)
    x = np.cos(np.pi * (4 * i + 3) / (4 * npoints + 2))
    for _ in range(100):
        p, dp = _legendre_pair(npoints, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    _, dp = _legendre_pair(npoints, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    return QuadratureRule(nodes=(x + 1.0) * (np.pi / 2), weights=w * (np.pi / 2))
