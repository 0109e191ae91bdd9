"""Real roots of low-degree real polynomials on a bounded interval.

Roots are located from the eigenvalues of the companion matrix and then
polished with damped Newton iteration (bisection when a sign change
brackets the root).  Every accepted root is checked against a residual
threshold, so spurious eigenvalue noise never leaks into the game solvers.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import lapack

from .errors import DegenerateInput, NoConvergence

log = logging.getLogger(__name__)

MAX_DEGREE = 6


@dataclass(frozen=True)
class Tolerances:
    """All root-finding tolerances in one place.

    residual_rel: |p(r)| <= residual_rel * sum |c_i| |r|^i
    dedup_abs: roots closer than this are merged
    imag_rel: eigenvalues with |Im| <= imag_rel * max(1, |z|) are real
    tangency_rel: looser |Im| cut for candidates that may be double roots
    """

    residual_rel: float = 1e-10
    dedup_abs: float = 1e-8
    imag_rel: float = 1e-8
    tangency_rel: float = 1e-4
    max_iter: int = 100


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class RealPolynomial:
    """Polynomial c0 + c1 x + ... + cn x^n with real coefficients, n <= 6."""

    coefficients: tuple[float, ...]

    def __init__(self, coefficients: Sequence[float]):
        coeffs = [float(c) for c in coefficients]
        if not all(math.isfinite(c) for c in coeffs):
            raise DegenerateInput(f"non-finite coefficient in {coeffs}")
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs.pop()
        if not coeffs:
            coeffs = [0.0]
        if len(coeffs) - 1 > MAX_DEGREE:
            raise DegenerateInput(f"degree {len(coeffs) - 1} exceeds {MAX_DEGREE}")
        object.__setattr__(self, "coefficients", tuple(coeffs))
        object.__setattr__(self, "_scale", max(1.0, max(abs(c) for c in coeffs)))

    @classmethod
    def from_descending(cls, coefficients: Sequence[float]) -> "RealPolynomial":
        return cls(list(coefficients)[::-1])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def scale(self) -> float:
        return self._scale

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def value_and_derivative(self, x: float) -> tuple[float, float]:
        p = 0.0
        dp = 0.0
        for c in reversed(self.coefficients):
            dp = dp * x + p
            p = p * x + c
        return p, dp

    def derivative(self) -> "RealPolynomial":
        if self.degree == 0:
            return RealPolynomial([0.0])
        return RealPolynomial([k * c for k, c in enumerate(self.coefficients)][1:])

    def scaled(self, s: float) -> "RealPolynomial":
        return RealPolynomial([s * c for c in self.coefficients])

    def threshold(self, x: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
        """Residual acceptance threshold at ``x``."""
        # the floor keeps subnormal residuals from being demanded exactly
        return tol.residual_rel * self.magnitude(x) + 1e-300

    def magnitude(self, x: float) -> float:
        """sum |c_i| |x|^i, the scale of rounding error in evaluating p(x)."""
        acc = 0.0
        ax = abs(x)
        for c in reversed(self.coefficients):
            acc = acc * ax + abs(c)
        return acc


@dataclass(frozen=True)
class RootSet:
    roots: tuple[float, ...]
    residuals: tuple[float, ...]
    multiplicities: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _bisect(p: RealPolynomial, a: float, b: float, fa: float, max_iter: int = 1100) -> float:
    # enough halvings to reach adjacent floats from any finite bracket
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = p(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def polish_root(p: RealPolynomial, guess: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Refine ``guess`` to a root of ``p``.

    Damped Newton is run until the step stalls at floating-point resolution.
    If the residual is still above threshold, a sign change near the final
    iterate is bracketed and bisected.  Repeated roots converge linearly under
    Newton and need no bracket.
    """
    if not math.isfinite(guess):
        raise DegenerateInput(f"non-finite guess {guess!r}")
    if p.degree < 1:
        raise DegenerateInput("constant polynomial has no isolated roots")
    x = guess
    f, df = p.value_and_derivative(x)
    if abs(f) <= 1e-3 * p.threshold(x, tol):
        return _refine_multiple(p, x, tol)
    for _ in range(tol.max_iter):
        if f == 0.0 or df == 0.0:
            break
        step = f / df
        lam = 1.0
        while True:
            xn = x - lam * step
            fn, dfn = p.value_and_derivative(xn)
            if abs(fn) < abs(f) or lam < 1e-6:
                break
            lam *= 0.5
        if abs(fn) >= abs(f):
            break
        x, f, df = xn, fn, dfn
        if abs(lam * step) <= 4.0 * np.finfo(float).eps * max(1.0, abs(x)):
            break
    if abs(f) <= p.threshold(x, tol):
        if abs(x - guess) > 1e-3 * max(1.0, abs(guess)):
            # Newton left the neighbourhood of the estimate; prefer a root bracketed there
            near = _bracket_root(p, guess, p(guess), tol, tries=10)
            if near is not None:
                return near
        return _refine_multiple(p, x, tol)
    r = _bracket_root(p, x, f, tol)
    if r is None:
        raise NoConvergence(f"root near {guess!r} did not reach residual threshold (|p|={abs(f):.3e})")
    return r


def _bracket_root(p: RealPolynomial, x: float, f: float, tol: Tolerances, tries: int = 30) -> float | None:
    """Bisect a sign change found by widening brackets around ``x``."""
    width = 1e-6 * max(1.0, abs(x))
    for _ in range(tries):
        a, b = x - width, x + width
        fa, fb = p(a), p(b)
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        # try the half brackets first: roots symmetric about x leave fa and fb alike
        for lo, hi, flo, fhi in ((a, x, fa, f), (x, b, f, fb), (a, b, fa, fb)):
            if (flo < 0.0) != (fhi < 0.0):
                r = _bisect(p, lo, hi, flo)
                if abs(p(r)) <= p.threshold(r, tol):
                    return r
                return None
        width *= 2.0
    return None


def _refine_multiple(p: RealPolynomial, x: float, tol: Tolerances) -> float:
    """Sharpen a near-multiple root by Newton iteration on p'.

    Residual-based acceptance pins a double root only to about sqrt(eps);
    the derivative has a simple root there and converges quadratically.
    """
    if not _is_tangency(p, x, tol):
        return x
    q = p.derivative()
    y = x
    for _ in range(tol.max_iter):
        g, dg = q.value_and_derivative(y)
        if g == 0.0 or dg == 0.0:
            break
        yn = y - g / dg
        if abs(yn - y) <= 4.0 * np.finfo(float).eps * max(1.0, abs(y)):
            y = yn
            break
        y = yn
    if abs(y - x) <= math.sqrt(tol.dedup_abs) * max(1.0, abs(x)) and abs(p(y)) <= p.threshold(y, tol):
        return y
    return x


def _companion_eigenvalues(c: Sequence[float]) -> list[complex]:
    n = len(c) - 1
    # companion matrix of the monic polynomial
    M = np.zeros((n, n))
    M[0, :] = np.asarray(c[-2::-1]) / -c[n]
    if n > 1:
        M[np.arange(1, n), np.arange(n - 1)] = 1.0
    wr, wi, _, _, info = lapack.dgeev(M, compute_vl=0, compute_vr=0)
    if info != 0:
        raise NoConvergence(f"eigenvalue iteration failed (info={info})")
    return [complex(a, b) for a, b in zip(wr.tolist(), wi.tolist())]


def _negligible_lead(c: Sequence[float], k: int, reach: float, tol: Tolerances) -> bool:
    # leading term small against the others everywhere on |x| <= reach
    return abs(c[k]) * reach**k <= tol.residual_rel * max(abs(v) * reach**j for j, v in enumerate(c[:k]))


def _eigen_candidates(p: RealPolynomial, tol: Tolerances, reach: float = 1.0) -> list[tuple[complex, bool]]:
    """Eigenvalue root estimates, flagged True when they count towards multiplicity.

    A negligible leading coefficient sends roots towards infinity and swamps
    the companion matrix.  The truncated polynomial then supplies the counted
    estimates and the finite eigenvalues of the full one are kept as extra
    starting points only.
    """
    c = p.coefficients
    k = p.degree
    while k > 1 and _negligible_lead(c, k, reach, tol):
        k -= 1
    if k == p.degree:
        return [(z, True) for z in _companion_eigenvalues(c)]
    with np.errstate(all="ignore"):
        extra = [z for z in _companion_eigenvalues(c) if cmath.isfinite(z)]
    return [(z, True) for z in _companion_eigenvalues(c[: k + 1])] + [(z, False) for z in extra]


def real_roots(
    p: RealPolynomial, lo: float, hi: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> RootSet:
    """Every real root of ``p`` in the closed interval ``[lo, hi]``."""
    if not lo < hi:
        raise DegenerateInput(f"empty interval [{lo}, {hi}]")
    if p.degree < 1:
        raise DegenerateInput("constant polynomial")
    slack = tol.dedup_abs
    reach = max(1.0, abs(lo), abs(hi))
    found: list[list[float]] = []  # [root, multiplicity]
    for z, primary in _eigen_candidates(p, tol, reach):
        im = abs(z.imag)
        spectral = max(1.0, abs(z))
        if im > tol.tangency_rel * spectral:
            continue
        real = im <= tol.imag_rel * spectral
        guess = z.real
        if guess < lo - 1e-3 * (hi - lo) - slack or guess > hi + 1e-3 * (hi - lo) + slack:
            continue
        try:
            r = polish_root(p, guess, tol)
        except NoConvergence:
            # no sign change nearby and no small residual: a clustered complex pair, not a root
            log.debug("discarding eigenvalue %r that does not polish to a root", z)
            continue
        if not real and not _is_tangency(p, r, tol):
            continue
        if r < lo - slack or r > hi + slack:
            continue
        r = min(max(r, lo), hi)
        for entry in found:
            if abs(entry[0] - r) <= tol.dedup_abs or _same_tangency(p, entry[0], r, tol):
                entry[1] += primary
                break
        else:
            found.append([r, 1])
    found.sort(key=lambda e: e[0])
    roots = tuple(e[0] for e in found)
    return RootSet(
        roots=roots,
        residuals=tuple(abs(p(r)) for r in roots),
        multiplicities=tuple(int(e[1]) for e in found),
    )


def _is_tangency(p: RealPolynomial, r: float, tol: Tolerances) -> bool:
    # a near-real complex pair is accepted only if p touches zero without crossing
    _, dp = p.value_and_derivative(r)
    return abs(p(r)) <= p.threshold(r, tol) and abs(dp) <= math.sqrt(tol.residual_rel) * p.derivative().magnitude(r)


def _same_tangency(p: RealPolynomial, a: float, b: float, tol: Tolerances) -> bool:
    if abs(a - b) > 1e3 * tol.dedup_abs:
        return False
    m = 0.5 * (a + b)
    fa, fb = p(a), p(b)
    no_cross = (fa == 0.0 or fb == 0.0 or (fa < 0.0) == (fb < 0.0)) and (p(m) == 0.0 or fa * p(m) >= 0.0)
    return no_cross and abs(p(m)) <= p.threshold(m, tol)
