"""Airy functions and the classical Airy zeros.

Real and complex values come from the AMOS/Cephes routines in
``scipy.special``; the zeros are located here, seeded by the WKB
approximation and polished with a bracketed Newton iteration.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import special as _sp

__all__ = [
    "AIRY_AI_0",
    "AIRY_AIP_0",
    "UNDERFLOW_X",
    "COMPLEX_RADIUS",
    "AiryDomainError",
    "AiryRangeError",
    "RootFindingError",
    "AiryPair",
    "ZeroKind",
    "ClassicalZero",
    "airy_ai",
    "airy_ai_prime",
    "airy_pair",
    "airy_scaled",
    "airy_ai_complex",
    "wkb_zero",
    "classical_zero",
    "classical_zeros",
    "bracketed_newton",
]

# Ai(0) = 3^(-2/3)/Gamma(2/3), Ai'(0) = -3^(-1/3)/Gamma(1/3)
AIRY_AI_0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIRY_AIP_0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)

# Above this argument Ai is reported as 0 with the underflow flag set.
UNDERFLOW_X = 20.0
# Largest |z| accepted by airy_ai_complex.
COMPLEX_RADIUS = 8.0


class AiryDomainError(ValueError):
    """Non-finite argument."""


class AiryRangeError(ValueError):
    """Argument outside the supported region."""


class RootFindingError(RuntimeError):
    """Bracketed iteration failed; carries the final bracket."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


@dataclass(frozen=True)
class AiryPair:
    value: complex
    derivative: complex
    underflow: bool = False


class ZeroKind(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class ClassicalZero:
    kind: ZeroKind
    n: int
    value: float


def _check_finite(x):
    if not np.all(np.isfinite(x)):
        raise AiryDomainError(f"Airy argument must be finite, got {x!r}")


def _real_airy(x):
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    ai, aip, _, _ = _sp.airy(x)
    big = x > UNDERFLOW_X
    if np.any(big):
        ai = np.where(big, 0.0, ai)
        aip = np.where(big, 0.0, aip)
    return ai, aip, big


def airy_ai(x):
    """Ai(x) for real scalar or array ``x`` (0 above ``UNDERFLOW_X``)."""
    ai, _, _ = _real_airy(x)
    return ai if np.ndim(ai) else float(ai)


def airy_ai_prime(x):
    """Ai'(x) for real scalar or array ``x`` (0 above ``UNDERFLOW_X``)."""
    _, aip, _ = _real_airy(x)
    return aip if np.ndim(aip) else float(aip)


def airy_pair(x):
    ai, aip, big = _real_airy(x)
    return AiryPair(float(ai), float(aip), bool(big))


def airy_scaled(x):
    """Return ``(Ai(x) e^s, Ai'(x) e^s)`` with ``s = 2/3 max(x, 0)^{3/2}``.

    The scaled pair is finite for every real ``x`` and is what the root
    finder and the boundary-state normalisation work with.
    """
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    pos = x > 0
    ai, aip, _, _ = _sp.airy(np.where(pos, 0.0, x))
    eai, eaip, _, _ = _sp.airye(np.where(pos, x, 0.0))
    sa = np.where(pos, eai, ai)
    sap = np.where(pos, eaip, aip)
    if sa.ndim == 0:
        return float(sa), float(sap)
    return sa, sap


def airy_ai_complex(z):
    """Ai and Ai' at a complex point inside the disc ``|z| <= COMPLEX_RADIUS``."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise AiryDomainError(f"Airy argument must be finite, got {z!r}")
    if abs(z) > COMPLEX_RADIUS:
        raise AiryRangeError(
            f"|z| = {abs(z):.6g} exceeds the supported radius {COMPLEX_RADIUS}"
        )
    ai, aip, _, _ = _sp.airy(z)
    return AiryPair(complex(ai), complex(aip))


def wkb_zero(kind, n):
    kind = ZeroKind(kind)
    shift = 0.25 if kind is ZeroKind.DIRICHLET else 0.75
    return -((1.5 * math.pi * (n - shift)) ** (2.0 / 3.0))


def bracketed_newton(fdf, lo, hi, x0=None, xtol=4e-16, maxiter=200):
    """Newton iteration safeguarded by bisection on a sign-changing bracket.

    ``fdf(x)`` returns ``(f(x), f'(x))``. Convergence is declared when the
    Newton step or the bracket width drops below ``xtol`` relative to
    ``max(1, |x|)``.
    """
    flo, _ = fdf(lo)
    fhi, _ = fdf(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RootFindingError(f"no sign change on [{lo}, {hi}]", (lo, hi))
    x = 0.5 * (lo + hi) if x0 is None or not lo < x0 < hi else x0
    for _ in range(maxiter):
        fx, dfx = fdf(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi = x
        tol = xtol * max(1.0, abs(x))
        step = fx / dfx if dfx != 0.0 else math.inf
        xn = x - step
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
            if hi - lo <= tol:
                return xn
        elif abs(step) <= tol:
            return xn
        x = xn
    raise RootFindingError(f"no convergence after {maxiter} iterations", (lo, hi))


def _zero_fdf(kind):
    if kind is ZeroKind.DIRICHLET:
        def fdf(x):
            ai, aip, _, _ = _sp.airy(x)
            return float(ai), float(aip)
    else:
        def fdf(x):
            ai, aip, _, _ = _sp.airy(x)
            return float(aip), float(x * ai)
    return fdf


@lru_cache(maxsize=None)
def _zero_value(kind, n):
    seed = wkb_zero(kind, n)
    fdf = _zero_fdf(kind)
    half = 0.4 * math.pi / math.sqrt(abs(seed))
    for _ in range(6):
        lo, hi = seed - half, seed + half
        if (fdf(lo)[0] > 0) != (fdf(hi)[0] > 0):
            return bracketed_newton(fdf, lo, hi, x0=seed)
        half *= 1.25
    raise RootFindingError(f"could not bracket {kind.value} zero {n}", (lo, hi))


def classical_zero(kind, n):
    """n-th zero of Ai (Dirichlet) or Ai' (Neumann), negative convention."""
    kind = ZeroKind(kind)
    n = int(n)
    if not 1 <= n <= 10000:
        raise ValueError(f"zero index must be in [1, 10000], got {n}")
    return ClassicalZero(kind, n, _zero_value(kind, n))


def classical_zeros(kind, n_max):
    """Array of the first ``n_max`` zeros."""
    kind = ZeroKind(kind)
    return np.array([classical_zero(kind, n).value for n in range(1, n_max + 1)])
