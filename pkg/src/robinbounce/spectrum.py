"""Bound states of the linear potential on the half-line with a Robin wall.

The wall condition is ``psi(0) = lam * psi'(0)`` in the dimensionless
coordinate ``xi = x / x0``. Eigenvalues ``zeta_n(lam)`` are the roots of
``Ai(x) - lam Ai'(x)`` (negative sign convention, ``E_n = -E0 zeta_n``).

Level bookkeeping: ``n = 1, 2, ...`` always labels the branch that starts
at the n-th Airy zero when ``lam = 0``. For ``lam < 0`` there is one extra
state below that tower, returned with ``n = 0``; it has negative energy
(``zeta > 0``) while ``-1/0.729... < lam < 0``.
"""

import cmath
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .special import (
    AIRY_AI_0,
    AIRY_AIP_0,
    COMPLEX_RADIUS,
    RootFindingError,
    ZeroKind,
    airy_ai_complex,
    airy_scaled,
    bracketed_newton,
    classical_zero,
)

__all__ = [
    "BoundaryLimit",
    "NEUMANN",
    "EigenState",
    "PhaseParams",
    "PoleError",
    "as_param",
    "is_neumann",
    "eigenstate",
    "solve_roots",
    "root_residual",
    "eigenfunction_value",
    "eigenfunction_derivative",
    "approx_energy_dirichlet_regime",
    "approx_energy_neumann_regime",
    "transition_gap",
    "lambda_from_phase",
    "phase_residual",
    "NEGATIVE_ENERGY_LAMBDA",
]


class BoundaryLimit(Enum):
    NEUMANN = "neumann"


NEUMANN = BoundaryLimit.NEUMANN

# Boundary state has zeta > 0 exactly for NEGATIVE_ENERGY_LAMBDA < lam < 0.
NEGATIVE_ENERGY_LAMBDA = AIRY_AI_0 / AIRY_AIP_0


class PoleError(ZeroDivisionError):
    pass


def as_param(lam):
    """Normalise a user-supplied lambda (float, ``inf``, 'neumann')."""
    if lam is NEUMANN:
        return NEUMANN
    if isinstance(lam, str):
        if lam.strip().lower() in ("neumann", "inf", "infinity", "+inf"):
            return NEUMANN
        lam = float(lam)
    lam = float(lam)
    if math.isinf(lam):
        return NEUMANN
    if math.isnan(lam):
        raise ValueError("lambda must not be NaN")
    return lam


def is_neumann(lam):
    return lam is NEUMANN


@dataclass(frozen=True)
class EigenState:
    """One bound state in xi-normalisation.

    ``psi0`` and ``dpsi0`` are the signed boundary values psi_n(0) and
    psi_n'(0); ``alpha``/``alpha_prime`` are their magnitudes.
    """

    n: int
    lam: object
    zeta: float
    norm_xi: float
    psi0: float
    dpsi0: float
    negative_energy: bool = False

    @property
    def alpha(self):
        return abs(self.psi0)

    @property
    def alpha_prime(self):
        return abs(self.dpsi0)

    @property
    def energy(self):
        """Dimensionless energy E_n / E0."""
        return -self.zeta


@dataclass(frozen=True)
class PhaseParams:
    theta: float
    eps_eta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 2 * math.pi:
            raise ValueError(f"theta must lie in [0, 2pi], got {self.theta}")
        if not 0.0 < self.eps_eta <= COMPLEX_RADIUS:
            raise ValueError(
                f"eps_eta must lie in (0, {COMPLEX_RADIUS}], got {self.eps_eta}"
            )


def _robin_fdf(lam):
    # Scaled by max(1, |lam|) so the residual is O(1) on both ends of the family.
    scale = max(1.0, abs(lam))

    def fdf(x):
        ai, aip = airy_scaled(x)
        f = ai - lam * aip
        df = aip - lam * x * ai
        if x > 0:
            # derivative of the exp-scaled residual, not of the bare one
            df += math.sqrt(x) * f
        return f / scale, df / scale

    return fdf


def root_residual(lam, zeta):
    """|Ai(zeta) - lam Ai'(zeta)| / max(1, |lam|) (Ai'(zeta) for Neumann)."""
    ai, aip = airy_scaled(zeta)
    if zeta > 0:
        f = math.exp(-2.0 / 3.0 * zeta ** 1.5)
        ai, aip = ai * f, aip * f
    if lam is NEUMANN:
        return abs(aip)
    return abs(ai - lam * aip) / max(1.0, abs(lam))


def _boundary_bracket(lam):
    # n = 0 root for lam < 0 lies in (a'_1, inf); Ai/Ai' -> -1/sqrt(x) there.
    lo = classical_zero(ZeroKind.NEUMANN, 1).value
    fdf = _robin_fdf(lam)
    hi = max(1.0, 2.0 / lam ** 2 + 2.0)
    for _ in range(60):
        if (fdf(hi)[0] > 0) != (fdf(lo)[0] > 0):
            return lo, hi
        hi *= 2.0
    raise RootFindingError(f"no boundary-state bracket for lambda={lam}", (lo, hi))


def _bracket(lam, n):
    if n == 0:
        return _boundary_bracket(lam)
    a_n = classical_zero(ZeroKind.DIRICHLET, n).value
    if lam > 0:
        return a_n, classical_zero(ZeroKind.NEUMANN, n).value
    return classical_zero(ZeroKind.NEUMANN, n + 1).value, a_n


def _normalised(lam, n, zeta):
    ai, aip = airy_scaled(zeta)
    # (Ai'^2 - zeta Ai^2) is the integral of Ai^2 over [zeta, inf); the
    # exp(2/3 zeta^{3/2}) scale cancels in psi0/dpsi0.
    inv = 1.0 / math.sqrt(aip * aip - zeta * ai * ai)
    if zeta > 0:
        try:
            norm = inv * math.exp(2.0 / 3.0 * zeta ** 1.5)
        except OverflowError:
            norm = math.inf
    else:
        norm = inv
    psi0, dpsi0 = ai * inv, aip * inv
    if lam is not NEUMANN and lam > 0 and n >= 1:
        assert (psi0 == 0 or (psi0 > 0) == (n % 2 == 1)), "boundary sign alternation"
    return EigenState(
        n=n,
        lam=lam,
        zeta=zeta,
        norm_xi=norm,
        psi0=psi0,
        dpsi0=dpsi0,
        negative_energy=(n == 0 and zeta > 0),
    )


@lru_cache(maxsize=1 << 16)
def _eigenstate(lam, n):
    if lam is NEUMANN:
        zeta = classical_zero(ZeroKind.NEUMANN, n).value
        st = _normalised(lam, n, zeta)
        return EigenState(n, lam, zeta, st.norm_xi, st.psi0, 0.0)
    if lam == 0.0:
        zeta = classical_zero(ZeroKind.DIRICHLET, n).value
        st = _normalised(lam, n, zeta)
        return EigenState(n, lam, zeta, st.norm_xi, 0.0, st.dpsi0)
    lo, hi = _bracket(lam, n)
    fdf = _robin_fdf(lam)
    try:
        zeta = bracketed_newton(fdf, lo, hi)
    except RootFindingError as err:
        raise RootFindingError(
            f"lambda={lam}, n={n}: {err}", err.bracket
        ) from err
    return _normalised(lam, n, zeta)


def eigenstate(lam, n):
    """Single bound state ``n`` (``n = 0`` only exists for ``lam < 0``)."""
    lam = as_param(lam)
    n = int(n)
    if n < 0 or (n == 0 and (lam is NEUMANN or lam >= 0)):
        raise ValueError(f"no state n={n} for lambda={lam}")
    return _eigenstate(lam, n)


def solve_roots(lam, n_max):
    """States ordered by energy; the ``n = 0`` boundary state leads for lam < 0."""
    lam = as_param(lam)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    first = 0 if (lam is not NEUMANN and lam < 0) else 1
    return [_eigenstate(lam, n) for n in range(first, n_max + 1)]


def eigenfunction_value(state, xi):
    """psi_n(xi) = N_n Ai(xi + zeta_n) in xi-normalisation; xi >= 0."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("xi must be non-negative")
    arg = xi + state.zeta
    ai, _ = airy_scaled(arg)
    out = _rescale(state, arg, ai)
    return out if np.ndim(out) else float(out)


def eigenfunction_derivative(state, xi):
    """d psi_n / d xi."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("xi must be non-negative")
    arg = xi + state.zeta
    _, aip = airy_scaled(arg)
    out = _rescale(state, arg, aip)
    return out if np.ndim(out) else float(out)


def _rescale(state, arg, scaled):
    # airy_scaled carries exp(2/3 arg^{3/2}) for arg > 0; psi0 already folds
    # in the exp(2/3 zeta^{3/2}) of the normalisation.
    ai0, aip0 = airy_scaled(state.zeta)
    inv = 1.0 / math.sqrt(aip0 * aip0 - state.zeta * ai0 * ai0)
    z0 = 2.0 / 3.0 * max(state.zeta, 0.0) ** 1.5
    expo = z0 - 2.0 / 3.0 * np.maximum(arg, 0.0) ** 1.5
    return inv * scaled * np.exp(expo)


def approx_energy_dirichlet_regime(lam, n, fourth_order=False):
    """Small-lambda root estimate a_n (1 + lam^3/3) + lam [+ lam^4/4]."""
    if not 0.0 < lam <= 0.3:
        warnings.warn(
            f"lambda={lam} is outside the Dirichlet-regime window (0, 0.3]",
            stacklevel=2,
        )
    a_n = classical_zero(ZeroKind.DIRICHLET, n).value
    est = a_n * (1.0 + lam ** 3 / 3.0) + lam
    if fourth_order:
        est += lam ** 4 / 4.0
    return est


def approx_energy_neumann_regime(lam, n):
    """Large-lambda root estimate through third order in 1/lam."""
    if lam < 5.0:
        warnings.warn(
            f"lambda={lam} is below the Neumann-regime window (lam >= 5)",
            stacklevel=2,
        )
    ap = classical_zero(ZeroKind.NEUMANN, n).value
    k = 1.0 / lam
    return (
        ap
        + k / ap
        - k ** 2 / (2.0 * ap ** 3)
        + k ** 3 * (2.0 * ap ** 3 + 3.0) / (6.0 * ap ** 5)
    )


def transition_gap(lam, n, k):
    """zeta_n - zeta_k = (E_k - E_n)/E0."""
    if n == k:
        raise ValueError("transition needs two distinct levels")
    return eigenstate(lam, n).zeta - eigenstate(lam, k).zeta


def _phase_ratio(theta, eps_eta):
    p = airy_ai_complex(1j * eps_eta)
    m = airy_ai_complex(-1j * eps_eta)
    w = cmath.exp(-1j * theta)
    den = p.value + w * m.value
    num = p.derivative + w * m.derivative
    return num, den


def phase_residual(theta, eps_eta):
    """Relative imaginary part of the U(1) boundary ratio."""
    num, den = _phase_ratio(theta, eps_eta)
    if abs(den) < 1e-12:
        raise PoleError(f"boundary ratio has a pole at theta={theta}, eps={eps_eta}")
    r = num / den
    return abs(r.imag) / max(1.0, abs(r.real))


def lambda_from_phase(theta, eps_eta):
    """Real boundary ratio for the extension with phase ``theta``.

    Returns Re[(Ai'(i e) + e^{-i theta} Ai'(-i e)) / (Ai(i e) + e^{-i theta} Ai(-i e))]
    and checks that the imaginary part vanishes to 1e-10 (relative).
    """
    params = PhaseParams(theta, eps_eta)
    num, den = _phase_ratio(params.theta, params.eps_eta)
    if abs(den) < 1e-12:
        raise PoleError(
            f"boundary ratio has a pole at theta={theta}, eps={eps_eta}"
        )
    r = num / den
    resid = abs(r.imag) / max(1.0, abs(r.real))
    if resid >= 1e-10:
        raise ArithmeticError(f"boundary ratio not real: residual {resid:.3e}")
    return r.real
