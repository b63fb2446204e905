"""Neutron gravitational states: physical scales, frequencies and fits.

Everything here sits on top of the dimensionless spectrum. Energies are
E_n = -E0 zeta_n with E0 = F0 x0, F0 = m g and x0 = (hbar^2 / 2 m F0)^{1/3}.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .spectrum import as_param, eigenstate

__all__ = [
    "G_ILL",
    "Constants",
    "PhysicalScales",
    "scales_from",
    "transition_frequency",
    "Measurement",
    "FitResult",
    "FitFailure",
    "chi_squared",
    "fit_lambda",
    "EnergyRow",
    "energies_table",
    "table_one",
    "extract_g",
    "PenetrationResult",
    "penetration",
]

# local gravitational acceleration at the ILL reactor
G_ILL = 9.804925


@dataclass(frozen=True)
class Constants:
    """CODATA 2018 values; override any of them to emulate other conventions."""

    mass: float = 1.67492749804e-27  # neutron, kg
    hbar: float = 1.054571817e-34
    h: float = 6.62607015e-34
    eV: float = 1.602176634e-19


@dataclass(frozen=True)
class PhysicalScales:
    mass: float
    g: float
    constants: Constants = field(default_factory=Constants)

    def __post_init__(self):
        if not (self.mass > 0 and self.g > 0):
            raise ValueError("mass and g must be positive")

    # derived quantities are properties so they never go stale
    @property
    def hbar(self):
        return self.constants.hbar

    @property
    def h(self):
        return self.constants.h

    @property
    def F0(self):
        return self.mass * self.g

    @property
    def x0(self):
        return (self.hbar ** 2 / (2.0 * self.mass * self.F0)) ** (1.0 / 3.0)

    @property
    def E0(self):
        return self.F0 * self.x0

    @property
    def E0_peV(self):
        return self.E0 / self.constants.eV * 1e12

    def with_g(self, g):
        return replace(self, g=g)


def scales_from(mass=None, g=G_ILL, constants=None):
    constants = constants or Constants()
    return PhysicalScales(constants.mass if mass is None else mass, g, constants)


def transition_frequency(scales, lam, n, k):
    """nu_{n,k} = E0 (zeta_n - zeta_k) / h in Hz."""
    if not n < k:
        raise ValueError(f"need n < k, got ({n}, {k})")
    gap = eigenstate(lam, n).zeta - eigenstate(lam, k).zeta
    return scales.E0 * gap / scales.h


@dataclass(frozen=True)
class Measurement:
    nu: float  # Hz
    sigma: float  # Hz
    transition: tuple = (1, 6)

    def __post_init__(self):
        n, k = self.transition
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not n < k:
            raise ValueError(f"transition needs n < k, got {self.transition}")


@dataclass(frozen=True)
class FitResult:
    lambda_min: float
    delta_lambda: float
    delta_minus: float
    delta_plus: float
    chi2_min: float
    nu_model: tuple  # model frequencies at lambda_min, one per measurement


class FitFailure(RuntimeError):
    pass


def chi_squared(lam, measurements, scales):
    total = 0.0
    for m in measurements:
        r = (m.nu - transition_frequency(scales, lam, *m.transition)) / m.sigma
        total += r * r
    return total


def _as_list(measurements):
    if isinstance(measurements, Measurement):
        return [measurements]
    return list(measurements)


def fit_lambda(measurements, scales, window=(-1.0, 5.0), grid=121):
    """Least-squares lambda for one or more measured transitions.

    A coarse scan over ``window`` brackets the minimum, Brent's method
    refines it, and the 1-sigma interval comes from chi^2 = chi^2_min + 1
    on either side (``inf`` if the crossing lies outside the window).
    """
    data = _as_list(measurements)
    if not data:
        raise ValueError("no measurements")
    lo, hi = map(float, window)

    def chi2(lam):
        return chi_squared(lam, data, scales)

    lams = np.linspace(lo, hi, grid)
    values = np.array([chi2(x) for x in lams])
    i = int(np.argmin(values))
    if values[i] > 2500.0 * len(data):
        raise FitFailure(
            f"no lambda in [{lo}, {hi}] reproduces the data within 50 sigma "
            f"(best chi2 = {values[i]:.4g} at lambda = {lams[i]:.4g})"
        )
    a, b = lams[max(i - 1, 0)], lams[min(i + 1, grid - 1)]
    res = optimize.minimize_scalar(chi2, bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-12})
    lam_min, chi2_min = float(res.x), float(res.fun)

    def excess(lam):
        return chi2(lam) - chi2_min - 1.0

    def crossing(edge):
        if excess(edge) < 0:
            return math.inf
        return abs(optimize.brentq(excess, lam_min, edge, xtol=1e-13) - lam_min)

    minus, plus = crossing(lo), crossing(hi)
    delta = 0.5 * (minus + plus)
    model = tuple(transition_frequency(scales, lam_min, *m.transition) for m in data)
    return FitResult(lam_min, delta, minus, plus, chi2_min, model)


@dataclass(frozen=True)
class EnergyRow:
    n: int
    zeta: float
    energy_peV: float


def energies_table(scales, lam, n_max, e0_peV=None):
    """E_n = -E0 zeta_n in peV; ``e0_peV`` replaces the computed E0."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    e0 = scales.E0_peV if e0_peV is None else float(e0_peV)
    lam = as_param(lam)
    first = 0 if (isinstance(lam, float) and lam < 0) else 1
    rows = []
    for n in range(first, n_max + 1):
        z = eigenstate(lam, n).zeta
        rows.append(EnergyRow(n, z, -e0 * z))
    return rows


def table_one(scales, lam, n_max=7, e0_peV=None):
    """Rows (n, E_D, E_lam, E_D - E_lam) in peV, Dirichlet against ``lam``."""
    dirichlet = energies_table(scales, 0.0, n_max, e0_peV)
    robin = {r.n: r for r in energies_table(scales, lam, n_max, e0_peV)}
    return [
        (d.n, d.energy_peV, robin[d.n].energy_peV, d.energy_peV - robin[d.n].energy_peV)
        for d in dirichlet
    ]


def extract_g(measurement, lam, scales):
    """Local g that makes the model frequency match the measured one.

    Uses nu proportional to E0 proportional to g^{2/3} around the reference
    ``scales``; ``lam = 0`` reproduces the usual Dirichlet extraction.
    """
    nu_ref = transition_frequency(scales, lam, *measurement.transition)
    return scales.g * (measurement.nu / nu_ref) ** 1.5


@dataclass(frozen=True)
class PenetrationResult:
    n: int
    kappa0: float  # 1/m
    p_in: float


def penetration(lam, n, scales):
    """Decay constant and probability for an exponential tail under the mirror.

    The tail exp(kappa0 x) psi_n(0) with kappa0 = 1/(lam x0) integrates to
    lam psi_n(0)^2 / 2 (psi normalised in xi).
    """
    lam = as_param(lam)
    if not isinstance(lam, float) or lam <= 0:
        raise ValueError("penetration needs a finite lam > 0")
    st = eigenstate(lam, n)
    return PenetrationResult(n, 1.0 / (lam * scales.x0), 0.5 * lam * st.psi0 ** 2)
