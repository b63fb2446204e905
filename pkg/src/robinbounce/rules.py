"""Sum rules, the vanishing anticommutator and the uncertainty bound.

Sums run over every bound state m (including m = n and, for lam < 0, the
boundary state m = 0) and are reported in the natural units of each rule:

    Closure       sum |<n|xi|m>|^2                 = <n|xi^2|n>          [x0^2]
    TRK           sum (zeta_n - zeta_m) |<n|xi|m>|^2 = 1                [E0 x0^2 = hbar^2/2m]
    Monopole      sum (zeta_n - zeta_m) |<n|xi^2|m>|^2 = 4 <n|xi^2|n>   [E0 x0^4]
    SecondMoment  sum (zeta_n - zeta_m)^2 |<n|xi|m>|^2 = 2 <n|p^2|n>    [E0^2 x0^2]
    Bethe         (q x0)^2                                              [E0]

For lam != 0 the dipole elements fall off only like |zeta_m|^{-3/2}, so
the TRK partial sums approach their limit like |zeta_M|^{-1/2}. The tail
is estimated by fitting the last stretch of partial sums with a
polynomial in u = |zeta_M|^{-1/2} and reading off the intercept.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .elements import p2_value, ptp_value, x_power
from .spectrum import as_param, eigenstate, is_neumann, solve_roots

__all__ = [
    "SumRuleKind",
    "SumRuleReport",
    "TOLERANCES",
    "sum_rule",
    "partial_sums",
    "tail_power",
    "anticommutator_check",
    "uncertainty_bound",
    "Variances",
    "variances",
]


class SumRuleKind(str, Enum):
    CLOSURE = "Closure"
    TRK = "TRK"
    MONOPOLE = "Monopole"
    SECOND_MOMENT = "SecondMoment"
    BETHE = "Bethe"


# relative tolerance used to certify each rule
TOLERANCES = {
    SumRuleKind.CLOSURE: 1e-6,
    SumRuleKind.TRK: 1e-3,
    SumRuleKind.MONOPOLE: 1e-6,
    SumRuleKind.SECOND_MOMENT: 1e-3,
    SumRuleKind.BETHE: 0.0,
}


UNITS = {
    SumRuleKind.CLOSURE: "x0^2",
    SumRuleKind.TRK: "E0*x0^2",
    SumRuleKind.MONOPOLE: "E0*x0^4",
    SumRuleKind.SECOND_MOMENT: "E0^2*x0^2",
    SumRuleKind.BETHE: "E0",
}


@dataclass(frozen=True)
class SumRuleReport:
    kind: SumRuleKind
    n: int
    lam: object
    m_max: int
    lhs_partial: float
    rhs_closed: float
    tail_estimate: float
    tolerance: float
    converged: bool
    unit: str = ""
    note: str = ""

    @property
    def lhs_total(self):
        return self.lhs_partial + self.tail_estimate

    @property
    def relative_error(self):
        return abs(self.lhs_total - self.rhs_closed) / max(1.0, abs(self.rhs_closed))


def _arrays(lam, m_max):
    states = solve_roots(lam, m_max)
    zeta = np.array([s.zeta for s in states])
    s = np.array([s.psi0 for s in states])
    t = np.array([s.dpsi0 for s in states])
    idx = np.array([st.n for st in states])
    return states, zeta, s, t, idx


def _dipole_row(state, zeta, s, t, idx):
    """<n|xi|m> for all m, closed form, vectorised over m."""
    d = state.zeta - zeta
    zave = 0.5 * (state.zeta + zeta)
    x = state.dpsi0 * t - zave * state.psi0 * s
    diag = idx == state.n
    d2 = np.where(diag, 1.0, d * d)
    m1 = np.where(diag, x_power(state, state, 1), -2.0 * x / d2)
    return m1, d, d2, diag


def _terms(kind, state, zeta, s, t, idx):
    m1, d, d2, diag = _dipole_row(state, zeta, s, t, idx)
    if kind is SumRuleKind.CLOSURE:
        return m1 * m1
    if kind is SumRuleKind.TRK:
        return d * m1 * m1
    if kind is SumRuleKind.SECOND_MOMENT:
        return d * d * m1 * m1
    if kind is SumRuleKind.MONOPOLE:
        mixed = state.psi0 * t + state.dpsi0 * s
        m2 = np.where(diag, 0.0, (12.0 * m1 + 2.0 * mixed) / d2)
        return d * m2 * m2
    raise ValueError(f"no partial sum for {kind}")


def _rhs(kind, state):
    if kind is SumRuleKind.CLOSURE:
        return x_power(state, state, 2)
    if kind is SumRuleKind.TRK:
        return 1.0
    if kind is SumRuleKind.MONOPOLE:
        return 4.0 * x_power(state, state, 2)
    return 2.0 * p2_value(state, state)


def partial_sums(kind, n, lam, m_max):
    """Cumulative sums S(M), M over the ordered index list, plus the zetas."""
    kind = SumRuleKind(kind)
    _, zeta, s, t, idx = _arrays(lam, m_max)
    state = eigenstate(lam, n)
    terms = _terms(kind, state, zeta, s, t, idx)
    # fixed left-to-right order keeps results reproducible
    return np.cumsum(terms), zeta, idx


def tail_power(kind, lam):
    """Leading exponent p of the tail, S(inf) - S(M) ~ u^p with u = |zeta_M|^{-1/2}.

    With psi_m(0) ~ |zeta_m|^{-1/2} the dipole elements decay like
    |zeta_m|^{-3/2}; on the Dirichlet wall psi_m(0) = 0 and they decay like
    |zeta_m|^{-2}. The level density adds a factor |zeta|^{1/2}.
    """
    kind = SumRuleKind(kind)
    lam = as_param(lam)
    dirichlet = not is_neumann(lam) and lam == 0.0
    generic = {SumRuleKind.CLOSURE: 3, SumRuleKind.TRK: 1, SumRuleKind.MONOPOLE: 7,
               SumRuleKind.SECOND_MOMENT: -1}
    wall = {SumRuleKind.CLOSURE: 7, SumRuleKind.TRK: 5, SumRuleKind.MONOPOLE: 13,
            SumRuleKind.SECOND_MOMENT: 1}
    return (wall if dirichlet else generic)[kind]


def _extrapolate(sums, zeta, power, degree=4):
    """Limit of the partial sums from a fit in powers u^power, u^(power+1), ...

    The fit uses the last seven eighths of the sums. Returns (limit, spread),
    where spread compares ``degree`` and ``degree - 1`` correction terms and
    serves as the certification error.
    """
    lo = max(len(sums) // 8, 1)
    u = 1.0 / np.sqrt(np.abs(zeta[lo:]))
    u = u / u.max()
    y = sums[lo:]
    limits = []
    for deg in (degree, degree - 1):
        basis = np.column_stack([np.ones_like(u)] + [u ** (power + j) for j in range(deg)])
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        limits.append(coef[0])
    return float(limits[0]), abs(limits[0] - limits[1])


def sum_rule(kind, n, lam, m_max=2000, q=None):
    """Evaluate one sum rule for state ``n``.

    ``q`` is the wavenumber (in 1/x0) for the Bethe rule and is ignored
    otherwise. Non-convergence is reported, not raised.
    """
    kind = SumRuleKind(kind)
    lam = as_param(lam)
    tol = TOLERANCES[kind]
    if kind is SumRuleKind.BETHE:
        if q is None:
            raise ValueError("Bethe rule needs a wavenumber q")
        value = float(q) ** 2
        # element-free identity: independent of n and lambda
        return SumRuleReport(kind, n, lam, 0, value, value, 0.0, tol, True,
                             UNITS[kind], "exact")
    if m_max < n + 10:
        raise ValueError(f"m_max must be >= n + 10, got {m_max}")
    state = eigenstate(lam, n)
    sums, zeta, _ = partial_sums(kind, n, lam, m_max)
    rhs = _rhs(kind, state)
    lhs = float(sums[-1])
    note = ""
    if kind is SumRuleKind.SECOND_MOMENT and not is_neumann(lam) and lam != 0.0:
        # xi psi_n leaves the operator domain once psi_n(0) != 0; terms ~ 1/|zeta_m|
        return SumRuleReport(kind, n, lam, m_max, lhs, rhs, math.nan, tol, False,
                             UNITS[kind], "divergent: terms decay like 1/|zeta_m|")
    limit, spread = _extrapolate(sums, zeta, tail_power(kind, lam))
    tail = float(limit - lhs)
    scale = max(1.0, abs(rhs))
    converged = spread <= tol * scale
    if not converged:
        note = f"tail fit not certified (spread {spread:.2e})"
    return SumRuleReport(kind, n, lam, m_max, lhs, rhs, tail, tol, converged,
                         UNITS[kind], note)


def anticommutator_check(lam, n, m_max):
    """Truncated sum over k of <n|xi|k><k|p|n> + <n|p|k><k|xi|n>.

    With the closed-form momentum elements the sum is -i psi_n(0) times
    sum_k <n|xi|k> psi_k(0); the real coefficient of -i (units hbar) is
    returned.
    """
    if m_max < n + 10:
        raise ValueError(f"m_max must be >= n + 10, got {m_max}")
    _, zeta, s, t, idx = _arrays(lam, m_max)
    state = eigenstate(lam, n)
    m1, _, _, _ = _dipole_row(state, zeta, s, t, idx)
    return float(state.psi0 * np.dot(m1, s))


def uncertainty_bound(lam, n, convention="amplitude"):
    """Lower bound on dx*dp in units of hbar.

    ``"amplitude"``: (1/6)|3 - alpha^2 (alpha alpha' + 2 zeta)| with the
    non-negative boundary amplitudes. ``"ket"``: the Cauchy-Schwarz bound
    built from the momentum acting on the ket, (1/6)|3 + s^2 (s t + 2 zeta)|
    with the signed boundary values s, t.
    """
    st = eigenstate(lam, n)
    if convention == "amplitude":
        a, ap = st.alpha, st.alpha_prime
        return abs(3.0 - a * a * (a * ap + 2.0 * st.zeta)) / 6.0
    if convention == "ket":
        s, t = st.psi0, st.dpsi0
        return abs(3.0 + s * s * (s * t + 2.0 * st.zeta)) / 6.0
    raise ValueError(f"convention must be 'amplitude' or 'ket', got {convention!r}")


@dataclass(frozen=True)
class Variances:
    delta_x: float  # x0
    delta_p: float  # hbar / x0
    ptp: float  # <p^dagger p> in hbar^2 / x0^2

    @property
    def product(self):
        return self.delta_x * self.delta_p


def variances(lam, n):
    """Position and momentum spreads of state ``n``.

    The momentum variance uses <p^dagger p> = hbar^2 \\int |psi'|^2, which
    differs from <p^2> by a boundary term when psi_n(0) != 0, and
    |<p>|^2 = psi_n(0)^4 / 4.
    """
    st = eigenstate(lam, n)
    m1, m2 = x_power(st, st, 1), x_power(st, st, 2)
    # ptp_value is in m E0 = hbar^2 / (2 x0^2)
    ptp = 0.5 * ptp_value(st, st)
    dp2 = ptp - 0.25 * st.psi0 ** 4
    return Variances(math.sqrt(max(m2 - m1 * m1, 0.0)), math.sqrt(max(dp2, 0.0)), ptp)
