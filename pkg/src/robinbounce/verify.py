"""Oracle cross-check suite behind ``robinbounce verify``."""

import math

import numpy as np

from .elements import p_value, p2_value, ptp_value, recursion_check, x_power
from .oracle import bisect_zero, quad_derivative_overlap, quad_overlap, series_airy
from .rules import sum_rule
from .special import airy_ai, airy_ai_prime, airy_pair
from .spectrum import eigenstate, phase_residual, root_residual

__all__ = ["run_checks"]

LAMBDAS = (0.0, 0.11928, 1.0, 10.0)


def _row(name, residual, tol):
    return {"check": name, "residual": float(residual), "tolerance": tol,
            "passed": bool(residual <= tol)}


def _orthonormality():
    worst = 0.0
    for lam in LAMBDAS:
        for n in range(1, 5):
            for k in range(n, 5):
                v = quad_overlap(lam, n, k, 0).value
                worst = max(worst, abs(v - (n == k)))
    return _row("orthonormality n,k<=4", worst, 1e-8)


def _closed_forms():
    worst = 0.0
    for lam in (0.0, 0.11928, 1.0, -0.5):
        for n, k in ((1, 1), (1, 2), (2, 5)):
            sn, sk = eigenstate(lam, n), eigenstate(lam, k)
            for q in (1, 2):
                got = x_power(sn, sk, q)
                ref = quad_overlap(lam, n, k, q).value
                worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
            ref = quad_derivative_overlap(lam, k, n).value
            worst = max(worst, abs(p_value(sn, sk).imag - ref))
            both = quad_derivative_overlap(lam, n, k, both=True).value
            worst = max(worst, abs(0.5 * ptp_value(sn, sk) - both))
            # p^2 = -d^2/dxi^2 in hbar^2/x0^2 = 2 m E0 units
            second = both + sn.psi0 * sk.dpsi0
            worst = max(worst, abs(0.5 * p2_value(sn, sk) - second))
    return _row("closed forms vs quadrature (x, x^2, p, p^2, p'p)", worst, 1e-8)


def _recursion():
    worst = 0.0
    for lam in (0.11928, 2.0):
        for n, k in ((1, 1), (1, 3)):
            for q in range(1, 7):
                worst = max(worst, recursion_check(lam, n, k, q))
    return _row("moment recursion q<=6", worst, 1e-8)


def _roots(perturb):
    worst = 0.0
    for lam in LAMBDAS[1:] + (-0.3,):
        for n in range(1, 9):
            worst = max(worst, abs(root_residual(lam, eigenstate(lam, n).zeta + perturb)))
    return _row("root residual n<=8", worst, 1e-12)


def _bisection(perturb):
    worst = 0.0
    for lam in (0.11928, 3.0):
        def h(x):
            return airy_ai(x) - lam * airy_ai_prime(x)
        for n in range(1, 5):
            z = eigenstate(lam, n).zeta + perturb
            ref = bisect_zero(h, (z - 0.2, z + 0.2))
            worst = max(worst, abs(ref - z))
    return _row("roots vs bisection", worst, 1e-10)


def _series():
    worst = 0.0
    for x in (-4.5, -2.0, 0.0, 1.5, 4.0):
        ai, aip = series_airy(x)
        p = airy_pair(x)
        worst = max(worst, abs(p.value - ai), abs(p.derivative - aip))
    return _row("Airy values vs extended-precision series", worst, 1e-13)


def _sum_rules():
    rows = []
    for lam in (0.0, 0.11928, 1.0):
        rep = sum_rule("TRK", 1, lam, 2000)
        rows.append(_row(f"TRK n=1 lambda={lam}", rep.relative_error, 1e-3))
    rep = sum_rule("Closure", 1, 0.11928, 400)
    rows.append(_row("closure n=1 lambda=0.11928", rep.relative_error, 1e-6))
    return rows


def _phase_grid():
    worst = 0.0
    for th in np.linspace(0.0, 2.0 * math.pi, 32):
        for e in np.linspace(3.0 / 16, 3.0, 16):
            worst = max(worst, phase_residual(th, e))
    return _row("phase map reality 32x16", worst, 1e-10)


def run_checks(perturb=0.0):
    """Run every check; ``perturb`` shifts the roots to exercise the guards."""
    rows = [_roots(perturb), _bisection(perturb), _series(), _orthonormality(),
            _closed_forms(), _recursion()]
    rows += _sum_rules()
    rows.append(_phase_grid())
    return rows
