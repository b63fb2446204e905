"""Independent verification backend.

Nothing in the production path imports this module. It integrates the
eigenfunctions numerically (QUADPACK adaptive Gauss-Kronrod plus a
fixed-order composite Gauss-Legendre rule), bisects roots, and evaluates
Ai by its Maclaurin series in extended precision.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

from .special import airy_scaled
from .spectrum import eigenfunction_derivative, eigenfunction_value, eigenstate

__all__ = [
    "QuadratureResult",
    "BracketError",
    "integration_limit",
    "quad_overlap",
    "quad_derivative_overlap",
    "composite_overlap",
    "bisect_zero",
    "series_airy",
]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    subdivisions: int
    tail_bound: float
    flagged: bool = False


class BracketError(ValueError):
    pass


def integration_limit(*states):
    """Cut-off xi_max = |zeta|_max + 15 beyond which the integrands are < 1e-16."""
    return max(abs(min(s.zeta, 0.0)) for s in states) + 15.0


def _tail_bound(states, xi_max, q):
    # Ai(t) <= exp(-2/3 t^{3/2}) / (2 sqrt(pi) t^{1/4}); log-derivative of the
    # product envelope is at least sum sqrt(xi_max + zeta) - q / xi_max.
    log_env, rate = q * math.log(xi_max), -q / xi_max
    for s in states:
        t = xi_max + s.zeta
        if t <= 0:
            return math.inf
        # log N_n, written via psi_n(0)/Ai(zeta) to survive huge N for zeta > 0
        ai0, aip0 = airy_scaled(s.zeta)
        if s.psi0 == 0.0:
            log_norm = math.log(abs(s.dpsi0 / aip0))
        else:
            log_norm = math.log(abs(s.psi0 / ai0))
        log_norm += 2.0 / 3.0 * max(s.zeta, 0.0) ** 1.5
        log_env += log_norm - 2.0 / 3.0 * t ** 1.5 - math.log(2.0 * math.sqrt(math.pi) * t ** 0.25)
        rate += math.sqrt(t)
    if rate <= 0:
        return math.inf
    return math.exp(log_env) / rate


def _adaptive(fn, xi_max, breakpoints, tail):
    value, err, info = integrate.quad(
        fn,
        0.0,
        xi_max,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=1000,
        points=breakpoints or None,
        full_output=1,
    )[:3]
    nsub = int(info["last"])
    flagged = err + tail > 1e-11 * max(1.0, abs(value))
    return QuadratureResult(value, err, nsub, tail, flagged)


def _breakpoints(states, xi_max):
    # split the oscillatory region at the classical turning points
    pts = sorted({-s.zeta for s in states if 0 < -s.zeta < xi_max})
    return pts


def quad_overlap(lam, n, k, q=0):
    """\\int_0^inf psi_n psi_k xi^q d xi by adaptive quadrature."""
    if not 0 <= q <= 8:
        raise ValueError("q must lie in [0, 8]")
    sn, sk = eigenstate(lam, n), eigenstate(lam, k)
    xi_max = integration_limit(sn, sk)

    def fn(x):
        return eigenfunction_value(sn, x) * eigenfunction_value(sk, x) * x ** q

    tail = _tail_bound((sn, sk), xi_max, q)
    return _adaptive(fn, xi_max, _breakpoints((sn, sk), xi_max), tail)


def quad_derivative_overlap(lam, n, k, both=False):
    """\\int psi_n psi_k' (default) or \\int psi_n' psi_k' (``both=True``)."""
    sn, sk = eigenstate(lam, n), eigenstate(lam, k)
    xi_max = integration_limit(sn, sk)
    left = eigenfunction_derivative if both else eigenfunction_value

    def fn(x):
        return left(sn, x) * eigenfunction_derivative(sk, x)

    # derivative envelope carries an extra sqrt(t) per factor
    tail = _tail_bound((sn, sk), xi_max, 1 if both else 0) * xi_max
    return _adaptive(fn, xi_max, _breakpoints((sn, sk), xi_max), tail)


def composite_overlap(lam, n, k, q=0, panels=400, order=20):
    """Fixed-order composite Gauss-Legendre rule on [0, xi_max]."""
    sn, sk = eigenstate(lam, n), eigenstate(lam, k)
    xi_max = integration_limit(sn, sk)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, xi_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    f = eigenfunction_value(sn, x) * eigenfunction_value(sk, x) * x ** q
    return float(np.dot(w, f))


def bisect_zero(f, bracket, xtol=1e-13, maxiter=200):
    """Plain bisection; the root is certified to the final interval width."""
    lo, hi = map(float, bracket)
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid in (lo, hi):
            return mid
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def series_airy(z, terms=240, dps=60):
    """Ai(z), Ai'(z) from the Maclaurin series at ``dps`` decimal digits.

    Slow; used only to spot-check the production evaluator. Accepts real
    or complex ``z`` and returns Python complex/float values.
    """
    with mpmath.workdps(dps):
        z = mpmath.mpmathify(z)
        c1 = 1 / (mpmath.power(3, mpmath.mpf(2) / 3) * mpmath.gamma(mpmath.mpf(2) / 3))
        c2 = 1 / (mpmath.power(3, mpmath.mpf(1) / 3) * mpmath.gamma(mpmath.mpf(1) / 3))
        z3 = z ** 3
        # f = sum z^{3k} / prod, g = sum z^{3k+1} / prod; f', g' by their own recurrences
        tf, tg = mpmath.mpf(1), z
        tfp, tgp = z * z / 2, mpmath.mpf(1)
        f, g, fp, gp = tf, tg, tfp, tgp
        for k in range(terms):
            tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
            tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
            tfp = tfp * z3 / ((3 * k + 3) * (3 * k + 5))
            tgp = tgp * z3 / ((3 * k + 1) * (3 * k + 3))
            f += tf
            g += tg
            fp += tfp
            gp += tgp
        ai = c1 * f - c2 * g
        aip = c1 * fp - c2 * gp
        if isinstance(ai, mpmath.mpc):
            return complex(ai), complex(aip)
        return float(ai), float(aip)
