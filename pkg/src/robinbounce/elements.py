"""Closed-form matrix elements between Robin bound states.

All values are dimensionless; multiply by the unit factor noted per
function to restore SI. Boundary values enter through the signed
psi_n(0), psi_n'(0) stored on each ``EigenState``, which reproduces the
(-1)^{n+k} alpha_n alpha_k products for lam >= 0 and stays correct on the
lam < 0 branches.

Momentum convention: ``p`` is not self-adjoint on the Robin domain, so
the side it acts on matters. ``side="bra"`` returns i hbar \\int psi_n' psi_k
(the closed form obtained from the Ehrenfest route, diagonal -i alpha^2/2);
``side="ket"`` returns -i hbar \\int psi_n psi_k'. They differ by
i psi_n(0) psi_k(0).
"""

from dataclasses import dataclass
from enum import Enum

from .spectrum import EigenState, eigenstate

__all__ = [
    "Operator",
    "MatrixElement",
    "falling",
    "x_power",
    "x_power_element",
    "p_value",
    "p_element",
    "p2_value",
    "p2_element",
    "ptp_value",
    "ptp_element",
    "delta_value",
    "delta_element",
    "recursion_terms",
    "recursion_check",
    "matrix_element",
]


class Operator(str, Enum):
    XPOWER = "x"
    P = "p"
    P2 = "p2"
    PTP = "ptp"
    DELTA = "delta"


@dataclass(frozen=True)
class MatrixElement:
    bra_n: int
    ket_k: int
    operator: Operator
    value: complex
    q: int = 1
    # value * unit restores SI; unit is a symbolic label ("x0^2", "hbar/x0", ...)
    unit: str = ""


def falling(q, j):
    """Falling factorial (q)_j = q (q-1) ... (q-j+1)."""
    out = 1
    for i in range(j):
        out *= q - i
    return out


def _x_diag(s, q):
    zeta, a, ap = s.zeta, s.psi0, s.dpsi0
    m = [1.0, -(a * ap + 2.0 * zeta) / 3.0]
    m.append((a * a - 4.0 * zeta * m[1]) / 5.0)
    # diagonal identity at power p gives <xi^{p-1}>; boundary terms vanish for p >= 4
    for p in range(4, q + 2):
        m.append(
            (falling(p, 4) * m[p - 4] - 4.0 * p * (p - 1) * zeta * m[p - 2])
            / (2.0 * p * (2 * p - 1))
        )
    return m


def _x_off(sn, sk, q):
    d = sn.zeta - sk.zeta
    zave = 0.5 * (sn.zeta + sk.zeta)
    pp = sn.psi0 * sk.psi0
    dd = sn.dpsi0 * sk.dpsi0
    mixed = sn.psi0 * sk.dpsi0 + sn.dpsi0 * sk.psi0
    d2 = d * d
    m = [0.0, -2.0 * (dd - zave * pp) / d2]
    m.append((12.0 * m[1] + 2.0 * mixed) / d2)
    for p in range(3, q + 1):
        rhs = -6.0 * pp if p == 3 else 0.0
        acc = rhs + 4.0 * p * (p - 1) * zave * m[p - 2] + 2.0 * p * (2 * p - 1) * m[p - 1]
        if p >= 4:
            acc -= falling(p, 4) * m[p - 4]
        m.append(acc / d2)
    return m


def x_power(sn, sk, q):
    """<n| xi^q |k> for two states of the same lambda (units x0^q)."""
    if q < 0:
        raise ValueError("q must be non-negative")
    if sn.n == sk.n:
        return _x_diag(sn, q)[q]
    return _x_off(sn, sk, q)[q]


def x_power_element(lam, n, k, q):
    return x_power(eigenstate(lam, n), eigenstate(lam, k), q)


def delta_value(sn, sk):
    """x0 <n|delta(x)|k> = psi_n(0) psi_k(0)."""
    return sn.psi0 * sk.psi0


def delta_element(lam, n, k):
    return delta_value(eigenstate(lam, n), eigenstate(lam, k))


def p_value(sn, sk, side="bra"):
    """<n|p|k> in units hbar/x0 (purely imaginary)."""
    b = delta_value(sn, sk)
    if sn.n == sk.n:
        core = 0.0
    else:
        core = (sn.zeta - sk.zeta) * x_power(sn, sk, 1)
    if side == "bra":
        return -0.5j * (core + b)
    if side == "ket":
        return -0.5j * (core - b)
    raise ValueError(f"side must be 'bra' or 'ket', got {side!r}")


def p_element(lam, n, k, side="bra"):
    return p_value(eigenstate(lam, n), eigenstate(lam, k), side)


def p2_value(sn, sk):
    """<n|p^2|k> in units m E0 (= hbar^2 / (2 x0^2)), via p^2 = 2m(H - F0 x)."""
    val = -2.0 * x_power(sn, sk, 1)
    if sn.n == sk.n:
        val -= 2.0 * sk.zeta
    return val


def p2_element(lam, n, k):
    return p2_value(eigenstate(lam, n), eigenstate(lam, k))


def ptp_value(sn, sk):
    """<p n | p k> = hbar^2 \\int psi_n' psi_k' in units m E0.

    Differs from <n|p^2|k> by the surface term 2 psi_n(0) psi_k'(0).
    """
    return p2_value(sn, sk) - 2.0 * sn.psi0 * sk.dpsi0


def ptp_element(lam, n, k):
    return ptp_value(eigenstate(lam, n), eigenstate(lam, k))


def recursion_terms(sn, sk, q, moments):
    """LHS and RHS of the xi^q moment identity.

    ``moments[p]`` must hold <n|xi^p|k> for p = 0..q; they can come from
    the closed forms or from quadrature.
    """
    zave = 0.5 * (sn.zeta + sk.zeta)
    d = sn.zeta - sk.zeta

    def mom(p):
        return moments[p] if p >= 0 else 0.0

    lhs = [
        falling(q, 4) * mom(q - 4),
        -4.0 * q * (q - 1) * zave * mom(q - 2),
        -2.0 * q * (2 * q - 1) * mom(q - 1),
        d * d * mom(q),
    ]
    pp = sn.psi0 * sk.psi0
    dd = sn.dpsi0 * sk.dpsi0
    mixed = sn.psi0 * sk.dpsi0 + sn.dpsi0 * sk.psi0
    rhs = 0.0
    if q == 2:
        rhs += 2.0 * mixed
    if q == 1:
        rhs += -2.0 * dd + 2.0 * zave * pp
    if q == 3:
        rhs += -6.0 * pp
    return lhs, rhs


def recursion_check(lam, n, k, q, moments=None):
    """Relative residual of the moment identity.

    Moments default to adaptive quadrature (see ``oracle``). The residual is
    |LHS - RHS| divided by max(1, largest term), so it is meaningful for
    large q where individual terms grow like |zeta|^q.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    sn, sk = eigenstate(lam, n), eigenstate(lam, k)
    if moments is None:
        from .oracle import quad_overlap

        moments = [quad_overlap(lam, n, k, p).value for p in range(q + 1)]
    lhs, rhs = recursion_terms(sn, sk, q, moments)
    scale = max([1.0, abs(rhs)] + [abs(t) for t in lhs])
    return abs(sum(lhs) - rhs) / scale


_UNITS = {
    Operator.P: "hbar/x0",
    Operator.P2: "m*E0",
    Operator.PTP: "m*E0",
    Operator.DELTA: "1/x0",
}


def matrix_element(lam, n, k, operator, q=1, side="bra"):
    op = Operator(operator)
    sn, sk = eigenstate(lam, n), eigenstate(lam, k)
    if op is Operator.XPOWER:
        val, unit = x_power(sn, sk, q), f"x0^{q}"
    elif op is Operator.P:
        val, unit = p_value(sn, sk, side), _UNITS[op]
    elif op is Operator.P2:
        val, unit = p2_value(sn, sk), _UNITS[op]
    elif op is Operator.PTP:
        val, unit = ptp_value(sn, sk), _UNITS[op]
    else:
        val, unit = delta_value(sn, sk), _UNITS[op]
    return MatrixElement(n, k, op, val, q, unit)
