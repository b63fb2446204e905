"""Quantum bouncer on a half-line with a Robin wall psi(0) = lam x0 psi'(0).

Submodules: ``special`` (Airy functions and zeros), ``spectrum`` (roots,
eigenstates, asymptotics), ``elements`` (closed-form matrix elements),
``rules`` (sum rules, uncertainty), ``qbounce`` (physical units, fits),
``oracle`` (independent quadrature checks) and ``cli``.
"""

__version__ = "0.1.0"
