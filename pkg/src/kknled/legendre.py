"""Half-integer-degree Legendre functions on the toroidal range x = cosh(mu) >= 1.

P_(n-1/2)(cosh mu) and Q_(n-1/2)(cosh mu) are the radial factors of the
separated axisymmetric Laplace equation in toroidal coordinates.  Values are
produced from the hypergeometric closed forms (through mpmath, evaluated on
the real branch for x > 1) and independently cross-checked against adaptive
quadrature of two classical integral representations:

    Laplace:  P_nu(x) = (1/pi) int_0^pi  (x + sqrt(x^2-1) cos t)^nu      dt
    Heine:    Q_nu(x) =        int_0^inf (x + sqrt(x^2-1) cosh t)^(-nu-1) dt

(the Heine integral converges for nu > -1, which covers every degree used
here).  The quadrature route is the in-repo oracle: golden values for the
test suite were frozen from it.

Endpoint behaviour: P_nu(1) = 1 exactly for every degree, while Q diverges
logarithmically as x -> 1+; the divergence is reported as an IEEE infinity
rather than an exception so that scans over mu can detect and flag it.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad

_KINDS = ("P", "Q")

# Heine integrand decays like exp(-(nu+1) t); 200 is far past double range
_HEINE_TMAX = 200.0


def _check_args(kind: str, degree: float, x: float):
    if kind not in _KINDS:
        raise ValueError(f"kind must be 'P' or 'Q', got {kind!r}")
    if 2.0 * degree != round(2.0 * degree) or round(2.0 * degree) % 2 == 0:
        raise ValueError(f"degree must be half-integer, got {degree}")
    if x < 1.0:
        raise ValueError(f"argument must satisfy x >= 1, got {x}")


def legendre_half(kind: str, degree: float, x: float) -> float:
    """Toroidal-harmonic value P_nu(x) or Q_nu(x) for half-integer nu, x >= 1."""
    _check_args(kind, degree, x)
    if x == 1.0:
        return 1.0 if kind == "P" else math.inf
    if kind == "P":
        val = mp.legenp(mp.mpf(degree), 0, mp.mpf(x), type=3)
    else:
        val = mp.legenq(mp.mpf(degree), 0, mp.mpf(x), type=3)
    return float(mp.re(val))


def legendre_half_grid(kind: str, degree: float, x: np.ndarray) -> np.ndarray:
    """Vectorized `legendre_half` over an array of arguments."""
    return np.array([legendre_half(kind, degree, float(v)) for v in np.asarray(x)])


def laplace_integral_p(degree: float, x: float, epsabs: float = 1e-14,
                       epsrel: float = 1e-13) -> float:
    """Quadrature oracle for P_nu(x), x > 1 (Laplace's first integral)."""
    _check_args("P", degree, x)
    if x == 1.0:
        return 1.0
    root = math.sqrt(x * x - 1.0)

    def f(t):
        return (x + root * math.cos(t)) ** degree

    val, _ = quad(f, 0.0, math.pi, epsabs=epsabs, epsrel=epsrel, limit=400)
    return val / math.pi


def heine_integral_q(degree: float, x: float, epsabs: float = 1e-14,
                     epsrel: float = 1e-13) -> float:
    """Quadrature oracle for Q_nu(x), x > 1, nu > -1 (Heine's integral)."""
    _check_args("Q", degree, x)
    if degree <= -1.0:
        raise ValueError("Heine integral requires degree > -1")
    if x == 1.0:
        return math.inf
    root = math.sqrt(x * x - 1.0)
    power = -(degree + 1.0)

    def f(t):
        return (x + root * math.cosh(t)) ** power

    # split at t=5: the integrand is smooth but the decay scale changes
    v1, _ = quad(f, 0.0, 5.0, epsabs=epsabs, epsrel=epsrel, limit=400)
    v2, _ = quad(f, 5.0, _HEINE_TMAX, epsabs=epsabs, epsrel=epsrel, limit=400)
    return v1 + v2


def quadrature_oracle(kind: str, degree: float, x: float) -> float:
    return laplace_integral_p(degree, x) if kind == "P" else heine_integral_q(degree, x)


def legendre_wronskian_constant(n: int, x_probe: float = 2.0) -> float:
    """s * (v1 v2' - v1' v2) for the pair (P, Q) at degree n - 1/2 in the mu
    variable; constant by Abel's identity, measured once at a probe point."""
    nu = n - 0.5
    h = 1e-5
    mu0 = math.acosh(x_probe)

    def val(kind, mu):
        return legendre_half(kind, nu, math.cosh(mu))

    p0 = val("P", mu0)
    q0 = val("Q", mu0)
    dp = (val("P", mu0 + h) - val("P", mu0 - h)) / (2 * h)
    dq = (val("Q", mu0 + h) - val("Q", mu0 - h)) / (2 * h)
    return math.sinh(mu0) * (p0 * dq - dp * q0)
