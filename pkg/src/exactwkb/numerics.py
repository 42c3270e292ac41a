"""Arbitrary-precision complex numbers (mpmath ``mpc``) and small helpers."""

from contextlib import contextmanager

import mpmath

DEFAULT_BITS = 256

BigComplex = mpmath.mpc


@contextmanager
def precision(bits=DEFAULT_BITS):
    """Run a block at ``bits`` of working precision (never lowers it)."""
    with mpmath.workprec(max(int(bits), 53)):
        yield


def big(z):
    return mpmath.mpc(z)


def close(a, b, tol):
    """|a - b| <= tol * max(1, |b|).  The tolerance is always explicit."""
    return abs(a - b) <= tol * max(1, abs(b))


def to_complex(z):
    z = mpmath.mpc(z)
    return complex(float(z.real), float(z.imag))


def json_number(z, digits=30):
    """JSON-friendly rendering of a BigComplex: [re, im] as decimal strings."""
    z = mpmath.mpc(z)
    return [mpmath.nstr(z.real, digits), mpmath.nstr(z.imag, digits)]


def fit_slope(xs, ys):
    """Least-squares slope of log|y| against log x."""
    import numpy as np
    lx = np.log(np.asarray([float(x) for x in xs]))
    ly = np.log(np.asarray([float(abs(y)) for y in ys]))
    return float(np.polyfit(lx, ly, 1)[0])
