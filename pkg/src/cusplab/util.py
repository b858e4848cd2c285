"""Small shared numerics helpers: smooth steps, power iteration, winding."""

import numpy as np


def smoothstep(t):
    """C^2 polynomial step: 0 for t <= 0, 1 for t >= 1, 6t^5-15t^4+10t^3 between.

    Accepts scalars or arrays.
    """
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def smoothstep_d(t):
    """Derivative of smoothstep."""
    t = np.asarray(t, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    tc = np.clip(t, 0.0, 1.0)
    d = 30.0 * tc * tc * (tc - 1.0) * (tc - 1.0)
    return np.where(inside, d, 0.0)


def smoothstep_d2(t):
    """Second derivative of smoothstep."""
    t = np.asarray(t, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    tc = np.clip(t, 0.0, 1.0)
    d2 = 60.0 * tc * (2.0 * tc - 1.0) * (tc - 1.0)
    return np.where(inside, d2, 0.0)


def smoothstep_int(t):
    """Antiderivative S(t) = int_0^t smoothstep, with S(t) = t - 1/2 for t >= 1."""
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, 0.0, 1.0)
    s = tc ** 4 * (tc * (tc - 3.0) + 2.5)
    return np.where(t >= 1.0, t - 0.5, s)


class IterationError(RuntimeError):
    """Power / inverse iteration failed to converge."""


def power_iteration_norm(matvec, rmatvec, n, tol=1e-8, maxiter=500, seed=7,
                         dtype=complex):
    """Largest singular value of a linear operator given by matvec/rmatvec.

    Iterates v <- A^H A v.  Returns sqrt of the dominant eigenvalue of A^H A.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v = v.astype(dtype)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise IterationError("degenerate start vector")
    v /= nv
    prev = 0.0
    for _ in range(maxiter):
        w = rmatvec(matvec(v))
        mu = np.linalg.norm(w)
        if mu == 0.0:
            return 0.0
        v = w / mu
        est = np.sqrt(mu)
        if prev > 0 and abs(est - prev) <= tol * est:
            return est
        prev = est
    raise IterationError("power iteration did not converge in %d steps" % maxiter)


def winding_number(fvals):
    """Winding number of a closed discrete curve of nonzero complex values.

    The list must be fine enough that successive phase jumps are < pi.
    """
    f = np.asarray(fvals)
    if np.any(f == 0):
        raise ValueError("zero on contour")
    dphi = np.angle(f[1:] / f[:-1])
    total = dphi.sum() + np.angle(f[0] / f[-1])
    return int(np.rint(total / (2.0 * np.pi)))
