"""Reference implementations the tests compare the library against.

Everything in this module is written from closed forms or direct quadrature,
on purpose: no calls into the library's own integration or contraction
routines (the one exception, `smeared_pair_density`, reuses the bare
correlator, which is itself cross-checked against exact diagonalization).
"""
import numpy as np

TWO_PI = 2.0 * np.pi


def _trap_weights(x):
    x = np.asarray(x, dtype=float)
    w = np.empty_like(x)
    w[1:-1] = 0.5 * (x[2:] - x[:-2])
    w[0] = 0.5 * (x[1] - x[0])
    w[-1] = 0.5 * (x[-1] - x[-2])
    return w


def shifted_contour_response(eps, dt=None, temperature=0.0, acceleration=0.0,
                             delta=None, span=None, n=200001):
    """Worldline response from the time-domain two-point function.

    Integrates sqrt(f(s)) e^{-i eps s} W(s) along a contour pushed below the
    real axis (distance `delta`), where the closed forms

        vacuum   W(s) = -1 / (4 pi^2 s^2)
        thermal  W(s) = -T^2 / (4 sinh^2(pi T s))
        a > 0    W(s) = -(a^2/16 pi^2) / sinh^2(a s / 2)

    are analytic: the shift costs nothing and removes the s = 0 singularity.
    With a Gaussian window the truncated trapezoid sum converges spectrally.
    Returns the complex sum; the imaginary part is a numerical residual the
    caller can use as a quadrature diagnostic.
    """
    if acceleration:
        beta = TWO_PI / acceleration
    elif temperature:
        beta = 1.0 / temperature
    else:
        beta = None
    if delta is None:
        cands = []
        if dt is not None:
            cands.append(0.5 * dt)
        if beta is not None:
            cands.append(0.4 * beta)
        delta = min(cands) if cands else 0.3
    if span is None:
        if acceleration:
            span = 60.0 / acceleration + (12.0 * dt if dt is not None else 0.0)
        else:
            span = 12.0 * dt if dt is not None else 2000.0
    u = np.linspace(-span, span, n)
    w = _trap_weights(u)
    s = u - 1j * delta
    if acceleration:
        half = 0.5 * acceleration * s
        wfun = -(acceleration**2 / (16.0 * np.pi**2)) / np.sinh(half) ** 2
    elif beta is not None:
        arg = np.pi * s / beta
        wfun = np.zeros_like(s)
        safe = np.abs(arg.real) < 350.0
        wfun[safe] = -1.0 / (4.0 * beta**2 * np.sinh(arg[safe]) ** 2)
    else:
        wfun = -1.0 / (4.0 * np.pi**2 * s**2)
    integ = np.exp(-1j * eps * s) * wfun
    if dt is not None:
        integ = integ * np.exp(-(s**2) / (4.0 * dt**2))
    return complex(np.sum(w * integ))


def arrival_density(grid, psi, L, t_grid):
    """Operator-path arrival density: project the freely evolved packet on
    the detector plane and square.

    P(t) = |sum_j mu_j sqrt(v_j) psi_j e^{i p_j L - i eps_j t}|^2 with the
    measure mu = w/2pi, eps = sqrt(p^2 + m^2), v = |p|/eps, and psi
    normalized to sum mu |psi|^2 = 1.  Everything is rebuilt here from the
    grid's raw nodes and weights.
    """
    p = np.asarray(grid.points, dtype=float)
    mu = np.asarray(grid.weights, dtype=float) / TWO_PI
    eps = np.sqrt(p**2 + grid.mass**2)
    v = np.where(eps > 0.0, np.abs(p) / eps, 0.0)
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.sqrt(np.sum(mu * np.abs(psi) ** 2))
    coeff = mu * np.sqrt(v) * psi * np.exp(1j * p * L)
    t_grid = np.asarray(t_grid, dtype=float)
    amp = np.exp(-1j * np.outer(t_grid, eps)) @ coeff
    return np.abs(amp) ** 2


def position_profile(kernel_values, k, y):
    """Cosine transform of an on-shell momentum profile: the real-space
    smearing the detector applies around a nominal event position."""
    k = np.asarray(k, dtype=float)
    wk = _trap_weights(k)
    pr = np.asarray(kernel_values, dtype=float)
    return np.array([np.sum(wk * pr * np.cos(k * yy)) / np.pi for yy in y])


def smeared_pair_density(correlator, k1_profile, k2_profile, y, xa, xb):
    """Two-event density by direct double quadrature over the smearing
    separations.

    correlator(fw, bw) must return the balanced 4-point value for forward
    points fw and backward points bw (lists of (t, x) pairs); k*_profile are
    the real-space profiles tabulated on y.  Scales as n_y^2 — keep n_y modest.
    """
    wy = _trap_weights(y)
    total = 0.0 + 0.0j
    for i, y1 in enumerate(y):
        bw1 = (xa[0], xa[1] + 0.5 * y1)
        fw1 = (xa[0], xa[1] - 0.5 * y1)
        for j, y2 in enumerate(y):
            bw2 = (xb[0], xb[1] + 0.5 * y2)
            fw2 = (xb[0], xb[1] - 0.5 * y2)
            gval = correlator([fw1, fw2], [bw1, bw2])
            total += wy[i] * wy[j] * k1_profile[i] * k2_profile[j] * gval
    return total


def gaussian_band_entropy(sigma):
    """Differential entropy of a one-dimensional Gaussian law."""
    return 0.5 * np.log(2.0 * np.pi * np.e * sigma**2)


def thermal_weight(omega, temperature):
    """Inertial thermal response weight, continuous through omega = 0."""
    omega = np.asarray(omega, dtype=float)
    beta = 1.0 / temperature
    out = np.where(
        np.abs(beta * omega) < 1e-12,
        temperature / TWO_PI,
        (omega / TWO_PI) / (1.0 - np.exp(-beta * omega)),
    )
    return out
