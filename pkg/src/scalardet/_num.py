"""Small numerical utilities: deterministic reductions, quadrature, trigamma.

Everything here is written so that results depend only on the problem size,
never on the number of worker threads: chunk layouts are functions of the
input shape, per-chunk partial results are stored by chunk index and reduced
in a fixed order.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def neumaier_sum(values) -> float:
    """Compensated (Neumaier) sum of an iterable of floats.

    Used for the final fixed-order reduction of per-chunk partials, where a
    plain left fold would make the rounding depend on chunk count choices.
    """
    total = 0.0
    comp = 0.0
    for v in values:
        v = float(v)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def chunk_ranges(n: int, max_chunk: int) -> list[tuple[int, int]]:
    """Split range(n) into contiguous chunks of at most max_chunk elements.

    The layout depends only on (n, max_chunk), so parallel reductions over
    these chunks are reproducible across thread counts.
    """
    if n <= 0:
        return []
    n_chunks = (n + max_chunk - 1) // max_chunk
    edges = np.linspace(0, n, n_chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_chunked(worker, chunks, threads: int = 1) -> list:
    """Evaluate worker(chunk) for every chunk, returning results in chunk order.

    With threads > 1 the chunks are farmed out to a thread pool; results are
    slotted by index so the caller's reduction order never depends on
    completion order.
    """
    if threads <= 1 or len(chunks) <= 1:
        return [worker(c) for c in chunks]
    out = [None] * len(chunks)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(worker, c): i for i, c in enumerate(chunks)}
        for fut, i in futures.items():
            out[i] = fut.result()
    return out


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Composite trapezoid weights for samples at (possibly nonuniform) x."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a 1-d axis with at least two samples")
    w = np.empty_like(x)
    w[0] = 0.5 * (x[1] - x[0])
    w[-1] = 0.5 * (x[-1] - x[-2])
    w[1:-1] = 0.5 * (x[2:] - x[:-2])
    return w


def gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights scaled to [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def panel_nodes(edges, n_per_panel: int):
    """Gauss-Legendre nodes/weights over consecutive panels [e0,e1],[e1,e2],...

    Integrating over [e0, e_last] with these nodes is *exactly* the sum of the
    per-panel integrals, which is what additivity identities are tested
    against.
    """
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(float(a), float(b), n_per_panel)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


# Bernoulli numbers B_2..B_14 for the trigamma asymptotic series.
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


def trigamma(z):
    """Trigamma function psi_1(z) for complex argument with Re(z) > 0.

    Recurrence psi_1(z) = psi_1(z+1) + 1/z^2 shifts the argument to
    Re(z) >= 20, where the standard asymptotic series is accurate to machine
    precision. Vectorized over numpy arrays.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise ValueError("trigamma implemented for Re(z) > 0 only")
    zz = z.copy()
    acc = np.zeros_like(zz)
    mask = zz.real < 20.0
    while np.any(mask):
        acc[mask] += 1.0 / zz[mask] ** 2
        zz[mask] += 1.0
        mask = zz.real < 20.0
    inv = 1.0 / zz
    inv2 = inv * inv
    series = inv + 0.5 * inv2
    p = inv * inv2
    for b2k in _BERNOULLI:
        series = series + b2k * p
        p = p * inv2
    return acc + series
