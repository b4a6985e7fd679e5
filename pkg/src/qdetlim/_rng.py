"""Reproducible Monte Carlo plumbing: block-keyed counter-based streams.

Trials are partitioned into fixed-size blocks.  Each block gets its own
Philox generator keyed by (seed, stream tag, block index), and every trial
inside a block consumes a fixed-shape slice of that block's draws, so the
results depend only on (seed, tag, trial index) - never on chunking or on
how many worker threads executed the blocks.
"""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ValidationError

BLOCK_TRIALS = 4096
THREADS_ENV = "QDETLIM_THREADS"


def stream_tag(name: str) -> int:
    """Stable 32-bit tag for a named stream."""
    return zlib.crc32(name.encode("utf-8"))


def block_generator(seed: int, tag: int, block_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=(int(seed), int(tag), int(block_index)))
    return np.random.Generator(np.random.Philox(ss))


def check_seed(seed) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or seed < 0:
        raise ValidationError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def resolve_threads() -> int:
    """Worker-thread cap from QDETLIM_THREADS (0 or unset means auto)."""
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        requested = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if requested < 0:
        raise ValidationError(f"{THREADS_ENV} must be >= 0, got {requested}")
    if requested == 0:
        return min(4, os.cpu_count() or 1)
    return requested


def run_blocks(n_trials: int, seed: int, tag_name: str, worker) -> None:
    """Run ``worker(start, stop, rng)`` over every trial block.

    The worker must write its results into caller-owned arrays at
    [start:stop]; block outputs are independent, so scheduling order cannot
    affect the result.
    """
    seed = check_seed(seed)
    tag = stream_tag(tag_name)
    blocks = [
        (start, min(start + BLOCK_TRIALS, n_trials), start // BLOCK_TRIALS)
        for start in range(0, n_trials, BLOCK_TRIALS)
    ]
    threads = min(resolve_threads(), len(blocks))
    if threads <= 1:
        for start, stop, idx in blocks:
            worker(start, stop, block_generator(seed, tag, idx))
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(worker, start, stop, block_generator(seed, tag, idx))
            for start, stop, idx in blocks
        ]
        for fut in futures:
            fut.result()


def gaussian_spectrum_coeffs(psd_natural, duration: float, rng: np.random.Generator, trials: int) -> np.ndarray:
    """Draw frequency coefficients of real stationary Gaussian paths.

    ``psd_natural`` holds S(omega_k) >= 0 in raw DFT order.  Returns a
    (trials, n) complex array c with conjugate symmetry c[-k] = conj(c[k])
    and E|c_k|^2 = T S(omega_k), i.e. the coefficients of
    x(t_j) = (1/T) sum_k c_k exp(-i omega_k t_j) for a real x whose circulant
    covariance has eigenvalues S(omega_k)/dt.  Consumption is a fixed
    2*n normals per trial regardless of the PSD.
    """
    s = np.asarray(psd_natural, dtype=float)
    n = s.size
    amp = np.sqrt(duration * s)
    z = rng.standard_normal((trials, n))
    w = rng.standard_normal((trials, n))
    c = np.empty((trials, n), dtype=complex)

    self_paired = [0] + ([n // 2] if n % 2 == 0 else [])
    for k in self_paired:
        c[:, k] = amp[k] * z[:, k]
    half = np.arange(1, (n + 1) // 2)
    c[:, half] = (amp[half] / np.sqrt(2.0)) * (z[:, half] + 1j * w[:, half])
    c[:, n - half] = np.conj(c[:, half])
    return c


def coeffs_to_paths(coeffs: np.ndarray, duration: float) -> np.ndarray:
    """Time-domain sample paths from conjugate-symmetric coefficients."""
    return np.fft.fft(coeffs, axis=-1).real / duration
