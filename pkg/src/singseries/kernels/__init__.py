"""Hot kernels with a compiled (Cython) implementation and a pure-Python fallback.

The compiled module is used when it was built; set ``SINGSERIES_KERNELS=python``
to force the fallback. Both expose the same functions:

``sieve_segment(lo, hi, base_primes)``
    primality flags for ``[lo, hi)``.
``is_prime_batch(values)``
    deterministic 64-bit primality for an array.
``pattern_sweep(k, h, start, stop, spf, small_primes, small_local, corr, base)``
    singular series over a range of tuple difference patterns.
``mc_sample(k, seed, start, stop, primes, logtab)``
    samples of the random singular series model.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("SINGSERIES_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

sieve_segment = backend.sieve_segment
is_prime_batch = backend.is_prime_batch
pattern_sweep = backend.pattern_sweep
mc_sample = backend.mc_sample


def available_backends():
    """Name -> module for every backend importable in this process."""
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out
