"""Classical EDF goodness-of-fit tests for fully specified nulls.

Kolmogorov-Smirnov, Cramer-von Mises and Anderson-Darling statistics on
the probability integral transform u_(i) = F0(x_(i)), with Monte-Carlo
p-values under the simple null.  These are the reference tests the power
harness compares the spacing-based test against; composite (estimated
parameter) variants are deliberately not provided.

Monte-Carlo replication follows the same seeded-substream contract as
``vstest``: fixed-size chunks spawned from the seed, so p-values are
bitwise identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from .errors import DataError, ParameterError
from .sample import Sample, as_sample

__all__ = [
    "EdfTestReport",
    "ks_statistic",
    "cvm_statistic",
    "ad_statistic",
    "edf_mc_p_value",
    "edf_test",
]

_CHUNK = 256  # shared determinism contract with the vstest MC engine
_LOG_CLAMP = 1e-15  # keep AD logarithms finite at the PIT boundaries


@dataclass(frozen=True)
class EdfTestReport:
    family_id: str
    n: int
    test_id: str  # "ks" | "cvm" | "ad"
    statistic: float
    p_value: float
    B: int
    seed: int


def _pit_rows(fam, params, X: np.ndarray) -> np.ndarray:
    """Sorted PIT values, one row per sample."""
    U = np.asarray(fam.cdf(params, X), dtype=float)
    U.sort(axis=-1)
    return U


def _ks_rows(U: np.ndarray) -> np.ndarray:
    n = U.shape[-1]
    i = np.arange(1, n + 1, dtype=float)
    d_plus = (i / n - U).max(axis=-1)
    d_minus = (U - (i - 1.0) / n).max(axis=-1)
    return np.maximum(d_plus, d_minus)


def _cvm_rows(U: np.ndarray) -> np.ndarray:
    n = U.shape[-1]
    i = np.arange(1, n + 1, dtype=float)
    return 1.0 / (12.0 * n) + ((U - (2.0 * i - 1.0) / (2.0 * n)) ** 2).sum(axis=-1)


def _ad_rows(U: np.ndarray) -> np.ndarray:
    n = U.shape[-1]
    Uc = np.clip(U, _LOG_CLAMP, 1.0 - _LOG_CLAMP)
    w = 2.0 * np.arange(1, n + 1, dtype=float) - 1.0
    inner = np.log(Uc) + np.log1p(-Uc[..., ::-1])
    return -n - (w * inner).sum(axis=-1) / n


_KERNELS = {"ks": _ks_rows, "cvm": _cvm_rows, "ad": _ad_rows}


def _resolve_test(test_id: str):
    key = str(test_id).strip().lower()
    if key not in _KERNELS:
        raise ParameterError(
            f"unknown EDF test {test_id!r}; choose one of: ks, cvm, ad")
    return key, _KERNELS[key]


def _observed(x, family, params, kernel):
    s = as_sample(x)
    fam = dist.resolve_family(family)
    p = fam.validate_params(params)
    u = _pit_rows(fam, p, s.values[None, :])
    if np.all((u <= 0.0) | (u >= 1.0)):
        raise DataError(
            "the probability integral transform is degenerate (every value "
            "maps to 0 or 1); the fixed null puts no mass where the data lie"
        )
    return float(kernel(u)[0]), s, fam, p


def ks_statistic(x: "Sample | np.ndarray", family: str, params) -> float:
    """Kolmogorov-Smirnov distance max_i max(i/n - u_(i), u_(i) - (i-1)/n)."""
    return _observed(x, family, params, _ks_rows)[0]


def cvm_statistic(x: "Sample | np.ndarray", family: str, params) -> float:
    """Cramer-von Mises statistic 1/(12n) + sum_i (u_(i) - (2i-1)/(2n))^2."""
    return _observed(x, family, params, _cvm_rows)[0]


def ad_statistic(x: "Sample | np.ndarray", family: str, params) -> float:
    """Anderson-Darling statistic
    -n - (1/n) sum_i (2i-1) [log u_(i) + log(1 - u_(n+1-i))]."""
    return _observed(x, family, params, _ad_rows)[0]


def _null_stat_chunk(fam, params, n, size, kernel,
                     seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    X = fam.sample(params, (size, n), rng)
    return kernel(_pit_rows(fam, params, X))


def edf_mc_p_value(x: "Sample | np.ndarray", family: str, params,
                   test_id: str, *, B: int = 5000, seed: int | None = None,
                   threads: int = 1) -> float:
    """Monte-Carlo p-value under the simple null: the share of B null
    replicates whose statistic reaches the observed one (ties count as
    extreme, so p is never 0)."""
    key, kernel = _resolve_test(test_id)
    if not (isinstance(B, (int, np.integer)) and B >= 1):
        raise ParameterError(f"B must be a positive integer, got {B!r}")
    if seed is None:
        raise ParameterError(
            "Monte-Carlo p-values need a seed for reproducibility; "
            "none was given")
    observed, s, fam, p = _observed(x, family, params, kernel)

    sizes = [_CHUNK] * (int(B) // _CHUNK)
    if int(B) % _CHUNK:
        sizes.append(int(B) % _CHUNK)
    children = np.random.SeedSequence(int(seed)).spawn(len(sizes))

    def run(task):
        size, child = task
        return _null_stat_chunk(fam, p, s.n, size, kernel, child)

    tasks = list(zip(sizes, children))
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            stats = list(pool.map(run, tasks))
    else:
        stats = [run(t) for t in tasks]
    null_stats = np.concatenate(stats)
    return float((null_stats >= observed).sum() / int(B))


def edf_test(x: "Sample | np.ndarray", family: str, params, test_id: str, *,
             B: int = 5000, seed: int | None = None,
             threads: int = 1) -> EdfTestReport:
    """Run one EDF test of a fully specified null against the sample."""
    key, kernel = _resolve_test(test_id)
    observed, s, fam, p = _observed(x, family, params, kernel)
    p_value = edf_mc_p_value(s, fam.family_id, p, key, B=B, seed=seed,
                             threads=threads)
    return EdfTestReport(family_id=fam.family_id, n=s.n, test_id=key,
                         statistic=observed, p_value=p_value, B=int(B),
                         seed=int(seed))
