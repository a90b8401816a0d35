"""Scenario-driven power studies: rejection rates of the spacing-based
test and the EDF references against a chosen alternative.

A scenario draws ``replicates`` samples of each size ``n`` from the
alternative (optionally affine-shifted, e.g. ``1 + LN(0,1)``), runs the
selected tests against the null family, and reports the share of p-values
at or below ``alpha`` per (n, test) cell, with a binomial standard error.
Replicates that end in a test error (ties, constraint violations, failed
fits) are counted in a separate column, never as rejections.

Scenario files are flat ``key = value`` text (``#`` starts a comment)::

    name        = pareto-vs-shifted-lognormal
    null_family = dpareto
    null_params = 1, 1        # omit for a composite (fitted) null
    alt_family  = dlnorm
    alt_params  = 0, 1
    alt_shift   = 1           # sample = alt_shift + alt_scale * draw
    tests       = vs, ks, cvm, ad
    n           = 20, 30, 50, 100
    alpha       = 0.05
    replicates  = 1000
    B           = 500
    seed        = 20260816

Optional keys ``alt_scale`` (default 1), ``delta``, ``extend``, ``relax``
and ``simulate`` tune the spacing test; ``simulate`` is ``auto`` (choose
by sample size, like the test itself), ``true`` (always Monte-Carlo) or
``false`` (always the asymptotic formula) and has no effect on the EDF
tests, whose p-values are always simulated.  EDF tests need a simple
null, so ``null_params`` is required whenever ks/cvm/ad appear in
``tests``.

Reproducibility: every (n, test) cell owns a seed-sequence branch and is
evaluated in fixed chunks of replicates, each replicate drawing its inner
Monte-Carlo seed from the chunk stream right after its sample; results
are therefore bitwise identical for any ``threads`` value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from io import StringIO

import numpy as np

from . import distributions as dist
from .edf import edf_mc_p_value
from .errors import DataError, ParameterError, VsgofError
from .vstest import TestOptions, vs_test

__all__ = [
    "PowerScenario",
    "PowerRow",
    "PowerTable",
    "parse_scenario_file",
    "run_power_study",
]

_OUTER_CHUNK = 50  # replicates per work unit; part of the determinism contract
_TEST_IDS = ("vs", "ks", "cvm", "ad")


@dataclass(frozen=True)
class PowerScenario:
    name: str
    null_family: str
    alt_family: str
    alt_params: tuple[float, ...]
    n_values: tuple[int, ...]
    seed: int
    null_params: tuple[float, ...] | None = None  # None = composite null
    alt_shift: float = 0.0
    alt_scale: float = 1.0
    tests: tuple[str, ...] = ("vs",)
    alpha: float = 0.05
    replicates: int = 1000
    B: int = 500
    delta: float | None = None
    extend: bool = False
    relax: bool = False
    simulate: str = "auto"  # "auto" | "true" | "false" (spacing test only)

    def __post_init__(self):
        if not self.name:
            raise ParameterError("scenario needs a nonempty name")
        dist.resolve_family(self.null_family)
        dist.resolve_family(self.alt_family)
        if not self.tests:
            raise ParameterError("scenario selects no tests")
        for t in self.tests:
            if t not in _TEST_IDS:
                raise ParameterError(
                    f"unknown test {t!r}; choose from: {', '.join(_TEST_IDS)}")
        edf = [t for t in self.tests if t != "vs"]
        if edf and self.null_params is None:
            raise ParameterError(
                f"tests {', '.join(edf)} need a fully specified null: "
                "set null_params")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.replicates < 1:
            raise ParameterError("replicates must be >= 1")
        if self.B < 1:
            raise ParameterError("B must be >= 1")
        if not self.n_values:
            raise ParameterError("scenario lists no sample sizes")
        n_min = 3 if "vs" in self.tests else 2
        for n in self.n_values:
            if n < n_min:
                raise ParameterError(
                    f"sample size {n} is too small (minimum {n_min} for the "
                    "selected tests)")
        if self.alt_scale <= 0.0:
            raise ParameterError("alt_scale must be positive")
        if self.simulate not in ("auto", "true", "false"):
            raise ParameterError(
                f"simulate must be auto, true or false, got {self.simulate!r}")
        if self.extend and self.simulate == "false":
            raise ParameterError(
                "extend=true forces Monte-Carlo p-values and cannot be "
                "combined with simulate=false")


@dataclass(frozen=True)
class PowerRow:
    scenario: str
    n: int
    test: str
    rejections: int
    errors: int
    replicates: int

    @property
    def power_pct(self) -> float:
        return 100.0 * self.rejections / self.replicates

    @property
    def se_pct(self) -> float:
        p = self.rejections / self.replicates
        return 100.0 * math.sqrt(p * (1.0 - p) / self.replicates)


@dataclass(frozen=True)
class PowerTable:
    scenario: PowerScenario
    rows: tuple[PowerRow, ...] = field(default_factory=tuple)

    def row(self, n: int, test: str) -> PowerRow:
        for r in self.rows:
            if r.n == n and r.test == test:
                return r
        raise KeyError(f"no ({n}, {test}) cell in this table")

    def to_text(self) -> str:
        out = StringIO()
        out.write(f"scenario: {self.scenario.name}\n")
        out.write(f"alpha={self.scenario.alpha}  "
                  f"replicates={self.scenario.replicates}  "
                  f"B={self.scenario.B}  seed={self.scenario.seed}\n")
        header = f"{'n':>6}  {'test':<4}  {'power_pct':>9}  {'se_pct':>7}  {'errors':>6}"
        out.write(header + "\n")
        out.write("-" * len(header) + "\n")
        for r in self.rows:
            out.write(f"{r.n:>6}  {r.test:<4}  {r.power_pct:>9.2f}  "
                      f"{r.se_pct:>7.3f}  {r.errors:>6}\n")
        return out.getvalue()

    def to_csv(self) -> str:
        lines = ["scenario,n,test,power_pct,se_pct,errors"]
        for r in self.rows:
            lines.append(f"{r.scenario},{r.n},{r.test},"
                         f"{r.power_pct:.2f},{r.se_pct:.3f},{r.errors}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Scenario file parsing
# ---------------------------------------------------------------------------

_SCALARS = {
    "name": str,
    "null_family": str,
    "alt_family": str,
    "alt_shift": float,
    "alt_scale": float,
    "alpha": float,
    "replicates": int,
    "B": int,
    "seed": int,
    "delta": float,
    "extend": bool,
    "relax": bool,
    "simulate": str,
}
_LISTS = {"null_params": float, "alt_params": float, "tests": str, "n": int}
_REQUIRED = ("name", "null_family", "alt_family", "alt_params", "n", "seed")


def _parse_scalar(kind, raw: str, lineno: int, key: str):
    if kind is bool:
        low = raw.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise DataError(f"line {lineno}: {key} expects true/false, got {raw!r}")
    if kind is str:
        return raw
    try:
        return kind(raw)
    except ValueError:
        raise DataError(
            f"line {lineno}: cannot read {key} value {raw!r} as "
            f"{kind.__name__}") from None


def parse_scenario_file(path) -> PowerScenario:
    """Read one scenario from a flat key=value file (grammar above).

    Raises DataError with a line number for malformed lines or values and
    ParameterError for semantically invalid scenarios.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"cannot read scenario file {path}: {exc}") from None

    found: dict[str, object] = {}
    for lineno, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise DataError(
                f"line {lineno}: expected 'key = value', got {text!r}")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key in found:
            raise DataError(f"line {lineno}: duplicate key {key!r}")
        if key in _SCALARS:
            found[key] = _parse_scalar(_SCALARS[key], raw, lineno, key)
        elif key in _LISTS:
            kind = _LISTS[key]
            items = [s.strip() for s in raw.split(",") if s.strip()]
            if not items:
                raise DataError(f"line {lineno}: {key} lists no values")
            found[key] = tuple(
                _parse_scalar(kind, item, lineno, key) for item in items)
        else:
            known = ", ".join(sorted((*_SCALARS, *_LISTS)))
            raise DataError(
                f"line {lineno}: unknown key {key!r} (known keys: {known})")

    missing = [k for k in _REQUIRED if k not in found]
    if missing:
        raise DataError(
            f"scenario file {path} is missing required keys: "
            f"{', '.join(missing)}")
    if "n" in found:
        found["n_values"] = found.pop("n")
    return PowerScenario(**found)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Study runner
# ---------------------------------------------------------------------------

_SIMULATE_FLAG = {"auto": None, "true": True, "false": False}


def _replicate_p_value(scn: PowerScenario, n: int, test: str, x: np.ndarray,
                       inner_seed: int) -> float:
    if test == "vs":
        report = vs_test(x, scn.null_family, TestOptions(
            delta=scn.delta, extend=scn.extend, relax=scn.relax,
            simulate_p_value=_SIMULATE_FLAG[scn.simulate], B=scn.B,
            fixed_params=scn.null_params, seed=inner_seed))
        return report.p_value
    return edf_mc_p_value(x, scn.null_family, scn.null_params, test,
                          B=scn.B, seed=inner_seed)


def _cell_chunk(scn: PowerScenario, n: int, test: str, count: int,
                seed_seq: np.random.SeedSequence) -> tuple[int, int]:
    """(rejections, errors) over `count` replicates of one (n, test) cell."""
    gen = np.random.default_rng(seed_seq)
    alt = dist.resolve_family(scn.alt_family)
    alt_p = alt.validate_params(scn.alt_params)
    rejections = errors = 0
    for _ in range(count):
        x = scn.alt_shift + scn.alt_scale * alt.sample(alt_p, n, gen)
        inner_seed = int(gen.integers(2 ** 63))
        try:
            p = _replicate_p_value(scn, n, test, x, inner_seed)
        except VsgofError:
            errors += 1
            continue
        if p <= scn.alpha:
            rejections += 1
    return rejections, errors


def run_power_study(scenario: PowerScenario, *, threads: int = 1) -> PowerTable:
    """Estimate rejection rates for every (n, test) cell of the scenario.

    ``threads`` distributes fixed replicate chunks over a thread pool; the
    table is bitwise identical for any value.
    """
    cells = [(n, t) for n in scenario.n_values for t in scenario.tests]
    root = np.random.SeedSequence(scenario.seed)
    cell_seqs = root.spawn(len(cells))

    tasks = []  # (cell_index, chunk_size, seed_seq)
    for idx, seq in enumerate(cell_seqs):
        left = scenario.replicates
        sizes = [_OUTER_CHUNK] * (left // _OUTER_CHUNK)
        if left % _OUTER_CHUNK:
            sizes.append(left % _OUTER_CHUNK)
        for size, child in zip(sizes, seq.spawn(len(sizes))):
            tasks.append((idx, size, child))

    def run(task):
        idx, size, child = task
        n, test = cells[idx]
        return _cell_chunk(scenario, n, test, size, child)

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            outcomes = list(pool.map(run, tasks))
    else:
        outcomes = [run(t) for t in tasks]

    rej = [0] * len(cells)
    err = [0] * len(cells)
    for (idx, _, _), (r, e) in zip(tasks, outcomes):
        rej[idx] += r
        err[idx] += e
    rows = tuple(
        PowerRow(scenario=scenario.name, n=n, test=t, rejections=rej[i],
                 errors=err[i], replicates=scenario.replicates)
        for i, (n, t) in enumerate(cells))
    return PowerTable(scenario=scenario, rows=rows)
