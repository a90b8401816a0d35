"""The ten supported null families.

Each family provides, under a common interface: parameter validation,
log-density, CDF, quantile (generalized inverse), exact sampling, and
maximum-likelihood fitting.  Families with textbook closed-form MLEs use
them; gamma, weibull, beta and fisher solve their score equations
numerically (profile Newton for the 1-D cases, damped Newton for the 2-D
ones) to a gradient norm of 1e-8 or better.

Families are addressed either by id ("normal") or by the d-prefixed call
name ("dnorm").  Parameter conventions:

==========  =======================  ==========================
family      call                     parameters (in order)
==========  =======================  ==========================
uniform     dunif                    Min a, Max b (a < b)
normal      dnorm                    Mean, St. dev.
lognormal   dlnorm                   Location, Scale (of log x)
exponential dexp                     Rate
gamma       dgamma                   Shape, Rate
weibull     dweibull                 Shape, Scale
pareto      dpareto                  mu (shape), c (scale/min)
fisher      df                       df1, df2
laplace     dlaplace                 Location, Scale
beta        dbeta                    Shape1, Shape2
==========  =======================  ==========================

Sampling draws from a caller-supplied ``numpy.random.Generator``; the five
families whose quantile has an elementary form (uniform, exponential,
pareto, laplace, weibull) sample by inverse CDF, normal/lognormal transform
standard normals, and gamma/beta/fisher use the generator's native
rejection/ratio samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _scipy_special

from . import special
from .errors import CapabilityError, DataError, EstimationError, ParameterError
from .sample import Sample, as_sample

__all__ = [
    "FitResult",
    "family_ids",
    "resolve_family",
    "validate_params",
    "log_density",
    "cdf",
    "quantile",
    "sample",
    "fit_mle",
    "fit_rows",
    "mean_loglik_rows",
    "closed_form_entropy",
    "default_delta",
    "param_labels",
    "call_name",
]

_LOG_2PI = math.log(2.0 * math.pi)
_TINY = np.finfo(float).tiny

_log_gamma_vec = np.vectorize(special.log_gamma, otypes=[float])
_phi_vec = np.vectorize(special.std_normal_cdf, otypes=[float])
_phi_inv_vec = np.vectorize(special.std_normal_quantile, otypes=[float])


def _lgamma(a):
    """log Gamma for scalars or arrays (scalar path avoids vectorize cost)."""
    if np.ndim(a) == 0:
        return special.log_gamma(float(a))
    return _log_gamma_vec(a)


def _lbeta(a, b):
    return _lgamma(a) + _lgamma(b) - _lgamma(np.asarray(a) + np.asarray(b))


@dataclass(frozen=True)
class FitResult:
    """Parameters attached to a test: fitted or user-fixed."""

    family_id: str
    params: np.ndarray
    provenance: str  # "mle" or "user_fixed"

    def labelled(self) -> dict[str, float]:
        fam = resolve_family(self.family_id)
        return {name: float(v) for name, v in zip(fam.param_names, self.params)}


class _Family:
    family_id: str = ""
    call: str = ""
    param_names: tuple[str, ...] = ()
    default_delta: float = 1.0 / 12.0
    # human description of the support, used in error messages
    support_text: str = "the real line"

    # -- validation ---------------------------------------------------------
    def validate_params(self, params) -> np.ndarray:
        p = np.atleast_1d(np.asarray(params, dtype=float))
        if p.shape != (len(self.param_names),):
            raise ParameterError(
                f"{self.family_id} expects {len(self.param_names)} parameter(s) "
                f"({', '.join(self.param_names)}), got {p.shape[0]}"
            )
        if not np.all(np.isfinite(p)):
            raise ParameterError(f"{self.family_id} parameters must be finite, got {p.tolist()}")
        self._check_params(p)
        return p

    def _check_params(self, p: np.ndarray) -> None:
        raise NotImplementedError

    def validate_fit_data(self, x: np.ndarray) -> None:
        """Support precondition for fitting (independent of parameter values)."""
        return None

    # -- core quantities ----------------------------------------------------
    def log_density(self, params, x):
        raise NotImplementedError

    def cdf(self, params, x):
        raise NotImplementedError

    def quantile(self, params, q):
        raise NotImplementedError

    def sample(self, params, size, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def fit(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def closed_form_entropy(self, params) -> float:
        raise CapabilityError(
            f"no closed-form entropy is implemented for the {self.family_id} family"
        )

    # -- batch helpers (Monte-Carlo engine) ---------------------------------
    def fit_rows(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Row-wise MLE for a (B, n) matrix; returns (params (B,k), ok (B,))."""
        B = X.shape[0]
        P = np.full((B, len(self.param_names)), np.nan)
        ok = np.zeros(B, dtype=bool)
        for i in range(B):
            try:
                P[i] = self.fit(X[i])
                ok[i] = True
            except (EstimationError, DataError):
                ok[i] = False
        return P, ok

    def _cols(self, P: np.ndarray):
        return tuple(P[:, j:j + 1] for j in range(P.shape[1]))

    def mean_loglik_rows(self, X: np.ndarray, P: np.ndarray) -> np.ndarray:
        """Mean log-density of each row of X under the matching row of P."""
        return self.log_density(self._cols(P), X).mean(axis=1)


def _positive(u: np.ndarray) -> np.ndarray:
    # keep inverse-CDF draws strictly inside (0, 1): Generator.random() is
    # [0, 1), only the zero endpoint needs nudging
    return np.maximum(u, _TINY)


class _Uniform(_Family):
    family_id = "uniform"
    call = "dunif"
    param_names = ("Min", "Max")
    default_delta = 1.0 / 12.0
    support_text = "the interval [Min, Max]"

    def _check_params(self, p):
        if not p[0] < p[1]:
            raise ParameterError(f"uniform requires Min < Max, got {p.tolist()}")

    def log_density(self, params, x):
        a, b = params[0], params[1]
        x = np.asarray(x, dtype=float)
        inside = (x >= a) & (x <= b)
        return np.where(inside, -np.log(np.asarray(b) - np.asarray(a)), -np.inf)

    def cdf(self, params, x):
        a, b = params[0], params[1]
        x = np.asarray(x, dtype=float)
        return np.clip((x - a) / (np.asarray(b) - np.asarray(a)), 0.0, 1.0)

    def quantile(self, params, q):
        a, b = params[0], params[1]
        q = np.asarray(q, dtype=float)
        return a + (b - a) * q

    def sample(self, params, size, rng):
        a, b = float(params[0]), float(params[1])
        return a + (b - a) * rng.random(size)

    def fit(self, x):
        lo, hi = float(np.min(x)), float(np.max(x))
        if not lo < hi:
            raise EstimationError("uniform MLE degenerate: all observations equal")
        return np.array([lo, hi])

    def fit_rows(self, X):
        lo = X.min(axis=1)
        hi = X.max(axis=1)
        return np.column_stack([lo, hi]), hi > lo

    def closed_form_entropy(self, params) -> float:
        return math.log(float(params[1]) - float(params[0]))


class _Normal(_Family):
    family_id = "normal"
    call = "dnorm"
    param_names = ("Mean", "St. dev.")
    default_delta = 1.0 / 12.0

    def _check_params(self, p):
        if not p[1] > 0:
            raise ParameterError(f"normal requires St. dev. > 0, got {p[1]}")

    def log_density(self, params, x):
        mu, sd = params[0], params[1]
        x = np.asarray(x, dtype=float)
        z = (x - mu) / sd
        return -np.log(np.asarray(sd)) - 0.5 * _LOG_2PI - 0.5 * z * z

    def cdf(self, params, x):
        mu, sd = params[0], params[1]
        return _phi_vec((np.asarray(x, dtype=float) - mu) / sd)

    def quantile(self, params, q):
        mu, sd = params[0], params[1]
        return mu + sd * _phi_inv_vec(np.asarray(q, dtype=float))

    def sample(self, params, size, rng):
        mu, sd = float(params[0]), float(params[1])
        return mu + sd * rng.standard_normal(size)

    def fit(self, x):
        mu = float(np.mean(x))
        sd = math.sqrt(float(np.mean((x - mu) ** 2)))
        if sd <= 0.0:
            raise EstimationError("normal MLE degenerate: zero variance")
        return np.array([mu, sd])

    def fit_rows(self, X):
        mu = X.mean(axis=1)
        sd = np.sqrt(((X - mu[:, None]) ** 2).mean(axis=1))
        return np.column_stack([mu, sd]), sd > 0

    def closed_form_entropy(self, params) -> float:
        # log(sigma * sqrt(2 pi e))
        return math.log(float(params[1])) + 0.5 * (_LOG_2PI + 1.0)


class _LogNormal(_Family):
    family_id = "lognormal"
    call = "dlnorm"
    param_names = ("Location", "Scale")
    default_delta = 1.0 / 12.0
    support_text = "positive reals"

    def _check_params(self, p):
        if not p[1] > 0:
            raise ParameterError(f"lognormal requires Scale > 0, got {p[1]}")

    def validate_fit_data(self, x):
        _require_all_positive(self.family_id, x)

    def log_density(self, params, x):
        mu, sd = params[0], params[1]
        x = np.asarray(x, dtype=float)
        pos = x > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(np.where(pos, x, 1.0))
            z = (lx - mu) / sd
            out = -lx - np.log(np.asarray(sd)) - 0.5 * _LOG_2PI - 0.5 * z * z
        return np.where(pos, out, -np.inf)

    def cdf(self, params, x):
        mu, sd = params[0], params[1]
        x = np.asarray(x, dtype=float)
        pos = x > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.where(pos, x, 1.0)) - mu) / sd
        return np.where(pos, _phi_vec(z), 0.0)

    def quantile(self, params, q):
        mu, sd = params[0], params[1]
        return np.exp(mu + sd * _phi_inv_vec(np.asarray(q, dtype=float)))

    def sample(self, params, size, rng):
        mu, sd = float(params[0]), float(params[1])
        return np.exp(mu + sd * rng.standard_normal(size))

    def fit(self, x):
        lx = np.log(x)
        mu = float(np.mean(lx))
        sd = math.sqrt(float(np.mean((lx - mu) ** 2)))
        if sd <= 0.0:
            raise EstimationError("lognormal MLE degenerate: zero variance of log data")
        return np.array([mu, sd])

    def fit_rows(self, X):
        L = np.log(X)
        mu = L.mean(axis=1)
        sd = np.sqrt(((L - mu[:, None]) ** 2).mean(axis=1))
        return np.column_stack([mu, sd]), sd > 0


class _Exponential(_Family):
    family_id = "exponential"
    call = "dexp"
    param_names = ("Rate",)
    default_delta = 1.0 / 12.0
    support_text = "non-negative reals"

    def _check_params(self, p):
        if not p[0] > 0:
            raise ParameterError(f"exponential requires Rate > 0, got {p[0]}")

    def validate_fit_data(self, x):
        _require_all_positive(self.family_id, x)

    def log_density(self, params, x):
        lam = params[0]
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, np.log(np.asarray(lam)) - lam * x, -np.inf)

    def cdf(self, params, x):
        lam = params[0]
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, -np.expm1(-lam * np.maximum(x, 0.0)), 0.0)

    def quantile(self, params, q):
        lam = params[0]
        q = np.asarray(q, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log1p(-q) / lam

    def sample(self, params, size, rng):
        return self.quantile(params, _positive(rng.random(size)))

    def fit(self, x):
        return np.array([1.0 / float(np.mean(x))])

    def fit_rows(self, X):
        mean = X.mean(axis=1)
        ok = mean > 0
        with np.errstate(divide="ignore"):
            lam = np.where(ok, 1.0 / mean, np.nan)
        return lam[:, None], ok


class _Gamma(_Family):
    family_id = "gamma"
    call = "dgamma"
    param_names = ("Shape", "Rate")
    default_delta = 1.0 / 12.0
    support_text = "positive reals"

    def _check_params(self, p):
        if not (p[0] > 0 and p[1] > 0):
            raise ParameterError(f"gamma requires Shape > 0 and Rate > 0, got {p.tolist()}")

    def validate_fit_data(self, x):
        _require_all_positive(self.family_id, x)

    def log_density(self, params, x):
        a, rate = params[0], params[1]
        x = np.asarray(x, dtype=float)
        pos = x > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(np.where(pos, x, 1.0))
            out = a * np.log(np.asarray(rate)) - _lgamma(a) + (a - 1.0) * lx - rate * x
        return np.where(pos, out, -np.inf)

    def cdf(self, params, x):
        a, rate = params[0], params[1]
        x = np.asarray(x, dtype=float)
        return _scipy_special.gammainc(a, rate * np.maximum(x, 0.0))

    def quantile(self, params, q):
        a, rate = params[0], params[1]
        return _scipy_special.gammaincinv(a, np.asarray(q, dtype=float)) / rate

    def sample(self, params, size, rng):
        a, rate = float(params[0]), float(params[1])
        return rng.standard_gamma(a, size) / rate

    def fit(self, x):
        # Profile likelihood: rate = shape / mean(x); Newton in the shape on
        #   log(shape) - psi(shape) = log(mean x) - mean(log x)
        mean = float(np.mean(x))
        s = math.log(mean) - float(np.mean(np.log(x)))
        if not s > 0.0:
            raise EstimationError("gamma MLE degenerate: data have no spread")
        a = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
        for _ in range(100):
            f = math.log(a) - special.digamma(a) - s
            if abs(f) < 1e-13:
                break
            fp = 1.0 / a - special._trigamma(a)  # negative: f is decreasing
            step = f / fp
            new = a - step
            while new <= 0.0:
                step *= 0.5
                new = a - step
            a = new
        else:
            raise EstimationError(f"gamma MLE did not converge (last residual {f:.2e})")
        return np.array([a, a / mean])


class _Weibull(_Family):
    family_id = "weibull"
    call = "dweibull"
    param_names = ("Shape", "Scale")
    default_delta = 2.0 / 15.0
    support_text = "positive reals"

    def _check_params(self, p):
        if not (p[0] > 0 and p[1] > 0):
            raise ParameterError(f"weibull requires Shape > 0 and Scale > 0, got {p.tolist()}")

    def validate_fit_data(self, x):
        _require_all_positive(self.family_id, x)

    def log_density(self, params, x):
        a, b = params[0], params[1]
        x = np.asarray(x, dtype=float)
        pos = x > 0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lx = np.log(np.where(pos, x, 1.0))
            lb = np.log(np.asarray(b))
            out = np.log(np.asarray(a)) - a * lb + (a - 1.0) * lx - np.exp(a * (lx - lb))
        return np.where(pos, out, -np.inf)

    def cdf(self, params, x):
        a, b = params[0], params[1]
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, 0.0) / b
        return np.where(x >= 0, -np.expm1(-(z ** a)), 0.0)

    def quantile(self, params, q):
        a, b = params[0], params[1]
        q = np.asarray(q, dtype=float)
        with np.errstate(divide="ignore"):
            return b * (-np.log1p(-q)) ** (1.0 / a)

    def sample(self, params, size, rng):
        return self.quantile(params, _positive(rng.random(size)))

    def fit(self, x):
        # Profile on the shape: scale(a) = (mean x^a)^(1/a); the profile score
        #   g(a) = sum(x^a log x)/sum(x^a) - 1/a - mean(log x)
        # is increasing in a. Weights are normalized by max(log x) to avoid
        # overflow for large trial shapes.
        u = np.log(np.asarray(x, dtype=float))
        ubar = float(u.mean())
        spread = float(u.std())
        if spread <= 0.0:
            raise EstimationError("weibull MLE degenerate: data have no spread")
        umax = float(u.max())
        a = math.pi / math.sqrt(6.0) / spread  # Gumbel moment initializer

        def score_and_slope(a_try: float) -> tuple[float, float]:
            w = np.exp(a_try * (u - umax))
            sw = float(w.sum())
            r = float((w * u).sum()) / sw
            var_w = float((w * (u - r) ** 2).sum()) / sw
            g = r - 1.0 / a_try - ubar
            return g, var_w + 1.0 / (a_try * a_try)

        for _ in range(100):
            g, gp = score_and_slope(a)
            if abs(g) < 1e-13 * max(1.0, abs(ubar)):
                break
            step = g / gp
            new = a - step
            while new <= 0.0:
                step *= 0.5
                new = a - step
            a = new
        else:
            raise EstimationError(f"weibull MLE did not converge (last residual {g:.2e})")
        b = math.exp(umax + math.log(float(np.mean(np.exp(a * (u - umax))))) / a)
        return np.array([a, b])


class _Pareto(_Family):
    family_id = "pareto"
    call = "dpareto"
    param_names = ("mu", "c")
    default_delta = 1.0 / 12.0
    support_text = "reals >= c"

    def _check_params(self, p):
        if not (p[0] > 0 and p[1] > 0):
            raise ParameterError(f"pareto requires mu > 0 and c > 0, got {p.tolist()}")

    def validate_fit_data(self, x):
        _require_all_positive(self.family_id, x)

    def log_density(self, params, x):
        mu, c = params[0], params[1]
        x = np.asarray(x, dtype=float)
        inside = x >= c
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(np.where(x > 0, x, 1.0))
            out = np.log(np.asarray(mu)) + mu * np.log(np.asarray(c)) - (mu + 1.0) * lx
        return np.where(inside, out, -np.inf)

    def cdf(self, params, x):
        mu, c = params[0], params[1]
        x = np.asarray(x, dtype=float)
        inside = x >= c
        with np.errstate(divide="ignore", invalid="ignore"):
            t = mu * (np.log(np.asarray(c)) - np.log(np.where(x > 0, x, 1.0)))
        return np.where(inside, -np.expm1(t), 0.0)

    def quantile(self, params, q):
        mu, c = params[0], params[1]
        q = np.asarray(q, dtype=float)
        with np.errstate(divide="ignore"):
            return c * (1.0 - q) ** (-1.0 / mu)

    def sample(self, params, size, rng):
        return self.quantile(params, rng.random(size))

    def fit(self, x):
        c = float(np.min(x))
        t = float(np.mean(np.log(x))) - math.log(c)
        if not t > 0.0:
            raise EstimationError("pareto MLE degenerate: all observations equal")
        return np.array([1.0 / t, c])

    def fit_rows(self, X):
        c = X.min(axis=1)
        t = np.log(X).mean(axis=1) - np.log(c)
        ok = t > 0
        with np.errstate(divide="ignore"):
            mu = np.where(ok, 1.0 / t, np.nan)
        return np.column_stack([mu, c]), ok

    def closed_form_entropy(self, params) -> float:
        mu, c = float(params[0]), float(params[1])
        return -math.log(mu) + math.log(c) + 1.0 / mu + 1.0


class _Fisher(_Family):
    family_id = "fisher"
    call = "df"
    param_names = ("df1", "df2")
    default_delta = 2.0 / 15.0
    support_text = "positive reals"

    def _check_params(self, p):
        if not (p[0] > 0 and p[1] > 0):
            raise ParameterError(f"fisher requires df1 > 0 and df2 > 0, got {p.tolist()}")

    def validate_fit_data(self, x):
        _require_all_positive(self.family_id, x)

    def log_density(self, params, x):
        d1, d2 = params[0], params[1]
        x = np.asarray(x, dtype=float)
        pos = x > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(np.where(pos, x, 1.0))
            half1 = 0.5 * np.asarray(d1, dtype=float)
            half2 = 0.5 * np.asarray(d2, dtype=float)
            out = (half1 * (np.log(np.asarray(d1)) + lx)
                   + half2 * np.log(np.asarray(d2))
                   - (half1 + half2) * np.log(d1 * x + d2)
                   - lx - _lbeta(half1, half2))
        return np.where(pos, out, -np.inf)

    def cdf(self, params, x):
        d1, d2 = params[0], params[1]
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        w = d1 * xp / (d1 * xp + d2)
        return _scipy_special.betainc(0.5 * np.asarray(d1), 0.5 * np.asarray(d2), w)

    def quantile(self, params, q):
        d1, d2 = params[0], params[1]
        y = _scipy_special.betaincinv(0.5 * np.asarray(d1), 0.5 * np.asarray(d2),
                                      np.asarray(q, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            return d2 * y / (d1 * (1.0 - y))

    def sample(self, params, size, rng):
        d1, d2 = float(params[0]), float(params[1])
        return rng.f(d1, d2, size)

    def _mean_score(self, d1: float, d2: float, x: np.ndarray,
                    mlx: float) -> np.ndarray:
        denom = d1 * x + d2
        mld = float(np.mean(np.log(denom)))
        mxd = float(np.mean(x / denom))
        mid = float(np.mean(1.0 / denom))
        half_sum = 0.5 * (d1 + d2)
        psi_sum = special.digamma(half_sum)
        s1 = 0.5 * (math.log(d1) + 1.0 + mlx) - 0.5 * mld - half_sum * mxd \
            - 0.5 * (special.digamma(0.5 * d1) - psi_sum)
        s2 = 0.5 * (math.log(d2) + 1.0) - 0.5 * mld - half_sum * mid \
            - 0.5 * (special.digamma(0.5 * d2) - psi_sum)
        return np.array([s1, s2])

    def fit(self, x):
        x = np.asarray(x, dtype=float)
        mlx = float(np.mean(np.log(x)))
        m = float(np.mean(x))
        d2 = 2.0 * m / (m - 1.0) if m > 1.1 else 4.0
        d2 = min(max(d2, 0.5), 500.0)

        def mean_ll(d1_, d2_):
            return float(np.mean(self.log_density(np.array([d1_, d2_]), x)))

        best = None
        for d1_try in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0):
            for d2_try in (d2, 2.0 * d2, 4.0):
                ll = mean_ll(d1_try, d2_try)
                if best is None or ll > best[0]:
                    best = (ll, d1_try, d2_try)
        _, d1, d2 = best

        # damped Newton on eta = (log df1, log df2); Jacobian of the mean
        # score by central differences of the analytic score
        eta = np.log([d1, d2])
        s = self._mean_score(*np.exp(eta), x, mlx)
        for _ in range(300):
            if float(np.linalg.norm(s)) <= 1e-9:
                break
            J = np.empty((2, 2))
            h = 1e-6
            for j in range(2):
                ep = eta.copy(); ep[j] += h
                em = eta.copy(); em[j] -= h
                J[:, j] = (self._mean_score(*np.exp(ep), x, mlx)
                           - self._mean_score(*np.exp(em), x, mlx)) / (2.0 * h)
            try:
                step = np.linalg.solve(J, -s)
            except np.linalg.LinAlgError:
                step = s  # fall back to a gradient direction
            norm0 = float(np.linalg.norm(s))
            lam = 1.0
            for _damp in range(40):
                trial = eta + lam * step
                if np.all(np.abs(trial) < 30.0):
                    s_try = self._mean_score(*np.exp(trial), x, mlx)
                    if float(np.linalg.norm(s_try)) < norm0:
                        eta, s = trial, s_try
                        break
                lam *= 0.5
            else:
                raise EstimationError(
                    f"fisher MLE stalled (gradient norm {norm0:.2e})")
        else:
            raise EstimationError(
                f"fisher MLE did not converge (gradient norm {float(np.linalg.norm(s)):.2e})")
        return np.exp(eta)


class _Laplace(_Family):
    family_id = "laplace"
    call = "dlaplace"
    param_names = ("Location", "Scale")
    default_delta = 1.0 / 12.0

    def _check_params(self, p):
        if not p[1] > 0:
            raise ParameterError(f"laplace requires Scale > 0, got {p[1]}")

    def log_density(self, params, x):
        mu, sc = params[0], params[1]
        x = np.asarray(x, dtype=float)
        return -np.log(2.0 * np.asarray(sc)) - np.abs(x - mu) / sc

    def cdf(self, params, x):
        mu, sc = params[0], params[1]
        x = np.asarray(x, dtype=float)
        z = (x - mu) / sc
        return np.where(z < 0, 0.5 * np.exp(z), 1.0 - 0.5 * np.exp(-z))

    def quantile(self, params, q):
        mu, sc = params[0], params[1]
        q = np.asarray(q, dtype=float)
        with np.errstate(divide="ignore"):
            lower = mu + sc * np.log(2.0 * q)
            upper = mu - sc * np.log(2.0 * (1.0 - q))
        return np.where(q < 0.5, lower, upper)

    def sample(self, params, size, rng):
        return self.quantile(params, _positive(rng.random(size)))

    def fit(self, x):
        mu = float(np.median(x))
        sc = float(np.mean(np.abs(x - mu)))
        if sc <= 0.0:
            raise EstimationError("laplace MLE degenerate: zero dispersion")
        return np.array([mu, sc])

    def fit_rows(self, X):
        mu = np.median(X, axis=1)
        sc = np.abs(X - mu[:, None]).mean(axis=1)
        return np.column_stack([mu, sc]), sc > 0


class _Beta(_Family):
    family_id = "beta"
    call = "dbeta"
    param_names = ("Shape1", "Shape2")
    default_delta = 2.0 / 15.0
    support_text = "the open interval (0, 1)"

    def _check_params(self, p):
        if not (p[0] > 0 and p[1] > 0):
            raise ParameterError(f"beta requires Shape1 > 0 and Shape2 > 0, got {p.tolist()}")

    def validate_fit_data(self, x):
        bad = np.flatnonzero((x <= 0.0) | (x >= 1.0))
        if bad.size:
            raise DataError(
                f"beta requires observations strictly inside (0, 1); "
                f"violations at positions {bad.tolist()[:10]}"
            )

    def log_density(self, params, x):
        a, b = params[0], params[1]
        x = np.asarray(x, dtype=float)
        inside = (x > 0.0) & (x < 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = np.where(inside, x, 0.5)
            out = (a - 1.0) * np.log(xs) + (b - 1.0) * np.log1p(-xs) - _lbeta(a, b)
        return np.where(inside, out, -np.inf)

    def cdf(self, params, x):
        a, b = params[0], params[1]
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return _scipy_special.betainc(a, b, x)

    def quantile(self, params, q):
        a, b = params[0], params[1]
        return _scipy_special.betaincinv(a, b, np.asarray(q, dtype=float))

    def sample(self, params, size, rng):
        a, b = float(params[0]), float(params[1])
        return rng.beta(a, b, size)

    def fit(self, x):
        x = np.asarray(x, dtype=float)
        mlx = float(np.mean(np.log(x)))
        ml1x = float(np.mean(np.log1p(-x)))
        m = float(np.mean(x))
        v = float(np.var(x))
        if v <= 0.0:
            raise EstimationError("beta MLE degenerate: data have no spread")
        common = m * (1.0 - m) / v - 1.0
        if common <= 0.0:
            a, b = 1.0, 1.0
        else:
            a, b = m * common, (1.0 - m) * common

        def score(a_, b_):
            psi_ab = special.digamma(a_ + b_)
            return np.array([psi_ab - special.digamma(a_) + mlx,
                             psi_ab - special.digamma(b_) + ml1x])

        s = score(a, b)
        for _ in range(200):
            if float(np.linalg.norm(s)) <= 1e-10:
                break
            tg_ab = special._trigamma(a + b)
            H = np.array([[tg_ab - special._trigamma(a), tg_ab],
                          [tg_ab, tg_ab - special._trigamma(b)]])
            step = np.linalg.solve(H, -s)
            norm0 = float(np.linalg.norm(s))
            lam = 1.0
            for _damp in range(40):
                a_try, b_try = a + lam * step[0], b + lam * step[1]
                if a_try > 0 and b_try > 0:
                    s_try = score(a_try, b_try)
                    if float(np.linalg.norm(s_try)) < norm0:
                        a, b, s = a_try, b_try, s_try
                        break
                lam *= 0.5
            else:
                raise EstimationError(f"beta MLE stalled (gradient norm {norm0:.2e})")
        else:
            raise EstimationError(
                f"beta MLE did not converge (gradient norm {float(np.linalg.norm(s)):.2e})")
        return np.array([a, b])


def _require_all_positive(family_id: str, x: np.ndarray) -> None:
    bad = np.flatnonzero(np.asarray(x) <= 0.0)
    if bad.size:
        raise DataError(
            f"{family_id} requires strictly positive observations; "
            f"violations at positions {bad.tolist()[:10]}"
        )


_FAMILIES: dict[str, _Family] = {}
_BY_CALL: dict[str, _Family] = {}
for _cls in (_Uniform, _Normal, _LogNormal, _Exponential, _Gamma,
             _Weibull, _Pareto, _Fisher, _Laplace, _Beta):
    _inst = _cls()
    _FAMILIES[_inst.family_id] = _inst
    _BY_CALL[_inst.call] = _inst


def family_ids() -> tuple[str, ...]:
    """All supported family ids, in registry order."""
    return tuple(_FAMILIES)


def resolve_family(name: str) -> _Family:
    """Look a family up by id ('normal') or call name ('dnorm')."""
    key = str(name).strip().lower()
    fam = _FAMILIES.get(key) or _BY_CALL.get(key)
    if fam is None:
        known = ", ".join(f"{f.family_id}/{f.call}" for f in _FAMILIES.values())
        raise ParameterError(f"unknown family {name!r}; known families: {known}")
    return fam


def validate_params(family: str, params) -> np.ndarray:
    return resolve_family(family).validate_params(params)


def log_density(family: str, params, x):
    """Log density; -inf outside the support.  Broadcasts params against x."""
    fam = resolve_family(family)
    return fam.log_density(fam.validate_params(params), x)


def cdf(family: str, params, x):
    fam = resolve_family(family)
    return fam.cdf(fam.validate_params(params), x)


def quantile(family: str, params, q):
    """Generalized inverse CDF; q must lie in [0, 1]."""
    fam = resolve_family(family)
    p = fam.validate_params(params)
    qa = np.asarray(q, dtype=float)
    if np.any(np.isnan(qa)) or np.any((qa < 0.0) | (qa > 1.0)):
        raise ParameterError("quantile levels must lie in [0, 1]")
    return fam.quantile(p, qa)


def sample(family: str, params, size, rng: np.random.Generator) -> np.ndarray:
    """Draw variates; deterministic given the generator state."""
    fam = resolve_family(family)
    return fam.sample(fam.validate_params(params), size, rng)


def fit_mle(family: str, x: "Sample | np.ndarray") -> FitResult:
    """Maximum-likelihood fit.

    Raises DataError when observations violate the family's support and
    EstimationError when the data are degenerate or a numerical solver
    fails to converge.
    """
    fam = resolve_family(family)
    s = as_sample(x)
    fam.validate_fit_data(s.values)
    params = fam.fit(s.values)
    return FitResult(family_id=fam.family_id, params=params, provenance="mle")


def fit_rows(family: str, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise MLE over a (B, n) matrix (Monte-Carlo internals)."""
    return resolve_family(family).fit_rows(np.asarray(X, dtype=float))


def mean_loglik_rows(family: str, X: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Per-row mean log-likelihood for row-wise parameters (MC internals)."""
    return resolve_family(family).mean_loglik_rows(np.asarray(X, dtype=float),
                                                   np.asarray(P, dtype=float))


def closed_form_entropy(family: str, params) -> float:
    """Exact differential entropy, for the families that have one here
    (uniform, normal, pareto); CapabilityError otherwise."""
    fam = resolve_family(family)
    return fam.closed_form_entropy(fam.validate_params(params))


def default_delta(family: str) -> float:
    return resolve_family(family).default_delta


def param_labels(family: str) -> tuple[str, ...]:
    return resolve_family(family).param_names


def call_name(family: str) -> str:
    return resolve_family(family).call
