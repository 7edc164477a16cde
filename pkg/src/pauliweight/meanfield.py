"""Mean-field occupation dynamics and shadow-norm scaling analysis.

The single-site factorization of two-site occupations turns the brick-wall
transfer-matrix dynamics into a quadratic block update for rho(x, t), with a
logistic-type relaxation towards the equilibrium value 3/4.  The continuum
relaxation rate alpha' is obtained by fitting, not by a closed formula: the
fit protocol (rho0 = 1, t in [1, 40], least squares on the closed form) is
normative for this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from . import dense
from .transfer import clifford_tm

EQUILIBRIUM_RHO = 0.75

#: Limiting normalized variance of the site-occupation sum, ~0.22.
SIGMA2_INF = 2.0 * (np.log(0.5) / np.log(3.0) ** 2 + 3.0 / (4.0 * np.log(3.0)))

FIT_T_MIN = 1
FIT_T_MAX = 40


@dataclass
class MeanFieldGrid:
    """rho(x, t) on a space-time lattice; row t is the slice at depth t."""

    rho: np.ndarray  # (depth+1, n)
    alpha: float
    boundary: str


def _check_alpha(alpha: float):
    if not 0.0 <= alpha <= 2.0 / 3.0 + 1e-12:
        raise ValueError(f"alpha must lie in [0, 2/3], got {alpha}")


def mf_step(row: np.ndarray, alpha: float, layer_index: int,
            boundary: str = "open") -> np.ndarray:
    """One brick-wall layer of the factorized occupation update.

    Per paired block (x, x+1): each outgoing leg takes the opposite incoming
    occupation plus alpha * (own incoming - (4/3) * product).  Unpaired
    open-boundary sites copy through.
    """
    _check_alpha(alpha)
    row = np.asarray(row, dtype=float)
    if np.any(row < -1e-12) or np.any(row > 1 + 1e-12):
        raise ValueError("occupations must lie in [0, 1]")
    n = len(row)
    out = row.copy()
    if layer_index % 2 == 0:
        pairs = [(i, i + 1) for i in range(0, n - 1, 2)]
    else:
        pairs = [(i, i + 1) for i in range(1, n - 1, 2)]
        if boundary == "periodic":
            pairs.append((n - 1, 0))
    for x, y in pairs:
        a, b = row[x], row[y]
        cross = (4.0 / 3.0) * a * b
        out[x] = b + alpha * (a - cross)
        out[y] = a + alpha * (b - cross)
    return np.clip(out, 0.0, 1.0)


def mf_evolve(n: int, depth: int, initial_row, alpha: float,
              boundary: str = "open") -> MeanFieldGrid:
    """Repeated mf_step with alternating layer parity."""
    row = np.asarray(initial_row, dtype=float)
    if len(row) != n:
        raise ValueError("initial row length does not match n")
    grid = np.empty((depth + 1, n))
    grid[0] = row
    for t in range(depth):
        row = mf_step(row, alpha, t, boundary)
        grid[t + 1] = row
    return MeanFieldGrid(rho=grid, alpha=alpha, boundary=boundary)


def homogeneous_recurrence(rho0: float, alpha: float, t: int) -> np.ndarray:
    """Exact spatially-homogeneous recurrence, rho -> rho + alpha rho (1 - 4 rho/3)."""
    _check_alpha(alpha)
    if not 0.0 <= rho0 <= 1.0:
        raise ValueError("rho0 must lie in [0, 1]")
    out = np.empty(t + 1)
    out[0] = rho0
    r = rho0
    for i in range(t):
        r = r + alpha * r * (1.0 - 4.0 * r / 3.0)
        out[i + 1] = r
    return out


def homogeneous_closed_form(t, alpha_prime: float, a: float):
    """Continuum solution rho(t) = (3/4) / (1 + A exp(-alpha' t))."""
    if alpha_prime < 0:
        raise ValueError("alpha_prime must be non-negative")
    return EQUILIBRIUM_RHO / (1.0 + a * np.exp(-alpha_prime * np.asarray(t, dtype=float)))


def fit_alpha_prime_full(alpha: float):
    """(alpha', A) fitted to the exact recurrence from rho0 = 1 over t in [1, 40].

    t = 0 is excluded: the closed form captures the recurrence only from the
    first step on.
    """
    _check_alpha(alpha)
    if alpha <= 0:
        raise ValueError("fit is degenerate at alpha = 0")
    ts = np.arange(FIT_T_MIN, FIT_T_MAX + 1, dtype=float)
    rhos = homogeneous_recurrence(1.0, alpha, FIT_T_MAX)[FIT_T_MIN:]
    a0 = EQUILIBRIUM_RHO / rhos[0] - 1.0
    popt, _ = curve_fit(
        lambda t, ap, a: EQUILIBRIUM_RHO / (1.0 + a * np.exp(-ap * t)),
        ts, rhos, p0=[alpha, a0 * np.exp(alpha)],
        bounds=([0.0, -0.999], [np.inf, np.inf]), maxfev=20000,
    )
    return float(popt[0]), float(popt[1])


def fit_alpha_prime(alpha: float) -> float:
    return fit_alpha_prime_full(alpha)[0]


def beta1(alpha: float) -> float:
    """Depth-one scaling base offset, 1 / (3 / sqrt(1 + 4 alpha/3) - 2)."""
    _check_alpha(alpha)
    return 1.0 / (3.0 / np.sqrt(1.0 + 4.0 * alpha / 3.0) - 2.0)


def beta_mft(t, alpha: float, alpha_prime: float | None = None):
    """Continuum mean-field shadow-norm base at depth t (t >= 1)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 1):
        raise ValueError("beta_mft requires t >= 1")
    if alpha == 0:
        return np.full_like(t, 3.0) if t.ndim else 3.0
    if alpha_prime is None:
        alpha_prime = fit_alpha_prime(alpha)
    b1 = beta1(alpha)
    out = 2.0 + 1.0 / ((1.0 + b1) * np.exp(alpha_prime * (t - 1.0)) - 1.0)
    return out if t.ndim else float(out)


def fit_beta_alpha_prime(ts, betas, alpha: float) -> float:
    """Renormalized relaxation rate fitted directly to measured beta(t) data.

    One-parameter least squares of the continuum form on (ts, betas); this is
    the fit used when overlaying the analytic curve on numerical shadow-norm
    scaling data, as opposed to fit_alpha_prime which never sees that data.
    """
    from scipy.optimize import minimize_scalar

    ts = np.asarray(ts, dtype=float)
    betas = np.asarray(betas, dtype=float)
    res = minimize_scalar(
        lambda ap: float(np.sum((beta_mft(ts, alpha, ap) - betas) ** 2)),
        bounds=(1e-3, 5.0), method="bounded",
    )
    return float(res.x)


def beta_from_occupation(rho_row) -> float:
    """Geometric mean over sites of beta(x) = (1 - 2 rho(x)/3)^-1."""
    rho_row = np.asarray(rho_row, dtype=float)
    if np.any(rho_row < -1e-12) or np.any(rho_row > 1 + 1e-12):
        raise ValueError("occupations must lie in [0, 1]")
    logs = -np.log1p(-2.0 * np.clip(rho_row, 0.0, 1.0) / 3.0)
    return float(np.exp(logs.mean()))


def clifford_beta_reference(t, c: float):
    """Asymptotic Clifford brick-wall base via rho_cl(t) = c (16/25)^t t^-3/2 + 3/4."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 1):
        raise ValueError("reference defined for t >= 1")
    rho_cl = c * (16.0 / 25.0) ** t * t ** (-1.5) + EQUILIBRIUM_RHO
    out = 1.0 / (1.0 - (2.0 / 3.0) * rho_cl)
    return out if t.ndim else float(out)


def clifford_homogeneous_rho(t_max: int, n: int = 12) -> np.ndarray:
    """Exact homogeneous Clifford occupation series from dense periodic evolution."""
    spec = dense.BrickwallSpec(n=n, depth=t_max, tm=clifford_tm(),
                               boundary="periodic")
    out = np.empty(t_max + 1)
    for t, state in enumerate(dense.evolve_trace(spec, dense.SupportPattern.full(n))):
        out[t] = dense.occupation(state, [1])
    return out


def fit_clifford_constant(t_range=(5, 25), n: int = 12) -> float:
    """Least-squares c in the asymptotic Clifford occupation over the given depths."""
    t_lo, t_hi = t_range
    rho = clifford_homogeneous_rho(t_hi, n=n)
    ts = np.arange(t_lo, t_hi + 1, dtype=float)
    y = rho[t_lo : t_hi + 1] - EQUILIBRIUM_RHO
    m = (16.0 / 25.0) ** ts * ts ** (-1.5)
    return float(np.dot(m, y) / np.dot(m, m))


def optimal_depth(k: int, alpha: float, n: int, engine: str = "auto",
                  t_max: int | None = None, max_bond: int = 200,
                  cutoff: float = 1e-12, patience: int = 10):
    """Depth minimizing the shadow norm of a centered contiguous size-k operator.

    Ties break toward smaller t (cheaper circuits at equal norm).  When t_max
    is not given, the scan stops once the norm has risen for `patience`
    consecutive layers past the running minimum (the curve has a single
    minimum followed by a monotone climb).  Returns (t_star, norms) with the
    scanned shadow norms.
    """
    from . import mps as mps_engine  # local import; mps depends on dense only
    from .transfer import dual_unitary_tm

    _check_alpha(alpha)
    if k > n:
        raise ValueError("operator size exceeds system size")
    early_stop = t_max is None
    if t_max is None:
        t_max = min(60, int(np.ceil(4.0 * np.log(k + 1) / max(alpha, 0.05))) + 4)

    spec = dense.BrickwallSpec(n=n, depth=t_max, tm=dual_unitary_tm(alpha),
                               boundary="open")
    p = dense.SupportPattern.contiguous(n, k)
    if engine == "auto":
        engine = "dense" if n <= 16 else "mps"
    if engine == "dense":
        trace = (dense.shadow_norm(s) for s in dense.evolve_trace(spec, p))
    elif engine == "mps":
        trace = (np.exp(-log_w) for log_w, _ in
                 mps_engine.mps_log_weight_trace(spec, p, max_bond=max_bond,
                                                 cutoff=cutoff))
    else:
        raise ValueError(f"unknown engine {engine!r}")
    norms = []
    best = np.inf
    since_best = 0
    for norm in trace:
        norms.append(norm)
        if norm < best:
            best = norm
            since_best = 0
        else:
            since_best += 1
        if early_stop and since_best >= patience:
            break
    norms = np.array(norms)
    t_star = int(np.argmin(norms))  # argmin takes the first, i.e. smallest t
    return t_star, norms


def fit_depth_scaling(ks, t_stars):
    """Least-squares a in t* = a log k + d; returns the slope a.

    The offset d soaks up the alpha-dependent additive constant in t*(k), so
    the returned slope isolates the log k coefficient.
    """
    logs = np.log(np.asarray(ks, dtype=float))
    t_stars = np.asarray(t_stars, dtype=float)
    a, _ = np.polyfit(logs, t_stars, 1)
    return float(a)


def fit_alpha_exponent(alphas, a_values):
    """(c, b) in a(alpha) = c alpha^b, fitted log-log."""
    la = np.log(np.asarray(alphas, dtype=float))
    lv = np.log(np.asarray(a_values, dtype=float))
    b, logc = np.polyfit(la, lv, 1)
    return float(np.exp(logc)), float(b)


def mass_function(rho, alpha_prime: float):
    """Relaxation coefficient m(rho) = alpha' (1 - 4 rho/3); zero at rho = 3/4."""
    return alpha_prime * (1.0 - 4.0 * np.asarray(rho, dtype=float) / 3.0)


def velocity_endpoints(alpha_prime: float):
    """|v| at rho = 0 and rho = 1 (modulation factor set to 1)."""
    return 1.0, abs(1.0 - 4.0 * alpha_prime / 3.0)


@dataclass
class BoundDiagnostics:
    slack: float
    sigma2: float


def appendix_bounds(rho: float, beta_inv: float) -> BoundDiagnostics:
    """Slack of beta^-1 <= 1 - 2 rho/3 and the implied variance sigma^2.

    rho is the (homogeneous) occupation at the final slice and beta_inv the
    n-th root of the Pauli weight of the full-support operator.
    """
    if not 0.0 < beta_inv < 1.0:
        raise ValueError("beta_inv must lie in (0, 1)")
    slack = (1.0 - 2.0 * rho / 3.0) - beta_inv
    sigma2 = 2.0 * np.log(3.0**rho * beta_inv) / np.log(3.0) ** 2
    return BoundDiagnostics(slack=float(slack), sigma2=float(sigma2))
