"""Experiment harness behind the command-line interface.

Each cmd_* function resolves an ExperimentConfig into engine calls and
returns a CommandResult holding named tables (metadata, columns, rows) ready
for the CSV/JSON writers.  Raises ConfigError for bad configs, NumericsError
for violated run invariants, ToleranceError for failed cross-engine
comparisons; the CLI maps these to exit codes 2, 3 and 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from . import dense, mc, meanfield, mps
from .gates import alpha_from_j, gate_record, load_gate
from .io_utils import ConfigError
from .transfer import TransferMatrix, clifford_tm, dual_unitary_tm, general_tm
from .transfer import EntanglementCoords

ENGINES = ("dense", "mps", "mc", "meanfield")
GATES = ("dual_unitary", "clifford", "general")
INITIALS = ("single_site", "contiguous", "full")


class NumericsError(RuntimeError):
    """A numerical invariant failed during a run (exit code 3)."""


class ToleranceError(RuntimeError):
    """A cross-engine comparison exceeded its tolerance (exit code 4)."""


@dataclass
class ExperimentConfig:
    engine: str = "dense"
    gate: str = "dual_unitary"
    alpha: float | None = None
    j: float | None = None
    i1: float | None = None
    i2: float | None = None
    n: int = 12
    depth: int = 8
    boundary: str = "open"
    initial: str = "full"
    site: int | None = None
    k: int | None = None
    center: int | None = None
    samples: int = 100000
    seed: int = 1
    max_bond: int = 200
    cutoff: float = 1e-12
    output_dir: str = "."
    format: str = "csv"

    _FLOATS = ("alpha", "j", "i1", "i2", "cutoff")
    _INTS = ("n", "depth", "site", "k", "center", "samples", "seed", "max_bond")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        cfg = cls()
        known = set(asdict(cfg))
        for key, raw in mapping.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if key in cls._FLOATS:
                try:
                    value = float(raw)
                except ValueError as exc:
                    raise ConfigError(f"{key}: not a number: {raw!r}") from exc
            elif key in cls._INTS:
                try:
                    value = int(raw)
                except ValueError as exc:
                    raise ConfigError(f"{key}: not an integer: {raw!r}") from exc
            else:
                value = str(raw)
            setattr(cfg, key, value)
        cfg.validate()
        return cfg

    def validate(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.gate not in GATES:
            raise ConfigError(f"gate must be one of {GATES}, got {self.gate!r}")
        if self.boundary not in ("open", "periodic"):
            raise ConfigError(f"boundary must be open or periodic, got {self.boundary!r}")
        if self.initial not in INITIALS:
            raise ConfigError(f"initial must be one of {INITIALS}, got {self.initial!r}")
        if self.gate == "dual_unitary":
            if (self.alpha is None) == (self.j is None):
                raise ConfigError("dual_unitary needs exactly one of alpha or j")
            if self.j is not None:
                self.alpha = alpha_from_j(self.j)
            if not 0.0 <= self.alpha <= 2.0 / 3.0 + 1e-5:
                raise ConfigError(f"alpha must lie in [0, 2/3], got {self.alpha}")
            self.alpha = min(self.alpha, 2.0 / 3.0)
        elif self.gate == "general":
            if self.i1 is None or self.i2 is None:
                raise ConfigError("general gate needs i1 and i2")
        elif self.alpha is not None or self.j is not None:
            raise ConfigError("clifford gate takes no alpha or j")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.depth < 0:
            raise ConfigError("depth must be non-negative")
        if self.engine == "dense" and self.n > dense.DENSE_MAX_SITES:
            raise ConfigError(
                f"dense engine capped at n <= {dense.DENSE_MAX_SITES}; use mps"
            )
        if self.engine == "mps" and self.boundary != "open":
            raise ConfigError("mps engine requires open boundary")
        if self.engine == "mc" and self.samples < 1:
            raise ConfigError("mc engine requires samples >= 1")
        if self.initial == "contiguous" and self.k is None:
            raise ConfigError("contiguous initial needs k")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")

    def transfer_matrix(self) -> TransferMatrix:
        if self.gate == "dual_unitary":
            return dual_unitary_tm(self.alpha)
        if self.gate == "clifford":
            return clifford_tm()
        return general_tm(EntanglementCoords(i1=self.i1, i2=self.i2))

    def pattern(self) -> dense.SupportPattern:
        if self.initial == "full":
            return dense.SupportPattern.full(self.n)
        if self.initial == "single_site":
            site = self.site if self.site is not None else self.n // 2 + 1
            return dense.SupportPattern.single_site(self.n, site)
        return dense.SupportPattern.contiguous(self.n, self.k, self.center)

    def brickwall(self, depth: int | None = None,
                  tm: TransferMatrix | None = None,
                  boundary: str | None = None) -> dense.BrickwallSpec:
        return dense.BrickwallSpec(
            n=self.n,
            depth=self.depth if depth is None else depth,
            tm=self.transfer_matrix() if tm is None else tm,
            boundary=self.boundary if boundary is None else boundary,
        )

    def metadata(self) -> dict:
        meta = {}
        for key, value in asdict(self).items():
            if value is not None and key != "output_dir":
                meta[key] = value
        return meta


@dataclass
class CommandResult:
    tables: list = field(default_factory=list)  # (name, metadata, columns, rows)
    summary: dict = field(default_factory=dict)

    def add(self, name, metadata, columns, rows):
        self.tables.append((name, dict(metadata), list(columns), list(rows)))

    def table(self, name):
        for tname, meta, cols, rows in self.tables:
            if tname == name:
                return meta, cols, rows
        raise KeyError(name)


def _beta(norm: float, n: int) -> float:
    return norm ** (1.0 / n)


def _check_alphas(alphas):
    """Validate a list of alpha values, snapping tiny overshoots onto 2/3."""
    out = []
    for alpha in alphas:
        if not 0.0 <= alpha <= 2.0 / 3.0 + 1e-5:
            raise ConfigError(f"alpha must lie in [0, 2/3], got {alpha}")
        out.append(min(float(alpha), 2.0 / 3.0))
    return out


def _occupation_grid(cfg: ExperimentConfig):
    """(rho, stderr-or-None, weights, weight_stderr-or-None) per engine."""
    spec = cfg.brickwall()
    p = cfg.pattern()
    depth, n = cfg.depth, cfg.n
    if cfg.engine == "dense":
        rho = np.empty((depth + 1, n))
        w = np.empty(depth + 1)
        for t, state in enumerate(dense.evolve_trace(spec, p)):
            rho[t] = dense.occupation_profile(state)
            w[t] = dense.pauli_weight(state)
        return rho, None, w, None
    if cfg.engine == "mps":
        rho = np.empty((depth + 1, n))
        for t, state in enumerate(
            mps.mps_evolve_trace(spec, p, max_bond=cfg.max_bond, cutoff=cfg.cutoff)
        ):
            rho[t] = mps.mps_occupation_profile(state)
        logs = [lw for lw, _ in mps.mps_log_weight_trace(
            spec, p, max_bond=cfg.max_bond, cutoff=cfg.cutoff)]
        return rho, None, np.exp(logs), None
    if cfg.engine == "mc":
        occ = mc.estimate_occupation(spec, p, cfg.samples, cfg.seed)
        w, w_err = mc.estimate_pauli_weight_trace(spec, p, cfg.samples, cfg.seed)
        return occ.rho, occ.stderr, w, w_err
    if cfg.gate != "dual_unitary":
        raise ConfigError("meanfield engine is defined for dual_unitary gates")
    grid = meanfield.mf_evolve(n, depth, p.as_array().astype(float),
                               cfg.alpha, cfg.boundary)
    w = np.exp(np.sum(np.log1p(-2.0 * grid.rho / 3.0), axis=1))
    return grid.rho, None, w, None


def cmd_evolve(cfg: ExperimentConfig) -> CommandResult:
    """Occupation field rho(x, t) plus per-depth weight and shadow norm."""
    rho, stderr, w, w_err = _occupation_grid(cfg)
    meta = cfg.metadata()
    meta["command"] = "evolve"
    result = CommandResult()
    occ_cols = ["t", "x", "rho"] + (["stderr"] if stderr is not None else [])
    occ_rows = []
    for t in range(cfg.depth + 1):
        for x in range(cfg.n):
            row = [t, x + 1, rho[t, x]]
            if stderr is not None:
                row.append(stderr[t, x])
            occ_rows.append(row)
    result.add("occupation", meta, occ_cols, occ_rows)
    sum_cols = ["t", "pauli_weight", "shadow_norm", "beta"]
    if w_err is not None:
        sum_cols.append("weight_stderr")
    sum_rows = []
    for t in range(cfg.depth + 1):
        row = [t, w[t], 1.0 / w[t], _beta(1.0 / w[t], cfg.n)]
        if w_err is not None:
            row.append(w_err[t])
        sum_rows.append(row)
    result.add("weights", meta, sum_cols, sum_rows)
    result.summary["final_shadow_norm"] = float(1.0 / w[-1])
    return result


def cmd_beta_scan(cfg: ExperimentConfig, alphas, depths) -> CommandResult:
    """beta(t) = (shadow norm)^(1/n) for full support, with Clifford baseline.

    Runs on the tilted MPS evolution; the dense engine takes over only for
    small n.  Requires full initial support.
    """
    if cfg.initial != "full":
        raise ConfigError("beta-scan requires initial=full")
    alphas = _check_alphas(alphas)
    depths = sorted(set(int(t) for t in depths))
    t_max = depths[-1]
    p = cfg.pattern()

    def beta_curve(tm):
        if cfg.engine == "dense":
            spec = cfg.brickwall(depth=t_max, tm=tm)
            return np.array([_beta(dense.shadow_norm(s), cfg.n)
                             for s in dense.evolve_trace(spec, p)])
        spec = cfg.brickwall(depth=t_max, tm=tm, boundary="open")
        return np.array([np.exp(-lw / cfg.n) for lw, _ in mps.mps_log_weight_trace(
            spec, p, max_bond=cfg.max_bond, cutoff=cfg.cutoff)])

    baseline = beta_curve(clifford_tm())
    meta = cfg.metadata()
    meta["command"] = "beta-scan"
    meta["alphas"] = " ".join(f"{a:g}" for a in alphas)
    rows = []
    for alpha in alphas:
        curve = beta_curve(dual_unitary_tm(alpha))
        for t in depths:
            rows.append([alpha, t, curve[t], baseline[t]])
    result = CommandResult()
    result.add("beta", meta, ["alpha", "t", "beta", "beta_clifford"], rows)
    return result


def cmd_opt_depth(cfg: ExperimentConfig, ks, alphas) -> CommandResult:
    """Optimal-depth scan t*(k, alpha) with the log k slope and alpha exponent."""
    ks = [int(k) for k in ks]
    alphas = _check_alphas(alphas)
    meta = cfg.metadata()
    meta["command"] = "opt-depth"
    engine = "dense" if cfg.engine == "dense" else "mps"
    scan_rows = []
    fit_rows = []
    a_values = []
    for alpha in alphas:
        t_stars = []
        for k in ks:
            t_star, _ = meanfield.optimal_depth(
                k, alpha, cfg.n, engine=engine,
                max_bond=cfg.max_bond, cutoff=cfg.cutoff)
            t_stars.append(t_star)
            scan_rows.append([alpha, k, t_star])
        a = meanfield.fit_depth_scaling(ks, t_stars)
        a_values.append(a)
        fit_rows.append([alpha, a])
    c, b = meanfield.fit_alpha_exponent(alphas, a_values)
    meta_fit = dict(meta)
    meta_fit["c"] = c
    meta_fit["b"] = b
    result = CommandResult()
    result.add("t_star", meta, ["alpha", "k", "t_star"], scan_rows)
    result.add("fit", meta_fit, ["alpha", "a"], fit_rows)
    result.summary["c"] = c
    result.summary["b"] = b
    return result


def cmd_boundary(cfg: ExperimentConfig, depths=(2, 4, 6)) -> CommandResult:
    """Per-site deviation from 3/4, dual-unitary vs Clifford side by side."""
    if cfg.gate != "dual_unitary":
        raise ConfigError("boundary comparison needs a dual_unitary gate config")
    if cfg.boundary != "open":
        raise ConfigError("boundary comparison is about open chains")
    depths = sorted(set(int(t) for t in depths))
    t_max = depths[-1]
    p = dense.SupportPattern.full(cfg.n)

    def profiles(tm):
        spec = cfg.brickwall(depth=t_max, tm=tm)
        return [dense.occupation_profile(s) for s in dense.evolve_trace(spec, p)]

    dual = profiles(dual_unitary_tm(cfg.alpha))
    cliff = profiles(clifford_tm())
    meta = cfg.metadata()
    meta["command"] = "boundary"
    rows = []
    for t in depths:
        for x in range(cfg.n):
            rows.append([x + 1, t,
                         dual[t][x] - meanfield.EQUILIBRIUM_RHO,
                         cliff[t][x] - meanfield.EQUILIBRIUM_RHO])
    result = CommandResult()
    result.add("deviation", meta, ["x", "t", "dev_dual", "dev_clifford"], rows)
    for t in depths:
        result.summary[f"max_dev_dual_t{t}"] = float(
            np.max(np.abs(dual[t] - meanfield.EQUILIBRIUM_RHO)))
        result.summary[f"max_dev_clifford_t{t}"] = float(
            np.max(np.abs(cliff[t] - meanfield.EQUILIBRIUM_RHO)))
    return result


def cmd_appendix(cfg: ExperimentConfig) -> CommandResult:
    """Bound diagnostics (t, rho_center, beta_inv, bound, slack, sigma2)."""
    if cfg.initial != "full":
        raise ConfigError("appendix diagnostics require initial=full")
    p = cfg.pattern()
    center = cfg.n // 2
    if cfg.engine == "dense":
        spec = cfg.brickwall()
        rhos, beta_invs = [], []
        for state in dense.evolve_trace(spec, p):
            rhos.append(dense.occupation(state, [center]))
            beta_invs.append(dense.pauli_weight(state) ** (1.0 / cfg.n))
    elif cfg.engine == "mps":
        spec = cfg.brickwall()
        rhos = [mps.mps_occupation(s, center) for s in mps.mps_evolve_trace(
            spec, p, max_bond=cfg.max_bond, cutoff=cfg.cutoff)]
        beta_invs = [np.exp(lw / cfg.n) for lw, _ in mps.mps_log_weight_trace(
            spec, p, max_bond=cfg.max_bond, cutoff=cfg.cutoff)]
    else:
        raise ConfigError("appendix diagnostics run on dense or mps engines")
    meta = cfg.metadata()
    meta["command"] = "appendix"
    rows = []
    for t in range(cfg.depth + 1):
        diag = meanfield.appendix_bounds(rhos[t], beta_invs[t])
        if diag.slack < -1e-9:
            raise NumericsError(
                f"bound slack {diag.slack:.3e} negative at t={t}")
        rows.append([t, rhos[t], beta_invs[t], 1.0 - 2.0 * rhos[t] / 3.0,
                     diag.slack, diag.sigma2])
    result = CommandResult()
    result.add("bounds", meta,
               ["t", "rho_center", "beta_inv", "bound", "slack", "sigma2"],
               rows)
    return result


def cmd_gate_analyze(paths) -> CommandResult:
    """(i1, i2, feasible, alpha-if-dual-unitary) records for gate files."""
    rows = []
    for path in paths:
        try:
            rec = gate_record(load_gate(path))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read gate file {path}: {exc}") from exc
        rows.append([path, rec["i1"], rec["i2"],
                     "true" if rec["feasible"] else "false", rec["alpha"]])
    result = CommandResult()
    result.add("gates", {"command": "gate-analyze"},
               ["file", "i1", "i2", "feasible", "alpha"], rows)
    return result


def cmd_compare(cfg: ExperimentConfig) -> CommandResult:
    """Cross-engine agreement harness on a single config.

    Runs dense (reference), mps (cutoff 0), mc and meanfield occupation
    fields, then asserts the standing tolerances: dense-mps 1e-10, dense-mc
    within 3 standard errors on at least 99% of grid points, meanfield-mc
    within 0.02.  Any failure raises ToleranceError (exit code 4).
    """
    if cfg.gate != "dual_unitary":
        raise ConfigError("compare harness runs on dual_unitary configs")
    if cfg.n > 16:
        raise ConfigError("compare harness needs n <= 16 for the dense reference")
    spec = cfg.brickwall()
    p = cfg.pattern()
    depth, n = cfg.depth, cfg.n

    rho_d = np.empty((depth + 1, n))
    norm_d = np.empty(depth + 1)
    for t, state in enumerate(dense.evolve_trace(spec, p)):
        rho_d[t] = dense.occupation_profile(state)
        norm_d[t] = dense.shadow_norm(state)

    checks = []

    if cfg.boundary == "open":
        rho_m = np.empty((depth + 1, n))
        norm_m = np.empty(depth + 1)
        for t, state in enumerate(mps.mps_evolve_trace(
                spec, p, max_bond=2 ** ((n + 1) // 2), cutoff=0.0)):
            rho_m[t] = mps.mps_occupation_profile(state)
            norm_m[t] = mps.mps_shadow_norm(state)
        checks.append(("dense_vs_mps_rho", float(np.max(np.abs(rho_m - rho_d))),
                       1e-10))
        checks.append(("dense_vs_mps_norm",
                       float(np.max(np.abs(norm_m - norm_d) / norm_d)), 1e-10))

    occ = mc.estimate_occupation(spec, p, cfg.samples, cfg.seed)
    err = np.maximum(occ.stderr, 1e-12)
    inside = np.abs(occ.rho - rho_d) <= 3.0 * err
    exact = np.abs(occ.rho - rho_d) <= 1e-12  # deterministic cells
    frac = float(np.mean(inside | exact))
    checks.append(("dense_vs_mc_3sigma_fraction", frac, 0.99))

    if cfg.alpha is not None and cfg.alpha > 0:
        grid = meanfield.mf_evolve(n, depth, p.as_array().astype(float),
                                   cfg.alpha, cfg.boundary)
        checks.append(("meanfield_vs_mc_rho",
                       float(np.max(np.abs(grid.rho - occ.rho))), 0.02))

    meta = cfg.metadata()
    meta["command"] = "compare"
    rows = []
    failures = []
    for name, value, tol in checks:
        if name.endswith("fraction"):
            ok = value >= tol
        else:
            ok = value <= tol
        rows.append([name, value, tol, "pass" if ok else "fail"])
        if not ok:
            failures.append(f"{name}: {value:.3e} vs {tol:g}")
    result = CommandResult()
    result.add("compare", meta, ["check", "value", "tolerance", "status"], rows)
    if failures:
        exc = ToleranceError("; ".join(failures))
        exc.result = result  # so the CLI can still write the table
        raise exc
    return result
