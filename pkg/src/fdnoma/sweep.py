"""Monte Carlo sweeps, power-grid optimization, and rate-region tracing.

Determinism contract: every result is a pure function of (config, seed,
trials). Trials use counter-based per-trial streams, reductions run in
ascending trial order with compensated summation, and grid argmax ties break
toward the smallest index, so reruns and different worker counts produce
bit-identical output.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelSet, draw_topology_batch
from .scenarios import SCENARIOS
from .scenarios.cognitive import (CognitiveConfig, GridEvaluation, _power_grid,
                                  evaluate_power_grid, source_power_boundary)
from .scenarios.cognitive import topology as cognitive_topology
from .scenarios.scbf import ScbfConfig, _span_basis, beam_from_angle, scbf_channels

LN2 = math.log(2.0)

__all__ = [
    "SweepResult",
    "RateRegionPoint",
    "InfeasibleTargetError",
    "ergodic_capacity",
    "snr_sweep",
    "power_grid_optimize",
    "trace_rate_region",
    "scbf_optimize",
    "tdm_region",
]


class InfeasibleTargetError(ValueError):
    """Raised when a requested weak-user rate target is not achievable."""


def worker_count() -> int:
    """Worker cap from FDNOMA_THREADS (0 = auto); defaults to sequential."""
    raw = os.environ.get("FDNOMA_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 0:
        raise ValueError("FDNOMA_THREADS must be >= 0")
    return os.cpu_count() or 1 if n == 0 else n


def _draw_chunk(args):
    topology, seed, count, first = args
    return draw_topology_batch(topology, seed, count, first)


def draw_batch(topology, seed: int, trials: int) -> dict[str, np.ndarray]:
    """Stacked channel draws for trials 0..trials-1, worker-parallel but
    bit-identical for any worker count."""
    workers = worker_count()
    if workers <= 1 or trials < 2 * workers:
        return draw_topology_batch(topology, seed, trials)
    chunk = -(-trials // workers)
    spans = [(topology, seed, min(chunk, trials - a), a)
             for a in range(0, trials, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_draw_chunk, spans))
    return {label: np.concatenate([p[label] for p in parts], axis=0)
            for label in parts[0]}


def _mean_ci(values: np.ndarray) -> tuple[float, float]:
    """Fixed-order compensated mean and 95% normal-approximation half-width."""
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, 1.96 * math.sqrt(var) / math.sqrt(n)


def _scenario_module(scenario: str):
    try:
        return SCENARIOS[scenario]
    except KeyError:
        raise ValueError(f"unknown scenario {scenario!r}") from None


def _sum_rate_values(scenario: str, cfg, batch) -> np.ndarray:
    mod = _scenario_module(scenario)
    if scenario == "cognitive":
        return _cognitive_sum_rates(cfg, batch)
    return mod.batch_sum_rate(cfg, batch)


def _cognitive_sum_rates(cfg: CognitiveConfig, batch) -> np.ndarray:
    """Per-trial best feasible sum rate over the power grid."""
    trials = len(next(iter(batch.values())))
    out = np.zeros(trials)
    for t in range(trials):
        ch = ChannelSet({k: v[t] for k, v in batch.items()}, trial_id=t)
        ps, pr = _coarse_grids(cfg, ch, 64)
        ge = evaluate_power_grid(cfg, ch, ps, pr)
        mask = ge.feasible_power & (ge.interference <= cfg.i_th)
        if mask.any():
            out[t] = np.where(mask, ge.r1 + ge.r2, -np.inf).max()
    return out


def ergodic_capacity(scenario: str, cfg, snr: float, trials: int, seed: int,
                     batch=None) -> tuple[float, float]:
    """Mean per-trial sum rate at a linear SNR, with its 95% CI half-width.

    An already-drawn channel batch may be passed to share randomness across
    calls (common random numbers); it must come from this scenario's topology
    at this seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mod = _scenario_module(scenario)
    cfg_at = cfg.at_snr(snr)
    if batch is None:
        batch = draw_batch(mod.topology(cfg_at), seed, trials)
    values = _sum_rate_values(scenario, cfg_at, batch)
    return _mean_ci(values)


@dataclass
class SweepResult:
    scenario: str
    x_name: str
    x_values: list[float]  # dB
    modes: list[str]
    means: dict[str, list[float]]
    ci_half: dict[str, list[float]]
    trials: int
    seed: int
    metric: str = "sum_capacity"


def snr_sweep(scenario: str, cfg, snr_grid_db, modes, trials: int, seed: int) -> SweepResult:
    """Ergodic sum capacity over an SNR grid for several modes.

    All modes at one grid point (and, because fading is SNR-independent,
    across grid points) share the same channel realizations.
    """
    snr_grid_db = list(snr_grid_db)
    modes = list(modes)
    if not snr_grid_db:
        raise ValueError("empty SNR grid")
    if not modes:
        raise ValueError("empty mode list")
    mod = _scenario_module(scenario)
    for m in modes:
        if m not in mod.MODES:
            raise ValueError(f"unknown mode {m!r} for scenario {scenario!r}")
    base = cfg.with_mode(modes[0])
    batch = draw_batch(mod.topology(base), seed, trials)
    means: dict[str, list[float]] = {m: [] for m in modes}
    ci: dict[str, list[float]] = {m: [] for m in modes}
    for m in modes:
        cfg_m = cfg.with_mode(m)
        for db in snr_grid_db:
            mean, half = ergodic_capacity(scenario, cfg_m, 10.0 ** (db / 10.0),
                                          trials, seed, batch=batch)
            means[m].append(mean)
            ci[m].append(half)
    return SweepResult(scenario=scenario, x_name="snr_db", x_values=snr_grid_db,
                       modes=modes, means=means, ci_half=ci, trials=trials, seed=seed)


# --- cognitive power-grid optimization -------------------------------------

@dataclass
class PowerOptResult:
    p_s: float
    p_r: float
    r1: float
    r2: float
    interference_at_pu: float
    feasible: bool
    scheme: str


def _refine_window(grid: np.ndarray, idx: int, n: int = 16) -> np.ndarray:
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, len(grid) - 1)]
    if hi <= lo:
        return np.array([grid[idx]])
    return np.linspace(lo, hi, n)


def _coarse_grids(cfg: CognitiveConfig, ch: ChannelSet, grid_n: int):
    """Log power grids augmented with the exact interference-boundary source
    powers, where the per-relay-power optimum always lies."""
    pr = _power_grid(cfg.p_r_max, grid_n)
    boundary = source_power_boundary(cfg, ch, pr)
    ps = np.unique(np.concatenate([_power_grid(cfg.p_s_max, grid_n), boundary]))
    return ps, pr


def power_grid_optimize(cfg: CognitiveConfig, ch: ChannelSet, r2_target: float,
                        grid_n: int = 64, coarse: GridEvaluation | None = None
                        ) -> PowerOptResult:
    """Maximize the strong user's rate over transmit powers.

    Searches a logarithmic (p_s, p_r) grid (augmented with the exact
    interference-boundary source powers) under the interference threshold and
    the weak-user rate floor, then refines once around the incumbent.
    Infeasibility is a result, not an error.
    """
    if r2_target < 0:
        raise ValueError("r2_target must be >= 0")
    ps, pr = _coarse_grids(cfg, ch, grid_n)
    if coarse is None:
        coarse = evaluate_power_grid(cfg, ch, ps, pr)
    else:
        ps = coarse.p_s[:, 0]
        pr = coarse.p_r[0, :]
    best, idx = coarse.best_for_target(cfg.i_th, r2_target)
    if idx < 0:
        return PowerOptResult(0.0, 0.0, 0.0, 0.0, 0.0, False, cfg.scheme)
    i, j = np.unravel_index(idx, coarse.r1.shape)
    fine = evaluate_power_grid(cfg, ch, _refine_window(ps, int(i)), _refine_window(pr, int(j)))
    fbest, fidx = fine.best_for_target(cfg.i_th, r2_target)
    pick, pidx = (coarse, idx) if (fidx < 0 or best >= fbest) else (fine, fidx)
    r1 = max(best, fbest if fidx >= 0 else -math.inf)
    return PowerOptResult(
        p_s=float(pick.p_s.flat[pidx]), p_r=float(pick.p_r.flat[pidx]),
        r1=float(r1), r2=float(pick.r2.flat[pidx]),
        interference_at_pu=float(pick.interference.flat[pidx]),
        feasible=True, scheme=cfg.scheme)


@dataclass
class RateRegionPoint:
    r2_target: float
    r1_max: float
    feasible: bool
    params: dict = field(default_factory=dict)
    raw_r1: float = float("nan")
    clipped: bool = False


def trace_rate_region(scenario: str, cfg, r2_grid, trials: int, seed: int
                      ) -> list[RateRegionPoint]:
    """Achievable-region trace: max strong-user rate per weak-user target.

    Cognitive points average per-realization optima over trials, counting
    infeasible realizations as zero rate; SCBF points are deterministic. The
    returned curve is clipped to a non-increasing envelope; pre-clip values
    stay in raw_r1 and clipped points are flagged.
    """
    r2_grid = [float(t) for t in r2_grid]
    if any(b < a for a, b in zip(r2_grid, r2_grid[1:])):
        raise ValueError("r2_grid must be ascending")
    if scenario == "cognitive":
        points = _trace_cognitive(cfg, r2_grid, trials, seed)
    elif scenario == "scbf":
        points = _trace_scbf(cfg, r2_grid)
    else:
        raise ValueError(f"no rate region for scenario {scenario!r}")
    ceiling = math.inf
    for p in points:
        p.raw_r1 = p.r1_max
        if p.r1_max > ceiling:
            p.r1_max = ceiling
            p.clipped = True
        ceiling = min(ceiling, p.r1_max)
    return points


def _trace_cognitive(cfg: CognitiveConfig, r2_grid, trials: int, seed: int):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    topo = cognitive_topology(cfg)
    batch = draw_batch(topo, seed, trials)
    sums = [0.0] * len(r2_grid)
    n_feasible = [0] * len(r2_grid)
    first_params: list[dict] = [{} for _ in r2_grid]
    for t in range(trials):
        ch = ChannelSet({k: v[t] for k, v in batch.items()}, trial_id=t)
        ps, pr = _coarse_grids(cfg, ch, 64)
        coarse = evaluate_power_grid(cfg, ch, ps, pr)
        for k, target in enumerate(r2_grid):
            res = power_grid_optimize(cfg, ch, target, coarse=coarse)
            if res.feasible:
                sums[k] += res.r1
                n_feasible[k] += 1
                if not first_params[k]:
                    first_params[k] = {"p_s": res.p_s, "p_r": res.p_r,
                                       "scheme": res.scheme, "trial": t}
    return [RateRegionPoint(r2_target=target,
                            r1_max=sums[k] / trials,
                            feasible=n_feasible[k] > 0,
                            params={**first_params[k],
                                    "feasible_fraction": n_feasible[k] / trials})
            for k, target in enumerate(r2_grid)]


def _trace_scbf(cfg: ScbfConfig, r2_grid):
    points = []
    for target in r2_grid:
        try:
            res = scbf_optimize(cfg, target)
            points.append(RateRegionPoint(r2_target=target, r1_max=res.r1,
                                          feasible=True, params=res.params()))
        except InfeasibleTargetError:
            points.append(RateRegionPoint(r2_target=target, r1_max=0.0, feasible=False))
    return points


# --- SCBF optimization ------------------------------------------------------

@dataclass
class ScbfOptResult:
    r1: float
    theta1: float
    theta2: float
    p1: float
    p2: float
    mode: str
    w1: np.ndarray
    w2: np.ndarray

    def params(self) -> dict:
        return {"theta1": self.theta1, "theta2": self.theta2,
                "p1": self.p1, "p2": self.p2, "mode": self.mode}


def _scbf_gain_tables(cfg: ScbfConfig, thetas: np.ndarray):
    h1, h2 = scbf_channels(cfg)
    b1, b2 = _span_basis(h1, h2)
    c, s = np.cos(thetas), np.sin(thetas)
    g1 = np.abs((h1.conj() @ b1) * c + (h1.conj() @ b2) * s) ** 2
    g2 = np.abs((h2.conj() @ b1) * c + (h2.conj() @ b2) * s) ** 2
    return g1, g2


def _scbf_mode_tables(cfg: ScbfConfig, tau: float, th1: np.ndarray, th2: np.ndarray):
    """Per decode mode: (r1 table, p1 table) over the angle mesh, with the
    power split solved in closed form on the full-power, target-binding line."""
    p = cfg.p_total
    g11, g21 = _scbf_gain_tables(cfg, th1)
    g12, g22 = _scbf_gain_tables(cfg, th2)
    G11, G21 = g11[:, None], g21[:, None]
    G12, G22 = g12[None, :], g22[None, :]
    shape = np.broadcast_shapes(G11.shape, G12.shape)

    def bstar(G, Gp):
        # (1-b) p G = tau (b p G' + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (p * G - tau) / (p * (G + tau * Gp))

    tables = {}
    if tau <= 0:
        r1 = np.broadcast_to(np.log1p(p * G11) / LN2, shape).copy()
        ones = np.full(shape, p)
        return {"sic_strong": (r1, ones), "direct": (r1.copy(), ones.copy()),
                "sic_weak": (r1.copy(), ones.copy())}
    # a hair of negative slack keeps exactly-achievable boundary targets
    # (e.g. the single-user intercepts) from being lost to representation error
    slack = -1e-9
    b = np.minimum(bstar(G22, G21), bstar(G12, G11))
    ok = b >= slack
    bb = np.clip(b, 0.0, 1.0)
    r1 = np.where(ok, np.log1p(bb * p * G11) / LN2, -np.inf)
    tables["sic_strong"] = (np.broadcast_to(r1, shape).copy(),
                            np.broadcast_to(bb * p, shape).copy())
    b = bstar(G22, G21)
    ok = b >= slack
    bb = np.clip(b, 0.0, 1.0)
    r1 = np.where(ok, np.log1p(bb * p * G11 / ((1 - bb) * p * G12 + 1.0)) / LN2, -np.inf)
    tables["direct"] = (np.broadcast_to(r1, shape).copy(),
                        np.broadcast_to(bb * p, shape).copy())
    with np.errstate(divide="ignore"):
        p2 = tau / np.maximum(G22, 1e-300)
    ok = p2 <= p * (1.0 + 1e-9)
    p1 = np.maximum(p - p2, 0.0)
    s_at2 = p1 * G21 / (p2 * G22 + 1.0)
    s_at1 = p1 * G11 / (p2 * G12 + 1.0)
    r1 = np.where(ok, np.log1p(np.minimum(s_at2, s_at1)) / LN2, -np.inf)
    tables["sic_weak"] = (np.broadcast_to(r1, shape).copy(),
                          np.broadcast_to(p1, shape).copy())
    return tables


def _scbf_special_angles(cfg: ScbfConfig) -> np.ndarray:
    h1, h2 = scbf_channels(cfg)
    b1, b2 = _span_basis(h1, h2)
    th = math.atan2(abs(h2.conj() @ b2), abs(h2.conj() @ b1))
    return np.array([0.0, math.pi / 2, th, (th + math.pi / 2) % math.pi])


def _scbf_search(cfg: ScbfConfig, tau: float, th1: np.ndarray, th2: np.ndarray):
    tables = _scbf_mode_tables(cfg, tau, th1, th2)
    best = (-math.inf, None)
    for mode in ("sic_strong", "direct", "sic_weak"):
        r1, p1 = tables[mode]
        i = np.unravel_index(np.argmax(r1), r1.shape)
        if r1[i] > best[0]:
            best = (float(r1[i]), (float(th1[i[0]]), float(th2[i[1]]),
                                   float(p1[i]), mode))
    return best


def scbf_optimize(cfg: ScbfConfig, r2_target: float) -> ScbfOptResult:
    """Max strong-user rate with the weak-user rate held at or above target.

    Coarse angle grid with matched/orthogonal seed directions, power split
    solved in closed form on the constraint boundary, then two angle
    refinements around the incumbent.
    """
    if r2_target < 0:
        raise ValueError("r2_target must be >= 0")
    tau = 2.0 ** r2_target - 1.0
    sp = _scbf_special_angles(cfg)
    n = cfg.grid_resolution
    th = np.concatenate([np.linspace(0.0, math.pi, n, endpoint=False), sp])
    value, arg = _scbf_search(cfg, tau, th, th)
    step = math.pi / n
    if arg is not None:
        for _ in range(cfg.refinements):
            t1, t2 = arg[0], arg[1]
            th1 = np.concatenate([np.linspace(t1 - 1.5 * step, t1 + 1.5 * step, 17), sp])
            th2 = np.concatenate([np.linspace(t2 - 1.5 * step, t2 + 1.5 * step, 17), sp])
            v2, a2 = _scbf_search(cfg, tau, th1, th2)
            if a2 is not None and v2 > value:
                value, arg = v2, a2
            step *= 3.0 / 16.0
    if arg is None or not math.isfinite(value):
        raise InfeasibleTargetError(f"weak-user target {r2_target} bits is not achievable")
    t1, t2, p1, mode = arg
    return ScbfOptResult(r1=value, theta1=t1, theta2=t2, p1=p1, p2=cfg.p_total - p1,
                         mode=mode, w1=beam_from_angle(cfg, t1), w2=beam_from_angle(cfg, t2))


def tdm_region(cfg: ScbfConfig) -> tuple[tuple[float, float], tuple[float, float]]:
    """Time-sharing baseline: the segment between the single-user intercepts."""
    h1, h2 = scbf_channels(cfg)
    p = cfg.p_total
    r1 = math.log1p(p * float(np.linalg.norm(h1)) ** 2) / LN2
    r2 = math.log1p(p * float(np.linalg.norm(h2)) ** 2) / LN2
    return (r1, 0.0), (0.0, r2)
