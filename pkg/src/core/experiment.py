"""
Monte Carlo experiment runner
Sweeps SNR and CSI quality over seeded trials, runs every selected allocator
and aggregates sum-rate statistics per (method, SNR, beta)
"""

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import PAPC_WORKERS, DEFAULT_SEED, DEFAULT_TRIALS, CSV_SIGNIFICANT_DIGITS
from ..channel import generate_channel, apply_csi_error, derive_seed, STREAM_CHANNEL, STREAM_CSI_ERROR
from ..precoding import zf_spc, cb_spc, compose, cb_papc_precoder, gram_inverse
from ..allocation import (
    MpuProblem, orthogonal_projection_allocate, feasible_newton_allocate,
    build_mmi_problem, linear_scaling_allocate, mmi_newton_allocate, waterfilling_allocate,
    mmi_precoder, zf_effective_gains,
)
from ..analysis import (
    SPC_ZF, MPU_PROJ_ZF, MPU_OPT_ZF, MMI_LS_ZF, MMI_OPT_ZF, WF_ZF, SPC_CB, PAPC_CB, EST_LS_ZF,
    ls_gap_estimate, ls_rate_estimate, qmax_approx, recommend_method, db, cb_gap_estimate,
)
from .errors import ConfigError, OutputError, PapcError
from .metrics import evaluate, noise_variance

logger = logging.getLogger(__name__)

ADAPTIVE_ZF = "ADAPTIVE-ZF"
ALL_METHODS = [SPC_ZF, MPU_PROJ_ZF, MPU_OPT_ZF, MMI_LS_ZF, MMI_OPT_ZF, WF_ZF, SPC_CB, PAPC_CB, EST_LS_ZF]
KNOWN_METHODS = ALL_METHODS + [ADAPTIVE_ZF]
ZF_METHODS = {SPC_ZF, MPU_PROJ_ZF, MPU_OPT_ZF, MMI_LS_ZF, MMI_OPT_ZF, WF_ZF, EST_LS_ZF, ADAPTIVE_ZF}
CB_METHODS = {SPC_CB, PAPC_CB}

CSV_HEADER = [
    'method', 'm', 'k', 'snr_db', 'beta', 'trials',
    'mean_sum_rate_bps_hz', 'stderr', 'mean_iters', 'max_papc_violation',
]
VALIDATION_HEADER = ['table', 'm', 'k', 'beta', 'snr_db', 'measured', 'approx', 'error']

FIG_SNR_DB = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
FIG_BETAS = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0]


@dataclass
class ExperimentConfig:
    """Monte Carlo sweep description"""
    m: int = 128
    k: int = 16
    snr_db: List[float] = field(default_factory=lambda: [10.0])
    beta: List[float] = field(default_factory=lambda: [1.0])
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    methods: List[str] = field(default_factory=lambda: list(ALL_METHODS))
    output_path: str = "results.csv"

    def validate(self) -> 'ExperimentConfig':
        """Raise ConfigError on an invalid sweep"""
        if self.m < 1 or self.k < 1 or self.k > self.m:
            raise ConfigError(f"need 1 <= k <= m, got m={self.m}, k={self.k}")
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if not self.methods:
            raise ConfigError("no methods selected")
        unknown = [name for name in self.methods if name not in KNOWN_METHODS]
        if unknown:
            raise ConfigError(f"unknown methods: {', '.join(unknown)}")
        if not self.snr_db or not self.beta:
            raise ConfigError("snr_db and beta need at least one value each")
        if any(not 0.0 <= b <= 1.0 for b in self.beta):
            raise ConfigError(f"beta values must lie in [0, 1], got {self.beta}")
        if EST_LS_ZF in self.methods and not 3 <= self.k <= self.m / 2:
            raise ConfigError(f"{EST_LS_ZF} needs 3 <= k <= m/2, got m={self.m}, k={self.k}")
        return self


@dataclass
class ResultCell:
    """Aggregated statistics of one (method, SNR, beta) point"""
    method: str
    snr_db: float
    beta: float
    trials: int
    mean_sum_rate: float
    stderr: float
    mean_iters: float
    mean_papc_violation: float
    max_papc_violation: float
    nonconverged: int = 0


@dataclass
class ExperimentResult:
    """Per-method sum-rate statistics of a sweep"""
    config: ExperimentConfig
    cells: List[ResultCell] = field(default_factory=list)

    def cell(self, method: str, snr_db: float, beta: float) -> Optional[ResultCell]:
        """Look up one grid point"""
        for cell in self.cells:
            if cell.method == method and cell.snr_db == snr_db and cell.beta == beta:
                return cell
        return None


@dataclass
class _Sample:
    sum_rate: float
    iterations: float
    violation: float
    ok: bool = True


def expand_methods(methods: List[str]) -> List[str]:
    """Replace 'all' with the standard method set"""
    if 'all' in methods:
        extra = [name for name in methods if name not in ('all',) and name not in ALL_METHODS]
        return list(ALL_METHODS) + extra
    return list(methods)


def _precoders_for_beta(cfg: ExperimentConfig, h_ideal: np.ndarray, beta: float, trial: int) -> Tuple[np.ndarray, Dict[str, tuple], Optional[tuple]]:
    """SNR-independent precoders of one (trial, beta); WF inputs returned separately"""
    methods = set(cfg.methods)
    if ADAPTIVE_ZF in methods:
        methods |= {MPU_OPT_ZF, MMI_LS_ZF}
    channels = apply_csi_error(h_ideal, beta, derive_seed(cfg.seed, trial, STREAM_CSI_ERROR))
    h_measured = channels.h_measured
    precoders: Dict[str, tuple] = {}
    wf_inputs = None

    if methods & ZF_METHODS:
        zf = zf_spc(h_measured)
        precoders[SPC_ZF] = (zf.w, 0, True)
        if MPU_PROJ_ZF in methods:
            p, report = orthogonal_projection_allocate(MpuProblem.from_power(zf.power))
            precoders[MPU_PROJ_ZF] = (compose(p, zf.theta), report.iterations, report.converged)
        if MPU_OPT_ZF in methods:
            p, report = feasible_newton_allocate(MpuProblem.from_power(zf.power))
            precoders[MPU_OPT_ZF] = (compose(p, zf.theta), report.iterations, report.converged)
        if methods & {MMI_LS_ZF, MMI_OPT_ZF, WF_ZF}:
            prob = build_mmi_problem(zf.power)
            _, x_ls = linear_scaling_allocate(prob)
            precoders[MMI_LS_ZF] = (mmi_precoder(zf.w, prob.alpha, x_ls), 0, True)
            if MMI_OPT_ZF in methods:
                x, report = mmi_newton_allocate(prob)
                precoders[MMI_OPT_ZF] = (mmi_precoder(zf.w, prob.alpha, x), report.iterations, report.converged)
            if WF_ZF in methods:
                wf_inputs = (prob, zf.w, zf_effective_gains(h_measured))

    if methods & CB_METHODS:
        cb = cb_spc(h_measured)
        precoders[SPC_CB] = (cb.w, 0, True)
        precoders[PAPC_CB] = (cb_papc_precoder(h_measured, cb.alpha).w, 0, True)

    return channels.h_ideal, precoders, wf_inputs


def _run_trial(cfg: ExperimentConfig, trial: int) -> Dict[Tuple[str, float, float], _Sample]:
    """All samples of one trial, keyed by (method, snr_db, beta)"""
    h_ideal = generate_channel(cfg.m, cfg.k, derive_seed(cfg.seed, trial, STREAM_CHANNEL))
    samples: Dict[Tuple[str, float, float], _Sample] = {}

    for beta in cfg.beta:
        try:
            h_eval, precoders, wf_inputs = _precoders_for_beta(cfg, h_ideal, beta, trial)
        except PapcError as e:
            logger.warning(f"Trial {trial}, beta={beta}: precoder construction failed: {e}")
            for method in cfg.methods:
                for snr in cfg.snr_db:
                    samples[(method, snr, beta)] = _Sample(math.nan, math.nan, math.nan, ok=False)
            continue

        for snr in cfg.snr_db:
            sigma2 = noise_variance(snr)
            noise = np.full(cfg.k, sigma2)
            evaluated: Dict[str, _Sample] = {}
            spc_sinr = None
            for method, (w, iterations, ok) in precoders.items():
                rate = evaluate(h_eval, w, noise)
                evaluated[method] = _Sample(rate.sum_rate, iterations, rate.papc_violation, ok)
                if method == SPC_ZF:
                    spc_sinr = rate.sinr

            if wf_inputs is not None:
                prob, w_spc, gains = wf_inputs
                x, report = waterfilling_allocate(prob, gains, noise)
                rate = evaluate(h_eval, mmi_precoder(w_spc, prob.alpha, x), noise)
                evaluated[WF_ZF] = _Sample(rate.sum_rate, report.iterations, rate.papc_violation, report.converged)

            if EST_LS_ZF in cfg.methods:
                gap = ls_gap_estimate(sigma2, cfg.k, cfg.m, beta)
                evaluated[EST_LS_ZF] = _Sample(ls_rate_estimate(spc_sinr, gap), 0, math.nan)

            if ADAPTIVE_ZF in cfg.methods:
                chosen = evaluated[recommend_method(beta, snr)]
                evaluated[ADAPTIVE_ZF] = _Sample(chosen.sum_rate, chosen.iterations, chosen.violation, chosen.ok)

            for method in cfg.methods:
                samples[(method, snr, beta)] = evaluated[method]

    return samples


def _aggregate(cfg: ExperimentConfig, per_trial: List[Dict[Tuple[str, float, float], _Sample]]) -> List[ResultCell]:
    cells = []
    for method in cfg.methods:
        for snr in cfg.snr_db:
            for beta in cfg.beta:
                collected = [trial[(method, snr, beta)] for trial in per_trial]
                kept = [s for s in collected if s.ok]
                rates = np.array([s.sum_rate for s in kept])
                iterations = np.array([s.iterations for s in kept])
                violations = np.array([s.violation for s in kept])
                count = len(kept)
                cells.append(ResultCell(
                    method=method,
                    snr_db=snr,
                    beta=beta,
                    trials=count,
                    mean_sum_rate=float(np.mean(rates)) if count else math.nan,
                    stderr=float(np.std(rates, ddof=1) / np.sqrt(count)) if count > 1 else 0.0,
                    mean_iters=float(np.mean(iterations)) if count else math.nan,
                    mean_papc_violation=float(np.mean(violations)) if count else math.nan,
                    max_papc_violation=float(np.max(violations)) if count else math.nan,
                    nonconverged=len(collected) - count,
                ))
    return cells


def _worker_count(workers: Optional[int]) -> int:
    return max(1, int(workers if workers is not None else PAPC_WORKERS))


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> ExperimentResult:
    """Run every trial of a sweep and aggregate in trial order"""
    cfg.methods = expand_methods(cfg.methods)
    cfg.validate()
    pool_size = _worker_count(workers)
    logger.info(f"Experiment start: M={cfg.m}, K={cfg.k}, trials={cfg.trials}, "
                f"methods={cfg.methods}, workers={pool_size}")

    trials = range(cfg.trials)
    if pool_size == 1:
        per_trial = [_run_trial(cfg, t) for t in trials]
    else:
        with ThreadPoolExecutor(max_workers=pool_size) as executor:
            per_trial = list(executor.map(lambda t: _run_trial(cfg, t), trials))

    result = ExperimentResult(config=cfg, cells=_aggregate(cfg, per_trial))
    excluded = sum(cell.nonconverged for cell in result.cells)
    if excluded:
        logger.info(f"Excluded {excluded} non-convergent (method, trial) samples")
    logger.info(f"Experiment finished: {len(result.cells)} cells")
    return result


def _fmt(value: float) -> str:
    return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"


def _write_rows(path: str, header: List[str], rows: List[List[str]]) -> None:
    try:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise OutputError(path, str(e)) from e


def emit_csv(result: ExperimentResult, path: str) -> None:
    """Write one CSV row per (method, SNR, beta)"""
    cfg = result.config
    rows = [
        [
            cell.method, str(cfg.m), str(cfg.k), _fmt(cell.snr_db), _fmt(cell.beta), str(cell.trials),
            _fmt(cell.mean_sum_rate), _fmt(cell.stderr), _fmt(cell.mean_iters), _fmt(cell.max_papc_violation),
        ]
        for cell in result.cells
    ]
    _write_rows(path, CSV_HEADER, rows)
    logger.info(f"Wrote {len(rows)} rows to {path}")


def read_csv(path: str) -> List[Dict[str, str]]:
    """Read a result CSV back as a list of row dicts"""
    try:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            return list(csv.DictReader(f))
    except OSError as e:
        raise OutputError(path, str(e)) from e


@dataclass
class ValidationRow:
    """One measured-vs-approximated comparison"""
    table: str
    m: int
    k: int
    beta: float
    snr_db: float
    measured: float
    approx: float
    error: float


def _qmax_rows(m: int, k_list: List[int], trials: int, seed: int) -> List[ValidationRow]:
    rows = []
    for k in k_list:
        measured = []
        for trial in range(trials):
            h = generate_channel(m, k, derive_seed(seed, trial, STREAM_CHANNEL))
            pinv = h.conj().T @ gram_inverse(h)
            measured.append(np.max(np.sum(np.abs(pinv) ** 2, axis=1)))
        mean_qmax = float(np.mean(measured))
        approx = qmax_approx(m, k)
        rows.append(ValidationRow('qmax', m, k, math.nan, math.nan, mean_qmax, approx, (mean_qmax - approx) / approx))
    return rows


def _gap_rows(m: int, k: int, betas: List[float], snrs: List[float], trials: int, seed: int) -> List[ValidationRow]:
    cfg = ExperimentConfig(m=m, k=k, snr_db=list(snrs), beta=list(betas), trials=trials, seed=seed,
                           methods=[SPC_ZF, MMI_LS_ZF, SPC_CB, PAPC_CB])
    ls_ratio: Dict[Tuple[float, float], List[float]] = {}
    cb_ratio: Dict[Tuple[float, float], List[float]] = {}
    for trial in range(trials):
        h_ideal = generate_channel(m, k, derive_seed(seed, trial, STREAM_CHANNEL))
        for beta in betas:
            h_eval, precoders, _ = _precoders_for_beta(cfg, h_ideal, beta, trial)
            for snr in snrs:
                noise = np.full(k, noise_variance(snr))
                sinr = {name: evaluate(h_eval, precoders[name][0], noise).sinr for name in cfg.methods}
                ls_ratio.setdefault((beta, snr), []).append(float(np.mean(sinr[SPC_ZF] / sinr[MMI_LS_ZF])))
                cb_ratio.setdefault((beta, snr), []).append(float(np.mean(sinr[SPC_CB] / sinr[PAPC_CB])))

    rows = []
    for beta in betas:
        for snr in snrs:
            measured_db = db(float(np.mean(ls_ratio[(beta, snr)])))
            approx_db = ls_gap_estimate(noise_variance(snr), k, m, beta).g_db
            rows.append(ValidationRow('ls_gap', m, k, beta, snr, measured_db, approx_db, measured_db - approx_db))
    for beta in betas:
        for snr in snrs:
            measured_db = db(float(np.mean(cb_ratio[(beta, snr)])))
            approx_db = db(cb_gap_estimate())
            rows.append(ValidationRow('cb_gap', m, k, beta, snr, measured_db, approx_db, measured_db - approx_db))
    return rows


def validate_approximations(
    m: int,
    k_list: List[int],
    trials: int,
    seed: int,
    betas: Optional[List[float]] = None,
    snr_db: Optional[List[float]] = None,
) -> List[ValidationRow]:
    """Monte Carlo check of the Q_max, linear-scaling gap and CB gap approximations"""
    if not k_list or any(k < 3 or 2 * k > m for k in k_list):
        raise ConfigError(f"every k must satisfy 3 <= k <= m/2, got m={m}, k={k_list}")
    if trials < 1:
        raise ConfigError(f"trials must be at least 1, got {trials}")
    betas = [0.8, 0.9, 0.95, 1.0] if betas is None else list(betas)
    snr_db = [-10.0, 0.0, 10.0, 20.0, 30.0] if snr_db is None else list(snr_db)

    logger.info(f"Approximation validation: M={m}, K={k_list}, trials={trials}")
    rows = _qmax_rows(m, k_list, trials, seed)
    for k in k_list:
        rows.extend(_gap_rows(m, k, betas, snr_db, trials, seed))
    return rows


def emit_validation_csv(rows: List[ValidationRow], path: str) -> None:
    """Write validation rows in the table,m,k,beta,snr_db,measured,approx,error layout"""
    lines = [
        [row.table, str(row.m), str(row.k), _fmt(row.beta), _fmt(row.snr_db),
         _fmt(row.measured), _fmt(row.approx), _fmt(row.error)]
        for row in rows
    ]
    _write_rows(path, VALIDATION_HEADER, lines)
    logger.info(f"Wrote {len(lines)} validation rows to {path}")


def preset(name: str) -> ExperimentConfig:
    """Named sweep configurations (fig5 to fig9)"""
    presets = {
        'fig5': ExperimentConfig(m=128, k=16, snr_db=list(FIG_SNR_DB), beta=[1.0], methods=list(ALL_METHODS)),
        'fig6': ExperimentConfig(m=256, k=24, snr_db=list(FIG_SNR_DB), beta=[1.0], methods=list(ALL_METHODS)),
        'fig7': ExperimentConfig(m=128, k=16, snr_db=[-10.0], beta=list(FIG_BETAS), methods=list(ALL_METHODS)),
        'fig8': ExperimentConfig(m=128, k=16, snr_db=[10.0], beta=list(FIG_BETAS), methods=list(ALL_METHODS)),
        'fig9': ExperimentConfig(m=128, k=16, snr_db=[30.0], beta=list(FIG_BETAS), methods=list(ALL_METHODS)),
    }
    if name not in presets:
        raise ConfigError(f"unknown preset '{name}', choose from {', '.join(sorted(presets))}")
    cfg = presets[name]
    cfg.output_path = f"{name}.csv"
    return cfg
