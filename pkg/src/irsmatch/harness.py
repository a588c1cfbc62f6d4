"""Seeded Monte-Carlo trials, parameter sweeps, noise calibration and CSV output."""
import csv
import logging
import math
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .beamforming import PhaseBank
from .channels import make_drop, make_geometry
from .config import ConfigError
from .linalg import SingularMatrixError
from .matching import distance_matching, exhaustive_best_matching, propose, random_matching
from .rates import DropEvaluator

log = logging.getLogger(__name__)

SWEEP_AXES = ("n_elements", "total_power_db", "k_users", "d_r")
CSV_HEADER = ("axis_value", "algorithm", "mean_sum_rate", "std_error", "trials", "seed", "non_converged_count")
MAX_REDRAWS = 100


@dataclass(frozen=True)
class AlgorithmOutcome:
    sum_rate: float
    per_user_rates: tuple
    matching: tuple  # irs_of_user
    stage2_iterations: int = 0
    converged: bool = True


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    redraws: int
    outcomes: dict = field(default_factory=dict)


@dataclass
class PreparedDrop:
    """A drop plus the random streams its algorithms consume."""

    trial_index: int
    attempt: int
    geometry: object
    evaluator: DropEvaluator
    assoc_seed: np.random.SeedSequence
    random_seed: np.random.SeedSequence


def prepare_drop(config, trial_index, attempt=0):
    """Generate the drop for ``(config.seed, trial_index, attempt)``.

    Three independent child streams: geometry + channels, the association
    relabeling, and the random-matching baseline. Keeping them separate means
    a trial's drop does not depend on which algorithms are requested.
    """
    ss = np.random.SeedSequence([config.seed, trial_index, attempt])
    chan_ss, assoc_ss, rand_ss = ss.spawn(3)
    rng = np.random.default_rng(chan_ss)
    geometry = make_geometry(rng, config.k_users, config.l_irs, config.d_r)
    channels = make_drop(rng, geometry, config.fading, config.m_antennas, config.n_elements)
    bank = PhaseBank.design(channels, config.alphabet)
    evaluator = DropEvaluator(channels, bank, config.budget())
    return PreparedDrop(trial_index, attempt, geometry, evaluator, assoc_ss, rand_ss)


def _outcome(drop, matching):
    rates = drop.user_rates(matching)
    return AlgorithmOutcome(
        sum_rate=float(np.sum(rates)),
        per_user_rates=tuple(float(r) for r in rates),
        matching=matching.irs_of_user,
        stage2_iterations=matching.iterations,
        converged=matching.converged,
    )


def evaluate_algorithms(prepared, algorithms, evaluator=None):
    drop = prepared.evaluator if evaluator is None else evaluator
    out = {}
    if "proposed" in algorithms or "gs_only" in algorithms:
        res = propose(drop, np.random.default_rng(prepared.assoc_seed))
        if "proposed" in algorithms:
            out["proposed"] = _outcome(drop, res.final)
        if "gs_only" in algorithms:
            out["gs_only"] = _outcome(drop, res.stage1)
    if "distance" in algorithms:
        out["distance"] = _outcome(drop, distance_matching(prepared.geometry))
    if "random" in algorithms:
        out["random"] = _outcome(drop, random_matching(np.random.default_rng(prepared.random_seed), drop.k_users))
    if "exhaustive" in algorithms:
        out["exhaustive"] = _outcome(drop, exhaustive_best_matching(drop))
    return {a: out[a] for a in algorithms}


def run_trial(config, trial_index, algorithms=None):
    """Evaluate every requested algorithm on the same drop.

    A drop whose ZF Gram matrix turns out singular for any evaluated matching
    is discarded and redrawn from a derived seed; ``redraws`` counts those.
    """
    algorithms = tuple(config.algorithms if algorithms is None else algorithms)
    for attempt in range(MAX_REDRAWS):
        prepared = prepare_drop(config, trial_index, attempt)
        try:
            outcomes = evaluate_algorithms(prepared, algorithms)
        except SingularMatrixError as exc:
            log.debug("trial %d attempt %d singular (pivot %.3e); redrawing", trial_index, attempt, exc.pivot)
            continue
        return TrialResult(trial_index, attempt, outcomes)
    raise RuntimeError(f"trial {trial_index}: {MAX_REDRAWS} consecutive singular drops")


def _run_trial_args(args):
    return run_trial(*args)


def run_trials(config, workers=1, algorithms=None):
    """All trials of ``config``, ordered by trial index."""
    jobs = [(config, t, algorithms) for t in range(config.trials)]
    if workers <= 1:
        return [_run_trial_args(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_trial_args, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


@dataclass(frozen=True)
class SweepRow:
    axis_value: object
    algorithm: str
    mean_sum_rate: float
    std_error: float
    trials: int
    seed: int
    non_converged_count: int


def summarize(trials, algorithm, axis_value, seed):
    rates = np.array([t.outcomes[algorithm].sum_rate for t in trials])
    n = rates.size
    se = float(rates.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    non_conv = sum(1 for t in trials if not t.outcomes[algorithm].converged)
    return SweepRow(axis_value, algorithm, float(rates.mean()), se, n, seed, non_conv)


def apply_axis(config, axis, value):
    if axis not in SWEEP_AXES:
        raise ConfigError(f"cannot sweep {axis!r}; choose from {SWEEP_AXES}")
    if axis == "k_users":
        return config.replace(k_users=int(value), l_irs=int(value))
    if axis == "n_elements":
        return config.replace(n_elements=int(value))
    return config.replace(**{axis: float(value)})


@dataclass
class SweepResult:
    axis: str
    rows: list
    trials: dict  # axis value -> list of TrialResult

    def mean(self, value, algorithm):
        for r in self.rows:
            if r.axis_value == value and r.algorithm == algorithm:
                return r.mean_sum_rate
        raise KeyError((value, algorithm))

    def paired_diff(self, value, a, b):
        """Per-trial sum-rate differences ``a - b`` at one axis value."""
        return np.array([t.outcomes[a].sum_rate - t.outcomes[b].sum_rate for t in self.trials[value]])

    def redraws(self):
        return sum(t.redraws for ts in self.trials.values() for t in ts)


def run_sweep(base_config, axis, values, workers=1):
    """One averaged row per (axis value, algorithm); every value reuses the
    same seed, so trials are paired across algorithms."""
    configs = [(v, apply_axis(base_config, axis, v)) for v in values]
    rows, per_value = [], {}
    for value, cfg in configs:
        trials = run_trials(cfg, workers=workers)
        per_value[value] = trials
        for alg in cfg.algorithms:
            rows.append(summarize(trials, alg, value, cfg.seed))
        log.info("%s=%s done (%d trials)", axis, value, cfg.trials)
    return SweepResult(axis, rows, per_value)


def run_point(config, workers=1):
    """A single operating point reported as a sweep with an empty axis."""
    trials = run_trials(config, workers=workers)
    rows = [summarize(trials, alg, "", config.seed) for alg in config.algorithms]
    return SweepResult("", rows, {"": trials})


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_csv(rows, path):
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow(
                [_fmt(r.axis_value), r.algorithm, _fmt(r.mean_sum_rate), _fmt(r.std_error), r.trials, r.seed,
                 r.non_converged_count]
            )
    return path


def read_csv(path):
    """Parse a results file back into :class:`SweepRow` objects (axis values stay text)."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        return [
            SweepRow(
                row["axis_value"], row["algorithm"], float(row["mean_sum_rate"]), float(row["std_error"]),
                int(row["trials"]), int(row["seed"]), int(row["non_converged_count"]),
            )
            for row in reader
        ]


def version_string():
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"], capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        if rev.returncode == 0 and rev.stdout.strip():
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def write_metadata(path, config, extra=None):
    lines = [f"version = {version_string()}", f"seed = {config.seed}"]
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {v}")
    lines.append("")
    lines.append("[config]")
    lines.append(config.to_text())
    Path(path).write_text("\n".join(lines), encoding="utf-8")
    return Path(path)


class CalibrationError(RuntimeError):
    def __init__(self, message, bracket):
        super().__init__(message)
        self.bracket = bracket


@dataclass(frozen=True)
class CalibrationResult:
    noise_power_db: float
    achieved_sum_rate: float
    target: float
    evaluations: int
    bracket: tuple


class _ProposedRate:
    """Mean proposed sum rate as a function of noise power, reusing drops."""

    def __init__(self, config):
        self.config = config
        self.drops = {}
        self.calls = 0

    def _drop(self, t, attempt):
        key = (t, attempt)
        if key not in self.drops:
            self.drops[key] = prepare_drop(self.config, t, attempt)
        return self.drops[key]

    def __call__(self, noise_db):
        self.calls += 1
        budget = self.config.budget(noise_db)
        total = 0.0
        for t in range(self.config.trials):
            for attempt in range(MAX_REDRAWS):
                prepared = self._drop(t, attempt)
                try:
                    out = evaluate_algorithms(prepared, ("proposed",), prepared.evaluator.with_budget(budget))
                except SingularMatrixError:
                    continue
                total += out["proposed"].sum_rate
                break
            else:
                raise RuntimeError(f"trial {t}: {MAX_REDRAWS} consecutive singular drops")
        return total / self.config.trials


def calibrate_noise(config, target_sum_rate, d_r=None, bracket=(-160.0, -20.0), rel_tol=0.02, xtol_db=1e-3):
    """Bisect the noise power (dB) until the mean proposed sum rate hits
    ``target_sum_rate``.

    Drops and phase designs are drawn once and reused at every noise level
    (common random numbers), so the objective is a deterministic function of
    the noise power. Lower noise gives a higher rate.
    """
    if d_r is not None:
        config = config.replace(d_r=float(d_r))
    rate = _ProposedRate(config)
    lo, hi = bracket
    r_lo, r_hi = rate(lo), rate(hi)
    if not (r_hi <= target_sum_rate <= r_lo):
        raise CalibrationError(
            f"target {target_sum_rate} outside [{r_hi:.3f}, {r_lo:.3f}] reached on noise bracket [{lo}, {hi}] dB",
            ((lo, r_lo), (hi, r_hi)),
        )
    best_db, best_rate = (lo, r_lo) if abs(r_lo - target_sum_rate) < abs(r_hi - target_sum_rate) else (hi, r_hi)
    while hi - lo > xtol_db:
        mid = 0.5 * (lo + hi)
        r_mid = rate(mid)
        if abs(r_mid - target_sum_rate) < abs(best_rate - target_sum_rate):
            best_db, best_rate = mid, r_mid
        if abs(r_mid - target_sum_rate) <= 1e-3 * target_sum_rate:
            break
        if r_mid > target_sum_rate:
            lo = mid
        else:
            hi = mid
    if abs(best_rate - target_sum_rate) > rel_tol * target_sum_rate:
        raise CalibrationError(
            f"bisection ended at {best_db:.4f} dB with rate {best_rate:.3f}, not within {rel_tol:.0%} of target",
            ((lo, rate(lo)), (hi, rate(hi))),
        )
    return CalibrationResult(best_db, best_rate, target_sum_rate, rate.calls, (lo, hi))
