"""Seeded repetition harness and school-size sweeps.

Trial ``k`` of a batch always runs on the stream seeded by
``derive_seed(base_seed, k)``, so results do not depend on how trials are
scheduled across worker processes.  Aggregation happens after all trials
finish, in trial-index order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .core import DivergenceError, Pattern, SimParams, Strategy
from .metrics import classify_pattern
from .noise import NoiseSource, derive_seed
from .predation import predator_spawn, run_predation
from .school import generate_school
from .survival import TrialRecord, average_living_time, p_eaten_final

log = logging.getLogger(__name__)


@dataclass
class TrialSummary:
    index: int
    seed: int
    p_eaten: float = float("nan")
    t_alive: float = float("nan")
    n_eaten: int = -1
    pattern: Pattern = Pattern.UNCLASSIFIED
    error: Optional[str] = None
    record: Optional[TrialRecord] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def run_trial(params: SimParams, seed: int, record_every: int = 10, keep_frames: bool = False) -> TrialRecord:
    """School generation, predator spawn and predation phase on one stream."""
    src = NoiseSource(seed)
    school = generate_school(params, src)
    pred = predator_spawn(school, params, src)
    rec = run_predation(school, pred, params, src, record_every=record_every, keep_frames=keep_frames)
    rec.seed = seed
    return rec


def summarize(rec: TrialRecord, params: SimParams, index: int = 0, keep_record: bool = False) -> TrialSummary:
    return TrialSummary(
        index=index,
        seed=rec.seed,
        p_eaten=p_eaten_final(rec),
        t_alive=average_living_time(rec),
        n_eaten=rec.n_eaten,
        pattern=classify_pattern(rec.diameter, rec.velocity_std, rec.n_groups, params),
        record=rec if keep_record else None,
    )


def _trial_job(args):
    params, base_seed, index, record_every, keep_records = args
    seed = derive_seed(base_seed, index)
    try:
        rec = run_trial(params, seed, record_every=record_every)
    except DivergenceError as exc:
        return TrialSummary(index=index, seed=seed, error=str(exc))
    rec.trial_index = index
    return summarize(rec, params, index, keep_records)


def run_trials(
    params: SimParams,
    n_trials: int,
    base_seed: int,
    jobs: int = 1,
    record_every: int = 10,
    keep_records: bool = False,
) -> List[TrialSummary]:
    """Run ``n_trials`` independent trials; failed trials carry an ``error`` string."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    tasks = [(params, base_seed, k, record_every, keep_records) for k in range(n_trials)]
    if jobs <= 1:
        out = [_trial_job(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(_trial_job, tasks, chunksize=1))
    failed = [s for s in out if not s.ok]
    if failed:
        log.warning("%d of %d trials failed: %s", len(failed), n_trials, "; ".join(
            f"#{s.index}: {s.error}" for s in failed[:5]))
    return out


@dataclass
class SweepRow:
    n: int
    strategy: Strategy
    trials: int
    failures: int
    p_eaten_mean: float
    p_eaten_std: float
    p_eaten_min: float
    p_eaten_max: float
    p_eaten_q25: float
    p_eaten_q50: float
    p_eaten_q75: float
    t_alive_mean: float
    t_alive_std: float
    n_eaten_mean: float


@dataclass
class SweepTable:
    rows: List[SweepRow] = field(default_factory=list)

    def row(self, n: int, strategy: "str | Strategy" = None) -> SweepRow:
        for r in self.rows:
            if r.n == n and (strategy is None or r.strategy is Strategy.parse(strategy)):
                return r
        raise KeyError((n, strategy))


def aggregate(n: int, strategy: Strategy, summaries: Sequence[TrialSummary]) -> SweepRow:
    ok = [s for s in summaries if s.ok]
    if not ok:
        raise RuntimeError(f"every trial failed at N={n}")
    pe = np.array([s.p_eaten for s in ok])
    ta = np.array([s.t_alive for s in ok])
    ne = np.array([s.n_eaten for s in ok], dtype=float)
    q25, q50, q75 = np.quantile(pe, [0.25, 0.5, 0.75])
    return SweepRow(
        n=n, strategy=strategy, trials=len(ok), failures=len(summaries) - len(ok),
        p_eaten_mean=float(pe.mean()), p_eaten_std=float(pe.std(ddof=1)) if len(pe) > 1 else 0.0,
        p_eaten_min=float(pe.min()), p_eaten_max=float(pe.max()),
        p_eaten_q25=float(q25), p_eaten_q50=float(q50), p_eaten_q75=float(q75),
        t_alive_mean=float(ta.mean()), t_alive_std=float(ta.std(ddof=1)) if len(ta) > 1 else 0.0,
        n_eaten_mean=float(ne.mean()),
    )


def sweep_school_size(
    base_params: SimParams,
    n_values: Sequence[int],
    n_trials: int,
    base_seed: int,
    jobs: int = 1,
    strategies: Optional[Sequence["str | Strategy"]] = None,
) -> SweepTable:
    """One batch of trials per school size (and per strategy), aggregated.

    ``base_params`` is used as given; load the ``sweep-default`` preset to
    reproduce the reference size sweeps.  Batch ``(N, strategy)`` draws its
    trial seeds from ``derive_seed(base_seed, N)`` so adding sizes to the grid
    leaves existing rows unchanged.
    """
    if any(n < 1 for n in n_values):
        raise ValueError("school sizes must be >= 1")
    strategies = [base_params.strategy] if strategies is None else [Strategy.parse(s) for s in strategies]
    table = SweepTable()
    for strategy in strategies:
        for n in n_values:
            params = replace(base_params, n_prey=int(n), strategy=strategy)
            batch_seed = derive_seed(base_seed, int(n))
            log.info("sweep N=%d strategy=%s trials=%d", n, strategy.value, n_trials)
            summaries = run_trials(params, n_trials, batch_seed, jobs=jobs)
            table.rows.append(aggregate(int(n), strategy, summaries))
    return table
