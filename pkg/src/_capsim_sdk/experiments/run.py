import json
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List
from typing import Optional

import numpy as np

from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.experiments.models import ExperimentResult
from _capsim_sdk.experiments.models import ExperimentSpec
from _capsim_sdk.experiments.registry import get_experiment
from _capsim_sdk.experiments.registry import RunContext
from _capsim_sdk.utils import write_csv

logger = logging.getLogger("capsim.experiments")


def _numeric_leaves(summary: dict, prefix: str = ""):
    for key, value in summary.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _numeric_leaves(value, f"{name}.")
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            yield name, float(value)


def aggregate_summaries(summaries: List[dict]) -> dict:
    """min/median/max over repetitions of every numeric summary entry present in all of them."""
    per_run = [dict(_numeric_leaves(s)) for s in summaries]
    shared = [k for k in per_run[0] if all(k in run for run in per_run)]
    out = {}
    for key in shared:
        values = np.array([run[key] for run in per_run])
        out[key] = {
            "min": float(values.min()),
            "median": float(np.median(values)),
            "max": float(values.max()),
        }
    return out


def run_experiment(
    spec: ExperimentSpec,
    reducer: Optional[ChunkReducer] = None,
    table_cap: int = 20_000_000,
) -> ExperimentResult:
    """
    Run every repetition of `spec` and write `<name>.csv` and `<name>.summary.json` under `spec.out_dir`.

    Each CSV row starts with the repetition number and its seed. The summary embeds the full spec, every
    repetition's summary and min/median/max aggregates. With more than one worker in `reducer` and more than one
    repetition, repetitions run concurrently and each uses a single-threaded reducer with the same chunk size, so
    outputs do not depend on the worker count.
    """
    reducer = reducer or ChunkReducer()
    experiment = get_experiment(spec.name)
    if experiment.prepare is not None:
        spec = experiment.prepare(spec)
    spec.out_dir.mkdir(parents=True, exist_ok=True)

    parallel = reducer.workers > 1 and spec.repetitions > 1
    ctx = RunContext(
        reducer=ChunkReducer(reducer.chunk_size, 1) if parallel else reducer,
        table_cap=table_cap,
    )

    def _run(indexed_seed):
        repetition, seed = indexed_seed
        logger.info(f"Experiment {spec.name}: repetition {repetition}/{spec.repetitions} (seed {seed}).")
        return experiment.run(spec, seed, ctx)

    jobs = list(enumerate(spec.seeds, start=1))
    if parallel:
        with ThreadPoolExecutor(max_workers=min(reducer.workers, spec.repetitions)) as pool:
            results = list(pool.map(_run, jobs))
    else:
        results = [_run(job) for job in jobs]

    rows = [
        {"repetition": repetition, "seed": seed, **row}
        for (repetition, seed), (run_rows, _) in zip(jobs, results)
        for row in run_rows
    ]
    summaries = [summary for _, summary in results]
    summary = {
        "spec": json.loads(spec.json()),
        "repetitions": [
            {"repetition": repetition, "seed": seed, **s}
            for (repetition, seed), s in zip(jobs, summaries)
        ],
        "aggregate": aggregate_summaries(summaries),
    }

    csv_path = spec.out_dir / f"{spec.name}.csv"
    summary_path = spec.out_dir / f"{spec.name}.summary.json"
    n_rows = write_csv(rows, csv_path)
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
    logger.info(f"Wrote {n_rows} rows to {csv_path} and the summary to {summary_path}.")
    return ExperimentResult(
        name=spec.name,
        csv_path=csv_path,
        summary_path=summary_path,
        n_rows=n_rows,
        summary=summary,
    )
