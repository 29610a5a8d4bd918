"""Run validated configs and write CSV / JSON reports."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .config import ExperimentConfig, validate_config
from ..errors import HitchinError
from .suites import SUITES, Context, Row

COLUMNS = ["suite", "check_id", "paper_ref", "value", "expected", "tolerance", "pass"]


@dataclass
class Report:
    rows: list

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([r.suite, r.check_id, r.paper_ref, f"{r.value:.17g}", r.expected,
                        f"{r.tolerance:.17g}", "true" if r.passed else "false"])
        return buf.getvalue()

    def to_json(self):
        return json.dumps(
            {"passed": self.passed, "rows": [asdict(r) for r in self.rows]},
            indent=2, sort_keys=True, default=float,
        )


def run_call(args):
    seed, base, embed_n, index, call = args
    rng = np.random.default_rng([seed, index])
    ctx = Context(seed, base, embed_n, rng)
    try:
        rows = SUITES[call.name].run(ctx, call.params, call.tolerance)
    except HitchinError as exc:
        rows = [Row(call.name, "error", "suite raised", float("nan"), f"{type(exc).__name__}: {exc}",
                    call.tolerance, False)]
    for r in rows:
        r.check_id = f"{call.id}/{r.check_id}"
    return rows


def run_experiment(config, jobs=1):
    """Run every suite call; rows come back in config order whatever ``jobs`` is."""
    if not isinstance(config, ExperimentConfig):
        config = validate_config(config)
    tasks = [(config.seed, config.base, config.embed_n, i, c) for i, c in enumerate(config.suite)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run_call, tasks))
    else:
        results = [run_call(t) for t in tasks]
    return Report([r for rows in results for r in rows])
