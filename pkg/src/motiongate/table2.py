"""Published matched-samples t-test table for the blur experiment.

``TABLE2`` holds the printed row values. Only ``mean`` and ``sd`` are inputs;
the remaining columns are kept so recomputed values can be diffed against
what was printed. The printed table labels its CI columns "Upper" then
"Lower" although the first holds the lower bound; here they are stored as
``ci_low``/``ci_high``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ValidationError
from .ssq import SYMPTOMS, Condition, PairedTestResult, SsqResponse, paired_t_from_summary

N_PAIRS = 20
TOLERANCE = 0.0005


class Table2Row(NamedTuple):
    symptom: str
    mean: float
    sd: float
    se: float
    ci_low: float
    ci_high: float
    t: float
    df: int
    p: float


# fmt: off
TABLE2: tuple[Table2Row, ...] = (
    Table2Row("GeneralDiscomfort",       -0.65, 0.74516, 0.16662, -0.99875, -0.30125, -3.901, 19, 0.001),
    Table2Row("Fatigue",                 -0.05, 0.22361, 0.05,    -0.15465,  0.05465, -1.0,   19, 0.33),
    Table2Row("Headache",                 0.0,  0.32444, 0.07255, -0.15184,  0.15184,  0.0,   19, 1.0),
    Table2Row("EyeStrain",               -0.4,  0.59824, 0.13377, -0.67999, -0.12001, -2.99,  19, 0.008),
    Table2Row("DifficultFocusing",       -0.1,  0.30779, 0.06882, -0.24405,  0.04405, -1.453, 19, 0.163),
    Table2Row("Nausea",                  -0.55, 0.60481, 0.13524, -0.83306, -0.26694, -4.067, 19, 0.001),
    Table2Row("DifficultyConcentrating", -0.2,  0.41039, 0.09177, -0.39207, -0.00793, -2.179, 19, 0.042),
    Table2Row("StomachAwareness",        -0.3,  0.57124, 0.12773, -0.56735, -0.03265, -2.349, 19, 0.03),
    Table2Row("BlurredVision",           -0.15, 0.48936, 0.10942, -0.37903,  0.07903, -1.371, 19, 0.186),
    Table2Row("IncreasedSalivation",     -0.1,  0.30779, 0.06882, -0.24405,  0.04405, -1.453, 19, 0.163),
    Table2Row("DizzyEyesOpen",           -0.55, 0.68633, 0.15347, -0.87121, -0.22879, -3.584, 19, 0.002),
    Table2Row("DizzyEyesClosed",         -0.2,  0.52315, 0.11698, -0.44484,  0.04484, -1.71,  19, 0.104),
    Table2Row("Vertigo",                 -0.05, 0.22361, 0.05,    -0.15465,  0.05465, -1.0,   19, 0.33),
    Table2Row("FullnessOfHead",          -0.15, 0.36635, 0.08192, -0.32146,  0.02146, -1.831, 19, 0.083),
)
# fmt: on

CHECKED_FIELDS = ("se", "ci_low", "ci_high", "t", "p")


@dataclass(frozen=True)
class RowCheck:
    symptom: str
    computed: PairedTestResult
    printed: Table2Row
    deviations: dict[str, float]
    tolerance: float = TOLERANCE

    @property
    def passed(self) -> bool:
        return all(abs(d) <= self.tolerance for d in self.deviations.values())

    @property
    def failing_fields(self) -> list[str]:
        return [k for k, d in self.deviations.items() if abs(d) > self.tolerance]


def check_row(row: Table2Row, n: int = N_PAIRS, tolerance: float = TOLERANCE) -> RowCheck:
    res = paired_t_from_summary(row.mean, row.sd, n)
    deviations = {f: getattr(res, f) - getattr(row, f) for f in CHECKED_FIELDS}
    deviations["df"] = float(res.df - row.df)
    return RowCheck(row.symptom, res, row, deviations, tolerance)


def verify_table2(
    rows: Sequence[Table2Row] = TABLE2, tolerance: float = TOLERANCE
) -> list[RowCheck]:
    """Recompute SE, CI, t and p for every row from (mean, sd, n=20)."""
    return [check_row(r, N_PAIRS, tolerance) for r in rows]


def perturb(rows: Sequence[Table2Row], symptom: str, sd_delta: float) -> list[Table2Row]:
    """Copy of ``rows`` with one row's sd shifted; used to show the check has teeth."""
    if symptom not in {r.symptom for r in rows}:
        raise ValidationError(f"unknown symptom {symptom!r}")
    return [r._replace(sd=r.sd + sd_delta) if r.symptom == symptom else r for r in rows]


# --------------------------------------------------------------------------
# Raw datasets reproducing the published moments
# --------------------------------------------------------------------------


def _target_sums(mean: float, sd: float, n: int) -> tuple[int, int]:
    total = round(mean * n)
    sumsq = round(sd * sd * (n - 1) + total * total / n)
    return total, sumsq


def integer_differences(mean: float, sd: float, n: int = N_PAIRS, max_abs: int = 3) -> np.ndarray:
    """Integer difference vector in ``[-max_abs, max_abs]`` with the given moments.

    Mean and sd are matched after rounding to the printed precision (mean to
    2 decimals, sd to 5). Solutions using the smallest magnitudes are
    preferred; among those the first in a fixed enumeration order wins, so
    the result is deterministic. Zeros come first, then negatives, then
    positives.
    """
    total, sumsq = _target_sums(mean, sd, n)
    for bound in range(1, max_abs + 1):
        values = [v for v in range(-bound, bound + 1) if v != 0]
        for counts in _count_vectors(values, n, total, sumsq):
            vec = [0] * (n - sum(counts))
            for v, c in zip(values, counts):
                vec.extend([v] * c)
            d = np.array(vec, dtype=np.int64)
            if round(float(d.mean()), 2) == round(mean, 2) and round(float(d.std(ddof=1)), 5) == round(sd, 5):
                return d
    raise ValidationError(f"no integer vector of length {n} has mean {mean} and sd {sd}")


def _count_vectors(values, n, total, sumsq):
    # depth-first over how many times each non-zero value appears
    def rec(i, left, s, q, acc):
        if i == len(values):
            if s == total and q == sumsq:
                yield tuple(acc)
            return
        v = values[i]
        for c in range(left + 1):
            nq = q + c * v * v
            if nq > sumsq:
                break
            yield from rec(i + 1, left - c, s + c * v, nq, acc + [c])

    yield from rec(0, n, 0, 0, [])


def table2_dataset(rows: Sequence[Table2Row] = TABLE2) -> tuple[list[SsqResponse], list[SsqResponse]]:
    """Experimental and control responses whose differences match ``rows``.

    For each symptom a negative difference ``d`` is realised as control score
    ``-d`` and experimental score 0; a positive one as experimental ``d``,
    control 0.
    """
    by_symptom = {r.symptom: r for r in rows}
    missing = [s for s in SYMPTOMS if s not in by_symptom]
    if missing:
        raise ValidationError(f"rows missing symptoms: {', '.join(missing)}")
    diffs = {s: integer_differences(by_symptom[s].mean, by_symptom[s].sd) for s in SYMPTOMS}
    n = len(next(iter(diffs.values())))
    experimental, control = [], []
    for i in range(n):
        pid = f"P{i + 1:02d}"
        exp_scores = {s: max(int(diffs[s][i]), 0) for s in SYMPTOMS}
        ctl_scores = {s: max(-int(diffs[s][i]), 0) for s in SYMPTOMS}
        experimental.append(SsqResponse(pid, Condition.EXPERIMENTAL, exp_scores))
        control.append(SsqResponse(pid, Condition.CONTROL, ctl_scores))
    return experimental, control
