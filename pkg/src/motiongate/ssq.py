"""Simulator Sickness Questionnaire responses and matched-samples t-tests.

Each response rates 14 symptoms on a 0-3 scale. Differences are always taken
as experimental (blurred) minus control (clear), so a negative mean means
fewer symptoms with the blur gate.

CSV layout::

    participant_id,condition,GeneralDiscomfort,Fatigue,...,FullnessOfHead
    P01,experimental,0,1,...,0
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .errors import InsufficientDataError, PairingError, ParseError, ValidationError
from .tdist import t_critical, two_tailed_p

SYMPTOMS: tuple[str, ...] = (
    "GeneralDiscomfort",
    "Fatigue",
    "Headache",
    "EyeStrain",
    "DifficultFocusing",
    "Nausea",
    "DifficultyConcentrating",
    "StomachAwareness",
    "BlurredVision",
    "IncreasedSalivation",
    "DizzyEyesOpen",
    "DizzyEyesClosed",
    "Vertigo",
    "FullnessOfHead",
)
SCORE_RANGE = range(0, 4)
CSV_COLUMNS = ("participant_id", "condition") + SYMPTOMS


class Condition(str, enum.Enum):
    EXPERIMENTAL = "experimental"  # blurred during head motion
    CONTROL = "control"  # always clear


@dataclass(frozen=True)
class SsqResponse:
    participant_id: str
    condition: Condition
    scores: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "condition", Condition(self.condition))
        missing = [s for s in SYMPTOMS if s not in self.scores]
        if missing:
            raise ValidationError(f"missing symptom scores: {', '.join(missing)}")
        extra = set(self.scores) - set(SYMPTOMS)
        if extra:
            raise ValidationError(f"unknown symptoms: {', '.join(sorted(extra))}")
        for name in SYMPTOMS:
            v = self.scores[name]
            if isinstance(v, bool) or int(v) != v or v not in SCORE_RANGE:
                raise ValidationError(f"{name} score must be an integer 0-3, got {v!r}")
        object.__setattr__(self, "scores", {s: int(self.scores[s]) for s in SYMPTOMS})


def parse_ssq_csv(text: str | TextIO) -> list[SsqResponse]:
    """Read SSQ responses; errors carry the 1-based line number of the bad row."""
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.reader(text)
    header = next(reader, None)
    if header is None:
        raise ParseError("empty SSQ file", line=1)
    header = [h.strip() for h in header]
    if header[:2] != ["participant_id", "condition"]:
        raise ParseError("header must start with participant_id,condition", line=1)
    missing = [s for s in SYMPTOMS if s not in header]
    if missing:
        raise ParseError(f"missing symptom columns: {', '.join(missing)}", line=1)
    unknown = [h for h in header[2:] if h not in SYMPTOMS]
    if unknown or len(header) != len(set(header)):
        raise ParseError(f"unexpected or duplicate columns: {', '.join(unknown) or header}", line=1)

    responses = []
    seen: dict[tuple[str, Condition], int] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(row)}", line=lineno)
        rec = dict(zip(header, (f.strip() for f in row)))
        try:
            condition = Condition(rec["condition"].lower())
        except ValueError:
            raise ParseError(
                f"condition must be 'experimental' or 'control', got {rec['condition']!r}",
                line=lineno,
            ) from None
        scores = {}
        for name in SYMPTOMS:
            try:
                v = int(rec[name])
            except ValueError:
                raise ParseError(f"{name}: non-integer score {rec[name]!r}", line=lineno) from None
            if v not in SCORE_RANGE:
                raise ParseError(f"{name}: score {v} outside 0-3", line=lineno)
            scores[name] = v
        key = (rec["participant_id"], condition)
        if key in seen:
            raise ParseError(
                f"duplicate response for participant {key[0]!r} ({condition.value}), "
                f"first seen on line {seen[key]}",
                line=lineno,
            )
        seen[key] = lineno
        responses.append(SsqResponse(rec["participant_id"], condition, scores))
    return responses


def serialize_ssq_csv(responses: Iterable[SsqResponse]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in responses:
        writer.writerow([r.participant_id, r.condition.value, *(r.scores[s] for s in SYMPTOMS)])
    return buf.getvalue()


def read_ssq_csv(path) -> list[SsqResponse]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_ssq_csv(fh)


def _index(responses: Sequence[SsqResponse], label: str) -> dict[str, SsqResponse]:
    out: dict[str, SsqResponse] = {}
    for r in responses:
        if r.participant_id in out:
            raise PairingError(f"participant {r.participant_id!r} appears twice in {label} responses")
        out[r.participant_id] = r
    return out


def diff_scores(
    experimental: Sequence[SsqResponse], control: Sequence[SsqResponse]
) -> dict[str, np.ndarray]:
    """Per-symptom experimental-minus-control differences.

    Participants are ordered as they appear in ``experimental``.
    """
    exp = _index(experimental, "experimental")
    ctl = _index(control, "control")
    unmatched = sorted(set(exp) ^ set(ctl))
    if unmatched:
        raise PairingError(f"participants without a matching response: {', '.join(unmatched)}")
    order = list(exp)
    return {
        s: np.array([exp[p].scores[s] - ctl[p].scores[s] for p in order], dtype=np.int64)
        for s in SYMPTOMS
    }


@dataclass(frozen=True)
class PairedTestResult:
    n: int
    mean: float
    sd: float
    se: float
    t: float
    df: int
    p: float
    ci_low: float
    ci_high: float
    confidence: float = 0.95

    def significant(self, alpha: float = 0.05) -> bool:
        return self.p < alpha


def paired_t_from_summary(
    mean: float, sd: float, n: int, confidence: float = 0.95
) -> PairedTestResult:
    """Matched-samples t-test from the moments of the differences.

    ``sd`` is the sample standard deviation (n - 1 denominator). With ``sd``
    zero the test degenerates: a non-zero mean gives infinite ``t`` and
    ``p = 0``; a zero mean gives ``t = 0`` and ``p = 1``.
    """
    if n < 2:
        raise InsufficientDataError(f"need at least 2 pairs, got {n}")
    if not sd >= 0 or not math.isfinite(sd):
        raise ValidationError(f"sd must be finite and >= 0, got {sd}")
    if not math.isfinite(mean):
        raise ValidationError(f"mean must be finite, got {mean}")
    if not 0 < confidence < 1:
        raise ValidationError(f"confidence must be in (0, 1), got {confidence}")
    df = n - 1
    se = sd / math.sqrt(n)
    if se > 0:
        t = mean / se
    else:
        t = math.copysign(math.inf, mean) if mean != 0 else 0.0
    p = two_tailed_p(t, df)
    half = t_critical(0.5 + confidence / 2, df) * se
    return PairedTestResult(n, mean, sd, se, t, df, p, mean - half, mean + half, confidence)


def paired_t_from_raw(diffs, confidence: float = 0.95) -> PairedTestResult:
    d = np.asarray(diffs, dtype=np.float64).reshape(-1)
    if d.size < 2:
        raise InsufficientDataError(f"need at least 2 pairs, got {d.size}")
    if not np.all(np.isfinite(d)):
        raise ValidationError("differences must be finite")
    return paired_t_from_summary(float(d.mean()), float(d.std(ddof=1)), int(d.size), confidence)


@dataclass(frozen=True)
class SymptomReport:
    results: dict[str, PairedTestResult]
    alpha: float = 0.05
    participants: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if tuple(self.results) != SYMPTOMS:
            raise ValidationError("report must cover exactly the 14 SSQ symptoms, in order")

    @property
    def flags(self) -> dict[str, bool]:
        return {s: r.significant(self.alpha) for s, r in self.results.items()}

    @property
    def significant(self) -> list[str]:
        return [s for s, flag in self.flags.items() if flag]


def build_symptom_report(
    experimental: Sequence[SsqResponse],
    control: Sequence[SsqResponse],
    alpha: float = 0.05,
) -> SymptomReport:
    diffs = diff_scores(experimental, control)
    results = {s: paired_t_from_raw(diffs[s]) for s in SYMPTOMS}
    return SymptomReport(results, alpha, tuple(r.participant_id for r in experimental))
