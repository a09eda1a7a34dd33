"""Motion-gated display blur: closed-loop latency simulation and SSQ t-test analysis."""

__version__ = "0.1.0"

from .bus import BusConfig, SampleEvent, sampling_schedule, transaction_duration_us
from .detector import (
    DetectorConfig,
    GateCommand,
    GateState,
    Mode,
    classify_sample,
    run_gate,
    step,
)
from .errors import (
    InsufficientDataError,
    MotionGateError,
    PairingError,
    ParseError,
    ScheduleInfeasibleError,
    SequencingError,
    ValidationError,
)
from .harness import SimConfig, SimResult, blur_fraction, measure_gate_latency, run_simulation
from .shutter import DriveSignal, OpticalTimeline, ShutterModel, apply_commands, transparency_at
from .ssq import (
    SYMPTOMS,
    Condition,
    PairedTestResult,
    SsqResponse,
    SymptomReport,
    build_symptom_report,
    diff_scores,
    paired_t_from_raw,
    paired_t_from_summary,
    parse_ssq_csv,
    serialize_ssq_csv,
)
from .tdist import t_critical, two_tailed_p
from .trace import (
    GyroSample,
    MotionTrace,
    TraceGenConfig,
    generate_session_trace,
    parse_trace,
    serialize_trace,
)
