"""
Recomputing the questionnaire t-tests
=====================================

Twenty participants rated 14 symptoms after a session with and without the
motion-gated blur. Only the mean and standard deviation of each symptom's
paired difference are published; the rest of each row follows from them.
"""

from motiongate.table2 import TABLE2, integer_differences, table2_dataset, verify_table2
from motiongate.ssq import build_symptom_report

checks = verify_table2()
for c in checks:
    r = c.computed
    worst = max(abs(d) for d in c.deviations.values())
    print("%-24s t=%7.3f  p=%.3f  CI [%8.5f, %8.5f]  max dev %.5f"
          % (c.symptom, r.t, r.p, r.ci_low, r.ci_high, worst))
print(sum(c.passed for c in checks), "of", len(checks), "rows within 0.0005")

# %%
# Raw scores behind the moments
# -----------------------------
# Differences of -1, 0 and +1 are enough to hit every published mean and sd.

row = next(r for r in TABLE2 if r.symptom == "Nausea")
print("Nausea differences:", integer_differences(row.mean, row.sd).tolist())

experimental, control = table2_dataset()
report = build_symptom_report(experimental, control)
print("p < 0.05:", ", ".join(report.significant))
