"""Latency accounting and the run report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

PERCENTILES = (50, 90, 95, 99)


def percentile(sorted_values: list[float], p: float) -> float:
    """Nearest-rank percentile over an ascending list."""
    if not sorted_values:
        raise ValueError("no values")
    rank = max(1, math.ceil(p / 100.0 * len(sorted_values)))
    return sorted_values[rank - 1]


def compute_stats(values: list[float]) -> dict[str, float]:
    """min / max / mean plus the standard percentiles."""
    if not values:
        return {"count": 0}
    ordered = sorted(values)
    out = {
        "count": len(ordered),
        "min": ordered[0],
        "max": ordered[-1],
        "mean": sum(ordered) / len(ordered),
    }
    for p in PERCENTILES:
        out[f"p{p}"] = percentile(ordered, p)
    return out


def on_time(scheduled_ms: float, actual_ms: float, threshold_ms: float = 1_000.0) -> bool:
    """An operation is on time if it started within threshold of its slot."""
    return actual_ms - scheduled_ms <= threshold_ms


@dataclass
class RunReport:
    """Everything a finished (or truncated) run has to say for itself."""

    mode: str = "benchmark"
    total_operations: int = 0
    class_totals: dict[str, int] = field(default_factory=dict)
    variant_latency_ms: dict[str, dict] = field(default_factory=dict)
    delay_ms: dict[str, float] = field(default_factory=dict)
    on_time_count: int = 0
    late_count: int = 0
    on_time_ratio: float = 1.0
    on_time_target: float = 0.95
    valid: bool = True
    wall_seconds: float = 0.0
    throughput_ops_per_sec: float = 0.0
    deferrals: int = 0
    max_deferral_rechecks: int = 0
    schedule_exhausted: bool = False
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "totalOperations": self.total_operations,
            "classTotals": dict(self.class_totals),
            "variantLatencyMs": {k: dict(v) for k, v in self.variant_latency_ms.items()},
            "delayMs": dict(self.delay_ms),
            "onTime": {
                "count": self.on_time_count,
                "late": self.late_count,
                "ratio": self.on_time_ratio,
                "target": self.on_time_target,
                "valid": self.valid,
            },
            "wallSeconds": self.wall_seconds,
            "throughputOpsPerSec": self.throughput_ops_per_sec,
            "deferrals": self.deferrals,
            "maxDeferralRechecks": self.max_deferral_rechecks,
            "scheduleExhausted": self.schedule_exhausted,
            "warnings": list(self.warnings),
        }


def summarize_run(measurements: list[dict], wall_seconds: float,
                  threshold_ms: float, target: float, mode: str) -> RunReport:
    """Fold per-operation measurement records into a RunReport.

    Each record carries: kind ("CR"/"SR"/"INS"/"DEL"), variant,
    scheduled_ms, actual_ms, latency_ms.
    """
    report = RunReport(mode=mode, on_time_target=target, wall_seconds=wall_seconds)
    report.total_operations = len(measurements)
    by_variant: dict[str, list[float]] = {}
    delays: list[float] = []
    for record in measurements:
        report.class_totals[record["kind"]] = (
            report.class_totals.get(record["kind"], 0) + 1)
        by_variant.setdefault(record["variant"], []).append(record["latency_ms"])
        delay = record["actual_ms"] - record["scheduled_ms"]
        delays.append(delay)
        if on_time(record["scheduled_ms"], record["actual_ms"], threshold_ms):
            report.on_time_count += 1
        else:
            report.late_count += 1
    for variant, values in sorted(by_variant.items()):
        report.variant_latency_ms[variant] = compute_stats(values)
    if delays:
        report.delay_ms = compute_stats(delays)
    if report.total_operations:
        report.on_time_ratio = report.on_time_count / report.total_operations
        if wall_seconds > 0:
            report.throughput_ops_per_sec = report.total_operations / wall_seconds
    report.valid = report.on_time_ratio >= target
    return report
