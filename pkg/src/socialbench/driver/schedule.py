"""Wall-clock schedule construction.

The update stream carries simulation timestamps; the schedule maps them
onto a wall timeline via the time compression ratio and interleaves
complex-read instances at fixed update cadences.  Wall offsets are kept
as exact fractions of a millisecond so no float rounding can reorder
two operations that the simulation ordered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import MissingBucket
from ..model import UpdateOperation
from ..paramgen.buckets import ParameterBucket
from ..simtime import day_start
from .config import DriverConfig

UPDATE = "update"
QUERY = "query"


@dataclass(frozen=True)
class QueryInstance:
    variant: str
    params: dict
    bucket_day: int
    instance_index: int
    depth: int = 0


@dataclass(frozen=True)
class ScheduleEntry:
    seq: int
    kind: str
    wall_offset_ms: Fraction
    op: UpdateOperation | None = None
    op_index: int | None = None
    query: QueryInstance | None = None


@dataclass
class Schedule:
    cutoff: int
    tcr_exact: Fraction
    entries: list[ScheduleEntry] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def class_counts(self) -> dict[str, int]:
        out = {"CR": 0, "INS": 0, "DEL": 0}
        for entry in self.entries:
            if entry.kind == UPDATE:
                out["INS" if entry.op.is_insert else "DEL"] += 1
            else:
                out["CR"] += 1
        return out


def wall_offset(sim_time: int, cutoff: int, tcr_exact: Fraction) -> Fraction:
    """Exact wall milliseconds after run start for a simulation instant."""
    return tcr_exact * (sim_time - cutoff)


def build_schedule(stream: list[UpdateOperation],
                   buckets: dict[int, ParameterBucket],
                   cutoff: int,
                   config: DriverConfig | None = None) -> Schedule:
    """Interleave the update stream with complex-read instances.

    Every frequencies[variant]-th update is followed by one instance of
    that variant, parameterized from the bucket of the update's
    simulation day.  A missing bucket for a day that has updates is a
    hard error; a bucket that merely lacks parameter sets for a variant
    skips that instance with a warning.
    """
    config = config or DriverConfig()
    config.validate()
    tcr_exact = Fraction(str(config.tcr))
    schedule = Schedule(cutoff=cutoff, tcr_exact=tcr_exact)
    instance_counts = {variant: 0 for variant in config.frequencies}
    skipped: dict[str, int] = {}
    seq = 0

    for op_index, op in enumerate(stream):
        offset = wall_offset(op.scheduled_time, cutoff, tcr_exact)
        schedule.entries.append(ScheduleEntry(
            seq=seq, kind=UPDATE, wall_offset_ms=offset, op=op, op_index=op_index))
        seq += 1

        update_number = op_index + 1
        for variant, freq in sorted(config.frequencies.items()):
            if update_number % freq != 0:
                continue
            day = day_start(op.scheduled_time)
            bucket = buckets.get(day)
            if bucket is None:
                raise MissingBucket(f"no parameter bucket for day of {op.scheduled_time}")
            params = bucket.draw(variant, instance_counts[variant])
            instance_counts[variant] += 1
            if params is None:
                skipped[variant] = skipped.get(variant, 0) + 1
                continue
            schedule.entries.append(ScheduleEntry(
                seq=seq, kind=QUERY, wall_offset_ms=offset,
                query=QueryInstance(variant=variant, params=params, bucket_day=day,
                                    instance_index=instance_counts[variant] - 1)))
            seq += 1

    for variant, count in sorted(skipped.items()):
        schedule.warnings.append(
            f"{variant}: skipped {count} instances on days without parameters")
    return schedule
