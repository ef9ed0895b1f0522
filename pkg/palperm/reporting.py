from __future__ import annotations

import csv
import io
import json
from typing import Any, Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from palperm.algorithms.census import COUNT_FIELDS, CensusRecord, check_inclusion_exclusion
from palperm.algorithms.palindromics import MODES, classify, format_witness, palindromic_values
from palperm.algorithms.permutation import Permutation, format_cycles, format_two_row
from palperm.errors import PalpermError

ALGORITHM_VERSION = "palperm-census/1"
SEQUENCE_COLUMNS = ["n", "gspp_r", "gspp_l", "gspp", "residual", "holds"]


class CensusRecordModel(BaseModel):
    """JSON schema of an emitted census record."""

    n: int = Field(ge=1, le=20)
    mode: str
    algorithm_version: str = ALGORITHM_VERSION
    checksum: int = Field(ge=0)
    counts: Dict[str, int]
    union_size: int = Field(ge=0)
    residual: int
    holds: bool
    neither_witnesses: List[str] = Field(default_factory=list)
    elapsed: Optional[float] = Field(default=None, ge=0.0)

    @field_validator("mode")
    @classmethod
    def validate_mode(cls, value: str) -> str:
        if value not in MODES:
            raise ValueError(f"mode must be one of {list(MODES)}")
        return value

    @field_validator("counts")
    @classmethod
    def validate_counts(cls, value: Dict[str, int]) -> Dict[str, int]:
        missing = [name for name in COUNT_FIELDS if name not in value]
        if missing:
            raise ValueError(f"counts is missing {missing}")
        return {name: int(value[name]) for name in COUNT_FIELDS}

    @model_validator(mode="after")
    def check_residual(self) -> "CensusRecordModel":
        if self.residual != self.checksum - self.union_size:
            raise ValueError("residual must equal checksum - union_size")
        if self.holds != (self.residual == 0):
            raise ValueError("holds must be true exactly when residual is 0")
        return self


class ClassifyReportModel(BaseModel):
    permutation: str
    n: int
    cycles: str
    mode: str
    lpv: str
    rpv: str
    lpv_grouping: str
    rpv_grouping: str
    flags: Dict[str, bool]


def _flag(value: bool) -> str:
    return "true" if value else "false"


def record_model(record: CensusRecord, include_timings: bool = False) -> CensusRecordModel:
    check = check_inclusion_exclusion(record)
    return CensusRecordModel(
        n=record.n,
        mode=record.mode,
        checksum=record.checksum,
        counts=dict(record.counts),
        union_size=record.union_size,
        residual=check.residual,
        holds=check.holds,
        neither_witnesses=list(record.neither_witnesses),
        elapsed=record.elapsed if include_timings else None,
    )


def emit_json(record: CensusRecord, include_timings: bool = False) -> str:
    model = record_model(record, include_timings=include_timings)
    return model.model_dump_json(indent=2, exclude_none=True) + "\n"


def parse_record(text: str) -> CensusRecord:
    try:
        model = CensusRecordModel.model_validate_json(text)
    except ValidationError as exc:
        raise PalpermError(f"invalid census record: {exc}") from exc
    return CensusRecord(
        n=model.n,
        mode=model.mode,
        counts=dict(model.counts),
        union_size=model.union_size,
        neither_witnesses=list(model.neither_witnesses),
        checksum=model.checksum,
        elapsed=model.elapsed or 0.0,
    )


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def emit_record(record: CensusRecord, fmt: str, include_timings: bool = False) -> str:
    if fmt == "json":
        return emit_json(record, include_timings=include_timings)

    check = check_inclusion_exclusion(record)
    if fmt == "csv":
        header = ["n", "mode", *COUNT_FIELDS, "union_size", "residual", "holds", "checksum"]
        row: List[Any] = [
            record.n,
            record.mode,
            *(record.counts[name] for name in COUNT_FIELDS),
            record.union_size,
            check.residual,
            _flag(check.holds),
            record.checksum,
        ]
        if include_timings:
            header.append("elapsed")
            row.append(record.elapsed)
        return _csv_text(header, [row])

    counts = " ".join(f"{name}={record.counts[name]}" for name in COUNT_FIELDS)
    lines = [
        f"census n={record.n} mode={record.mode} checksum={record.checksum}",
        counts,
        f"union={record.union_size} residual={check.residual} holds={_flag(check.holds)}",
        "neither_witnesses: " + (" ".join(record.neither_witnesses) or "none"),
    ]
    if include_timings:
        lines.append(f"elapsed={record.elapsed:.6f}s")
    return "\n".join(lines) + "\n"


def sequence_rows(records: Sequence[CensusRecord]) -> List[List[Any]]:
    rows = []
    for record in records:
        check = check_inclusion_exclusion(record)
        rows.append(
            [
                record.n,
                record.counts["gspp_r"],
                record.counts["gspp_l"],
                record.counts["gspp"],
                check.residual,
                _flag(check.holds),
            ]
        )
    return rows


def emit_sequences(records: Sequence[CensusRecord], fmt: str) -> str:
    rows = sequence_rows(records)
    if fmt == "json":
        payload = [dict(zip(SEQUENCE_COLUMNS, row)) for row in rows]
        for item in payload:
            item["holds"] = item["holds"] == "true"
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        return _csv_text(SEQUENCE_COLUMNS, rows)
    widths = [max(len(str(col)), *(len(str(row[i])) for row in rows)) for i, col in enumerate(SEQUENCE_COLUMNS)]
    lines = ["  ".join(str(col).rjust(w) for col, w in zip(SEQUENCE_COLUMNS, widths))]
    for row in rows:
        lines.append("  ".join(str(cell).rjust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def _join_value(symbols: Sequence) -> str:
    # multi-digit tokens need a separator to stay readable
    sep = "" if all(len(str(s)) == 1 for s in symbols) else " "
    return sep.join(str(s) for s in symbols)


def classify_report(p: Permutation, mode: str = "token") -> ClassifyReportModel:
    left, right = palindromic_values(p, mode)
    flags = classify(p, mode)
    return ClassifyReportModel(
        permutation=p.one_line(),
        n=p.n,
        cycles=format_cycles(p),
        mode=mode,
        lpv=_join_value(left),
        rpv=_join_value(right),
        lpv_grouping=format_witness(left),
        rpv_grouping=format_witness(right),
        flags=flags.to_dict(),
    )


def emit_classify(p: Permutation, mode: str, fmt: str) -> str:
    report = classify_report(p, mode)
    if fmt == "json":
        return report.model_dump_json(indent=2) + "\n"
    if fmt == "csv":
        header = ["permutation", "mode", "lpv", "rpv", *report.flags.keys()]
        row = [report.permutation, mode, report.lpv_grouping, report.rpv_grouping]
        row.extend(_flag(v) for v in report.flags.values())
        return _csv_text(header, [row])
    flags = " ".join(f"{name}={_flag(value)}" for name, value in report.flags.items())
    lines = [
        f"permutation: {report.permutation}",
        format_two_row(p),
        f"cycles: {report.cycles}",
        f"N_lambda = {report.lpv} = {report.lpv_grouping}",
        f"N_rho = {report.rpv} = {report.rpv_grouping}",
        flags,
    ]
    return "\n".join(lines) + "\n"


def emit_rows(target: str, rows: Sequence[Dict[str, Any]], passed: bool, fmt: str) -> str:
    """Emit verification or exploration rows; text lines are `target key=value ...`."""
    if fmt == "json":
        return json.dumps({"target": target, "passed": passed, "results": list(rows)}, indent=2) + "\n"
    if fmt == "csv":
        header: List[str] = []
        for row in rows:
            for key in row:
                if key not in header:
                    header.append(key)
        return _csv_text(header, [[_cell(row.get(key, "")) for key in header] for row in rows])
    lines = []
    for row in rows:
        status = row.get("passed", row.get("holds"))
        prefix = f"{target} " + ("" if status is None else ("pass " if status else "FAIL "))
        body = " ".join(f"{key}={_cell(value)}" for key, value in row.items() if key not in {"passed", "holds"})
        lines.append(prefix + body)
    lines.append(f"{target}: {'all pass' if passed else 'failures present'}")
    return "\n".join(lines) + "\n"


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return _flag(value)
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value) if value else "-"
    return str(value)
