"""Checker outcomes and their serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .vectors import PcpVector

VERDICTS = ("pass", "fail", "hypothesis_not_met")

CSV_COLUMNS = ("checker", "d", "k", "map", "margin", "verdict", "conclusion", "threshold", "param")


class HypothesisViolated(Exception):
    """A theorem's hypothesis failed on the vectors actually used."""

    def __init__(self, hypothesis: str, report: InequalityReport | None = None):
        super().__init__(hypothesis)
        self.hypothesis = hypothesis
        self.report = report


@dataclass
class InequalityReport:
    checker: str
    inputs: dict[str, Any]
    hypothesis_values: dict[str, Any]
    conclusion_value: float
    threshold: float
    margin: float
    verdict: str
    block_readouts: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def summary_row(self, map_name: str = "", param: Any = "") -> dict[str, str]:
        return {
            "checker": self.checker,
            "d": _fmt(self.inputs.get("d", "")),
            "k": _fmt(self.inputs.get("k", "")),
            "map": map_name or str(self.inputs.get("map", "")),
            "margin": _fmt(self.margin),
            "verdict": self.verdict,
            "conclusion": _fmt(self.conclusion_value),
            "threshold": _fmt(self.threshold),
            "param": _fmt(param),
        }


@dataclass
class ModulusEstimate:
    """A lower bound on the modulus of uniform continuity at ``t``."""

    map: str
    t: float
    lower_bound: float
    witness_pair: tuple[Any, Any] | None
    pairs_tried: int
    domain_distance: float = 0.0
    source: str = ""

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, PcpVector):
        return obj.to_json()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def summary_csv(rows: list[dict[str, str]]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
