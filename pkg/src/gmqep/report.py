"""Machine-readable report documents (schema ``gm-report/1``).

Floats go through :mod:`json`, which writes the shortest repr that parses
back to the same double, so documents round-trip exactly.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Any, Optional

SCHEMA_VERSION = "gm-report/1"


@dataclass
class ReportDocument:
    command: str
    eigenvalues: list[float]
    conjugate: list[int]
    margins: list[float]
    verdict: bool
    params: Optional[dict] = None
    graph: Optional[dict] = None
    lemma_chain: Optional[list[float]] = None
    cross_check_deviation: Optional[float] = None
    extra: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        out = {"schema_version": self.schema_version, "command": self.command}
        for key in ("params", "graph"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        out.update(eigenvalues=list(self.eigenvalues), conjugate=list(self.conjugate),
                   margins=list(self.margins), verdict=self.verdict)
        if self.lemma_chain is not None:
            out["lemma_chain"] = list(self.lemma_chain)
        if self.cross_check_deviation is not None:
            out["cross_check_deviation"] = self.cross_check_deviation
        out.update(self.extra)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ReportDocument":
        data = dict(data)
        known = {k: data.pop(k) for k in list(data) if k in cls.__dataclass_fields__ and k != "extra"}
        return cls(**known, extra=data)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), allow_nan=False, **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))


def load_schema() -> dict:
    text = resources.files("gmqep").joinpath("schemas/gm-report-1.json").read_text(encoding="utf-8")
    return json.loads(text)


def as_plain(obj):
    """Dataclass or tuple tree to JSON-ready lists and dicts."""
    if hasattr(obj, "__dataclass_fields__"):
        return as_plain(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): as_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [as_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return obj
