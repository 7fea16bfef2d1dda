"""
Report rendering: delimited text sections or one JSON document.

Text layout, one block per section:

    # <section>
    col1,col2,...
    v1,v2,...

Reals are printed with 12 significant digits; missing values are empty fields.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

logger = logging.getLogger(__name__)

DELIMITER = ","


def format_value(value: Any) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.12g}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


@dataclass
class Report:
    command: str
    sections: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)

    def add(self, name: str, records: List[Dict[str, Any]]) -> "Report":
        self.sections[name] = list(records)
        return self

    def render(self, output_format: str = "text") -> str:
        if output_format == "json":
            return self.to_json()
        return self.to_text()

    def to_json(self) -> str:
        payload = {"command": self.command, "sections": _json_value(self.sections)}
        return json.dumps(payload, indent=2)

    def to_text(self) -> str:
        blocks = []
        for name, records in self.sections.items():
            columns: List[str] = []
            for record in records:
                for key in record:
                    if key not in columns:
                        columns.append(key)
            lines = [f"# {name}", DELIMITER.join(columns)]
            for record in records:
                lines.append(DELIMITER.join(format_value(record.get(c)) for c in columns))
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + "\n"
