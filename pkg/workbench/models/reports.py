from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class Qualifier(str, Enum):
    SAMPLED = "sampled"
    CRITERION = "criterion"
    ASSUMED = "assumed"
    ASSERTED_PRIME = "asserted prime"
    GRADED_SURROGATE = "graded surrogate"


GRADED_SURROGATE_NOTE = (
    "coherence is reported as per-degree dimension tables over the requested "
    "window; finite generation beyond the window is not certified"
)


def _format_value(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    text = str(value)
    return text.replace(" ", "")


class Report(BaseModel):
    """Outcome of one workbench command: a verdict, rows and free text"""

    command: str
    subject: str = ""
    verdict: Optional[bool] = None
    qualifiers: List[Qualifier] = Field(default_factory=list)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    lines: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    data: Dict[str, Any] = Field(default_factory=dict, exclude=True)

    def qualify(self, *qualifiers: Qualifier) -> "Report":
        for q in qualifiers:
            if q not in self.qualifiers:
                self.qualifiers.append(q)
        return self

    def add_row(self, **values: Any) -> None:
        self.rows.append(values)

    @property
    def exit_code(self) -> int:
        return 1 if self.verdict is False else 0

    def verdict_text(self) -> str:
        if self.verdict is None:
            return "computed"
        text = "true" if self.verdict else "false"
        if self.qualifiers:
            text += " (" + ", ".join(q.value for q in self.qualifiers) + ")"
        return text

    def render_text(self) -> str:
        header = f"{self.command}"
        if self.subject:
            header += f" {self.subject}"
        out = [f"{header}: {self.verdict_text()}"]
        out += [f"  {line}" for line in self.lines]
        out += [f"  note: {note}" for note in self.notes]
        return "\n".join(out) + "\n"

    def render_rows(self) -> str:
        out = [
            " ".join(
                [f"command={self.command}", f"verdict={_format_value(self.verdict)}"]
                + [f"qualifier={q.value.replace(' ', '-')}" for q in self.qualifiers]
            )
        ]
        for row in self.rows:
            out.append(" ".join(f"{k}={_format_value(v)}" for k, v in row.items()))
        return "\n".join(out) + "\n"

    def render(self, fmt: str = "text") -> str:
        return self.render_rows() if fmt == "rows" else self.render_text()
