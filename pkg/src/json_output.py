"""
JSON report generation for quadstat runs.
"""

import json
import logging
import os
import tempfile
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import __version__
from .checks import CheckReport
from .config import Config

REPORT_SCHEMA_VERSION = 1


def jsonable(value: Any) -> Any:
    """Recursively convert Fractions (and tuples) into JSON-safe values."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


class JSONOutput:
    """Builds, writes and summarizes versioned JSON reports."""

    def __init__(self, config: Config):
        """Initialize JSON output handler with configuration."""
        self.config = config
        self.logger = logging.getLogger(__name__)

    def generate_output(self, command: str, model_echo: Dict[str, Any],
                        checks: List[CheckReport], series: Dict[str, Any],
                        classification: Optional[Dict[str, Any]], alarms: List[str],
                        extra: Dict[str, Any], start_time: datetime) -> Dict[str, Any]:
        """Generate the complete report structure."""
        end_time = datetime.now()
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "tool_version": __version__,
            "command": command,
            "parameters": {"degree": self.config.degree, "mode": self.config.mode,
                           "guard_dim": self.config.guard_dim},
            "model": model_echo,
            "passed": all(check.passed for check in checks),
            "checks": [check.to_dict() for check in checks],
            "series": jsonable(series),
            "classification": jsonable(classification),
            "alarms": list(alarms),
            "results": jsonable(extra),
            "timing": {
                "started_at": start_time.isoformat(),
                "duration_seconds": (end_time - start_time).total_seconds(),
            },
        }

    def write_output(self, output_data: Dict[str, Any], output_path: Path) -> None:
        """Write the report atomically: temporary file in the same directory, then rename."""
        output_file = Path(output_path)
        output_file.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{output_file.name}.", dir=str(output_file.parent))
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(output_data, f, indent=2, ensure_ascii=False)
                f.write("\n")
            os.replace(tmp_name, output_file)
        except Exception as e:
            self.logger.error(f"Error writing output file {output_path}: {e}")
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        self.logger.info(f"Report written to: {output_file}")

    def validate_output(self, output_data: Dict[str, Any]) -> bool:
        """Validate the report structure."""
        required_keys = {"schema_version", "tool_version", "command", "model", "passed",
                         "checks", "series", "classification", "alarms", "timing"}
        missing = required_keys - set(output_data)
        if missing:
            self.logger.error(f"Report is missing keys: {sorted(missing)}")
            return False
        for check in output_data["checks"]:
            if not {"name", "passed", "residual_norm_zero"} <= set(check):
                self.logger.error(f"Malformed check entry: {check.get('name')}")
                return False
            if check["passed"] == ("witness" in check):
                self.logger.error(f"Check {check['name']} has an inconsistent witness")
                return False
        self.logger.debug("Report validation passed")
        return True

    def render_summary(self, output_data: Dict[str, Any]) -> str:
        """Human-readable table derived from the report."""
        lines = [f"quadstat {output_data['tool_version']} - {output_data['command']} "
                 f"- model {output_data['model'].get('name', '?')}"]
        rows = []
        for check in output_data["checks"]:
            self._collect_rows(check, 0, rows)
        if rows:
            width = max(len(name) for name, _, _ in rows)
            lines.append("")
            lines.append(f"{'check'.ljust(width)}  result  details")
            lines.append(f"{'-' * width}  ------  -------")
            for name, passed, details in rows:
                lines.append(f"{name.ljust(width)}  {'PASS' if passed else 'FAIL':6}  {details}")
        series = output_data.get("series") or {}
        if series:
            lines.append("")
            for label, block in series.items():
                coeffs = block.get("coeffs") if isinstance(block, dict) else block
                suffix = ""
                if isinstance(block, dict) and block.get("terminated_at") is not None:
                    suffix = f" (terminates at degree {block['terminated_at']})"
                lines.append(f"series {label}: {coeffs}{suffix}")
        classification = output_data.get("classification")
        if classification:
            lines.append(f"classification: {classification.get('label')} {classification.get('reason', '')}".rstrip())
        for alarm in output_data.get("alarms", []):
            lines.append(f"ALARM: {alarm}")
        lines.append("")
        lines.append("overall: " + ("PASS" if output_data["passed"] else "FAIL"))
        return "\n".join(lines)

    def _collect_rows(self, check: Dict[str, Any], depth: int, rows: list) -> None:
        name = check["name"] + (" (advisory)" if check.get("advisory") else "")
        rows.append(("  " * depth + name, check["passed"], check.get("details", "")))
        for child in check.get("children", []):
            self._collect_rows(child, depth + 1, rows)
