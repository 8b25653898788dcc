"""
Writes the artifacts of a run into its output directory:

  - results.csv: one row per (check, case, metric), with bound and verdict;
  - <check>_<case>.csv: the series of a report, when it has one;
  - <name>.csv: extra tables such as the per-step diagnostics of a flow;
  - summary.txt: pass counts and worst metric/bound ratios;
  - config.effective.json: the validated configuration of the run.

CSV files begin with a `# provenance` comment line.

"""

import csv
import hashlib
import logging
from pathlib import Path
from typing import Any

import orjson
from rich.console import Console
from rich.table import Table

from codimflow.schemas.reports import CheckReport, Provenance, ReportSummary
from core.errors import CodimflowError



logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["check", "case", "metric", "value", "bound", "passed"]



# Serialization

def config_hash(config:dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON (sorted keys) of a configuration."""

    return hashlib.sha256(orjson.dumps(config, option=orjson.OPT_SORT_KEYS)).hexdigest()



def dump_config(path:Path, config:dict[str, Any]) -> Path:
    path = Path(path)
    path.write_bytes(orjson.dumps(config, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2))
    return path



def _cell(value:Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)



def write_csv(path:Path, rows:list[dict[str, Any]], provenance:Provenance, columns:list[str]|None=None) -> Path:
    """Write rows under a provenance comment; columns follow first appearance."""

    if columns is None:
        columns = []
        for row in rows:
            columns.extend(key for key in row if key not in columns)
    path = Path(path)
    try:
        with path.open("w", newline="") as handle:
            handle.write(f"# provenance: {provenance.fields()}\n")
            writer = csv.DictWriter(handle, fieldnames=columns, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: _cell(row.get(key)) for key in columns})
    except OSError as error:
        raise CodimflowError("Cannot write report file", path=str(path), reason=error.strerror) from error
    return path



# Summary

def _summary_lines(reports:list[CheckReport], provenance:Provenance) -> list[str]:
    failed = sum(not report.passed for report in reports)
    lines = [f"# provenance: {provenance.fields()}",
             f"checks: {len(reports)}  passed: {len(reports) - failed}  failed: {failed}"]
    for report in reports:
        ratio = report.worst_ratio()
        ratio = "-" if ratio is None else f"{ratio:.4g}"
        verdict = "PASS" if report.passed else "FAIL"
        lines.append(f"{verdict}  {report.check:<14} {report.case:<12} worst ratio {ratio}")
        lines.extend(f"      note: {note}" for note in report.notes)
    return lines



def summary_table(reports:list[CheckReport]) -> Table:
    table = Table(title="codimflow results")
    table.add_column("check")
    table.add_column("case")
    table.add_column("worst ratio", justify="right")
    table.add_column("verdict")
    for report in reports:
        ratio = report.worst_ratio()
        table.add_row(report.check, report.case, "-" if ratio is None else f"{ratio:.4g}",
                      "[green]pass[/green]" if report.passed else "[red]fail[/red]")
    return table



def emit_report(
    out:Path,
    reports:list[CheckReport],
    provenance:Provenance,
    config:dict[str, Any]|None=None,
    tables:dict[str, list[dict[str, Any]]]|None=None,
    console:Console|None=None
) -> ReportSummary:
    """Write every artifact of a run and echo the summary table."""

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    files = []

    rows = [row.model_dump() for report in reports for row in report.rows()]
    files.append(write_csv(out / "results.csv", rows, provenance, RESULT_COLUMNS))
    for report in reports:
        if report.series:
            name = f"{report.check}_{report.case}.csv" if report.case else f"{report.check}.csv"
            files.append(write_csv(out / name, report.series, provenance))
    for name, table in (tables or {}).items():
        files.append(write_csv(out / f"{name}.csv", table, provenance))

    summary = out / "summary.txt"
    summary.write_text("\n".join(_summary_lines(reports, provenance)) + "\n")
    files.append(summary)
    if config is not None:
        files.append(dump_config(out / "config.effective.json", config))

    (console or Console(stderr=True)).print(summary_table(reports))
    failed = sum(not report.passed for report in reports)
    for report in reports:
        if not report.passed:
            logger.warning("Failed check %s (%s): %s", report.check, report.case,
                           {key: report.metrics.get(key) for key in report.bounds} or report.metrics)
    return ReportSummary(checks=len(reports), failed=failed, files=[str(path) for path in files])
