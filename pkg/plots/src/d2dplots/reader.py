"""Reader for the simulator's sweep CSV contract.

Files start with `# ...` comment lines (config digest), then the fixed
header, then one row per Monte Carlo run. The reader validates the header
and returns typed columns; it never recomputes simulation quantities.
"""

from __future__ import annotations

import csv
import io

EXPECTED_HEADER = ["policy", "axis", "axis_value", "run_seed",
                   "sum_throughput_bps", "cu_throughput_bps",
                   "mg_throughput_bps", "assigned_mgs", "qos_violations",
                   "converged"]

_FLOAT_COLUMNS = {"axis_value", "sum_throughput_bps", "cu_throughput_bps",
                  "mg_throughput_bps"}
_INT_COLUMNS = {"run_seed", "assigned_mgs", "qos_violations", "converged"}


class CsvFormatError(ValueError):
    pass


def read_sweep_csv(path: str) -> dict:
    """Parse one sweep CSV into a dict of typed column lists."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    if not lines:
        raise CsvFormatError(f"{path}: empty file")
    reader = csv.reader(io.StringIO("".join(lines)))
    header = next(reader)
    if header != EXPECTED_HEADER:
        raise CsvFormatError(
            f"{path}: header {header} does not match the sweep contract "
            f"{EXPECTED_HEADER}")
    columns = {name: [] for name in header}
    for row in reader:
        if not row:
            continue
        for name, value in zip(header, row):
            if name in _FLOAT_COLUMNS:
                value = float(value)
            elif name in _INT_COLUMNS:
                value = int(value)
            columns[name].append(value)
    if not columns["policy"]:
        raise CsvFormatError(f"{path}: no data rows")
    return columns
