"""CSV artifacts with provenance headers.

Files carry '#'-prefixed header lines (tool tag, resolved config JSON,
seed), then one column-name row, then data. UTF-8, '\\n' line endings.
Floats are written with repr(), which round-trips exactly.

Schemas:

* constellation: ``label,l,l1,l2,v,re,im`` (unused label parts empty)
* sweep:         ``snr_db,metric,value,stderr,trials,channels``
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .modulation import APSK, PSK, ConstellationSet
from .montecarlo import SweepRow

CONSTELLATION_COLUMNS = ["label", "l", "l1", "l2", "v", "re", "im"]
SWEEP_COLUMNS = ["snr_db", "metric", "value", "stderr", "trials", "channels"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _header_lines(kind: str, resolved_config: dict) -> list[str]:
    config_json = json.dumps(resolved_config, sort_keys=True, separators=(",", ":"))
    lines = [f"# rislink {kind}", f"# config: {config_json}"]
    seed = resolved_config.get("sweep", {}).get("master_seed")
    if seed is not None:
        lines.append(f"# seed: {seed}")
    return lines


def write_constellation_csv(
    path: str | Path, const: ConstellationSet, resolved_config: dict
) -> None:
    lines = _header_lines("constellation", resolved_config)
    lines.append(",".join(CONSTELLATION_COLUMNS))
    for i, (label, z) in enumerate(zip(const.labels, const.points)):
        if const.scheme.kind == PSK:
            parts = ["", "", "", ""]
        elif const.scheme.kind == APSK:
            l, v = label
            parts = [str(l), "", "", str(v)]
        else:
            l1, l2, v = label
            parts = ["", str(l1), str(l2), str(v)]
        lines.append(
            ",".join([str(i)] + parts + [repr(float(z.real)), repr(float(z.imag))])
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_sweep_csv(
    path: str | Path, rows: tuple[SweepRow, ...], kind: str, resolved_config: dict
) -> None:
    lines = _header_lines(kind, resolved_config)
    lines.append(",".join(SWEEP_COLUMNS))
    for r in rows:
        lines.append(
            ",".join(
                [
                    _fmt(r.snr_db),
                    r.metric,
                    _fmt(r.value),
                    _fmt(r.stderr),
                    _fmt(r.trials),
                    _fmt(r.channels),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class Table:
    """A parsed CSV artifact: header comments, columns and string cells."""

    comments: list[str]
    columns: list[str]
    rows: list[dict[str, str]]

    def config(self) -> dict:
        for c in self.comments:
            if c.startswith("# config: "):
                return json.loads(c[len("# config: ") :])
        raise ConfigError("no '# config:' header line found")

    def floats(self, column: str) -> list[float]:
        if column not in self.columns:
            raise ConfigError(f"missing column: {column}")
        return [float(r[column]) for r in self.rows if r[column] != ""]


def read_table(path: str | Path) -> Table:
    text = Path(path).read_text(encoding="utf-8")
    comments: list[str] = []
    columns: list[str] | None = None
    rows: list[dict[str, str]] = []
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cells = line.split(",")
        if columns is None:
            columns = cells
            continue
        if len(cells) != len(columns):
            raise ConfigError(
                f"malformed row (expected {len(columns)} cells): {line!r}"
            )
        rows.append(dict(zip(columns, cells)))
    if columns is None:
        raise ConfigError(f"no column row in {path}")
    return Table(comments=comments, columns=columns, rows=rows)
