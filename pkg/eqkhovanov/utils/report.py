"""Table and JSON rendering for command output."""

import json
from typing import Any, Dict, List, Optional

import pandas as pd

from eqkhovanov.core.homology import GradedModule

JSON_SCHEMA = 1
EMPTY_CELL = "."


def _cell(texts: pd.Series) -> str:
    if len(texts) == 0:
        return EMPTY_CELL
    counts = texts.value_counts(sort=False)
    return " + ".join(t if n == 1 else f"{t}^{n}" for t, n in counts.items())


def homology_frame(module: GradedModule) -> pd.DataFrame:
    """Rows quantum degree descending, columns homological degree ascending."""
    records = [{"i": s.i, "q": s.q, "text": module.summand_text(s)} for s in module.summands]
    if not records:
        return pd.DataFrame()
    frame = pd.DataFrame.from_records(records)
    table = frame.groupby(["q", "i"])["text"].agg(_cell).unstack("i")
    q_max, q_min = int(frame["q"].max()), int(frame["q"].min())
    # all gradings of one link share a parity
    rows = list(range(q_max, q_min - 1, -2))
    cols = list(range(int(frame["i"].min()), int(frame["i"].max()) + 1))
    return table.reindex(index=rows, columns=cols).fillna(EMPTY_CELL)


def render_homology_table(module: GradedModule, title: str = "") -> str:
    """Plain-text homology table; empty modules render as a single line."""
    frame = homology_frame(module)
    header = f"{title}\n" if title else ""
    if frame.empty:
        return header + "0"
    frame.index.name = "q\\i"
    frame.columns.name = None
    return header + frame.to_string()


def batch_frame(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    """One row per diagram of a batch run; failed rows leave numeric cells as <NA>."""
    return pd.DataFrame.from_records(rows).convert_dtypes()


def render_batch_table(rows: List[Dict[str, Any]]) -> str:
    frame = batch_frame(rows)
    if frame.empty:
        return ""
    return frame.to_string(index=False)


def json_envelope(command: str, job_input: Dict[str, Any], result: Any) -> Dict[str, Any]:
    return {"schema": JSON_SCHEMA, "command": command, "input": job_input, "result": result}


def dump_json(payload: Dict[str, Any], indent: Optional[int] = 2) -> str:
    """Deterministic JSON: sorted keys, no trailing whitespace."""
    return json.dumps(payload, sort_keys=True, indent=indent, default=str)
