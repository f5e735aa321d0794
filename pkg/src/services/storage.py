"""
Reading observation files and writing CSV/JSON artifacts
"""
import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.models.schemas import Table
from src.services.errors import ArgumentError, TailDomainError


logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"
_SEPARATORS = re.compile(r"[,;\s]+")


def parse_observations(text: str) -> np.ndarray:
    """
    One observation per line; an optional non-numeric header line, blank lines and
    surrounding commas or whitespace are tolerated

    Args:
        text (str): File contents

    Raises:
        ArgumentError: Malformed line or no observations
        TailDomainError: Non-positive or non-finite observation

    Returns:
        np.ndarray: Observations in file order
    """
    values = []
    seen_line = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = [tok for tok in _SEPARATORS.split(line) if tok]
        if not tokens:
            continue
        first = not seen_line
        seen_line = True
        if len(tokens) != 1:
            if first and not _is_number(tokens[0]):
                continue
            raise ArgumentError(f"expected one observation at line {lineno}, found {len(tokens)} fields")
        if not _is_number(tokens[0]):
            if first:
                logger.debug("skipping header line %r", line.strip())
                continue
            raise ArgumentError(f"invalid number at line {lineno}: {tokens[0]!r}")
        value = float(tokens[0])
        if not (math.isfinite(value) and value > 0):
            raise TailDomainError(f"non-positive observation at line {lineno}: {tokens[0]}")
        values.append(value)
    if not values:
        raise ArgumentError("input contains no observations")
    return np.asarray(values, dtype=float)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_observations(path: Path) -> np.ndarray:
    """
    Raises:
        ArgumentError: Unreadable file or malformed contents
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ArgumentError(f"cannot read input file {path}: {err.strerror}") from err
    return parse_observations(text)


def write_table(table: Table, path: Path) -> Path:
    """
    Write a table as CSV with a header row and 12 significant digits
    """
    return write_frame(table.to_frame(), path)


def write_json(document: BaseModel | Dict[str, Any], path: Path) -> Path:
    """
    Write a pydantic model or a plain dict as indented JSON
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(document, BaseModel):
        text = document.model_dump_json(indent=2)
    else:
        text = json.dumps(document, indent=2, sort_keys=True, default=str)
    path.write_text(text + "\n")
    return path


def write_frame(frame: pd.DataFrame, path: Path) -> Path:
    """
    Write a data frame as CSV with the artifact float format
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path
