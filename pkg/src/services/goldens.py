"""
Recorded end-to-end regression cases.

goldens/cases.json lists the cases; ``bless`` runs them and stores the CSV artifacts under
goldens/<case>/ together with their canonical digests; ``verify_goldens`` re-runs every
case and compares digests, falling back to element-wise deltas within the case tolerance.
A case may also carry reference bands, intervals for single cells of its outputs; they
are checked on every run and need no blessing.
"""
import hashlib
import json
import logging
import tempfile
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import TypeAdapter, ValidationError

from src.config.settings import settings
from src.models.schemas import GoldenBand, GoldenCase, GoldenOutcome, GoldenReport, RunConfig
from src.services.commands import run
from src.services.errors import ConfigurationError, TailFitError
from src.services.harness import config_digest


logger = logging.getLogger(__name__)

_CASES = TypeAdapter(List[GoldenCase])


def canonical_csv(path: Path) -> str:
    """
    CSV text with sorted columns and numbers at 12 significant digits
    """
    frame = pd.read_csv(path)
    frame = frame[sorted(frame.columns)]
    lines = [",".join(frame.columns)]
    for row in frame.itertuples(index=False):
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(value) -> str:
    if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool):
        return "" if pd.isna(value) else format(float(value), ".12g")
    return "" if pd.isna(value) else str(value)


def digest(path: Path) -> str:
    """sha256 of the canonical CSV text"""
    return hashlib.sha256(canonical_csv(path).encode("utf-8")).hexdigest()


def load_cases(path: Path) -> List[GoldenCase]:
    """
    Raises:
        ConfigurationError: Missing or malformed cases file
    """
    path = Path(path)
    try:
        return _CASES.validate_json(path.read_text())
    except OSError as err:
        raise ConfigurationError(f"cannot read golden cases {path}: {err.strerror}") from err
    except ValueError as err:
        raise ConfigurationError(f"malformed golden cases {path}: {err}") from err


def save_cases(cases: List[GoldenCase], path: Path) -> None:
    Path(path).write_text(_CASES.dump_json(cases, indent=2).decode("utf-8") + "\n")


def _run_config(case: GoldenCase, goldens_dir: Path, output_dir: Path) -> RunConfig:
    args = dict(case.args)
    if "input_path" in args:
        args["input_path"] = goldens_dir / args["input_path"]
    args.setdefault("quiet", True)
    args.setdefault("workers", 1)
    try:
        return RunConfig(command=case.command, seed=case.seed, output_dir=output_dir, **args)
    except ValidationError as err:
        raise ConfigurationError(f"invalid arguments for golden case {case.name}: {err.errors()[0]['msg']}") from err


def _case_hash(case: GoldenCase) -> str:
    return config_digest({"command": case.command, "args": case.args, "seed": case.seed})


def _artifacts(paths: List[Path]) -> Dict[str, Path]:
    return {p.name: p for p in paths if p.suffix == ".csv"}


def bless(cases_path: Optional[Path] = None) -> List[GoldenCase]:
    """
    Run every case and record its CSV artifacts and digests. CSV files of an earlier
    blessing that the run no longer produces are removed; other files are kept.

    Args:
        cases_path (Optional[Path]): Cases file. Defaults to settings.goldens_dir / "cases.json".

    Returns:
        List[GoldenCase]: Updated cases, also written back to the cases file
    """
    cases_path = Path(cases_path or settings.goldens_dir / "cases.json")
    goldens_dir = cases_path.parent
    cases = load_cases(cases_path)
    blessed = []
    for case in cases:
        case_dir = goldens_dir / case.name
        produced = _artifacts(run(_run_config(case, goldens_dir, case_dir)))
        for stale in case_dir.glob("*.csv"):
            if stale.name not in produced:
                stale.unlink()
        blessed.append(case.model_copy(update={
            "config_hash": _case_hash(case),
            "artifacts": {name: digest(path) for name, path in sorted(produced.items())},
        }))
        logger.info("blessed %s (%d artifacts)", case.name, len(produced))
    save_cases(blessed, cases_path)
    return blessed


def _compare(expected: Path, actual: Path, rel: float, abs_: float) -> tuple[bool, float, str]:
    want, got = pd.read_csv(expected), pd.read_csv(actual)
    if sorted(want.columns) != sorted(got.columns) or want.shape != got.shape:
        return False, float("inf"), f"shape {got.shape} vs {want.shape}"
    worst = 0.0
    for column in want.columns:
        a, b = want[column], got[column]
        if pd.api.types.is_numeric_dtype(a) and pd.api.types.is_numeric_dtype(b):
            x, y = a.to_numpy(dtype=float), b.to_numpy(dtype=float)
            same = (x == y) | (np.isnan(x) & np.isnan(y))
            with np.errstate(invalid="ignore"):
                delta = np.where(same, 0.0, np.abs(x - y))
            if np.any(delta > abs_ + rel * np.abs(x)):
                return False, float(np.nanmax(delta)), f"column {column} drifted"
            worst = max(worst, float(np.nanmax(delta, initial=0.0)))
        elif not a.fillna("").astype(str).equals(b.fillna("").astype(str)):
            return False, float("inf"), f"column {column} differs"
    return True, worst, ""


def _check_band(band: GoldenBand, produced: Dict[str, Path]) -> Optional[str]:
    path = produced.get(band.artifact)
    if path is None:
        return f"{band.artifact} missing"
    frame = pd.read_csv(path)
    if band.column not in frame.columns or any(c not in frame.columns for c in band.where):
        return f"{band.artifact} lacks the columns of the {band.column} band"
    mask = np.ones(len(frame), dtype=bool)
    for column, value in band.where.items():
        mask &= np.isclose(frame[column].to_numpy(dtype=float), value, rtol=1e-12, atol=0.0)
    where = ", ".join(f"{c}={v:g}" for c, v in band.where.items())
    if not mask.any():
        return f"{band.artifact}: no row with {where}"
    value = float(frame.loc[mask, band.column].iloc[0])
    low = -np.inf if band.low is None else band.low
    high = np.inf if band.high is None else band.high
    if not low <= value <= high:
        at = f" at {where}" if where else ""
        return f"{band.artifact}: {band.column}{at} = {value:.6g} outside [{low:g}, {high:g}]"
    return None


def verify_case(case: GoldenCase, goldens_dir: Path) -> GoldenOutcome:
    """
    Re-run one case, compare with the blessed artifacts and check its reference bands
    """
    if not case.artifacts and not case.bands:
        return GoldenOutcome(name=case.name, passed=False, detail="not blessed")
    if (case.artifacts or case.config_hash is not None) and case.config_hash != _case_hash(case):
        return GoldenOutcome(name=case.name, passed=False, detail="case arguments changed since blessing")
    rel, abs_ = case.tolerance.get("rel", 0.0), case.tolerance.get("abs", 0.0)
    with tempfile.TemporaryDirectory() as tmp:
        try:
            produced = _artifacts(run(_run_config(case, goldens_dir, Path(tmp))))
        except TailFitError as err:
            return GoldenOutcome(name=case.name, passed=False, detail=f"run failed: {err}")
        deltas: Dict[str, float] = {}
        problems = []
        for name, expected_digest in case.artifacts.items():
            actual = produced.get(name)
            if actual is None:
                problems.append(f"{name} missing")
                continue
            if digest(actual) == expected_digest:
                deltas[name] = 0.0
                continue
            ok, worst, detail = _compare(goldens_dir / case.name / name, actual, rel, abs_)
            deltas[name] = worst
            if not ok:
                problems.append(f"{name}: {detail} (max delta {worst:.3g})")
        problems.extend(p for p in (_check_band(band, produced) for band in case.bands) if p)
    passed = not problems
    if not passed:
        logger.warning("golden %s failed: %s", case.name, "; ".join(problems))
    return GoldenOutcome(name=case.name, passed=passed, detail="; ".join(problems), deltas=deltas)


def verify_goldens(cases_path: Optional[Path] = None) -> GoldenReport:
    """
    Re-run every recorded case and compare within its tolerance

    Args:
        cases_path (Optional[Path]): Cases file. Defaults to settings.goldens_dir / "cases.json".

    Returns:
        GoldenReport: Per-case outcomes, passed only if all cases pass
    """
    cases_path = Path(cases_path or settings.goldens_dir / "cases.json")
    outcomes = [verify_case(case, cases_path.parent) for case in load_cases(cases_path)]
    return GoldenReport(passed=all(o.passed for o in outcomes), outcomes=outcomes)
