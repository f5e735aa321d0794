import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import pandas as pd
from pydantic import AliasChoices, BaseModel, ConfigDict, Field, PositiveFloat, model_validator

from src.config.settings import settings


class LawSpec(BaseModel):
    """
    Law specification as it appears in config files: a built-in name plus a parameter map

    Args:
        BaseModel: Inherited from BaseModel
    """
    name:   str = Field(description="Built-in law name, e.g. 'pareto', 'cauchy', 'hall'")
    params: Dict[str, float] = Field(default_factory=dict, description="Law parameters")

    model_config = ConfigDict(frozen=True)


class AdaptiveConfig(BaseModel):
    """
    Parameters of the stagewise adaptive procedure

    ``k0`` is an absolute grid index; when it is None the index is derived from
    ``k0_frac * n`` and snapped to the nearest feasible grid index.
    The critical value is either the constant ``critical_value`` or, when ``mu`` is set,
    ``mu * log(n)``.

    Args:
        BaseModel: Inherited from BaseModel
    """
    rho:            float = Field(default=settings.rho, gt=0, le=1 / 3, description="Lower window fraction")
    delta:          float = Field(default=settings.delta, gt=0, le=1 / 3, description="Upper window margin")
    k0:             Optional[int] = Field(default=None, ge=1, description="Starting grid index")
    k0_frac:        float = Field(default=settings.k0_frac, gt=0, le=1, description="k0 as a fraction of n")
    grid_length:    int = Field(default=settings.grid_length, ge=1,
                                validation_alias=AliasChoices("grid_length", "K_n"),
                                description="Grid length K_n")
    critical_value: Optional[PositiveFloat] = Field(default=settings.critical_value, description="Critical value z")
    mu:             Optional[PositiveFloat] = Field(default=None, description="Policy z_n = mu * log(n)")
    seed:           Optional[int] = None

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    def threshold(self, n: int) -> float:
        """
        Critical value used for a sample of size n

        Args:
            n (int): Sample size

        Raises:
            ValueError: Neither a constant nor a mu*log(n) policy is configured

        Returns:
            float: Rejection threshold for the windowed statistic
        """
        if self.mu is not None:
            return self.mu * math.log(n)
        if self.critical_value is None:
            raise ValueError("AdaptiveConfig has no critical value; calibrate first")
        return self.critical_value


class ExceedanceCounts(BaseModel):
    """
    Counts of observations above t and inside the band (t, tau]

    Args:
        BaseModel: Inherited from BaseModel
    """
    n_t:     int = Field(ge=0)
    n_t_tau: int = Field(ge=0)


class TestStatPair(BaseModel):
    """
    Components of the lack-of-fit statistic T(t, tau): band part, tail part and their sum

    Args:
        BaseModel: Inherited from BaseModel
    """
    t1:    float = Field(ge=0, description="Band component, nats")
    t2:    float = Field(ge=0, description="Tail component, nats")
    total: float = Field(ge=0)

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    __test__ = False

    @model_validator(mode="after")
    def _check_total(self):
        if self.total != self.t1 + self.t2:
            raise ValueError("total must equal t1 + t2")
        return self


class WindowResult(BaseModel):
    """
    Windowed statistic T_{n,m} = max_k T_{n,m,k} over ceil(rho m) <= k <= floor((1-delta) m)

    Args:
        BaseModel: Inherited from BaseModel
    """
    m:       int
    k_range: Tuple[int, int]
    best_k:  int = Field(description="Smallest argmax of the tail component")
    t_max:   float = Field(ge=0)
    per_k:   Optional[List[Tuple[int, TestStatPair]]] = None

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")


class TailSelection(BaseModel):
    """
    Output of the adaptive procedure

    Args:
        BaseModel: Inherited from BaseModel
    """
    n:              int
    m_hat:          int = Field(description="First rejected grid value, or r_{K_n}")
    k_hat:          int = Field(description="Adaptive number of upper order statistics")
    tau_hat:        float = Field(description="Adaptive tail location X_{n,k_hat}")
    theta_hat:      float = Field(ge=0, description="Adaptive Pareto index")
    rejected:       bool
    critical_value: float
    trace:          List[Tuple[int, float]] = Field(default_factory=list, description="(r_i, T_{n,r_i}) visited")

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")


class QuantileRequest(BaseModel):
    """
    Target probability level of a quantile estimate

    Args:
        BaseModel: Inherited from BaseModel
    """
    p: float = Field(gt=0, lt=1)


class CalibrationResult(BaseModel):
    """
    Monte Carlo calibrated critical value

    Args:
        BaseModel: Inherited from BaseModel
    """
    z:      float
    level:  float = Field(gt=0, lt=1)
    n:      int
    n_rep:  int
    config: AdaptiveConfig
    ecdf:   Optional[List[float]] = Field(default=None, description="Sorted simulated maxima T_n")
    seed:   int

    model_config = ConfigDict(ser_json_inf_nan="constants")


class Table(BaseModel):
    """
    Named numeric matrix with labelled columns

    Args:
        BaseModel: Inherited from BaseModel
    """
    name:    str
    columns: List[str]
    rows:    List[List[float]]

    def to_frame(self) -> pd.DataFrame:
        """
        Returns:
            pd.DataFrame: Table contents
        """
        return pd.DataFrame(self.rows, columns=self.columns)

    def column(self, name: str) -> List[float]:
        """
        Args:
            name (str): Column label

        Returns:
            List[float]: Column values
        """
        j = self.columns.index(name)
        return [row[j] for row in self.rows]


class ExperimentReport(BaseModel):
    """
    Results of one Monte Carlo experiment

    Args:
        BaseModel: Inherited from BaseModel
    """
    experiment: str
    law:        LawSpec
    n:          int
    n_rep:      int
    config:     AdaptiveConfig
    seed:       int
    tables:     Dict[str, Table] = Field(default_factory=dict)
    errors:     Dict[str, str] = Field(default_factory=dict, description="Per-cell error markers")
    warnings:   List[str] = Field(default_factory=list)
    provenance: Dict[str, Any] = Field(default_factory=dict)


class RunConfig(BaseModel):
    """
    Resolved configuration of one CLI run

    Args:
        BaseModel: Inherited from BaseModel
    """
    command:          Literal["estimate", "calibrate", "simulate", "analyze"]
    input_path:       Optional[Path] = None
    law_spec:         Optional[LawSpec] = None
    adaptive:         AdaptiveConfig = Field(default_factory=AdaptiveConfig)
    p_levels:         Optional[List[float]] = Field(default=None, description="Probability levels; per-command default")
    seed:             int = settings.seed
    output_dir:       Path = settings.output_dir
    n_rep:            int = Field(default=settings.n_rep, ge=1)
    n:                int = Field(default=1000, ge=2)
    workers:          int = Field(default=settings.workers, ge=1)
    experiment:       Optional[Literal["table1", "table2", "gamma_rmse"]] = None
    calibration_file: Optional[Path] = None
    level:            float = Field(default=settings.calibration_level, gt=0, lt=1)
    include_ecdf:     bool = False
    trace:            Literal["stop", "full"] = "stop"
    k_stride:         int = Field(default=1, ge=1)
    k_grid:           List[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90])
    gamma:            Optional[PositiveFloat] = Field(default=None, description="Index of regular variation; the law's own when omitted")
    t_min:            Optional[PositiveFloat] = None
    t_max:            Optional[PositiveFloat] = None
    points:           int = Field(default=40, ge=2)
    quiet:            bool = False

    @model_validator(mode="after")
    def _check_command(self):
        if self.command == "estimate" and self.input_path is None:
            raise ValueError("estimate requires an input file")
        if self.command in ("simulate", "analyze") and self.law_spec is None:
            raise ValueError(f"{self.command} requires a law")
        if self.command == "simulate" and self.experiment is None:
            raise ValueError("simulate requires an experiment name")
        if self.p_levels is not None and any(not 0 < p < 1 for p in self.p_levels):
            raise ValueError("p levels must lie in (0, 1)")
        return self


class EstimateResult(BaseModel):
    """
    JSON document written by the estimate command

    Args:
        BaseModel: Inherited from BaseModel
    """
    n:              int
    m_hat:          int
    k_hat:          int
    tau_hat:        float
    theta_hat:      float
    rejected:       bool
    critical_value: float
    quantiles:      Dict[str, float] = Field(default_factory=dict)
    trace:          List[Tuple[int, float]] = Field(default_factory=list)

    model_config = ConfigDict(ser_json_inf_nan="constants")


class EstimateRequest(BaseModel):
    """
    Body of POST /api/estimate

    Args:
        BaseModel: Inherited from BaseModel
    """
    values:   List[float] = Field(min_length=2)
    adaptive: AdaptiveConfig = Field(default_factory=AdaptiveConfig)
    p_levels: List[float] = Field(default_factory=lambda: [0.99, 0.999])


class AnalyzeRow(BaseModel):
    """
    One row of the fitted-index diagnostics curve

    Args:
        BaseModel: Inherited from BaseModel
    """
    t:         float
    theta_fit: Optional[float] = None
    alpha:     Optional[float] = None
    chi2:      Optional[float] = None
    error:     Optional[str] = None

    model_config = ConfigDict(ser_json_inf_nan="constants")


class GoldenBand(BaseModel):
    """
    Reference interval for one cell of a CSV artifact. The row is the one whose ``where``
    columns match; an empty ``where`` means the first row.

    Args:
        BaseModel: Inherited from BaseModel
    """
    artifact: str
    column:   str
    where:    Dict[str, float] = Field(default_factory=dict)
    low:      Optional[float] = None
    high:     Optional[float] = None

    @model_validator(mode="after")
    def _check_interval(self):
        if self.low is not None and self.high is not None and not self.low <= self.high:
            raise ValueError(f"band on {self.column} is empty: low={self.low} > high={self.high}")
        return self


class GoldenCase(BaseModel):
    """
    Recorded end-to-end regression case

    Args:
        BaseModel: Inherited from BaseModel
    """
    name:        str
    command:     Literal["estimate", "calibrate", "simulate", "analyze"]
    args:        Dict[str, Any] = Field(default_factory=dict, description="RunConfig overrides")
    seed:        int = settings.seed
    config_hash: Optional[str] = None
    artifacts:   Dict[str, str] = Field(default_factory=dict, description="CSV name -> canonical digest")
    tolerance:   Dict[str, float] = Field(default_factory=lambda: {"rel": 1e-9, "abs": 1e-12})
    bands:       List[GoldenBand] = Field(default_factory=list, description="Reference intervals checked on every run")


class GoldenOutcome(BaseModel):
    """
    Verification outcome of one golden case

    Args:
        BaseModel: Inherited from BaseModel
    """
    name:   str
    passed: bool
    detail: str = ""
    deltas: Dict[str, float] = Field(default_factory=dict)


class GoldenReport(BaseModel):
    """
    Verification outcome of the whole golden set

    Args:
        BaseModel: Inherited from BaseModel
    """
    passed:   bool
    outcomes: List[GoldenOutcome]
