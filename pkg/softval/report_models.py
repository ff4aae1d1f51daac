# softval/report_models.py
"""
Pydantic models of an evaluation request and of the report it produces.

Every row names what it describes (section scope, group, class, measure,
operator, prediction) so each value can be traced without context.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

from softval.measures import ErrorKind, Measure
from softval.membership import AndOperator, HardeningRule, World

SCOPE_GROUP = "group"
SCOPE_POOLED = "pooled"
POOLED_LABEL = "pooled"
SINGLE_GROUP_LABEL = "all"

PREDICTION_SOFT = "soft"
PREDICTION_HARDENED = "hardened"
PREDICTION_IDEAL = "ideal"


class EvaluationConfig(BaseModel):
    world: World = Field(World.CLOSED, description="closed: rows sum to 1; open: one-class memberships")
    operators: List[AndOperator] = Field(
        default_factory=lambda: [AndOperator.STRONG, AndOperator.PRODUCT, AndOperator.WEAK],
        description="AND-operators for the ratio measures")
    measures: List[Measure] = Field(default_factory=lambda: list(Measure), description="Measures to report")
    regression: List[ErrorKind] = Field(default_factory=list, description="Error flavors (mae, rmse)")
    classes: Optional[List[str]] = Field(None, description="Classes to report; all when omitted")
    hardening: Optional[str] = Field(None, description="'wta' or 'threshold=<t>' for crisp comparison rows")
    curves: bool = Field(False, description="Threshold sweep curves per group and class")
    curve_grid: int = Field(101, ge=2, description="Thresholds of the shared grid used for curve bands")
    crisp_only: bool = Field(True, description="Reject soft reference rows in curves instead of excluding them")
    interclass: bool = Field(False, description="Error summed over all classes")
    confusion: bool = Field(False, description="Soft confusion matrices")
    ideal: bool = Field(False, description="Measures for a prediction equal to the reference")
    variance: bool = Field(False, description="Variance across groups, soft versus hardened")
    workers: int = Field(1, ge=1, description="Threads used to evaluate groups")

    @field_validator("hardening")
    @classmethod
    def _valid_rule(cls, value):
        if value is not None:
            HardeningRule.parse(value)
        return value

    def hardening_rule(self) -> Optional[HardeningRule]:
        return HardeningRule.parse(self.hardening) if self.hardening else None


class ToleranceInfo(BaseModel):
    clamp: float
    row_sum: float


class ReportMeta(BaseModel):
    tool: str
    version: str
    source: str
    dataset_digest: str
    world: World
    operators: List[str]
    measures: List[str]
    regression: List[str]
    hardening: Optional[str]
    tolerances: ToleranceInfo
    group_columns: List[str]
    n_groups: int
    n_samples: int
    classes: List[str]
    class_proportions: Dict[str, float]


class ResultRow(BaseModel):
    scope: str
    group: str
    class_name: str
    measure: str
    operator: str
    prediction: str
    value: Optional[float]
    denominator: float
    defined: bool
    reason: Optional[str]


class StatisticRow(BaseModel):
    class_name: str
    measure: str
    operator: str
    prediction: str
    n_groups: int
    n_undefined: int
    mean: Optional[float]
    sd: Optional[float]
    p25: Optional[float]
    p50: Optional[float]
    p75: Optional[float]


class CurveRow(BaseModel):
    group: str
    class_name: str
    threshold: float
    spec: Optional[float]
    sens: Optional[float]


class CurveBandRow(BaseModel):
    class_name: str
    threshold: float
    percentile: float
    spec: Optional[float]
    sens: Optional[float]


class ConfusionRow(BaseModel):
    scope: str
    group: str
    operator: str
    ref_class: str
    pred_class: str
    value: float


class BoundRow(BaseModel):
    class_name: str
    measure: str
    wmae: Optional[float]
    wrmse: Optional[float]
    rmse_min: Optional[float]
    rmse_max: Optional[float]


class InterclassRow(BaseModel):
    scope: str
    group: str
    kind: str
    value: float
    bound: float
    normalized: float


class VarianceRow(BaseModel):
    class_name: str
    measure: str
    hardening: str
    n_groups: int
    var_soft: float
    var_crisp: float
    inflation_ratio: Optional[float]
    var_bernoulli: Optional[float]


class EvaluationReport(BaseModel):
    meta: ReportMeta
    results: List[ResultRow] = Field(default_factory=list)
    statistics: List[StatisticRow] = Field(default_factory=list)
    curves: List[CurveRow] = Field(default_factory=list)
    curve_bands: List[CurveBandRow] = Field(default_factory=list)
    confusion: List[ConfusionRow] = Field(default_factory=list)
    bounds: List[BoundRow] = Field(default_factory=list)
    interclass: List[InterclassRow] = Field(default_factory=list)
    variance: List[VarianceRow] = Field(default_factory=list)


# section name -> row model, in report order
SECTION_MODELS = {
    "results": ResultRow,
    "statistics": StatisticRow,
    "curves": CurveRow,
    "curve_bands": CurveBandRow,
    "confusion": ConfusionRow,
    "bounds": BoundRow,
    "interclass": InterclassRow,
    "variance": VarianceRow,
}
