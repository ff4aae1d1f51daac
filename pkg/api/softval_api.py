# api/softval_api.py
"""
API wrapper for the soft classifier validation toolkit.

run_evaluation turns grouped reference/prediction data and an
EvaluationConfig into an EvaluationReport. SoftValAPI adds file handling on
top, for the command line and the REST server.
"""

import logging
import os
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.softval_config import MEASURE_CATALOG, OPERATOR_CATALOG, get_tolerances, get_workers
from report_formats import emit_report
from softval import TOOL_NAME, __version__
from softval.confusion import ConfusionMatrix, build_all, pool, recombine_opt_pess
from softval.curves_aggregation import (
    GroupedPredictions,
    curve_bands,
    evaluate_group,
    group_statistics,
    spec_sens_curve,
    variance_comparison,
)
from softval.dataset_io import DEFAULT_ID_COLUMN, load_dataset, load_dataset_bytes
from softval.measures import ErrorKind, MeasureResult, class_proportions
from softval.membership import AndOperator, HardeningRule, MembershipMatrix, Tolerances, World, harden
from softval.regression_measures import (
    interclass_bound,
    interclass_error,
    mae_rmse_bounds,
    measure_weights,
    weighted_error,
)
from softval.report_models import (
    POOLED_LABEL,
    PREDICTION_HARDENED,
    PREDICTION_IDEAL,
    PREDICTION_SOFT,
    SCOPE_GROUP,
    SCOPE_POOLED,
    BoundRow,
    ConfusionRow,
    CurveBandRow,
    CurveRow,
    EvaluationConfig,
    EvaluationReport,
    InterclassRow,
    ReportMeta,
    ResultRow,
    StatisticRow,
    ToleranceInfo,
    VarianceRow,
)

logger = logging.getLogger(__name__)


def _float(value) -> Optional[float]:
    return None if value is None else float(value)


def _result_row(result: MeasureResult, scope: str, group: str, prediction: str) -> ResultRow:
    return ResultRow(scope=scope, group=group, class_name=result.class_name, measure=result.measure.value,
                     operator=result.operator.value, prediction=prediction, value=_float(result.value),
                     denominator=float(result.denominator), defined=result.defined, reason=result.reason)


def _confusion_rows(cm: ConfusionMatrix, scope: str, group: str) -> List[ConfusionRow]:
    return [ConfusionRow(scope=scope, group=group, operator=cm.operator.value, ref_class=ref_class,
                         pred_class=pred_class, value=float(cm.counts[i, j]))
            for i, ref_class in enumerate(cm.class_names)
            for j, pred_class in enumerate(cm.class_names)]


def _combined_world(ref: MembershipMatrix, pred: MembershipMatrix) -> World:
    return World.CLOSED if ref.world is World.CLOSED and pred.world is World.CLOSED else World.OPEN


class _Evaluation:
    """One run of run_evaluation; holds the resolved request while the sections are built."""

    def __init__(self, gp: GroupedPredictions, config: EvaluationConfig):
        self.gp = gp
        self.config = config
        self.workers = config.workers
        self.rule = config.hardening_rule()
        first_ref = gp[gp.keys()[0]][0]
        names = config.classes if config.classes is not None else gp.class_names
        self.class_indices = [first_ref.class_index(name) for name in names]
        self.classes = [gp.class_names[j] for j in self.class_indices]
        self.flavors = [*config.operators, *config.regression]
        self.pooled = gp.pooled() if len(gp) > 1 else None

    def _scopes(self):
        """(scope, group label, ref, pred) for every group, then the pooled data."""
        for key, (ref, pred) in self.gp.items():
            yield SCOPE_GROUP, self.gp.label(key), ref, pred
        if self.pooled is not None:
            yield (SCOPE_POOLED, POOLED_LABEL) + self.pooled

    def all_data(self) -> Tuple[MembershipMatrix, MembershipMatrix]:
        return self.pooled if self.pooled is not None else self.gp[self.gp.keys()[0]]

    def _variants(self) -> List[Tuple[str, Callable]]:
        variants = [(PREDICTION_SOFT, lambda ref, pred: pred)]
        if self.rule is not None:
            variants.append((PREDICTION_HARDENED, lambda ref, pred: harden(pred, self.rule)))
        if self.config.ideal:
            variants.append((PREDICTION_IDEAL, lambda ref, pred: ref))
        return variants

    def results(self) -> List[ResultRow]:
        if not self.config.measures or not self.flavors:
            return []
        rows = []
        for prediction, choose in self._variants():
            def _evaluate(ref, pred, choose=choose):
                return evaluate_group(ref, choose(ref, pred), self.config.measures, self.flavors, self.class_indices)

            for key, results in self.gp.map(_evaluate, self.workers).items():
                rows.extend(_result_row(r, SCOPE_GROUP, self.gp.label(key), prediction) for r in results)
            if self.pooled is not None:
                rows.extend(_result_row(r, SCOPE_POOLED, POOLED_LABEL, prediction)
                            for r in _evaluate(*self.pooled))
        return rows

    def statistics(self) -> List[StatisticRow]:
        if len(self.gp) < 2 or not self.config.measures or not self.flavors:
            return []
        rules = [None] + ([self.rule] if self.rule is not None else [])
        rows = []
        for rule in rules:
            for s in group_statistics(self.gp, self.config.measures, self.flavors, self.class_indices,
                                      rule, self.workers):
                rows.append(StatisticRow(class_name=s.class_name, measure=s.measure.value,
                                         operator=s.operator.value, prediction=s.prediction,
                                         n_groups=s.n_groups, n_undefined=s.n_undefined, mean=_float(s.mean),
                                         sd=_float(s.sd), p25=_float(s.p25), p50=_float(s.p50),
                                         p75=_float(s.p75)))
        return rows

    def confusion(self) -> List[ConfusionRow]:
        if not self.config.confusion or not self.config.operators:
            return []
        operators = self.config.operators
        per_group = self.gp.map(lambda ref, pred: build_all(ref, pred, operators), self.workers)
        rows = []
        for key, matrices in per_group.items():
            for cm in matrices:
                rows.extend(_confusion_rows(cm, SCOPE_GROUP, self.gp.label(key)))
        if self.pooled is not None:
            pooled = [pool([matrices[k] for matrices in per_group.values()]) for k in range(len(operators))]
            by_op = {cm.operator: cm for cm in pooled}
            if AndOperator.WEAK in by_op and AndOperator.STRONG in by_op:
                pooled.extend(recombine_opt_pess(by_op[AndOperator.WEAK], by_op[AndOperator.STRONG]))
            for cm in pooled:
                rows.extend(_confusion_rows(cm, SCOPE_POOLED, POOLED_LABEL))
        return rows

    def bounds(self) -> List[BoundRow]:
        if not self.config.regression or not self.config.measures:
            return []
        ref, pred = self.all_data()
        rows = []
        for j, name in zip(self.class_indices, self.classes):
            r, p = ref.values[:, j], pred.values[:, j]
            for measure in self.config.measures:
                wmae, _ = weighted_error(measure, ErrorKind.MAE, r, p)
                if wmae is None:
                    rows.append(BoundRow(class_name=name, measure=measure.value, wmae=None, wrmse=None,
                                         rmse_min=None, rmse_max=None))
                    continue
                wrmse, _ = weighted_error(measure, ErrorKind.RMSE, r, p)
                low, high = mae_rmse_bounds(wmae, r, measure_weights(measure, r, p))
                rows.append(BoundRow(class_name=name, measure=measure.value, wmae=float(wmae),
                                     wrmse=float(wrmse), rmse_min=float(low), rmse_max=float(high)))
        return rows

    def interclass(self) -> List[InterclassRow]:
        if not self.config.interclass:
            return []
        rows = []
        for scope, group, ref, pred in self._scopes():
            for kind in ErrorKind:
                value = interclass_error(ref, pred, kind)
                bound = interclass_bound(_combined_world(ref, pred), ref.n_classes, kind)
                rows.append(InterclassRow(scope=scope, group=group, kind=kind.value, value=float(value),
                                          bound=float(bound), normalized=float(value / bound)))
        return rows

    def curves(self) -> Tuple[List[CurveRow], List[CurveBandRow]]:
        if not self.config.curves:
            return [], []
        crisp_only = self.config.crisp_only

        def _curves(ref, pred):
            return [spec_sens_curve(ref, pred, j, None, crisp_only) for j in self.class_indices]

        curve_rows = []
        for key, per_class in self.gp.map(_curves, self.workers).items():
            for points in per_class:
                curve_rows.extend(CurveRow(group=self.gp.label(key), class_name=pt.class_name,
                                           threshold=float(pt.threshold), spec=_float(pt.spec),
                                           sens=_float(pt.sens)) for pt in points)
        band_rows = []
        if len(self.gp) > 1:
            grid = np.linspace(0.0, 1.0, self.config.curve_grid)
            for j in self.class_indices:
                band_rows.extend(CurveBandRow(class_name=b.class_name, threshold=b.threshold,
                                              percentile=b.percentile, spec=_float(b.spec), sens=_float(b.sens))
                                 for b in curve_bands(self.gp, j, grid, crisp_only=crisp_only,
                                                      workers=self.workers))
        return curve_rows, band_rows

    def variance(self) -> List[VarianceRow]:
        if not self.config.variance:
            return []
        rule = self.rule if self.rule is not None else HardeningRule.winner_takes_all()
        rows = []
        for j in self.class_indices:
            for measure in self.config.measures:
                v = variance_comparison(self.gp, j, rule, measure, self.workers)
                rows.append(VarianceRow(class_name=v.class_name, measure=v.measure.value, hardening=v.hardening,
                                        n_groups=v.n_groups, var_soft=float(v.var_soft),
                                        var_crisp=float(v.var_crisp), inflation_ratio=_float(v.inflation_ratio),
                                        var_bernoulli=_float(v.var_bernoulli)))
        return rows


def run_evaluation(gp: GroupedPredictions,
                   config: Optional[EvaluationConfig] = None,
                   tolerances: Tolerances = Tolerances(),
                   digest: str = "",
                   source: str = "") -> EvaluationReport:
    """
    Evaluate grouped predictions.

    Args:
        gp: Validated reference/prediction pairs per group.
        config: What to compute; defaults to all four measures for all three operators.
        tolerances: Tolerances the data was validated with (recorded in the metadata).
        digest: Digest of the input file (recorded in the metadata).
        source: Name of the input (recorded in the metadata).

    Returns:
        The complete report. Identical input gives an identical report for any
        number of workers.
    """
    config = config or EvaluationConfig()
    logger.info(f"Evaluating {gp.n_samples} samples in {len(gp)} group(s) with {config.workers} worker(s)")
    run = _Evaluation(gp, config)

    all_ref, _ = run.all_data()
    meta = ReportMeta(
        tool=TOOL_NAME,
        version=__version__,
        source=source,
        dataset_digest=digest,
        world=_combined_world(*run.all_data()),
        operators=[op.value for op in config.operators],
        measures=[m.value for m in config.measures],
        regression=[k.value for k in config.regression],
        hardening=run.rule.describe() if run.rule is not None else None,
        tolerances=ToleranceInfo(clamp=tolerances.clamp, row_sum=tolerances.row_sum),
        group_columns=list(gp.key_names),
        n_groups=len(gp),
        n_samples=gp.n_samples,
        classes=run.classes,
        class_proportions={name: float(share) for name, share in class_proportions(all_ref).items()
                           if name in run.classes},
    )
    curves, bands = run.curves()
    report = EvaluationReport(
        meta=meta,
        results=run.results(),
        statistics=run.statistics(),
        curves=curves,
        curve_bands=bands,
        confusion=run.confusion(),
        bounds=run.bounds(),
        interclass=run.interclass(),
        variance=run.variance(),
    )
    logger.info(f"Evaluation finished: {len(report.results)} result(s), {len(report.statistics)} statistic(s)")
    return report


class SoftValAPI:
    """
    Programmatic interface: load a dataset, evaluate it, write the report.

    Tolerances and the default worker count come from the environment
    (SOFTVAL_TOL_SUM, SOFTVAL_TOL_CLAMP, SOFTVAL_WORKERS) unless given.
    """

    DEFAULT_OUTPUT_DIR = "reports"

    def __init__(self, tolerances: Optional[Tolerances] = None, workers: Optional[int] = None):
        self.tolerances = tolerances or get_tolerances()
        self.workers = workers or get_workers()
        logger.info("SoftVal API initialized")

    def _config(self, config: Optional[EvaluationConfig]) -> EvaluationConfig:
        config = config or EvaluationConfig()
        if "workers" not in config.model_fields_set and self.workers != config.workers:
            config = config.model_copy(update={"workers": self.workers})
        return config

    def load(self, path: str, fmt: Optional[str] = None, world: World = World.CLOSED,
             group_by: Sequence[str] = (), id_column: str = DEFAULT_ID_COLUMN) -> Tuple[GroupedPredictions, str]:
        return load_dataset(path, fmt, world, self.tolerances, group_by, id_column)

    def evaluate_file(self, path: str, config: Optional[EvaluationConfig] = None, fmt: Optional[str] = None,
                      group_by: Sequence[str] = (), id_column: str = DEFAULT_ID_COLUMN) -> EvaluationReport:
        """
        Load and evaluate a dataset file.

        Args:
            path: CSV or JSON dataset.
            config: Evaluation request; its world is used for validation.
            fmt: "csv" or "json"; inferred from the suffix when None.
            group_by: Group columns.
            id_column: Sample id column.
        """
        config = self._config(config)
        gp, digest = self.load(path, fmt, config.world, group_by, id_column)
        return run_evaluation(gp, config, self.tolerances, digest, os.path.basename(path))

    def evaluate_bytes(self, data: bytes, fmt: str, config: Optional[EvaluationConfig] = None,
                       group_by: Sequence[str] = (), id_column: str = DEFAULT_ID_COLUMN,
                       source: str = "upload") -> EvaluationReport:
        config = self._config(config)
        gp, digest = load_dataset_bytes(data, fmt, config.world, self.tolerances, group_by, id_column)
        return run_evaluation(gp, config, self.tolerances, digest, source)

    def render(self, report: EvaluationReport, fmt: str = "json") -> str:
        return emit_report(report, fmt)

    def save_report(self, report: EvaluationReport, output_path: str, fmt: str = "json") -> Tuple[bool, str]:
        """
        Write a report to a file.

        Returns:
            A tuple (success: bool, message: str)
        """
        try:
            text = emit_report(report, fmt)
            self._ensure_output_dir_exists(output_path)
            with open(output_path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except Exception as e:
            logger.error(f"Writing report failed: {e}")
            return False, f"Writing report failed: {e}"
        logger.info(f"Report written to {output_path}")
        return True, f"Report written to {output_path}"

    def _ensure_output_dir_exists(self, output_path: str) -> None:
        """Ensure the output directory for a file exists."""
        output_dir = os.path.dirname(output_path)
        if output_dir and not os.path.exists(output_dir):
            os.makedirs(output_dir, exist_ok=True)
            logger.info(f"Created output directory: {output_dir}")

    @property
    def available_operators(self) -> Dict[str, str]:
        return {key: info["name"] for key, info in OPERATOR_CATALOG.items()}

    @property
    def available_measures(self) -> Dict[str, str]:
        return {key: info["name"] for key, info in MEASURE_CATALOG.items()}
