# config/softval_config.py
# Defaults for evaluations. Environment variables (or a .env file) override the tolerances
# and the worker count; everything else is chosen per request.

import logging
import os

from dotenv import load_dotenv

from softval.membership import DEFAULT_TOL_CLAMP, DEFAULT_TOL_SUM, Tolerances

logger = logging.getLogger(__name__)

load_dotenv()

SOFTVAL_DEFAULTS = {
    "world": "closed",
    # best / expected / worst case reported side by side
    "operators": ["strong", "product", "weak"],
    "measures": ["sens", "spec", "ppv", "npv"],
    "regression": [],
    "hardening": None,
    "curve_grid": 101,
    "id_column": "sample",
    "workers": 1,
    "tol_sum": DEFAULT_TOL_SUM,
    "tol_clamp": DEFAULT_TOL_CLAMP,
}

# AND-operators for soft confusion matrices
OPERATOR_CATALOG = {
    "weak": {
        "name": "Weak AND (minimum)",
        "formula": "min(r, p)",
        "description": "Largest possible overlap of reference and prediction (best case)",
        "order": 3,
    },
    "strong": {
        "name": "Strong AND (Lukasiewicz)",
        "formula": "max(r + p - 1, 0)",
        "description": "Smallest possible overlap of reference and prediction (worst case)",
        "order": 1,
    },
    "product": {
        "name": "Product AND",
        "formula": "r * p",
        "description": "Expected overlap when reference and prediction mix at random",
        "order": 2,
    },
}

MEASURE_CATALOG = {
    "sens": {"name": "Sensitivity", "weights": "reference memberships r"},
    "spec": {"name": "Specificity", "weights": "reference memberships 1 - r"},
    "ppv": {"name": "Positive predictive value", "weights": "predicted memberships p"},
    "npv": {"name": "Negative predictive value", "weights": "predicted memberships 1 - p"},
}

REGRESSION_CATALOG = {
    "mae": {"name": "1 - weighted mean absolute error", "operator": "product"},
    "rmse": {"name": "1 - weighted root mean squared error", "operator": "product"},
}

ENV_TOL_SUM = "SOFTVAL_TOL_SUM"
ENV_TOL_CLAMP = "SOFTVAL_TOL_CLAMP"
ENV_WORKERS = "SOFTVAL_WORKERS"


def _env_number(name, default, cast=float, minimum=0):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = cast(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not a number. Using {default}.")
        return default
    if value < minimum:
        logger.warning(f"Ignoring {name}={raw!r}: must be at least {minimum}. Using {default}.")
        return default
    return value


def get_tolerances():
    """Tolerances from the environment, falling back to the defaults."""
    return Tolerances(
        clamp=_env_number(ENV_TOL_CLAMP, SOFTVAL_DEFAULTS["tol_clamp"]),
        row_sum=_env_number(ENV_TOL_SUM, SOFTVAL_DEFAULTS["tol_sum"]),
    )


def get_workers():
    return _env_number(ENV_WORKERS, SOFTVAL_DEFAULTS["workers"], cast=int, minimum=1)


def get_operators_in_order():
    """Operator names ordered worst case first."""
    return sorted(OPERATOR_CATALOG, key=lambda key: OPERATOR_CATALOG[key]["order"])


def get_operator_info(operator_key):
    return OPERATOR_CATALOG.get(operator_key, {})


def get_measure_info(measure_key):
    return MEASURE_CATALOG.get(measure_key, {})
