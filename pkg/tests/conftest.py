# tests/conftest.py
import numpy as np
import pytest
from hypothesis import strategies as st

from softval.membership import World, validate

TWO_CLASSES = ("A", "B")
THREE_CLASSES = ("N", "A2", "A3")


def random_closed(rng, n, n_classes, names=None):
    """Soft closed-world memberships."""
    values = rng.dirichlet(np.ones(n_classes), size=n)
    names = names or tuple(f"c{k}" for k in range(n_classes))
    return validate(values, names, World.CLOSED)


def random_open(rng, n, n_classes, names=None):
    names = names or tuple(f"c{k}" for k in range(n_classes))
    return validate(rng.random((n, n_classes)), names, World.OPEN)


def random_labels(rng, n, n_classes):
    return rng.integers(0, n_classes, size=n)


def one_hot(labels, n_classes, names=None):
    values = np.zeros((len(labels), n_classes))
    values[np.arange(len(labels)), labels] = 1.0
    names = names or tuple(f"c{k}" for k in range(n_classes))
    return validate(values, names, World.CLOSED)


memberships = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def single_sample():
    """One sample, reference 0.5/0.5, prediction 0.8/0.2."""
    ref = validate([[0.5, 0.5]], TWO_CLASSES, World.CLOSED)
    pred = validate([[0.8, 0.2]], TWO_CLASSES, World.CLOSED)
    return ref, pred


@pytest.fixture
def two_samples():
    ref = validate([[1.0, 0.0], [0.5, 0.5]], TWO_CLASSES, World.CLOSED)
    pred = validate([[0.8, 0.2], [0.6, 0.4]], TWO_CLASSES, World.CLOSED)
    return ref, pred


@pytest.fixture
def two_sample_csv(tmp_path):
    path = tmp_path / "two_samples.csv"
    path.write_text("sample,ref:A,ref:B,pred:A,pred:B\n"
                    "s1,1,0,0.8,0.2\n"
                    "s2,0.5,0.5,0.6,0.4\n", encoding="utf-8")
    return path


@pytest.fixture
def grouped_csv(tmp_path, rng):
    """Three iterations of two folds, 3 classes, crisp reference, soft prediction."""
    lines = ["sample,iteration,fold,ref:N,ref:A2,ref:A3,pred:N,pred:A2,pred:A3"]
    k = 0
    for iteration in (1, 2, 3):
        for fold in (1, 2):
            for _ in range(6):
                label = int(rng.integers(0, 3))
                ref = [0, 0, 0]
                ref[label] = 1
                pred = rng.dirichlet(np.ones(3))
                pred = np.round(pred, 4)
                pred[2] = round(1.0 - pred[0] - pred[1], 4)
                if pred[2] < 0:
                    pred = np.array([0.2, 0.3, 0.5])
                k += 1
                lines.append(f"s{k},{iteration},{fold},{ref[0]},{ref[1]},{ref[2]},"
                             f"{pred[0]:.4f},{pred[1]:.4f},{pred[2]:.4f}")
    path = tmp_path / "grouped.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
