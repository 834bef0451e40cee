import numpy as np
import pytest

from edakit.dataset import Column, Dataset, MaterializedMatrix, NUMERIC, CATEGORICAL


def make_matrix(data, feature_ids=None, row_ids=None, standardized=False) -> MaterializedMatrix:
    """Wrap a raw ndarray as a MaterializedMatrix for module-level tests."""
    data = np.asarray(data, dtype=np.float64)
    n, f = data.shape
    if feature_ids is None:
        feature_ids = tuple(f"f{j}" for j in range(f))
    if row_ids is None:
        row_ids = tuple(range(n))
    stds = data.std(axis=0)
    return MaterializedMatrix(
        row_ids=tuple(row_ids),
        feature_ids=tuple(feature_ids),
        data=data,
        standardized=standardized,
        column_means=data.mean(axis=0),
        column_stds=stds,
        zero_variance=tuple(bool(s == 0) for s in stds),
    )


def make_dataset(columns: dict, name="test") -> Dataset:
    """Build an in-memory dataset from {name: list} columns; None = missing."""
    cols = []
    for cname, values in columns.items():
        missing = np.array([v is None for v in values], dtype=bool)
        numeric = all(isinstance(v, (int, float)) for v in values if v is not None)
        if numeric:
            arr = np.array(
                [np.nan if v is None else float(v) for v in values], dtype=np.float64
            )
            cols.append(Column(cname, NUMERIC, arr, missing))
        else:
            arr = np.array([None if v is None else str(v) for v in values], dtype=object)
            cols.append(Column(cname, CATEGORICAL, arr, missing))
    return Dataset(name=name, columns=tuple(cols))


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")
    return str(path)


def random_csv(path, n_rows, n_cols, seed=0, categorical=()):
    rng = np.random.default_rng(seed)
    header = [f"c{j}" for j in range(n_cols)]
    rows = []
    for _ in range(n_rows):
        row = []
        for j in range(n_cols):
            if j in categorical:
                row.append(rng.choice(["red", "green", "blue"]))
            else:
                row.append(f"{rng.normal():.6f}")
        rows.append(row)
    return write_csv(path, header, rows)


@pytest.fixture
def two_blob_matrix():
    """Two well-separated 2-D blobs: 20 points each, separation >> spread."""
    rng = np.random.default_rng(42)
    a = rng.normal(0.0, 0.1, size=(20, 2))
    b = rng.normal(10.0, 0.1, size=(20, 2))
    return make_matrix(np.vstack([a, b]))
