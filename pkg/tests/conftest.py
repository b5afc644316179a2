import json

import pytest

from hmpx import make_model


def binary_symmetric(p=0.3):
    """Symmetric two-state chain with flip probability p and symmetric flip noise."""
    return make_model([[1 - p, p], [p, 1 - p]], [[-1, 1], [1, -1]])


@pytest.fixture
def bs():
    return binary_symmetric(0.3)


@pytest.fixture
def t3():
    return make_model(
        [[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]],
        [[-2, 1, 1], [1, -2, 1], [1, 1, -2]],
    )


@pytest.fixture
def noiseless():
    """Degenerate T = 0: the observation process is the chain itself."""
    return make_model([[0.7, 0.3], [0.3, 0.7]], [[0, 0], [0, 0]])


@pytest.fixture
def model_file(tmp_path):
    """Write a model JSON document to disk, return the path."""
    def write(doc, name="model.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)
    return write
