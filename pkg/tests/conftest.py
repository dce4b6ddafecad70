# tests/conftest.py
import numpy as np
import pytest

from modules.datagen import FamilySpec
from numerics.solver import Grid1D
from symbolic.expr import FIELD, Binary, Const, Int, Unary, Var, d, div, power

# Все вещественные листья точно записываются тремя значащими цифрами
TREE_LEAVES = (
    FIELD, Var("x"), Var("t"), d("t"), d("x"), d("x", 2), d("x", 3),
    Int(1), Int(2), Int(3),
    Const(0.5), Const(0.25), Const(1.5), Const(0.955), Const(0.0484), Const(2.6),
)


def _random_tree(rng: np.random.Generator, depth: int):
    if depth == 0 or rng.random() < 0.25:
        return TREE_LEAVES[int(rng.integers(len(TREE_LEAVES)))]
    kind = int(rng.integers(8))
    if kind < 3:
        op = ("add", "sub", "mul")[kind]
        return Binary(op, _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))
    if kind == 3:
        # делитель - ненулевое целое
        return div(_random_tree(rng, depth - 1), Int(int(rng.integers(2, 5))))
    if kind == 4:
        return power(_random_tree(rng, depth - 1), 2)
    return Unary(("sin", "cos", "neg")[kind - 5], _random_tree(rng, depth - 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid():
    return Grid1D.uniform(128, 1.0)


@pytest.fixture
def smooth_u0(grid):
    x = grid.nodes
    return 0.5 * np.sin(2 * np.pi * x) + 0.2 * np.cos(4 * np.pi * x)


@pytest.fixture
def small_spec():
    """Маленькая сетка для быстрых тестов генерации."""
    return FamilySpec(name="inviscid_burgers", flux="quadratic", q1=0.5, q2=0.0, t_f=0.2, nx=32, nt=8)


@pytest.fixture
def dataset_dir(tmp_path):
    path = tmp_path / "dataset"
    path.mkdir()
    return path


@pytest.fixture
def random_tree():
    """Случайное дерево глубины <= depth; одинаковый seed даёт одно и то же дерево."""
    def build(seed: int, depth: int = 4):
        return _random_tree(np.random.default_rng(seed), depth)
    return build
