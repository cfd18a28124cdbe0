import numpy as np
import pytest

from semiscale.funcspace import Grid, default_grid

# a coarse grid for nested quadratures (heat of heat, resolvent of resolvent)
SMALL = Grid(-10.0, 10.0, 401)


@pytest.fixture
def grid():
    return default_grid()


@pytest.fixture
def small():
    return SMALL


def sup_diff(a, b, g):
    x = g.points if isinstance(g, Grid) else np.asarray(g)
    return float(np.max(np.abs(np.asarray(a(x)) - np.asarray(b(x)))))
