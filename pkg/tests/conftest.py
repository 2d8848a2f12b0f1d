import numpy as np
import pytest
from hypothesis import strategies as st

from decoy_akg import ExpansionTable, IntensityGrid, ObservedStats, build_matrices


@st.composite
def intensity_grids(draw, max_k=8, min_spacing=0.1, mu_max=2.0):
    """Random strictly increasing grids in (0, mu_max] honoring the spacing."""
    k = draw(st.integers(min_value=1, max_value=max_k))
    start = draw(st.floats(min_value=0.02, max_value=0.3))
    gaps = draw(
        st.lists(
            st.floats(min_value=min_spacing, max_value=0.25),
            min_size=k - 1,
            max_size=k - 1,
        )
    )
    mus = [start]
    for gap in gaps:
        mus.append(mus[-1] + gap)
    if mus[-1] > mu_max:
        scale = mu_max / mus[-1]
        mus = [m * scale for m in mus]
        if any(hi - lo < min_spacing * scale for lo, hi in zip(mus, mus[1:])):
            min_spacing = min_spacing * scale
    return IntensityGrid(tuple(mus), min_spacing=min(min_spacing, 0.019))


def random_grid(rng: np.random.Generator, k: int, mu_max: float = 1.5) -> IntensityGrid:
    start = rng.uniform(0.05, 0.25)
    gaps = rng.uniform(0.1, min(0.3, (mu_max - start) / max(k - 1, 1)), size=k - 1)
    mus = start + np.concatenate([[0.0], np.cumsum(gaps)])
    return IntensityGrid(tuple(mus), min_spacing=0.05)


def feasible_instance(rng: np.random.Generator, k: int, p_dark: float = 0.0, grid=None):
    """Stats forward-generated from a uniform draw inside the box constraints.

    Returns (grid, table, stats, q_vector, b_vector) with the counting-rate
    system satisfied exactly, so every bound must be sound for it.
    """
    grid = grid or random_grid(rng, k)
    table = ExpansionTable.build(grid)
    p_matrix = build_matrices(grid).constraint.p
    q_vec = rng.uniform(0.0, 1.0 - p_dark, size=2 * k + 2)
    p = p_matrix @ q_vec + p_dark
    r_vec = rng.uniform(0.0, 1.0, size=k + 1)
    b_vec = q_vec[1 : k + 2] * r_vec
    exp_neg = np.exp(-np.asarray(grid.mus))
    sp = p_matrix[1 : k + 1, 1 : k + 2] @ b_vec + 0.5 * (exp_neg * (p[0] - p_dark) + p_dark)
    s = sp / p[1 : k + 1]
    stats = ObservedStats(tuple(p), tuple(s), p_dark)
    return grid, table, stats, q_vec, b_vec


@pytest.fixture(scope="session")
def table_cache():
    cache: dict[tuple[float, ...], ExpansionTable] = {}

    def get(grid: IntensityGrid) -> ExpansionTable:
        key = grid.mus
        if key not in cache:
            cache[key] = ExpansionTable.build(grid)
        return cache[key]

    return get
