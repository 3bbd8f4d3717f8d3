import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowcomplete import (
    ObservationMask,
    build_core,
    build_graph,
    laplacian,
    partition_blocks,
    pseudo_inverse,
)
from helpers import complete_mask, random_connected_mask, random_mask


def test_single_edge_pseudo_inverse():
    lap = np.array([[1.0, -1.0], [-1.0, 1.0]])
    expected = np.array([[0.25, -0.25], [-0.25, 0.25]])
    assert np.allclose(pseudo_inverse(lap), expected, atol=1e-12)


def test_complete_2x2_quadratic_form():
    core = build_core(build_graph(complete_mask(2, 2)))
    d = np.zeros(4)
    d[0], d[2] = 1.0, -1.0  # u_0 and v_0
    assert abs(d @ core.pinv @ d - 0.75) < 1e-12


def test_pseudo_inverse_matches_svd_route():
    # independent oracle: numpy's SVD-based pinv on the same Laplacian
    rng = np.random.default_rng(3)
    for _ in range(5):
        mask = random_connected_mask(rng, 6, 5)
        lap = laplacian(build_graph(mask))
        assert np.allclose(pseudo_inverse(lap), np.linalg.pinv(lap), atol=1e-10)


def test_rejects_non_symmetric():
    with pytest.raises(ValueError):
        pseudo_inverse(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_partition_blocks_single_edge():
    core = build_core(build_graph(ObservationMask.from_pairs(1, 1, [(0, 0)])))
    g11, g12, g21, g22 = core.blocks
    assert np.allclose(g11, [[0.25]])
    assert np.allclose(g12, [[-0.25]])
    assert np.allclose(g21, [[-0.25]])
    assert np.allclose(g22, [[0.25]])


def test_partition_blocks_dimension_check():
    with pytest.raises(ValueError):
        partition_blocks(np.zeros((3, 3)), 2, 2)


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_penrose_conditions_and_blocks(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    m = int(rng.integers(2, 9))
    mask = random_connected_mask(rng, n, m)
    graph = build_graph(mask)
    core = build_core(graph)
    lap, pinv = core.laplacian, core.pinv
    scale = np.max(np.abs(lap))
    assert np.max(np.abs(lap @ pinv @ lap - lap)) < 1e-8 * scale
    assert np.max(np.abs(pinv @ lap @ pinv - pinv)) < 1e-8
    assert np.max(np.abs((lap @ pinv).T - lap @ pinv)) < 1e-8
    assert np.max(np.abs((pinv @ lap).T - pinv @ lap)) < 1e-8
    assert np.max(np.abs(pinv - pinv.T)) < 1e-10 * max(np.max(np.abs(pinv)), 1.0)
    # connected graph: pinv annihilates the constant vector
    assert np.max(np.abs(pinv @ np.ones(core.n_vertices))) < 1e-8
    g11, g12, g21, g22 = core.blocks
    assert np.array_equal(g21, g12.T)
    reassembled = np.block([[g11, g12], [g21, g22]])
    assert np.array_equal(reassembled, pinv)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7), m=st.integers(1, 7))
@settings(max_examples=30, deadline=None)
def test_null_space_matches_component_count(seed, n, m):
    rng = np.random.default_rng(seed)
    mask = random_mask(rng, n, m, 0.3)
    graph = build_graph(mask)
    core = build_core(graph)  # raises if any block nullity differs from 1
    eigenvalues = np.linalg.eigvalsh(core.laplacian)
    cutoff = core.rank_tolerance * np.max(np.abs(eigenvalues), initial=0.0)
    n_zero = int(np.count_nonzero(np.abs(eigenvalues) <= max(cutoff, 1e-12)))
    assert n_zero == core.components.component_count
    # pinv annihilates each component's indicator vector
    for cid in range(core.components.component_count):
        indicator = np.zeros(core.n_vertices)
        indicator[list(core.components.vertices_of(cid))] = 1.0
        assert np.max(np.abs(core.pinv @ indicator)) < 1e-8


def test_desk_scale_connected_graph():
    # 200 vertices: all four Penrose conditions at 1e-8 relative
    rng = np.random.default_rng(11)
    mask = random_connected_mask(rng, 100, 100, extra=0.05)
    core = build_core(build_graph(mask))
    lap, pinv = core.laplacian, core.pinv
    assert core.components.component_count == 1
    assert np.max(np.abs(lap @ pinv @ lap - lap)) < 1e-8 * np.max(np.abs(lap))
    assert np.max(np.abs(pinv @ lap @ pinv - pinv)) < 1e-8 * np.max(np.abs(pinv))
    product = lap @ pinv
    assert np.max(np.abs(product.T - product)) < 1e-8
    product = pinv @ lap
    assert np.max(np.abs(product.T - product)) < 1e-8
