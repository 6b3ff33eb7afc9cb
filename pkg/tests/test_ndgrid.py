"""Grid container, generators, and statistics against brute-force oracles."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segmap import (
    BORDER,
    GridFormatError,
    LabeledGrid,
    compute_stats,
    generate_d1,
    generate_d2,
    load_grid,
    relabel_connected_components,
    save_grid,
)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def oracle_stats(labels: np.ndarray):
    """Face counting by explicit iteration over every cell and axis."""
    sizes = {}
    pairs = {}
    dims = labels.shape
    for idx in itertools.product(*(range(d) for d in dims)):
        v = int(labels[idx])
        sizes[v] = sizes.get(v, 0) + 1
        for axis in range(labels.ndim):
            for step in (-1, 1):
                nb = list(idx)
                nb[axis] += step
                if 0 <= nb[axis] < dims[axis]:
                    u = int(labels[tuple(nb)])
                    if u != v and step == 1:
                        key = (min(u, v), max(u, v))
                        pairs[key] = pairs.get(key, 0) + 1
                else:
                    key = (BORDER, v)
                    pairs[key] = pairs.get(key, 0) + 1
    return sizes, pairs


def oracle_components(labels: np.ndarray):
    """Flood-fill component labeling ordered by (label, first-cell scan order)."""
    dims = labels.shape
    flat = labels.reshape(-1)
    out = np.full(flat.shape, -1, dtype=np.int64)
    strides = []
    acc = 1
    for d in reversed(dims):
        strides.append(acc)
        acc *= d
    strides.reverse()

    def neighbors(i):
        rem, coords = i, []
        for s in strides:
            coords.append(rem // s)
            rem %= s
        for ax, s in enumerate(strides):
            if coords[ax] > 0:
                yield i - s
            if coords[ax] + 1 < dims[ax]:
                yield i + s

    order = sorted(range(flat.size), key=lambda i: (flat[i], i))
    nid = 0
    for start in order:
        if out[start] >= 0:
            continue
        stack = [start]
        out[start] = nid
        while stack:
            c = stack.pop()
            for nb in neighbors(c):
                if out[nb] < 0 and flat[nb] == flat[c]:
                    out[nb] = nid
                    stack.append(nb)
        nid += 1
    return out.reshape(dims)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("encoding", ["ascii", "binary"])
def test_roundtrip(tmp_path, encoding):
    rng = np.random.default_rng(0)
    grid = LabeledGrid(rng.integers(0, 5, size=(3, 4, 5)).astype(np.int32))
    path = tmp_path / "g.ndseg"
    save_grid(grid, path, encoding=encoding)
    back = load_grid(path)
    assert back.dims == grid.dims
    assert np.array_equal(back.labels, grid.labels)


@settings(max_examples=30, deadline=None)
@given(
    dims=st.lists(st.integers(1, 4), min_size=1, max_size=3),
    seed=st.integers(0, 2**31),
    encoding=st.sampled_from(["ascii", "binary"]),
)
def test_roundtrip_property(tmp_path_factory, dims, seed, encoding):
    rng = np.random.default_rng(seed)
    grid = LabeledGrid(rng.integers(0, 7, size=tuple(dims)).astype(np.int32))
    path = tmp_path_factory.mktemp("rt") / "g.ndseg"
    save_grid(grid, path, encoding=encoding)
    assert np.array_equal(load_grid(path).labels, grid.labels)


def test_load_rejects_bad_magic(tmp_path):
    p = tmp_path / "bad.ndseg"
    p.write_bytes(b"NOPE\ndims 2 2\nencoding ascii\n0 0 0 0\n")
    with pytest.raises(GridFormatError, match="magic"):
        load_grid(p)


def test_load_rejects_wrong_count(tmp_path):
    p = tmp_path / "bad.ndseg"
    p.write_bytes(b"NDSEG1\ndims 2 2\nencoding ascii\n0 0 0\n")
    with pytest.raises(GridFormatError, match="expected 4 labels"):
        load_grid(p)


def test_load_rejects_negative_label_with_offset(tmp_path):
    p = tmp_path / "bad.ndseg"
    p.write_bytes(b"NDSEG1\ndims 2 2\nencoding ascii\n0 1 -3 0\n")
    with pytest.raises(GridFormatError, match="offset 2"):
        load_grid(p)


def test_load_rejects_bad_encoding(tmp_path):
    p = tmp_path / "bad.ndseg"
    p.write_bytes(b"NDSEG1\ndims 2\nencoding utf8\n0 0\n")
    with pytest.raises(GridFormatError, match="encoding"):
        load_grid(p)


def test_load_rejects_short_binary(tmp_path):
    p = tmp_path / "bad.ndseg"
    p.write_bytes(b"NDSEG1\ndims 2 2\nencoding binary\n" + b"\x00" * 7)
    with pytest.raises(GridFormatError, match="payload bytes"):
        load_grid(p)


def test_payload_is_row_major_last_dim_fastest(tmp_path):
    p = tmp_path / "g.ndseg"
    p.write_bytes(b"NDSEG1\ndims 2 3\nencoding ascii\n0 1 2 3 4 5\n")
    grid = load_grid(p)
    assert grid.labels[0, 2] == 2
    assert grid.labels[1, 0] == 3


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(
    dims=st.lists(st.integers(1, 5), min_size=1, max_size=3),
    seed=st.integers(0, 2**31),
)
def test_stats_match_bruteforce(dims, seed):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 4, size=tuple(dims)).astype(np.int32)
    stats = compute_stats(LabeledGrid(labels))
    sizes, pairs = oracle_stats(labels)
    assert stats.sizes == sizes
    assert stats.boundaries == pairs
    assert stats.total_size == labels.size
    assert stats.total_boundary == sum(pairs.values())


def test_stats_octants():
    stats = compute_stats(generate_d2())
    assert stats.sizes == {s: 1000 for s in range(8)}
    assert stats.total_size == 8000
    # 12 internal contact faces of 10x10=100 cells, 8 surface patches of
    # 3x100 cells: total shared-boundary length 3600.
    internal = {k: v for k, v in stats.boundaries.items() if k[0] != BORDER}
    assert len(internal) == 12
    assert all(v == 100 for v in internal.values())
    border = {k: v for k, v in stats.boundaries.items() if k[0] == BORDER}
    assert len(border) == 8
    assert all(v == 300 for v in border.values())
    assert stats.total_boundary == 3600


# ---------------------------------------------------------------------------
# Relabeling
# ---------------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(
    dims=st.lists(st.integers(1, 5), min_size=1, max_size=3),
    seed=st.integers(0, 2**31),
)
def test_relabel_matches_floodfill(dims, seed):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 3, size=tuple(dims)).astype(np.int32)
    got = relabel_connected_components(LabeledGrid(labels)).labels
    want = oracle_components(labels)
    assert np.array_equal(got, want)


def test_relabel_is_identity_on_component_pure_grids():
    grid = generate_d2()
    assert np.array_equal(relabel_connected_components(grid).labels, grid.labels)
    grid = generate_d1((12, 12), 5, seed=7)
    assert np.array_equal(relabel_connected_components(grid).labels, grid.labels)


def test_relabel_splits_diagonal_touch():
    labels = np.array([[0, 1], [1, 0]], dtype=np.int32)
    out = relabel_connected_components(LabeledGrid(labels)).labels
    assert len(np.unique(out)) == 4


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def test_generate_d1_covers_grid_and_is_deterministic():
    a = generate_d1((20, 20), 6, seed=42)
    b = generate_d1((20, 20), 6, seed=42)
    assert np.array_equal(a.labels, b.labels)
    present = set(np.unique(a.labels).tolist())
    assert present == set(range(6))
    c = generate_d1((20, 20), 6, seed=43)
    assert not np.array_equal(a.labels, c.labels)


@settings(max_examples=15, deadline=None)
@given(
    dims=st.lists(st.integers(2, 8), min_size=1, max_size=3),
    seed=st.integers(0, 2**31),
    data=st.data(),
)
def test_generate_d1_segments_connected(dims, seed, data):
    n = int(np.prod(dims))
    k = data.draw(st.integers(1, min(6, n)))
    grid = generate_d1(tuple(dims), k, seed)
    assert set(np.unique(grid.labels).tolist()) == set(range(k))
    # every segment is one face-connected component
    relabeled = relabel_connected_components(grid)
    assert np.array_equal(relabeled.labels, grid.labels)


def test_generate_d1_3d():
    grid = generate_d1((10, 10, 10), 20, seed=1)
    assert grid.dims == (10, 10, 10)
    assert set(np.unique(grid.labels).tolist()) == set(range(20))
