import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from tensorschur.block import flatten
from tensorschur.cpmaps import KrausSet, apply, from_kraus, is_cp
from tensorschur.errors import ShapeError
from tensorschur.linalg_core import hermiticity_defect, psd_check
from tensorschur.randgen import (
    ginibre,
    random_block_psd,
    random_block_psd_grid,
    random_cp_map,
    random_kraus_set,
    random_psd,
    random_unit_vector,
)
from tensorschur.seeding import (
    MASK64,
    Seed,
    as_seed,
    bit_generator,
    complex_gaussian,
    integer,
    parse_seed,
    splitmix64,
    uniform,
)


def test_splitmix64_reference_values():
    # 参考实现 splitmix64 从状态 0 输出的前两个值
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4


def test_parse_seed():
    assert parse_seed("42") == Seed(42)
    assert parse_seed("0x2A") == Seed(42)
    assert parse_seed(" 0xffff_ffff_ffff_ffff ") == Seed(MASK64)
    with pytest.raises(ValueError):
        parse_seed("forty-two")
    with pytest.raises(ValueError):
        parse_seed(str(1 << 64))
    with pytest.raises(ValueError):
        parse_seed("-1")


def test_seed_rejects_non_integers():
    with pytest.raises(TypeError):
        Seed(True)
    with pytest.raises(TypeError):
        Seed(1.5)


def test_seed_str_is_hex():
    assert str(Seed(42)) == "0x000000000000002a"
    assert as_seed(str(Seed(42))) == Seed(42)


@given(st.integers(0, MASK64), st.integers(0, 1000), st.integers(0, 1000))
def test_derive_is_deterministic_and_ordered(value, a, b):
    seed = Seed(value)
    assert seed.derive(a, b) == seed.derive(a, b)
    if a != b:
        assert seed.derive(a, b) != seed.derive(b, a)
        assert seed.derive(a) != seed.derive(b)


def test_bit_generator_streams_are_reproducible():
    x = bit_generator(7).random_raw(10)
    y = bit_generator(Seed(7)).random_raw(10)
    assert_array_equal(x, y)
    assert not np.array_equal(x, bit_generator(8).random_raw(10))


def test_uniform_lies_in_half_open_unit_interval():
    u = uniform(bit_generator(3), 10000)
    assert u.min() > 0.0 and u.max() <= 1.0
    assert u.mean() == pytest.approx(0.5, abs=0.02)


def test_integer_range():
    bits = bit_generator(5)
    draws = {integer(bits, 1, 4) for _ in range(200)}
    assert draws == {1, 2, 3, 4}
    assert integer(bits, 7, 7) == 7
    with pytest.raises(ValueError):
        integer(bits, 2, 1)


def test_complex_gaussian_is_box_muller_over_raw_output():
    z = complex_gaussian(bit_generator(9), (2, 3))
    raw = bit_generator(9).random_raw(12)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    radius = np.sqrt(-2.0 * np.log(u[0::2]))
    expected = (radius * np.cos(2 * np.pi * u[1::2]) + 1j * radius * np.sin(2 * np.pi * u[1::2])) / np.sqrt(2.0)
    assert z.shape == (2, 3)
    assert_allclose(z.ravel(), expected, rtol=1e-15, atol=1e-15)


def test_ginibre_is_deterministic():
    assert_array_equal(ginibre(3, 4, 11), ginibre(3, 4, "11"))
    assert not np.array_equal(ginibre(3, 4, 11), ginibre(3, 4, 12))


def test_ginibre_moments():
    g = ginibre(100, 100, 2024)
    assert abs(g.mean()) <= 0.05
    assert np.mean(np.abs(g) ** 2) == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("rows, cols", [(0, 3), (3, 0), (0, 0)])
def test_ginibre_rejects_empty(rows, cols):
    with pytest.raises(ShapeError):
        ginibre(rows, cols, 0)


def test_random_psd_is_psd():
    for seed in range(50):
        a = random_psd(6, 6, seed)
        assert psd_check(a).is_psd
        assert hermiticity_defect(a) <= 1e-14 * np.linalg.norm(a)


def test_random_psd_rank_one():
    lam = np.linalg.eigvalsh(random_psd(5, 1, 3))
    assert lam[-2] <= 1e-10 * lam[-1]


@pytest.mark.parametrize("rank", [0, 7])
def test_random_psd_rejects_bad_rank(rank):
    with pytest.raises(ShapeError):
        random_psd(6, rank, 0)


def test_generated_instances_are_psd_up_to_dim_12():
    for dim in range(1, 13):
        assert psd_check(random_psd(dim, dim, dim)).is_psd


def test_random_block_psd():
    r = random_block_psd(3, 2, 5)
    assert r.blocks.shape == (3, 3, 2, 2)
    assert psd_check(flatten(r)).is_psd
    assert_array_equal(random_block_psd(3, 2, 5).blocks, r.blocks)


def test_random_block_psd_grid_shape():
    grid = random_block_psd_grid(3, 2, 2, 1)
    assert len(grid) == 3 and all(len(row) == 3 for row in grid)
    assert all((b.n, b.m) == (2, 2) for row in grid for b in row)


def test_random_unit_vector():
    x = random_unit_vector(5, 9)
    assert np.linalg.norm(x) == pytest.approx(1.0)


def test_random_cp_map():
    phi = random_cp_map(3, 2, 3, 17)
    assert is_cp(phi).is_psd
    assert_array_equal(random_cp_map(3, 2, 3, 17).action, phi.action)
    ks = random_kraus_set(3, 2, 3, 17)
    assert_array_equal(from_kraus(ks).action, phi.action)
    with pytest.raises(ShapeError):
        random_kraus_set(3, 2, 0, 17)


def test_single_unitary_kraus_is_conjugation():
    u, _ = np.linalg.qr(ginibre(3, 3, 4))
    phi = from_kraus(KrausSet(3, 3, (u,)))
    x = ginibre(3, 3, 5)
    assert_allclose(apply(phi, x), u @ x @ np.conj(u).T, atol=1e-12)
