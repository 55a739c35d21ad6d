"""Index matrices: families, presets, permutedness, file round trip."""

import itertools

import numpy as np
import pytest

import starfix as sx
from starfix.index_algebra import parse_star_text

from conftest import random_star


# ---------------------------------------------------------------------------
# construction and validation


def test_make_star_validates_entries():
    with pytest.raises(ValueError):
        sx.make_star(2, [[1, 2], [2, 3]])  # 3 out of range
    with pytest.raises(ValueError):
        sx.make_star(2, [[1, 2], [2, 0]])  # 0 out of range
    with pytest.raises(ValueError):
        sx.make_star(1, [[1]])  # n must be at least 2
    with pytest.raises(ValueError):
        sx.make_star(2, [[1, 2, 1], [2, 1, 1]])  # shape mismatch


def test_star_is_immutable_and_hashable():
    star = sx.preset("coupled2")
    with pytest.raises(ValueError):
        star.entries[0, 0] = 2
    assert hash(star) == hash(sx.make_star(2, [[1, 2], [2, 1]]))
    assert star == sx.make_star(2, [[1, 2], [2, 1]])
    assert star != sx.make_star(2, [[1, 1], [2, 2]])


def test_zero_based_view():
    star = sx.preset("borcut3")
    assert star.zero_based.tolist() == [[0, 1, 2], [1, 0, 2], [2, 1, 0]]


# ---------------------------------------------------------------------------
# the four families: frozen matrices for n=3, structural law for all n


def test_forward_cyclic_3():
    assert sx.forward_cyclic(3).entries.tolist() == [
        [1, 2, 3],
        [2, 3, 1],
        [3, 1, 2],
    ]


def test_backward_cyclic_3():
    assert sx.backward_cyclic(3).entries.tolist() == [
        [1, 3, 2],
        [2, 1, 3],
        [3, 2, 1],
    ]


def test_skew_families_3():
    assert sx.skew_1(3).entries.tolist() == [[1, 2, 3], [2, 1, 2], [3, 2, 1]]
    assert sx.skew_n(3).entries.tolist() == [[1, 2, 3], [2, 3, 2], [3, 2, 1]]


@pytest.mark.parametrize("n", range(2, 9))
def test_family_defining_rules(n):
    fwd = sx.forward_cyclic(n).entries
    bwd = sx.backward_cyclic(n).entries
    s1 = sx.skew_1(n).entries
    sn = sx.skew_n(n).entries
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            assert fwd[i - 1, k - 1] == (i + k - 1 if k <= n - i + 1 else i + k - n - 1)
            assert bwd[i - 1, k - 1] == (i - k + 1 if k <= i else n + i - k + 1)
            assert s1[i - 1, k - 1] == (i - k + 1 if k <= i else k - i + 1)
            assert sn[i - 1, k - 1] == (
                i + k - 1 if k <= n - i + 1 else 2 * n - i - k + 1
            )


def test_first_rows_and_columns():
    # row 1 of the forward family is the identity row; column 1 is always (1..n)
    for n in range(2, 8):
        fwd = sx.forward_cyclic(n).entries
        assert fwd[0].tolist() == list(range(1, n + 1))
        assert fwd[:, 0].tolist() == list(range(1, n + 1))


# ---------------------------------------------------------------------------
# presets


def test_preset_coupled2():
    assert sx.preset("coupled2").entries.tolist() == [[1, 2], [2, 1]]


def test_preset_borcut3():
    assert sx.preset("borcut3").entries.tolist() == [[1, 2, 3], [2, 1, 3], [3, 2, 1]]


def test_preset_karapinar4():
    want = [[1, 2, 3, 4], [1, 4, 3, 2], [3, 2, 1, 4], [3, 4, 1, 2]]
    assert sx.preset("karapinar4").entries.tolist() == want
    assert sx.karapinar_quadruple().entries.tolist() == want


def test_preset_families_take_n():
    assert sx.preset("forward_cyclic", 5) == sx.forward_cyclic(5)
    assert sx.preset("backward_cyclic", 4) == sx.backward_cyclic(4)
    with pytest.raises(ValueError):
        sx.preset("forward_cyclic")  # family presets need n
    with pytest.raises(ValueError):
        sx.preset("no_such_preset", 3)


def test_preset_names_cover_fixed_and_family():
    names = sx.preset_names()
    for expected in (
        "coupled2",
        "borcut3",
        "karapinar4",
        "forward_cyclic",
        "backward_cyclic",
        "skew_1",
        "skew_n",
    ):
        assert expected in names


# ---------------------------------------------------------------------------
# permutedness: library vs the exhaustive definition


def rows_are_permutations(entries):
    n = entries.shape[0]
    return all(sorted(row) == list(range(1, n + 1)) for row in entries.tolist())


def test_is_permuted_all_two_by_two():
    # every operation on a two-element index set, by brute force
    for cells in itertools.product((1, 2), repeat=4):
        entries = np.array(cells).reshape(2, 2)
        star = sx.make_star(2, entries)
        assert sx.is_permuted(star) == rows_are_permutations(entries)


def test_is_permuted_random_ops():
    rng = np.random.default_rng(41)
    for n in (3, 4):
        for _ in range(500):
            star = random_star(rng, n)
            assert sx.is_permuted(star) == rows_are_permutations(star.entries)


@pytest.mark.parametrize("n", range(3, 9))
def test_cyclics_permuted_skews_not(n):
    assert sx.is_permuted(sx.forward_cyclic(n))
    assert sx.is_permuted(sx.backward_cyclic(n))
    assert not sx.is_permuted(sx.skew_1(n))
    assert not sx.is_permuted(sx.skew_n(n))


def test_presets_permuted():
    assert sx.is_permuted(sx.preset("coupled2"))
    assert sx.is_permuted(sx.preset("borcut3"))
    assert sx.is_permuted(sx.preset("karapinar4"))


def test_non_permuted_example_with_repeats():
    star = sx.make_star(3, [[1, 2, 3], [2, 1, 3], [3, 3, 2]])
    assert not sx.is_permuted(star)


# ---------------------------------------------------------------------------
# row projection


def test_row_projection():
    star = sx.preset("borcut3")
    assert sx.row_projection(star, 1) == (1, 2, 3)
    assert sx.row_projection(star, 2) == (2, 1, 3)
    assert sx.row_projection(star, 3) == (3, 2, 1)
    with pytest.raises(IndexError):
        sx.row_projection(star, 0)
    with pytest.raises(IndexError):
        sx.row_projection(star, 4)


# ---------------------------------------------------------------------------
# text format


def test_format_parse_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(50):
        star = random_star(rng, int(rng.integers(2, 6)))
        again = parse_star_text(sx.format_star(star))
        assert again == star


def test_parse_star_text_errors():
    with pytest.raises(ValueError):
        parse_star_text("2\n1 2\n2 0\n")  # entry out of range
    with pytest.raises(ValueError):
        parse_star_text("3\n1 2 3\n2 1 3\n")  # missing row
    with pytest.raises(ValueError):
        parse_star_text("2\n1 2 1\n2 1\n")  # ragged row
    with pytest.raises(ValueError):
        parse_star_text("")


def test_read_star_file(tmp_path):
    path = tmp_path / "op.star"
    path.write_text(sx.format_star(sx.preset("karapinar4")))
    assert sx.read_star_file(str(path)) == sx.preset("karapinar4")
