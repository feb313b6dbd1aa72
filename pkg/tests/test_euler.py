import numpy as np
import pytest

from isodeform.euler import BinaryGrid, cell_counts, euler_characteristic, read_pgm, write_pgm
from isodeform.errors import FormatError

from oracles import all_masks, components_minus_holes, euler_bruteforce


def M(rows):
    return np.array([[c == "#" for c in row] for row in rows], dtype=bool)


FIXTURES = {
    "empty": (M(["...", "..."]), 0),
    "single": (M(["#"]), 1),
    "block": (M(["###", "###"]), 1),
    "ring": (M(["###", "#.#", "###"]), 0),
    "diagonal pair": (M(["#.", ".#"]), 1),
    "diagonal diamond": (M([".#.", "#.#", ".#."]), 0),
    "L shape": (M(["#..", "#..", "###"]), 1),
    "disjoint blocks": (M(["##..#", "##..#"]), 2),
    "nested rings": (M(["#######", "#.....#", "#.###.#", "#.#.#.#", "#.###.#", "#.....#", "#######"]), 0),
    "nested rings with core": (M(["#######", "#.....#", "#.###.#", "#.###.#", "#.###.#", "#.....#", "#######"]), 1),
    "figure eight": (M(["#####", "#.#.#", "#####"]), -1),
    "checkerboard": (M(["#.#", ".#.", "#.#"]), 1),
}


@pytest.mark.parametrize("name", list(FIXTURES))
def test_fixture(name):
    mask, expected = FIXTURES[name]
    assert euler_characteristic(mask) == expected
    assert euler_bruteforce(mask) == expected
    assert components_minus_holes(mask) == expected


def test_diagonal_pair_cell_counts():
    v, e, f = cell_counts(FIXTURES["diagonal pair"][0])
    assert (int(v), int(e), int(f)) == (7, 8, 2)


def test_all_3x3_masks_match_oracles():
    masks = np.array(list(all_masks(3, 3)))
    chis = euler_characteristic(masks)
    assert chis.shape == (512,)
    for m, c in zip(masks, chis):
        assert c == euler_bruteforce(m) == components_minus_holes(m)


def _random_masks(count=100, seed=2024):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        h, w = rng.integers(2, 16, size=2)
        yield rng.random((h, w)) < rng.uniform(0.2, 0.8)


@pytest.mark.parametrize("k", range(4))
def test_random_masks_rotation_and_translation_invariant(k):
    for m in _random_masks():
        chi = euler_characteristic(m)
        assert chi == euler_bruteforce(m)
        assert euler_characteristic(np.rot90(m, k)) == chi
        shifted = np.zeros((m.shape[0] + 3, m.shape[1] + 5), dtype=bool)
        shifted[3:, 5:] = m
        assert euler_characteristic(shifted) == chi


def test_random_masks_additive_over_separated_union():
    for a, b in zip(_random_masks(seed=1), _random_masks(seed=2)):
        h = max(a.shape[0], b.shape[0])
        both = np.zeros((h, a.shape[1] + b.shape[1] + 1), dtype=bool)
        both[:a.shape[0], :a.shape[1]] = a
        both[:b.shape[0], a.shape[1] + 1:] = b
        assert euler_characteristic(both) == euler_characteristic(a) + euler_characteristic(b)


def test_random_masks_inclusion_exclusion_on_cells():
    # chi(A u B) = chi(A) + chi(B) - chi(A n B), with A n B the common cells of the two complexes
    def cells(mask):
        out = set()
        for i, j in zip(*np.nonzero(mask)):
            out |= {("f", i, j)} | {("v", i + a, j + b) for a in (0, 1) for b in (0, 1)}
            out |= {("h", i + a, j) for a in (0, 1)} | {("w", i, j + b) for b in (0, 1)}
        return out

    def chi_of(c):
        return sum(1 if t[0] in "fv" else -1 for t in c)

    rng = np.random.default_rng(7)
    for _ in range(100):
        a = rng.random((10, 10)) < 0.45
        b = rng.random((10, 10)) < 0.45
        lhs = euler_characteristic(a | b)
        assert lhs == euler_characteristic(a) + euler_characteristic(b) - chi_of(cells(a) & cells(b))


def test_binary_grid_accepted():
    assert euler_characteristic(BinaryGrid(FIXTURES["ring"][0])) == 0


def test_pgm_round_trip(tmp_path):
    mask = FIXTURES["figure eight"][0]
    write_pgm(tmp_path / "m.pgm", mask)
    np.testing.assert_array_equal(read_pgm(tmp_path / "m.pgm"), mask)


def test_pgm_comment_and_errors(tmp_path):
    (tmp_path / "c.pgm").write_bytes(b"P5\n# note\n2 1\n255\n\x00\xff")
    np.testing.assert_array_equal(read_pgm(tmp_path / "c.pgm"), [[False, True]])
    (tmp_path / "bad.pgm").write_bytes(b"P2\n2 1\n255\n0 1\n")
    with pytest.raises(FormatError):
        read_pgm(tmp_path / "bad.pgm")
    (tmp_path / "short.pgm").write_bytes(b"P5\n4 4\n255\n\x00")
    with pytest.raises(FormatError):
        read_pgm(tmp_path / "short.pgm")
