import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from censored_pricing.inventory import (INVENTORY_KINDS, ExhaustedSequenceError, InventoryGenerator,
                                        load_inventory_file, write_inventory_file)


def gen(kind, **kw):
    return InventoryGenerator(kind, 5.5, 8.5, **kw)


@pytest.mark.parametrize("kind", [k for k in INVENTORY_KINDS if k != "replay-from-file"])
def test_levels_stay_in_band(kind):
    g = gen(kind, jitter=0.1) if kind == "piecewise-adversarial" else gen(kind)
    x = g.generate(5000, np.random.default_rng(0))
    assert x.shape == (5000,)
    assert x.min() >= 5.5 and x.max() <= 8.5
    assert not x.flags.writeable


@settings(max_examples=50, deadline=None)
@given(kind=st.sampled_from(["cyclic", "iid-uniform-in-band", "piecewise-adversarial"]), seed=st.integers(0, 10**6))
def test_sequence_fixed_by_seed(kind, seed):
    g = gen(kind, jitter=0.2)
    a = g.generate(300, np.random.default_rng(seed))
    b = g.generate(300, np.random.default_rng(seed))
    assert np.array_equal(a, b)


def test_constant_level():
    assert np.all(gen("constant").generate(10, np.random.default_rng(0)) == 5.5)
    assert np.all(gen("constant", level=7.0).generate(10, np.random.default_rng(0)) == 7.0)
    with pytest.raises(ValueError):
        gen("constant", level=9.0)


def test_cyclic_spans_band():
    x = gen("cyclic", period=100).generate(100, np.random.default_rng(0))
    assert x.min() == pytest.approx(5.5) and x.max() == pytest.approx(8.5, abs=1e-2)


def test_piecewise_alternates_edges():
    x = gen("piecewise-adversarial", epoch=10).generate(40, np.random.default_rng(0))
    assert np.all(x[:10] == 5.5) and np.all(x[10:20] == 8.5) and np.all(x[20:30] == 5.5)


def test_piecewise_growth_lengthens_epochs():
    x = gen("piecewise-adversarial", epoch=4, growth=2.0).generate(28, np.random.default_rng(0))
    # epochs of 4, 8, 16 rounds
    assert np.all(x[:4] == 5.5) and np.all(x[4:12] == 8.5) and np.all(x[12:28] == 5.5)


def test_piecewise_jitter_near_edges():
    x = gen("piecewise-adversarial", epoch=50, jitter=0.1).generate(100, np.random.default_rng(1))
    assert np.all(x[:50] <= 5.5 + 0.3) and np.all(x[50:] >= 8.5 - 0.3)


def test_replay_round_trip(tmp_path):
    path = tmp_path / "inv.txt"
    levels = [5.5, 6.25, 8.0, 7.125]
    write_inventory_file(path, levels)
    path.write_text("# header\n\n" + path.read_text())
    assert load_inventory_file(path) == levels
    g = InventoryGenerator("replay-from-file", None, None, path=str(path))
    assert (g.lo, g.hi) == (5.5, 8.0)
    assert list(g.generate(3, np.random.default_rng(0))) == levels[:3]
    with pytest.raises(ExhaustedSequenceError):
        g.generate(5, np.random.default_rng(0))


def test_bad_generators():
    with pytest.raises(ValueError):
        InventoryGenerator("sawtooth", 5.5, 8.5)
    with pytest.raises(ValueError):
        InventoryGenerator("constant", 8.5, 5.5)
    with pytest.raises(ValueError):
        InventoryGenerator("replay-from-file", 5.5, 8.5)
    with pytest.raises(ValueError):
        gen("piecewise-adversarial", jitter=1.5)
