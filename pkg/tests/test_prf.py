"""PRF streams: determinism, seekability, and statistical sanity."""

from __future__ import annotations

import numpy as np
import pytest

from driftcert.field import field_by_id
from driftcert.prf import PrfStream, derive_seed

SEED = bytes(range(32))

# Frozen outputs of the stream keyed by SEED under the given domains; any
# change here is a wire-format break for every proof seeded by a transcript.
GOLDEN_RAD8 = [1, -1, 1, -1, -1, -1, 1, 1]
GOLDEN_SCALAR0 = 18565879455163351909886755630913887871974597544920316341728040931823247562582
GOLDEN_CHILD = "9b3ba705ad470bc8218d8cd972543bda5a3e0c0e134a0e1ec7526859e8fd4c2d"
GOLDEN_DERIVE = "5655557e310e6775a9f2730a24f2c4e0e6f092cb9d156322ce4b14ecd067f6f5"


def test_seed_length_enforced():
    with pytest.raises(ValueError):
        PrfStream(b"short", "NBDP/proj")


def test_frozen_goldens():
    s = PrfStream(SEED, "NBDP/proj")
    assert s.rademacher(8).tolist() == GOLDEN_RAD8
    assert s.scalars(2, field_by_id("bls12-381-scalar"))[0] == GOLDEN_SCALAR0
    assert s.child_seed("vec/00/x").hex() == GOLDEN_CHILD
    assert derive_seed(b"a", b"b").hex() == GOLDEN_DERIVE


def test_determinism_and_domain_separation():
    a = PrfStream(SEED, "NBDP/proj")
    b = PrfStream(SEED, "NBDP/proj")
    c = PrfStream(SEED, "SDIP/chal")
    assert a.blocks(0, 4) == b.blocks(0, 4)
    assert a.blocks(0, 4) != c.blocks(0, 4)
    other = PrfStream(bytes(32), "NBDP/proj")
    assert a.blocks(0, 4) != other.blocks(0, 4)


def test_rademacher_seekable():
    s = PrfStream(SEED, "NBDP/proj")
    full = s.rademacher(4096)
    for offset in (0, 17, 255, 256, 1000, 4000):
        window = s.rademacher(7, offset=offset)
        assert window.tolist() == full[offset:offset + 7].tolist()


def test_rademacher_values_and_mean():
    s = PrfStream(SEED, "NBDP/proj")
    signs = s.rademacher(1_000_000)
    assert set(np.unique(signs)) == {-1, 1}
    assert abs(float(np.mean(signs))) < 4e-3


def test_scalars_seekable_and_in_range():
    field = field_by_id("bls12-381-scalar")
    s = PrfStream(SEED, "RNG/stmt")
    batch = s.scalars(1100, field)
    for i in (0, 17, 1000):
        assert s.scalar(i, field) == batch[i]
    assert all(0 <= v < field.q for v in batch)


def test_uniform_seekable_and_bounded():
    s = PrfStream(SEED, "NBDP/proj")
    full = s.uniform(64)
    assert np.all(full >= 0.0) and np.all(full < 1.0)
    for offset in (0, 3, 4, 31):
        window = s.uniform(5, offset=offset)
        assert window.tolist() == full[offset:offset + 5].tolist()


def test_gaussian_seekable_and_roughly_standard():
    s = PrfStream(SEED, "NBDP/proj")
    full = s.gaussian(100_000)
    assert abs(float(np.mean(full))) < 0.02
    assert abs(float(np.std(full)) - 1.0) < 0.02
    window = s.gaussian(10, offset=50)
    assert window.tolist() == full[50:60].tolist()


def test_child_seed_separates():
    s = PrfStream(SEED, "NBDP/proj")
    a = s.child_seed("vec/00/x")
    b = s.child_seed("vec/00/y")
    assert a != b and len(a) == 32
    # child of a different parent differs even under the same label
    assert PrfStream(bytes(32), "NBDP/proj").child_seed("vec/00/x") != a


def test_derive_seed_is_injective_on_structure():
    # length prefixes keep ("ab","c") distinct from ("a","bc")
    assert derive_seed(b"ab", b"c") != derive_seed(b"a", b"bc")
    assert derive_seed(b"a") != derive_seed(b"a", b"")
