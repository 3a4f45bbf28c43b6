import numpy as np

from avalign.rng import SplitMix64

MASK = (1 << 64) - 1


def reference_splitmix(seed, n):
    """Scalar splitmix64 in plain Python integers."""
    state = seed & MASK
    out = []
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def test_known_vector():
    assert int(SplitMix64(1234567).next_u64(1)[0]) == 0x599ED017FB08FC85


def test_matches_scalar_reference():
    for seed in (0, 1, 42, 2**63 + 5):
        got = [int(v) for v in SplitMix64(seed).next_u64(50)]
        assert got == reference_splitmix(seed, 50)


def test_stream_continues_across_calls():
    a = SplitMix64(9)
    joined = np.concatenate([a.next_u64(3), a.next_u64(4)])
    assert joined.tolist() == SplitMix64(9).next_u64(7).tolist()


def test_uniform_and_integer_ranges():
    g = SplitMix64(3)
    u = g.uniform(10000)
    assert u.min() >= 0 and u.max() < 1 and abs(u.mean() - 0.5) < 0.02
    vals = {SplitMix64(s).integer(2, 5) for s in range(200)}
    assert vals == {2, 3, 4, 5}


def test_normal_moments():
    z = SplitMix64(11).normal(20001)
    assert len(z) == 20001
    assert abs(z.mean()) < 0.03 and abs(z.std() - 1) < 0.03
