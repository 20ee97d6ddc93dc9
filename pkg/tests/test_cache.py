import threading
from fractions import Fraction

import pytest

from distortlab.normkernel import MemoCache, read_cache_file, s_norm
from distortlab.vectorspace import LOG2P1, ScalingFunction


def test_cached_values_equal_recomputation(tmp_path):
    cache = MemoCache(tmp_path / "c.sdcache")
    keys = [(1, 1, 1), (2, 1, 1), (Fraction(1, 3), 5)]
    for k in keys:
        s_norm(k, cache=cache)
    cache.save(LOG2P1)
    fresh = MemoCache(tmp_path / "c.sdcache")
    for k in keys:
        value, cert = fresh.get(tuple(Fraction(v) for v in k), LOG2P1)
        assert (value, cert) == s_norm(k)
    assert fresh.hits == 3


def test_hits_short_circuit():
    cache = MemoCache()
    s_norm([2, 1, 1], cache=cache)
    s_norm([2, 1, 1], cache=cache)
    assert cache.hits == 1 and cache.misses == 1
    assert len(cache) == 1


def test_corrupt_file_is_ignored(tmp_path):
    path = tmp_path / "c.sdcache"
    cache = MemoCache(path)
    s_norm([2, 1, 1], cache=cache)
    cache.save(LOG2P1)
    path.write_text(path.read_text().replace("2.05", "9.05"))
    with pytest.raises(ValueError, match="checksum"):
        read_cache_file(path)
    with pytest.warns(UserWarning, match="ignoring"):
        val, _ = s_norm([2, 1, 1], cache=MemoCache(path))
    assert val == s_norm([2, 1, 1])[0]


def test_bad_header(tmp_path):
    path = tmp_path / "c.sdcache"
    path.write_text("sdcache-0 log2p1 00\n")
    with pytest.raises(ValueError, match="header"):
        read_cache_file(path)


def test_other_functions_do_not_share_entries():
    cache = MemoCache()
    other = ScalingFunction.from_callable(lambda x: LOG2P1(x) * 1.0, "copy")
    s_norm([1, 1], cache=cache)
    assert cache.get((Fraction(1), Fraction(1)), other) is None
    with pytest.raises(ValueError):
        MemoCache(None).save(LOG2P1)


def test_concurrent_inserts():
    cache = MemoCache()
    keys = [(1,) * n for n in range(1, 40)]

    def work():
        for k in keys:
            s_norm(k, cache=cache)

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(cache) == len(keys)
    for k in keys:
        assert cache.get(tuple(Fraction(v) for v in k), LOG2P1)[0] == s_norm(k)[0]


def test_clear(tmp_path):
    path = tmp_path / "c.sdcache"
    cache = MemoCache(path)
    s_norm([1], cache=cache)
    cache.save(LOG2P1)
    cache.clear()
    assert not path.exists() and len(cache) == 0
