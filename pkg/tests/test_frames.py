import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aetf.frames import (
    BipolarFrame,
    build_frame,
    correlation_profile,
    excess_profile,
    random_bipolar_frame,
    realized_differences,
    verify_profile,
    welch_metrics,
)
from aetf.gf2 import FrameShape, walsh_hadamard_direct
from aetf.spectra import IndexSet, difference_spectrum, gds_target, is_difference_set
from aetf.search import GaConfig, run_ga

from conftest import all_subsets, bent_difference_set


def direct_correlation(indices, k):
    # sum over set members, one sign at a time
    return sum((-1) ** bin(k & u).count("1") for u in indices) / len(indices)


@st.composite
def index_sets(draw):
    bits = draw(st.integers(1, 6))
    n_plus = 1 << bits
    n = draw(st.integers(n_plus // 2 + 1, n_plus))
    m = draw(st.integers(1, n))
    idx = draw(st.lists(st.integers(0, n_plus - 1), min_size=m, max_size=m, unique=True))
    return IndexSet(tuple(idx), FrameShape(n, m))


class TestBuildFrame:
    def test_three_by_four(self):
        f = build_frame(IndexSet((1, 2, 3), FrameShape(4, 3)))
        g = f.gram()
        assert np.allclose(np.diag(g), 1, atol=1e-15)
        off = g[~np.eye(4, dtype=bool)]
        assert np.allclose(off, -1 / 3, atol=1e-15)

    def test_single_row(self):
        f = build_frame(IndexSet((0,), FrameShape(2, 1)))
        assert f.signs.tolist() == [[1, 1]]

    @given(index_sets())
    def test_unit_columns_and_signs(self, s):
        f = build_frame(s)
        assert set(np.unique(f.signs)) <= {-1, 1}
        assert np.allclose(np.linalg.norm(f.entries, axis=0), 1, atol=1e-12)
        assert f.row_indices == s and f.iid_seed is None

    def test_rejects_bad_entries(self):
        with pytest.raises(ValueError):
            BipolarFrame(np.zeros((2, 2)), FrameShape(2, 2))

    def test_csv_export(self):
        f = build_frame(IndexSet((1, 2, 3), FrameShape(4, 3)))
        text = f.to_csv()
        rows = list(csv.reader(io.StringIO(text)))
        assert len(rows) == 3 and all(len(r) == 4 for r in rows)
        assert np.array_equal(np.array(rows, dtype=int), f.signs)
        assert "," in text.splitlines()[0] and not text.startswith("N")


class TestCorrelationProfile:
    def test_three_of_four(self):
        c = correlation_profile(IndexSet((1, 2, 3), FrameShape(4, 3))).c
        assert np.allclose(c, [1, -1 / 3, -1 / 3, -1 / 3], atol=1e-15)

    def test_seven_of_eight(self):
        c = correlation_profile(IndexSet(tuple(range(1, 8)), FrameShape(8, 7))).c
        assert c[0] == 1 and np.allclose(c[1:], -1 / 7, atol=1e-15)

    @given(index_sets())
    def test_matches_direct_sum(self, s):
        prof = correlation_profile(s)
        ref = [direct_correlation(s.indices, k) for k in range(s.shape.n_plus)]
        assert np.allclose(prof.c, ref, atol=1e-12)
        assert prof.c[0] == 1 and np.all(np.abs(prof.c) <= 1 + 1e-12)

    @settings(max_examples=50)
    @given(index_sets())
    def test_gram_entries_depend_only_on_xor(self, s):
        c = correlation_profile(s).c
        g = build_frame(s).gram()
        n = np.arange(s.shape.n_users)
        assert np.allclose(g, c[np.bitwise_xor.outer(n, n)], atol=1e-12)

    @settings(max_examples=60)
    @given(index_sets())
    def test_squared_profile_is_wht_of_spectrum(self, s):
        m = s.shape.m_rows
        c = correlation_profile(s).c
        lam = difference_spectrum(s)
        assert np.allclose(m * m * c**2, walsh_hadamard_direct(lam), atol=1e-9)

    def test_excess_profile_is_delta_for_ds(self):
        s = bent_difference_set(2)
        x = excess_profile(s)
        assert np.allclose(x[1:], 0, atol=1e-9)

    def test_realized_differences(self):
        assert realized_differences(4) == frozenset({1, 2, 3})
        assert realized_differences(5) == frozenset(range(1, 8))
        assert realized_differences(3) == frozenset({1, 2, 3})
        assert realized_differences(1) == frozenset()


class TestVerifyProfile:
    def test_exact_etf_four_three(self):
        r = verify_profile(IndexSet((1, 2, 3), FrameShape(4, 3)), tol=1e-12)
        assert r.classification == "exact-ETF" and r.welch_level == pytest.approx(1 / 9)

    def test_exact_etf_eight_seven(self):
        r = verify_profile(IndexSet(tuple(range(1, 8)), FrameShape(8, 7)))
        assert r.classification == "exact-ETF" and r.welch_level == pytest.approx(1 / 49)

    def test_random_set_is_approximate(self):
        r = verify_profile(IndexSet((0, 1), FrameShape(4, 2)))
        assert r.classification == "approximate" and r.max_dev_target > 0

    def test_ga_output_six_three(self):
        shape = FrameShape(6, 3)
        res = run_ga(shape, GaConfig(max_generations=200))
        r = verify_profile(res.best_set)
        assert r.welch_level == pytest.approx(0.2)
        assert r.upper_level == pytest.approx(0.2 + 1 / 15)
        # the profile residual is the WHT image of the spectrum residual
        resid = difference_spectrum(res.best_set) - gds_target(shape).values
        x = walsh_hadamard_direct(resid) / 9
        ks = sorted(realized_differences(6))
        assert r.max_dev_target == pytest.approx(np.abs(x[ks]).max(), abs=1e-12)
        assert r.classification in ("exact-AETF", "approximate")

    @pytest.mark.parametrize("n_plus", [4, 8, 16])
    def test_ds_iff_etf_exhaustive(self, n_plus):
        for m in range(1, n_plus + 1):
            for s in all_subsets(n_plus, m) if n_plus < 16 or m in (5, 6, 7) else []:
                assert is_difference_set(s) == (verify_profile(s).classification == "exact-ETF")


class TestWelchMetrics:
    def test_etf(self):
        rep = welch_metrics(build_frame(IndexSet((1, 2, 3), FrameShape(4, 3))))
        assert rep.i_ms == pytest.approx(1 / 9, abs=1e-12)
        assert rep.i_max == pytest.approx(1 / 9, abs=1e-12)
        assert rep.tightness_residual <= 1e-12

    def test_orthonormal_basis(self):
        f = BipolarFrame(np.array([[1, 1], [1, -1]]), FrameShape(2, 2))
        rep = welch_metrics(f)
        assert rep.i_ms == pytest.approx(0, abs=1e-15) and rep.welch_bound == 0
        assert rep.tightness_residual <= 1e-12

    def test_random_frames_respect_bound(self):
        for seed in range(200):
            rep = welch_metrics(random_bipolar_frame(FrameShape(4, 3), seed))
            assert rep.i_ms >= 1 / 9 - 1e-12
            assert rep.i_max >= rep.i_ms - 1e-12

    @settings(max_examples=40)
    @given(index_sets())
    def test_bound_holds_for_hadamard_frames(self, s):
        rep = welch_metrics(build_frame(s))
        assert rep.i_ms >= rep.welch_bound - 1e-12


class TestRandomFrame:
    def test_reproducible(self):
        shape = FrameShape(48, 20)
        assert np.array_equal(random_bipolar_frame(shape, 3).signs, random_bipolar_frame(shape, 3).signs)
        assert not np.array_equal(random_bipolar_frame(shape, 3).signs, random_bipolar_frame(shape, 4).signs)

    def test_sign_balance(self):
        f = random_bipolar_frame(FrameShape(1000, 1000), 0)
        assert abs(f.signs.mean()) < 0.005

    def test_unit_columns(self):
        f = random_bipolar_frame(FrameShape(30, 7), 1)
        assert np.allclose(np.linalg.norm(f.entries, axis=0), 1, atol=1e-15)
        assert f.iid_seed == 1
