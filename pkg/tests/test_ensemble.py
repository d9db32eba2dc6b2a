import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scmn.ensemble import (
    EnsembleParams,
    check_count,
    design_rate,
    design_rate_exact,
    punctured_count,
    read_graph,
    sample_graph,
    transmitted_count,
    write_graph,
)

P422 = EnsembleParams(dl=4, dr=2, dg=2, L=10, w=2)


class TestRateFormulas:
    def test_reference_rate(self):
        assert design_rate_exact(P422) == Fraction(11, 24)
        assert design_rate(P422) == pytest.approx(0.458333333333, abs=1e-12)

    def test_limit_is_dr_over_dl(self):
        gaps = [
            abs(design_rate(EnsembleParams(4, 2, 2, L, 2)) - 0.5)
            for L in (10, 100, 1000, 10000)
        ]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-3

    def test_check_count_reference(self):
        assert check_count(P422, 16) == 350

    def test_w1_bracket(self):
        for L in (0, 3, 7):
            p = EnsembleParams(4, 2, 2, L, 1)
            assert check_count(p, 5) == (2 * L + 1) * 5

    @settings(max_examples=50)
    @given(
        st.integers(min_value=1, max_value=6),
        st.integers(min_value=1, max_value=6),
        st.integers(min_value=1, max_value=6),
        st.integers(min_value=0, max_value=12),
        st.integers(min_value=1, max_value=5),
        st.integers(min_value=1, max_value=40),
    )
    def test_rate_identity_exact(self, dl, dr, dg, L, w, M):
        params = EnsembleParams(dl, dr, dg, L, w)
        vt = transmitted_count(params, M)
        vp = punctured_count(params, M)
        nc = check_count(params, M)
        assert vt + vp - nc == design_rate_exact(params) * vt


def small_graph(seed=0, M=8, m=2, params=None):
    params = params or EnsembleParams(dl=4, dr=2, dg=2, L=2, w=2)
    return sample_graph(params, M, m, np.random.default_rng(seed))


class TestSampleGraph:
    def test_divisibility_errors(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="dl"):
            sample_graph(EnsembleParams(3, 2, 2, 1, 1), 5, 1, rng)
        with pytest.raises(ValueError, match="w"):
            sample_graph(EnsembleParams(1, 1, 1, 1, 2), 5, 1, rng)
        with pytest.raises(ValueError, match="symbol width"):
            sample_graph(EnsembleParams(4, 2, 2, 1, 2), 6, 4, rng)

    def test_degrees_exact(self):
        g = small_graph()
        p = g.params
        assert np.array_equal(
            np.bincount(g.t1_bit, minlength=g.n_punctured),
            np.full(g.n_punctured, p.dl),
        )
        assert np.array_equal(
            np.bincount(g.t2_bit, minlength=g.n_transmitted),
            np.full(g.n_transmitted, p.dg),
        )

    def test_edge_totals(self):
        g = small_graph()
        p = g.params
        assert len(g.t1_bit) == p.dr * g.M * p.n_sections
        assert len(g.t2_bit) == p.dg * g.M * p.n_sections

    def test_quotas_per_section_pair(self):
        for seed in range(5):
            g = small_graph(seed=seed)
            p = g.params
            bsec = g.t1_bit // g.punctured_per_section
            csec = g.t1_check // g.M
            for i in range(p.n_sections):
                for j in range(p.w):
                    count = int(((bsec == i) & (csec == i + j)).sum())
                    assert count == p.dr * g.M // p.w
            bsec2 = g.t2_bit // g.M
            csec2 = g.t2_check // g.M
            for i in range(p.n_sections):
                for j in range(p.w):
                    count = int(((bsec2 == i) & (csec2 == i + j)).sum())
                    assert count == p.dg * g.M // p.w

    def test_boundary_checks_reduced(self):
        # last check section receives only from the last bit section
        g = small_graph()
        p = g.params
        last = p.n_check_sections - 1
        sel1 = g.t1_check // g.M == last
        sel2 = g.t2_check // g.M == last
        assert int(sel1.sum()) == p.dr * g.M // p.w
        assert int(sel2.sum()) == p.dg * g.M // p.w
        assert np.all(g.t1_bit[sel1] // g.punctured_per_section == p.n_sections - 1)
        assert np.all(g.t2_bit[sel2] // g.M == p.n_sections - 1)

    def test_no_out_of_range_ids(self):
        g = small_graph()
        assert g.t1_bit.min() >= 0 and g.t1_bit.max() < g.n_punctured
        assert g.t2_bit.min() >= 0 and g.t2_bit.max() < g.n_transmitted
        assert g.t1_check.min() >= 0 and g.t1_check.max() < g.n_checks

    def test_symbols_partition_section_bits(self):
        g = small_graph()
        assert g.symbols.shape == (g.n_transmitted // g.m, g.m)
        assert sorted(g.symbols.ravel().tolist()) == list(range(g.n_transmitted))
        sections = g.symbols // g.M
        assert np.all(sections == sections[:, :1])

    def test_deterministic_given_seed(self):
        a = small_graph(seed=42)
        b = small_graph(seed=42)
        assert np.array_equal(a.t1_bit, b.t1_bit)
        assert np.array_equal(a.t1_check, b.t1_check)
        assert np.array_equal(a.symbols, b.symbols)


class TestGraphFormat:
    def test_round_trip(self):
        g = small_graph(seed=3, M=4, m=2)
        buf = io.StringIO()
        write_graph(g, buf)
        buf.seek(0)
        parsed = read_graph(buf)
        assert parsed["meta"]["M"] == 4
        assert parsed["meta"]["m"] == 2
        assert len(parsed["checks"]) == g.n_checks
        assert len(parsed["symbols"]) == g.n_symbols
        # adjacency content matches the edge lists
        n_t1 = sum(len(ones) for _, ones, _ in parsed["checks"])
        n_t2 = sum(len(twos) for _, _, twos in parsed["checks"])
        assert n_t1 == len(g.t1_bit)
        assert n_t2 == len(g.t2_bit)
        sections = [sec for sec, _, _ in parsed["checks"]]
        assert sections[0] == -g.params.L
        assert sections[-1] == g.params.L + g.params.w - 1
