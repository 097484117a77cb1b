import json
from fractions import Fraction

import pytest

from localcolor.errors import PreconditionError
from localcolor.profiles import DESK, PAPER, ConstantsProfile, load_profile


def test_paper_constants():
    assert PAPER.density == Fraction(1, 16)
    assert PAPER.sparse_degree_gap == Fraction(1, 32)
    assert PAPER.ell_frac == Fraction(1, 32)
    assert PAPER.ell_min_coeff == 2**54
    assert PAPER.repeat_fraction == Fraction(1, 2**18)
    assert PAPER.k_min_coeff == 2**59
    assert PAPER.k_max_frac == Fraction(1, 100)
    assert PAPER.delta_over_k == 30
    assert PAPER.hollow_coeff == 100


def test_desk_palette_example():
    assert DESK.palette(50, 10) == 49
    assert DESK.d(10) == Fraction(10, 16)
    assert DESK.ell(10) == 2
    assert DESK.required_slack(10) == 1


def test_paper_palette_and_slack():
    k = 2**30
    assert PAPER.palette(10**12, k) == 10**12 - 64
    assert PAPER.required_slack(k) == 64
    assert PAPER.hollow_threshold(10**4) == 10**4


def test_breaches():
    desk = DESK.breaches(50, 10)
    assert any("Δ=50 < 30·k" in b for b in desk)
    assert any("k=10 >" in b for b in desk)
    assert DESK.breaches(1000, 10) == []
    paper = PAPER.breaches(1000, 10)
    assert any("log2(Δ)" in b for b in paper)
    assert all(b.startswith("paper-precondition breach") for b in paper)


def test_load_by_name_and_instance():
    assert load_profile("desk") is DESK
    assert load_profile(PAPER) is PAPER


def test_inline_json_overrides():
    prof = load_profile('{"base": "paper", "epsilon": "1/7", "lll_phases": 12}')
    assert prof.epsilon == Fraction(1, 7) and prof.lll_phases == 12
    assert prof.k_min_coeff == PAPER.k_min_coeff and prof.name == "paper"


def test_file_profile(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"name": "mine", "repeat_fraction": "1/3"}))
    prof = load_profile(str(path))
    assert prof.name == "mine" and prof.repeat_fraction == Fraction(1, 3)
    assert prof.density == DESK.density


@pytest.mark.parametrize("prof", [DESK, PAPER])
def test_json_round_trip(prof):
    assert ConstantsProfile.from_json(prof.to_json()) == prof


def test_unknown_profile():
    with pytest.raises(PreconditionError):
        load_profile("galactic")
