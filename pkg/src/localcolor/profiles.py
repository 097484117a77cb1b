"""Named numeric thresholds for the coloring pipeline.

The ``paper`` preset carries the constants under which the correctness
argument goes through; they need k in the hundreds of millions.  The
``desk`` preset keeps every threshold as a parameter with values that make
every stage run on graphs with Δ between 40 and 200.  Pipelines report each
place where the active values fall outside the strict hypotheses as a
"paper-precondition breach".
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from .errors import PreconditionError

BREACH = "paper-precondition breach"


@dataclass(frozen=True)
class ConstantsProfile:
    name: str
    # density of the decomposition: d = density * k
    density: Fraction
    # T = sparse vertices with degree >= Δ - sparse_degree_gap * k inside S
    sparse_degree_gap: Fraction
    # ℓ = ell_frac * k, and the lower bound ℓ >= ell_min_coeff * log2(Δ)
    ell_frac: Fraction
    ell_min_coeff: Fraction
    # an uncolored target must end with more than repeat_fraction * ℓ repeated colors
    repeat_fraction: Fraction
    # palette is Δ - floor(epsilon * k)
    epsilon: Fraction
    # slack demanded when extending to S; slack_frac * k, at least 1
    slack_frac: Fraction
    # k must satisfy k_min_coeff * log2(Δ) <= k <= k_max_frac * Δ and Δ >= delta_over_k * k
    k_min_coeff: Fraction
    k_max_frac: Fraction
    delta_over_k: int
    # a dense component is hollow if its complement has a matching of
    # hollow_coeff * sqrt(Δ) pairs
    hollow_coeff: Fraction
    max_rounds: int = 2_000
    lll_phases: int = 10_000

    def d(self, k: int) -> Fraction:
        return self.density * k

    def ell(self, k: int) -> Fraction:
        return self.ell_frac * k

    def palette(self, delta: int, k: int) -> int:
        return delta - math.floor(self.epsilon * k)

    def required_slack(self, k: int) -> int:
        return max(1, math.floor(self.slack_frac * k))

    def sparse_threshold(self, delta: int, k: int) -> Fraction:
        return delta - self.sparse_degree_gap * k

    def hollow_threshold(self, delta: int) -> int:
        return math.ceil(self.hollow_coeff * math.sqrt(delta))

    def breaches(self, delta: int, k: int) -> list:
        """Paper hypotheses that (delta, k) violate under this profile, as messages."""
        out = []
        if delta >= 2:
            log_d = math.log2(delta)
            if k < self.k_min_coeff * log_d:
                out.append(f"{BREACH}: k={k} < {self.k_min_coeff}·log2(Δ)")
            if self.ell(k) < self.ell_min_coeff * log_d:
                out.append(f"{BREACH}: ℓ={self.ell(k)} < {self.ell_min_coeff}·log2(Δ)")
        if k > self.k_max_frac * delta:
            out.append(f"{BREACH}: k={k} > {self.k_max_frac}·Δ")
        if delta < self.delta_over_k * k:
            out.append(f"{BREACH}: Δ={delta} < {self.delta_over_k}·k")
        return out

    def to_json(self) -> str:
        data = asdict(self)
        for f in fields(self):
            if isinstance(data[f.name], Fraction):
                data[f.name] = str(data[f.name])
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text) -> "ConstantsProfile":
        data = json.loads(text) if isinstance(text, str) else dict(text)
        base = PROFILES.get(data.get("base", "desk"), DESK)
        kwargs = {}
        for f in fields(cls):
            if f.name not in data:
                continue
            value = data[f.name]
            current = getattr(base, f.name)
            if isinstance(current, Fraction):
                value = Fraction(value)
            elif isinstance(current, int):
                value = int(value)
            kwargs[f.name] = value
        return replace(base, **kwargs)


PAPER = ConstantsProfile(
    name="paper",
    density=Fraction(1, 2**4),
    sparse_degree_gap=Fraction(1, 2**5),
    ell_frac=Fraction(1, 2**5),
    ell_min_coeff=Fraction(2**54),
    repeat_fraction=Fraction(1, 2**18),
    # the argument yields slack 2^-24 k, so this is the palette reduction it supports
    epsilon=Fraction(1, 2**24),
    slack_frac=Fraction(1, 2**24),
    k_min_coeff=Fraction(2**59),
    k_max_frac=Fraction(1, 100),
    delta_over_k=30,
    hollow_coeff=Fraction(100),
)

DESK = ConstantsProfile(
    name="desk",
    density=Fraction(1, 2**4),
    sparse_degree_gap=Fraction(1, 5),
    ell_frac=Fraction(1, 5),
    ell_min_coeff=Fraction(0),
    repeat_fraction=Fraction(1, 4),
    epsilon=Fraction(1, 10),
    slack_frac=Fraction(0),
    k_min_coeff=Fraction(0),
    k_max_frac=Fraction(1, 100),
    delta_over_k=30,
    hollow_coeff=Fraction(1),
    lll_phases=200,
)

PROFILES = {"paper": PAPER, "desk": DESK}


def load_profile(spec) -> ConstantsProfile:
    """Profile by name, path to a JSON file, inline JSON text, or a profile instance."""
    if isinstance(spec, ConstantsProfile):
        return spec
    if spec in PROFILES:
        return PROFILES[spec]
    text = str(spec)
    if text.lstrip().startswith("{"):
        return ConstantsProfile.from_json(text)
    path = Path(text)
    if path.is_file():
        return ConstantsProfile.from_json(path.read_text())
    raise PreconditionError(f"unknown constants profile {spec!r}")
