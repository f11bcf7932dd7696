"""Option dataclasses shared by the pipeline stages and the CLI."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

FLOAT_TOL = 1e-9


@dataclass
class BalanceOptions:
    n_starts: int = 200
    seed: int = 0
    dedup_tol: float = 1e-8
    max_denominator: int = 10**6
    candidates: tuple = ()


@dataclass
class ResonanceOptions:
    tol: float = FLOAT_TOL
    k_max: int = 20


@dataclass
class SearchOptions:
    fixed_point_k_max: int = 6
    quotient_trivial: bool = True
    rank_cap: int = 4
    # total-degree cap for graded ansatz slots; needed when some weight is 0
    max_degree: int | None = None
    zero_weight_degree: int = 6
    tol: float = FLOAT_TOL
    memory_cap: int = 5_000_000
    degrees: tuple | None = None        # explicit degree list overrides the window


@dataclass
class OracleOptions:
    samples: int = 20
    h: float = 1e-3
    seed: int = 0
    box: float = 1.0
    band: float = 1e-3
    max_retries: int = 200
    escape_norm: float = 1e6


@dataclass
class PipelineConfig:
    balance: BalanceOptions = field(default_factory=BalanceOptions)
    resonance: ResonanceOptions = field(default_factory=ResonanceOptions)
    search: SearchOptions = field(default_factory=SearchOptions)
    oracle: OracleOptions = field(default_factory=OracleOptions)
    s_max: int = 4
    m_max: int = 5

    def tolerances(self) -> dict:
        return {"resonance_tol": self.resonance.tol, "pivot_tol": self.search.tol,
                "balance_dedup": self.balance.dedup_tol,
                "balance_residual": 1e-10, "oracle_h": self.oracle.h}

    def to_json(self) -> dict:
        d = asdict(self)
        d["balance"]["candidates"] = [list(map(str, c)) for c in self.balance.candidates]
        d["search"]["degrees"] = list(self.search.degrees) if self.search.degrees else None
        return d


def worker_count() -> int:
    """Worker cap from ``KOVA_THREADS`` (default 1, i.e. serial)."""
    try:
        return max(1, int(os.environ.get("KOVA_THREADS", "1")))
    except ValueError:
        return 1
