"""Glue between the stages: grading choice, balances, exponents and scans."""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import PipelineConfig
from .grading import Grading, SemiQHDecomposition, decompose, find_weights
from .invsearch import ScanReport, full_scan
from .kovalevskaya import Balance, KovalevskayaData, find_balances, kovalevskaya_matrix
from .polyalg import VectorField
from .tensorfield import TensorType


@dataclass
class GradingAnalysis:
    candidates: list
    grading: Grading | None
    decomposition: SemiQHDecomposition | None
    balances: list = field(default_factory=list)          # [Balance]
    kdata: list = field(default_factory=list)             # [KovalevskayaData | None]
    declared: bool = False

    def nondegenerate(self):
        """``(balance, data)`` pairs with ``S c != 0``."""
        return [(b, k) for b, k in zip(self.balances, self.kdata)
                if k is not None and not b.is_degenerate(self.grading.weights)]

    def spectra(self):
        return [k.spectrum() for _, k in self.nondegenerate()]


def _balances_for(cut: VectorField, g: Grading, cfg: PipelineConfig):
    bs = find_balances(cut, g, cfg.balance)
    return bs, [kovalevskaya_matrix(cut, g, b) for b in bs]


def analyze_grading(F: VectorField, cfg: PipelineConfig, weights=None, degree=None,
                    fixed_point: bool = False) -> GradingAnalysis:
    """Pick a grading and compute balances and Kovalevskaya data.

    A declared ``(weights, degree)`` wins.  Otherwise the candidates from
    :func:`find_weights` are tried in order and the first whose cut has a
    balance with ``S c != 0`` is kept (falling back to the first candidate).
    """
    if fixed_point:
        return GradingAnalysis([], None, None)
    if weights is not None and degree is not None:
        g = Grading(tuple(weights), int(degree))
        dec = decompose(F, g)
        g = dec.grading
        bs, kd = _balances_for(dec.cut, g, cfg)
        return GradingAnalysis([g], g, dec, bs, kd, declared=True)
    cands = find_weights(F, cfg.s_max, cfg.m_max)
    if weights is not None:
        cands = [c for c in cands if c.weights == tuple(weights)]
    if degree is not None:
        cands = [c for c in cands if c.degree == int(degree)]
    first = None
    for g in cands:
        dec = decompose(F, g)
        bs, kd = _balances_for(dec.cut, g, cfg)
        ga = GradingAnalysis(cands, dec.grading, dec, bs, kd)
        if first is None:
            first = ga
        if ga.nondegenerate():
            return ga
    return first if first is not None else GradingAnalysis(cands, None, None)


def scan(F: VectorField, ga: GradingAnalysis, ttype: TensorType, cfg: PipelineConfig) -> ScanReport:
    if ga.grading is None:
        return full_scan(F, "fixed-point", ttype, cfg.search, cfg.resonance)
    return full_scan(F, ga.grading, ttype, cfg.search, cfg.resonance, spectra=ga.spectra())
