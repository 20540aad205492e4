"""Synthetic output-table series with planted block structure and structural breaks.

Each industry owns a main product carrying 40-80% of its output and sells a
handful of secondary products, drawn preferentially from its own block. At
the break year a fraction of industries get a fresh, wider secondary
portfolio drawn without regard to blocks; that pattern then persists. Outside the break only
multiplicative value noise changes from year to year.

Randomness comes from ``numpy.random.default_rng`` seeded with
``[seed, stream, ...]`` integer lists, so any year can be regenerated alone.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
import numpy as np

from indnet.errors import DomainError
from indnet.ingest import OutputTable, default_classification

_STREAM_BASE, _STREAM_SHOCK, _STREAM_NOISE = 0, 1, 2


@dataclass(frozen=True)
class Block:
    size: int
    p_intra: float


@dataclass(frozen=True)
class SynthParams:
    """Generator settings.

    ``blocks`` partitions the industries in order; ``p_inter`` applies between
    blocks. When ``diversification`` is set the block probabilities are scaled
    by a common factor so industries sell that many products on average.
    ``break_year`` is a year label inside ``start_year .. start_year+years-1``.
    """

    n_industries: int = 36
    n_products: int = 36
    blocks: tuple[Block, ...] = (Block(9, 0.5), Block(9, 0.5), Block(9, 0.5), Block(9, 0.5))
    p_inter: float = 0.05
    diversification: float | None = 8.0
    value_mu: float = 13.0
    value_sigma: float = 1.0
    main_share: tuple[float, float] = (0.4, 0.8)
    noise: float = 0.01
    seed: int = 0
    start_year: int = 2000
    break_year: int | None = None
    shock: float = 0.0
    shock_diversification: float = 2.0
    protected: tuple[int, ...] = ()
    ids: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_industries < 3:
            raise DomainError("n_industries must be >= 3")
        if self.n_products < self.n_industries:
            raise DomainError("n_products must be >= n_industries (one main product each)")
        if sum(b.size for b in self.blocks) != self.n_industries:
            raise DomainError("block sizes must sum to n_industries")
        probs = [b.p_intra for b in self.blocks] + [self.p_inter]
        if any(not 0 <= x <= 1 for x in probs):
            raise DomainError("probabilities must lie in [0, 1]")
        if not 0 <= self.shock <= 1:
            raise DomainError("shock must lie in [0, 1]")
        if self.shock_diversification <= 0:
            raise DomainError("shock_diversification must be positive")
        lo, hi = self.main_share
        if not 0 < lo <= hi < 1:
            raise DomainError("main_share bounds must satisfy 0 < lo <= hi < 1")
        if self.diversification is not None and not 2 <= self.diversification <= self.n_products:
            raise DomainError("diversification must lie in [2, n_products]")
        if self.noise < 0 or self.value_sigma < 0:
            raise DomainError("noise and value_sigma must be >= 0")
        if any(not 0 <= i < self.n_industries for i in self.protected):
            raise DomainError("protected indices out of range")
        if self.ids is not None and len(self.ids) != self.n_industries:
            raise DomainError("ids must name every industry")

    def industry_ids(self) -> tuple[str, ...]:
        if self.ids is not None:
            return tuple(self.ids)
        codes = [c for c in default_classification().industries if c not in ("T", "U")]
        if self.n_industries <= len(codes):
            return tuple(codes[: self.n_industries])
        return tuple(f"I{i + 1:02d}" for i in range(self.n_industries))

    def product_ids(self) -> tuple[str, ...]:
        ids = self.industry_ids()
        extra = tuple(f"X{k + 1:02d}" for k in range(self.n_products - self.n_industries))
        return ids + extra

    def to_json(self) -> str:
        d = asdict(self)
        d["blocks"] = [asdict(b) for b in self.blocks]
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SynthParams":
        d = dict(d)
        if "blocks" in d:
            d["blocks"] = tuple(Block(**b) if isinstance(b, dict) else Block(*b) for b in d["blocks"])
        for key in ("main_share", "ids", "protected"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


def _block_of(p: SynthParams) -> np.ndarray:
    return np.repeat(np.arange(len(p.blocks)), [b.size for b in p.blocks])


def _affinity(p: SynthParams) -> np.ndarray:
    """Probability that industry a sells product k as a secondary product."""
    block = _block_of(p)
    n, m = p.n_industries, p.n_products
    prob = np.full((n, m), p.p_inter)
    intra = np.array([p.blocks[b].p_intra for b in block])
    same = block[:, None] == block[None, :]
    prob[:, :n] = np.where(same, intra[:, None], p.p_inter)
    np.fill_diagonal(prob[:, :n], 0.0)
    if p.diversification is not None:
        mean_secondary = prob.sum(axis=1).mean()
        if mean_secondary > 0:
            prob = np.clip(prob * (p.diversification - 1) / mean_secondary, 0.0, 1.0)
    return prob


def _portfolio(rng: np.random.Generator, prob_row: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    """Secondary-product proportions for one industry (sums to 1, at least one product)."""
    chosen = rng.random(prob_row.size) < prob_row
    if not chosen.any():
        weights = prob_row if prob_row.sum() > 0 else fallback
        chosen[rng.choice(prob_row.size, p=weights / weights.sum())] = True
    props = np.zeros(prob_row.size)
    props[chosen] = rng.dirichlet(np.ones(chosen.sum()))
    return props


def _base(p: SynthParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Totals, main shares and pre-break secondary proportions."""
    rng = np.random.default_rng([p.seed, _STREAM_BASE])
    n, m = p.n_industries, p.n_products
    totals = rng.lognormal(p.value_mu, p.value_sigma, n)
    main = rng.uniform(*p.main_share, n)
    prob = _affinity(p)
    uniform = np.ones(m)
    props = np.zeros((n, m))
    for a in range(n):
        fallback = uniform.copy()
        fallback[a] = 0.0
        props[a] = _portfolio(rng, prob[a], fallback)
    return totals, main, props


def _shocked(p: SynthParams, props: np.ndarray) -> np.ndarray:
    """Rewire the secondary portfolios of ``round(shock * n)`` industries.

    Industries listed in ``protected`` are never rewired. Rewired industries
    ignore blocks and sell ``shock_diversification`` times as many secondary
    products as the pre-break average.
    """
    rng = np.random.default_rng([p.seed, _STREAM_SHOCK])
    n, m = p.n_industries, p.n_products
    eligible = np.setdiff1d(np.arange(n), p.protected)
    k = min(int(round(p.shock * n)), eligible.size)
    out = props.copy()
    if k == 0:
        return out
    rate = min(1.0, (props > 0).sum(axis=1).mean() / (m - 1) * p.shock_diversification)
    for a in sorted(rng.choice(eligible, size=k, replace=False)):
        row = np.full(m, rate)
        row[a] = 0.0
        fallback = np.ones(m)
        fallback[a] = 0.0
        out[a] = _portfolio(rng, row, fallback)
    return out


def _check_break(p: SynthParams, years: int | None = None):
    if p.break_year is None:
        return
    last = p.start_year + years - 1 if years is not None else p.break_year
    if not p.start_year < p.break_year <= last:
        raise DomainError(
            f"break_year {p.break_year} outside ({p.start_year}, {last}]"
        )


def generate_table(p: SynthParams, year: int) -> OutputTable:
    _check_break(p)
    totals, main, props = _base(p)
    if p.break_year is not None and year >= p.break_year:
        props = _shocked(p, props)
    n, m = p.n_industries, p.n_products
    values = (totals * (1 - main))[:, None] * props
    values[np.arange(n), np.arange(n)] = totals * main
    if p.noise > 0:
        rng = np.random.default_rng([p.seed, _STREAM_NOISE, year])
        values = values * rng.lognormal(0.0, p.noise, values.shape)
    return OutputTable(
        year, p.industry_ids(), p.product_ids(), values, np.zeros((n, m), dtype=bool)
    )


def generate_series(p: SynthParams, years: int) -> list[OutputTable]:
    if years < 2:
        raise DomainError("a series needs at least two years")
    _check_break(p, years)
    return [generate_table(p, p.start_year + t) for t in range(years)]


def two_block_params(seed: int, block: int = 6, p_intra: float = 0.9, p_inter: float = 0.02) -> SynthParams:
    """Two planted blocks with dense intra-block and sparse inter-block sharing."""
    n = 2 * block
    return SynthParams(
        n_industries=n,
        n_products=n,
        blocks=(Block(block, p_intra), Block(block, p_intra)),
        p_inter=p_inter,
        diversification=None,
        noise=0.0,
        seed=seed,
    )


def planted_blocks(p: SynthParams) -> list[set[str]]:
    ids = p.industry_ids()
    block = _block_of(p)
    return [{ids[i] for i in np.flatnonzero(block == b)} for b in range(len(p.blocks))]
