"""WOE scorecard: supervised binning, logistic fit, integer scores, ROC.

Binning is quantile pre-binning plus greedy merging until every bin holds
a minimum share of rows and the WOE sequence is monotone (categorical
columns get one bin per code with rare codes pooled into a rest bin).
The logistic regression is deterministic by construction: zero init,
fixed learning rate, fixed iteration count, full-batch gradient descent.

Score points per column follow
    points = -(coef * woe + intercept / K) * pdo / ln 2 + base_score / K
so a row whose bins all carry zero WOE scores round(base_score) when the
intercept is zero, and the total score rises as predicted default odds
fall.  The fitted target is the bad class (bad=1).
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .tabular import BAD, GOOD, CATEGORICAL, Dataset

NUMERIC = "numeric"

SCORECARD_FORMAT_VERSION = 1


@dataclass(frozen=True)
class BinningConfig:
    max_prebins: int = 20
    min_bin_fraction: float = 0.05

    def __post_init__(self):
        if self.max_prebins < 1:
            raise ValueError("max_prebins must be >= 1")
        if not (0.0 <= self.min_bin_fraction < 1.0):
            raise ValueError("min_bin_fraction must lie in [0, 1)")


@dataclass(frozen=True)
class BinningSpec:
    """Binning of one column with the WOE per bin and the column IV.

    Numeric bins are the half-open intervals between consecutive `edges`
    (the first and last bin extend to -inf/+inf, which clamps out-of-range
    values to the boundary bins).  Categorical bins are code groups; the
    optional rest bin also catches codes unseen at fit time.
    """

    column: str
    kind: str  # NUMERIC | CATEGORICAL
    edges: tuple[float, ...] = ()
    groups: tuple[tuple[str, ...], ...] = ()
    rest_bin: int | None = None
    woes: tuple[float, ...] = ()
    iv: float = 0.0

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise ValueError(f"unknown binning kind {self.kind!r}")
        if self.kind == NUMERIC:
            if len(self.woes) != len(self.edges) + 1:
                raise ValueError("numeric binning needs len(edges)+1 WOE values")
            if any(a >= b for a, b in zip(self.edges, self.edges[1:])):
                raise ValueError("numeric edges must be strictly increasing")
        else:
            if len(self.woes) != len(self.groups):
                raise ValueError("categorical binning needs one WOE per group")
        if self.iv < 0:
            raise ValueError("information value cannot be negative")

    @property
    def n_bins(self) -> int:
        return len(self.woes)

    @cached_property
    def _code_to_bin(self) -> dict:
        return {code: i for i, group in enumerate(self.groups) for code in group}

    def bin_index(self, value) -> int:
        if self.kind == NUMERIC:
            return bisect_right(self.edges, float(value))
        idx = self._code_to_bin.get(value)
        if idx is None:
            if self.rest_bin is None:
                raise ValueError(f"unseen code {value!r} for column {self.column!r} "
                                 "and no rest bin to absorb it")
            return self.rest_bin
        return idx

    def woe(self, value) -> float:
        return self.woes[self.bin_index(value)]


@dataclass(frozen=True)
class ScoreScaling:
    pdo: float = 50.0
    base_score: float = 600.0
    base_odds: float = 10.0  # nominal good:bad odds at base_score (metadata)

    def __post_init__(self):
        if self.pdo <= 0:
            raise ValueError("pdo must be positive")


@dataclass(frozen=True)
class Scorecard:
    binnings: tuple[BinningSpec, ...]
    coefficients: tuple[float, ...]
    intercept: float
    scaling: ScoreScaling = field(default_factory=ScoreScaling)
    final_loss: float | None = None

    def __post_init__(self):
        if len(self.coefficients) != len(self.binnings):
            raise ValueError("one coefficient per binned column required")

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(b.column for b in self.binnings)

    def bin_points(self, column_index: int, bin_index: int) -> float:
        """Score points carried by one bin of one column."""
        k = len(self.binnings)
        factor = self.scaling.pdo / math.log(2)
        woe = self.binnings[column_index].woes[bin_index]
        coef = self.coefficients[column_index]
        return -(coef * woe + self.intercept / k) * factor + self.scaling.base_score / k

    def score(self, row) -> int:
        """Deterministic integer score of a row (mapping column -> value)."""
        total = 0.0
        for i, binning in enumerate(self.binnings):
            if binning.column not in row:
                raise ValueError(f"row is missing column {binning.column!r}")
            total += self.bin_points(i, binning.bin_index(row[binning.column]))
        return round(total)

    def score_dataset(self, d: Dataset) -> list[int]:
        cols = {b.column: d.column(b.column).values for b in self.binnings}
        out = []
        for i in range(d.size):
            out.append(self.score({name: values[i] for name, values in cols.items()}))
        return out

    # --- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        bins = []
        for i, b in enumerate(self.binnings):
            bins.append({
                "column": b.column,
                "kind": b.kind,
                "edges": list(b.edges),
                "groups": [list(g) for g in b.groups],
                "rest_bin": b.rest_bin,
                "woes": list(b.woes),
                "iv": b.iv,
                "points": [self.bin_points(i, j) for j in range(b.n_bins)],
            })
        return {
            "format_version": SCORECARD_FORMAT_VERSION,
            "binnings": bins,
            "coefficients": list(self.coefficients),
            "intercept": self.intercept,
            "scaling": {"pdo": self.scaling.pdo,
                        "base_score": self.scaling.base_score,
                        "base_odds": self.scaling.base_odds},
            "final_loss": self.final_loss,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Scorecard":
        if doc.get("format_version") != SCORECARD_FORMAT_VERSION:
            raise ValueError(f"unsupported scorecard format {doc.get('format_version')!r}")
        binnings = tuple(
            BinningSpec(column=b["column"], kind=b["kind"],
                        edges=tuple(b["edges"]),
                        groups=tuple(tuple(g) for g in b["groups"]),
                        rest_bin=b["rest_bin"], woes=tuple(b["woes"]), iv=b["iv"])
            for b in doc["binnings"]
        )
        s = doc["scaling"]
        return cls(binnings=binnings, coefficients=tuple(doc["coefficients"]),
                   intercept=doc["intercept"],
                   scaling=ScoreScaling(s["pdo"], s["base_score"], s["base_odds"]),
                   final_loss=doc["final_loss"])

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Scorecard":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class ScoreMetrics:
    roc: tuple[tuple[float, float], ...]  # (fpr, tpr), monotone in both
    auc: float
    gini: float
    threshold: int


# --- WOE / IV --------------------------------------------------------------

def woe_iv_from_counts(good_counts, bad_counts) -> tuple[list[float], float]:
    """WOE per bin and column IV from good/bad count tables.

    WOE = ln(good share / bad share).  When a bin has a zero cell, 0.5 is
    added to both of its cells (totals stay raw), which keeps pure bins
    finite and leaves proportional bins at exactly zero.
    """
    goods = [float(g) for g in good_counts]
    bads = [float(b) for b in bad_counts]
    if len(goods) != len(bads):
        raise ValueError("good/bad count tables differ in length")
    total_good = sum(goods)
    total_bad = sum(bads)
    if total_good == 0 or total_bad == 0:
        raise ValueError("both outcome classes must be present")
    woes = []
    iv_terms = []
    for g, b in zip(goods, bads):
        if g == 0.0 or b == 0.0:
            g += 0.5
            b += 0.5
        dist_g = g / total_good
        dist_b = b / total_bad
        w = math.log(dist_g / dist_b)
        woes.append(w)
        iv_terms.append((dist_g - dist_b) * w)
    return woes, math.fsum(iv_terms)


def _bin_counts(assignments, n_bins: int, y_bad) -> tuple[list[int], list[int]]:
    goods = [0] * n_bins
    bads = [0] * n_bins
    for a, bad in zip(assignments, y_bad):
        if bad:
            bads[a] += 1
        else:
            goods[a] += 1
    return goods, bads


def fit_bins(column: str, kind: str, values, labels,
             config: BinningConfig = BinningConfig()) -> BinningSpec:
    """Fit the binning of one column against good/bad labels."""
    values = list(values)
    labels = list(labels)
    if len(values) != len(labels):
        raise ValueError("values and labels differ in length")
    distinct_labels = set(labels)
    if not distinct_labels <= {GOOD, BAD}:
        raise ValueError(f"labels outside {{good, bad}}: {sorted(distinct_labels - {GOOD, BAD})}")
    if len(distinct_labels) < 2:
        raise ValueError(f"column {column!r}: need both outcome classes to fit bins")
    y_bad = [label == BAD for label in labels]

    if kind == NUMERIC:
        return _fit_numeric(column, values, y_bad, config)
    return _fit_categorical(column, values, y_bad, config)


def _fit_numeric(column, values, y_bad, config) -> BinningSpec:
    floats = [float(v) for v in values]
    lo = min(floats)
    if lo == max(floats):  # constant column: single bin, WOE 0, IV 0
        return BinningSpec(column=column, kind=NUMERIC, edges=(), woes=(0.0,), iv=0.0)

    qs = [i / config.max_prebins for i in range(1, config.max_prebins)]
    edges = sorted({float(e) for e in np.quantile(np.array(floats), qs)})
    edges = [e for e in edges if e > lo]  # an edge at the minimum leaves an empty first bin

    min_count = config.min_bin_fraction * len(floats)

    def counts_for(es):
        assign = [bisect_right(es, v) for v in floats]
        return _bin_counts(assign, len(es) + 1, y_bad)

    goods, bads = counts_for(edges)
    totals = [g + b for g, b in zip(goods, bads)]

    # merge for support: repeatedly fold the smallest undersized bin into
    # its smaller neighbour (ties towards the left)
    while len(totals) > 1 and min(totals) < min_count:
        i = totals.index(min(totals))
        if i == 0:
            j = 0
        elif i == len(totals) - 1:
            j = i - 1
        else:
            j = i - 1 if totals[i - 1] <= totals[i + 1] else i
        del edges[j]
        goods, bads = counts_for(edges)
        totals = [g + b for g, b in zip(goods, bads)]

    # merge for monotonicity of the WOE sequence
    woes, iv = woe_iv_from_counts(goods, bads)
    while len(woes) > 2:
        direction = 1.0 if woes[-1] >= woes[0] else -1.0
        bad_pair = next((i for i in range(len(woes) - 1)
                         if (woes[i + 1] - woes[i]) * direction < 0), None)
        if bad_pair is None:
            break
        del edges[bad_pair]
        goods, bads = counts_for(edges)
        woes, iv = woe_iv_from_counts(goods, bads)

    return BinningSpec(column=column, kind=NUMERIC, edges=tuple(edges),
                       woes=tuple(woes), iv=iv)


def _fit_categorical(column, values, y_bad, config) -> BinningSpec:
    codes = sorted(set(values))
    counts = {c: 0 for c in codes}
    for v in values:
        counts[v] += 1
    min_count = config.min_bin_fraction * len(values)
    frequent = [c for c in codes if counts[c] >= min_count]
    rare = [c for c in codes if counts[c] < min_count]

    groups = [(c,) for c in frequent]
    rest_bin = None
    if rare:
        groups.append(tuple(rare))
        rest_bin = len(groups) - 1
    if not frequent and rare:  # everything rare: one catch-all bin
        groups = [tuple(rare)]
        rest_bin = 0

    group_index = {code: i for i, g in enumerate(groups) for code in g}
    assignments = [group_index[v] for v in values]
    goods, bads = _bin_counts(assignments, len(groups), y_bad)
    woes, iv = woe_iv_from_counts(goods, bads)
    return BinningSpec(column=column, kind=CATEGORICAL, groups=tuple(groups),
                       rest_bin=rest_bin, woes=tuple(woes), iv=iv)


# --- training ---------------------------------------------------------------

@dataclass(frozen=True)
class ScorecardConfig:
    columns: tuple[str, ...] | None = None  # None -> all non-derived input columns
    binning: BinningConfig = field(default_factory=BinningConfig)
    learning_rate: float = 0.1
    iterations: int = 4000
    scaling: ScoreScaling = field(default_factory=ScoreScaling)
    score_threshold: int = 550

    def __post_init__(self):
        if self.learning_rate <= 0 or self.iterations < 1:
            raise ValueError("invalid gradient-descent configuration")


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def fit_scorecard(d: Dataset, config: ScorecardConfig = ScorecardConfig()) -> Scorecard:
    """Fit bins and a deterministic logistic scorecard on a labelled dataset."""
    if config.columns is None:
        columns = [c.name for c in d.columns
                   if c.name != d.outcome and c.kind != "derived"]
    else:
        columns = list(config.columns)
    if not columns:
        raise ValueError("no usable columns to fit on")

    labels = list(d.column(d.outcome).values)
    binnings = []
    for name in columns:
        col = d.column(name)
        kind = NUMERIC if col.kind == "integer" else CATEGORICAL
        binnings.append(fit_bins(name, kind, col.values, labels, config.binning))

    n = d.size
    woe_matrix = np.empty((n, len(binnings)))
    for j, binning in enumerate(binnings):
        values = d.column(binning.column).values
        woe_matrix[:, j] = [binning.woe(v) for v in values]
    y = np.array([1.0 if label == BAD else 0.0 for label in labels])

    weights = np.zeros(len(binnings))
    intercept = 0.0
    lr = config.learning_rate
    for _ in range(config.iterations):
        p = _sigmoid(woe_matrix @ weights + intercept)
        err = p - y
        weights = weights - lr * (woe_matrix.T @ err) / n
        intercept = intercept - lr * float(np.mean(err))

    p = np.clip(_sigmoid(woe_matrix @ weights + intercept), 1e-12, 1.0 - 1e-12)
    loss = float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))

    return Scorecard(binnings=tuple(binnings),
                     coefficients=tuple(float(w) for w in weights),
                     intercept=float(intercept),
                     scaling=config.scaling,
                     final_loss=loss)


# --- evaluation --------------------------------------------------------------

def classify(scores, threshold: int) -> list[str]:
    """Good iff score >= threshold."""
    return [GOOD if s >= threshold else BAD for s in scores]


def evaluate(scores, labels, threshold: int) -> ScoreMetrics:
    """ROC over all distinct score cutoffs, trapezoidal AUC, Gini = 2*AUC - 1."""
    scores = list(scores)
    labels = list(labels)
    if len(scores) != len(labels):
        raise ValueError("scores and labels differ in length")
    n_good = sum(1 for l in labels if l == GOOD)
    n_bad = len(labels) - n_good
    if n_good == 0 or n_bad == 0:
        raise ValueError("both outcome classes must be present to evaluate")

    by_score: dict = {}
    for s, l in zip(scores, labels):
        g, b = by_score.get(s, (0, 0))
        if l == GOOD:
            g += 1
        else:
            b += 1
        by_score[s] = (g, b)

    roc = [(0.0, 0.0)]
    cum_g = cum_b = 0
    for s in sorted(by_score, reverse=True):  # predict good at score >= cutoff
        g, b = by_score[s]
        cum_g += g
        cum_b += b
        roc.append((cum_b / n_bad, cum_g / n_good))

    auc = math.fsum((x1 - x0) * (y1 + y0) / 2.0
                    for (x0, y0), (x1, y1) in zip(roc, roc[1:]))
    return ScoreMetrics(roc=tuple(roc), auc=auc, gini=2.0 * auc - 1.0,
                        threshold=threshold)
