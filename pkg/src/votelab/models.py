"""Mallows and Plackett-Luce single-agent models.

Provides densities, exact pairwise marginals, samplers, expected majority
graphs of parameter profiles, and the dispersion-based expected-distance
bounds used by the smoothed-runtime experiments.

Every closed form is written in geometric-sum form, so uniform dispersion
(phi = 1) is handled without special cases and Fraction parameters give
exact rational results end to end.

Samplers take an explicit numpy Generator owned by the caller; nothing
here keeps RNG state, so parallel trials just derive independent streams
from a master seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence, Union

import numpy as np

from .core import (
    Permutation,
    Profile,
    Ranking,
    Weight,
    WeightedMajorityGraph,
    all_rankings,
    as_ranking,
    kt_distance,
    permute,
)

__all__ = [
    "MallowsParam",
    "PlackettLuceParam",
    "ModelParam",
    "ParameterProfile",
    "DispersionVector",
    "mallows_z",
    "mallows_pmf",
    "mallows_pairwise",
    "mallows_sample",
    "pl_pmf",
    "pl_pairwise",
    "pl_sample",
    "param_pmf",
    "param_sample",
    "expected_wmg",
    "expected_kt",
    "expected_kt_bound",
    "kt_bound",
    "mean_expected_kt_bound",
    "sample_profile",
    "permute_param",
    "parse_parameter_profile",
    "format_parameter_profile",
    "load_parameter_profile",
    "save_parameter_profile",
]


@dataclass(frozen=True)
class MallowsParam:
    """Central ranking plus dispersion phi in (0, 1].

    phi -> 0 concentrates on the central ranking, phi = 1 is uniform.
    Optional ``phi_bounds`` declare a bounded sub-model and are enforced
    at construction.
    """

    central: Ranking
    phi: Union[float, Fraction]
    phi_bounds: tuple[Union[float, Fraction], Union[float, Fraction]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "central", as_ranking(self.central))
        if isinstance(self.phi, int):
            object.__setattr__(self, "phi", Fraction(self.phi))
        if not 0 < self.phi <= 1:
            raise ValueError(f"phi must be in (0, 1], got {self.phi}")
        if self.phi_bounds is not None:
            lo, hi = self.phi_bounds
            if not (0 < lo <= hi <= 1):
                raise ValueError("bad phi bounds")
            if not lo <= self.phi <= hi:
                raise ValueError(f"phi {self.phi} outside declared bounds [{lo}, {hi}]")

    @property
    def m(self) -> int:
        return self.central.m


@dataclass(frozen=True)
class PlackettLuceParam:
    """Positive utility vector theta summing to one.

    The ranking is generated by sequential choice without replacement with
    probabilities proportional to theta.
    """

    theta: tuple[Union[float, Fraction], ...]
    theta_bounds: tuple[Union[float, Fraction], Union[float, Fraction]] | None = None

    def __post_init__(self):
        theta = tuple(self.theta)
        object.__setattr__(self, "theta", theta)
        if any(t <= 0 or t > 1 for t in theta):
            raise ValueError("each theta entry must be in (0, 1]")
        total = sum(theta)
        if isinstance(total, Fraction):
            if total != 1:
                raise ValueError("theta must sum to 1")
        elif abs(total - 1.0) > 1e-12:
            raise ValueError(f"theta must sum to 1, got {total}")
        if self.theta_bounds is not None:
            lo, hi = self.theta_bounds
            if any(not lo <= t <= hi for t in theta):
                raise ValueError("theta outside declared bounds")

    @staticmethod
    def from_utilities(values: Sequence[Union[float, Fraction]]) -> "PlackettLuceParam":
        """Normalize arbitrary positive utilities to a valid parameter."""
        total = sum(values)
        if isinstance(total, Fraction) or all(isinstance(v, (int, Fraction)) for v in values):
            theta = tuple(Fraction(v) / total for v in values)
        else:
            theta = tuple(float(v) / total for v in values)
        return PlackettLuceParam(theta)

    @property
    def m(self) -> int:
        return len(self.theta)


ModelParam = Union[MallowsParam, PlackettLuceParam]


def _param_sort_key(param: ModelParam):
    if isinstance(param, MallowsParam):
        return (0, param.central.order, float(param.phi), str(param.phi))
    return (1, tuple(float(t) for t in param.theta), str(param.theta))


@dataclass(frozen=True, eq=False)
class ParameterProfile:
    """Weighted multiset of model parameters, one family per profile.

    Represents an adversary's per-voter choice of distributions; the total
    weight plays the role of the (possibly fractional) number of voters
    and the induced expected majority graph is the weighted sum of the
    per-parameter graphs.
    """

    m: int
    entries: tuple[tuple[ModelParam, Weight], ...]

    def __post_init__(self):
        fams = {type(p) for p, _ in self.entries}
        if len(fams) > 1:
            raise ValueError("parameter profile must be homogeneous in model family")
        for p, w in self.entries:
            if p.m != self.m:
                raise ValueError("mismatched m in parameter profile")
            if w < 0:
                raise ValueError("entry weights must be nonnegative")

    @staticmethod
    def from_entries(
        m: int, pairs: Iterable[tuple[ModelParam, Weight]]
    ) -> "ParameterProfile":
        """Aggregate duplicate parameters, drop zero weights, sort for
        deterministic iteration order."""
        acc: dict[ModelParam, Weight] = {}
        for p, w in pairs:
            acc[p] = acc.get(p, 0) + w
        items = [(p, w) for p, w in acc.items() if w != 0]
        items.sort(key=lambda pw: _param_sort_key(pw[0]))
        return ParameterProfile(m, tuple(items))

    @property
    def total_weight(self) -> Weight:
        return sum(w for _, w in self.entries)

    @property
    def type_count(self) -> int:
        return len(self.entries)

    @property
    def is_integral(self) -> bool:
        return all(
            isinstance(w, (int, np.integer))
            or (isinstance(w, Fraction) and w.denominator == 1)
            for _, w in self.entries
        )

    @property
    def family(self) -> str:
        if not self.entries:
            return "empty"
        return "mallows" if isinstance(self.entries[0][0], MallowsParam) else "pl"

    def scale(self, c: Weight) -> "ParameterProfile":
        return ParameterProfile.from_entries(self.m, [(p, w * c) for p, w in self.entries])

    def union(self, *others: "ParameterProfile") -> "ParameterProfile":
        pairs = list(self.entries)
        for o in others:
            if o.m != self.m:
                raise ValueError("mismatched m")
            pairs.extend(o.entries)
        return ParameterProfile.from_entries(self.m, pairs)

    def permuted(self, sigma: Permutation) -> "ParameterProfile":
        return ParameterProfile.from_entries(
            self.m, [(permute_param(sigma, p), w) for p, w in self.entries]
        )


@dataclass(frozen=True)
class DispersionVector:
    """Per-voter Mallows dispersions, one value in (0, 1] per voter."""

    phis: tuple[Union[float, Fraction], ...]

    def __post_init__(self):
        phis = tuple(self.phis)
        object.__setattr__(self, "phis", phis)
        if len(phis) < 1:
            raise ValueError("need at least one dispersion value")
        if any(not 0 < p <= 1 for p in phis):
            raise ValueError("dispersions must lie in (0, 1]")

    @property
    def n(self) -> int:
        return len(self.phis)


def permute_param(sigma: Permutation, param: ModelParam) -> ModelParam:
    """Relabel a parameter so its distribution commutes with relabeled votes."""
    if isinstance(param, MallowsParam):
        return MallowsParam(permute(sigma, param.central), param.phi, param.phi_bounds)
    theta = list(param.theta)
    out = list(theta)
    for a in range(len(theta)):
        out[sigma.map[a]] = theta[a]
    return PlackettLuceParam(tuple(out), param.theta_bounds)


# ---------------------------------------------------------------------------
# Mallows closed forms
# ---------------------------------------------------------------------------


def _geo_sum(phi, j: int):
    """1 + phi + ... + phi^(j-1); exact for Fraction input."""
    total = phi * 0  # typed zero
    power = phi**0
    for _ in range(j):
        total = total + power
        power = power * phi
    return total


def mallows_z(phi, m: int):
    """Normalization constant: product over i = 2..m of (1 + phi + ... + phi^(i-1)).

    Equals m! at phi = 1; the geometric-sum form avoids the 0/0 that the
    (1-phi^i)/(1-phi) quotient would hit there.
    """
    if isinstance(phi, int):
        phi = Fraction(phi)
    if not 0 < phi <= 1:
        raise ValueError("phi must be in (0, 1]")
    if m < 1:
        raise ValueError("m must be >= 1")
    z = phi**0
    for i in range(2, m + 1):
        z = z * _geo_sum(phi, i)
    return z


def mallows_pmf(param: MallowsParam, w: Ranking | Sequence[int]):
    """phi^KT(central, w) / Z; sums to one over all m! rankings."""
    w = as_ranking(w)
    if w.m != param.m:
        raise ValueError("mismatched m")
    return param.phi ** kt_distance(param.central, w) / mallows_z(param.phi, param.m)


_pairwise_cache: dict[tuple, Weight] = {}


def mallows_pairwise(phi, gap: int):
    """Probability that the alternative ranked ``gap`` positions earlier in
    the central ranking beats the later one.

    Evaluated as sum_{j=0}^{gap-1} phi^j * S(gap-j) / (S(gap) * S(gap+1))
    with S(i) the i-term geometric sum; this is the removable-singularity
    form of (gap+1)/(1-phi^(gap+1)) - gap/(1-phi^gap) and returns exactly
    1/2 at phi = 1.
    """
    if gap < 1:
        raise ValueError("gap must be >= 1")
    if isinstance(phi, int):
        phi = Fraction(phi)
    if not 0 < phi <= 1:
        raise ValueError("phi must be in (0, 1]")
    key = (type(phi).__name__, phi, gap)
    hit = _pairwise_cache.get(key)
    if hit is not None:
        return hit
    s = [_geo_sum(phi, j) for j in range(gap + 2)]
    num = phi * 0
    power = phi**0
    for j in range(gap):
        num = num + power * s[gap - j]
        power = power * phi
    val = num / (s[gap] * s[gap + 1])
    _pairwise_cache[key] = val
    return val


def mallows_sample(param: MallowsParam, rng: np.random.Generator) -> Ranking:
    """Exact sample by repeated insertion.

    Walking the central ranking top-down, the i-th alternative is inserted
    at index j of the partial list with probability proportional to
    phi^(i-1-j); each already-placed alternative left below the insertion
    point contributes one disagreement with the central ranking, which
    reproduces the density exactly.
    """
    phi = float(param.phi)
    out: list[int] = []
    for i, c in enumerate(param.central.order, start=1):
        if i == 1:
            out.append(c)
            continue
        weights = phi ** np.arange(i - 1, -1, -1, dtype=np.float64)
        total = weights.sum()
        u = rng.random() * total
        acc = 0.0
        j = i - 1
        for idx in range(i):
            acc += weights[idx]
            if u < acc:
                j = idx
                break
        out.insert(j, c)
    return Ranking(tuple(out))


def expected_kt(param: MallowsParam):
    """Exact expected KT distance between the central ranking and a sample.

    m - gap pairs sit at each central gap, and each disagrees with
    probability 1 - mallows_pairwise(phi, gap).
    """
    m = param.m
    one = param.phi ** 0
    total = param.phi * 0
    for gap in range(1, m):
        total = total + (m - gap) * (one - mallows_pairwise(param.phi, gap))
    return total


def kt_bound(phi, m: int) -> float:
    """Dispersion-only upper bound on the expected KT distance to the center:
    min(m^2 phi, m phi / ((1-phi)^2 (1-phi^2))); the second branch is
    infinite at phi = 1."""
    if not 0 < phi <= 1:
        raise ValueError("phi must be in (0, 1]")
    first = m * m * phi
    if phi == 1:
        return float(first)
    second = m * phi / ((1 - phi) ** 2 * (1 - phi * phi))
    return float(min(first, second))


def expected_kt_bound(param: MallowsParam) -> float:
    return kt_bound(param.phi, param.m)


def mean_expected_kt_bound(phis: DispersionVector | Sequence, m: int) -> float:
    """Mean of the per-voter expected-KT bounds over a dispersion vector."""
    values = phis.phis if isinstance(phis, DispersionVector) else tuple(phis)
    if not values:
        raise ValueError("empty dispersion vector")
    return float(sum(kt_bound(p, m) for p in values)) / len(values)


# ---------------------------------------------------------------------------
# Plackett-Luce closed forms
# ---------------------------------------------------------------------------


def pl_pmf(param: PlackettLuceParam, r: Ranking | Sequence[int]):
    """Sequential-choice probability of ranking ``r``."""
    r = as_ranking(r)
    if r.m != param.m:
        raise ValueError("mismatched m")
    prob = param.theta[0] ** 0
    tail = sum(param.theta)
    for a in r.order[:-1]:
        prob = prob * (param.theta[a] / tail)
        tail = tail - param.theta[a]
    return prob


def pl_pairwise(param: PlackettLuceParam, a: int, b: int):
    """Marginal probability that a is ranked above b: theta_a/(theta_a+theta_b).

    Follows from the choice-axiom structure of the model; the enumeration
    tests verify it against the full density before anything downstream
    relies on it.
    """
    return param.theta[a] / (param.theta[a] + param.theta[b])


def pl_sample(param: PlackettLuceParam, rng: np.random.Generator) -> Ranking:
    """Sample by sequential draws without replacement proportional to theta."""
    theta = np.asarray([float(t) for t in param.theta])
    remaining = list(range(param.m))
    out: list[int] = []
    while remaining:
        w = theta[remaining]
        u = rng.random() * w.sum()
        acc = 0.0
        pick = len(remaining) - 1
        for idx, wv in enumerate(w):
            acc += wv
            if u < acc:
                pick = idx
                break
        out.append(remaining.pop(pick))
    return Ranking(tuple(out))


def param_pmf(param: ModelParam, r: Ranking | Sequence[int]):
    if isinstance(param, MallowsParam):
        return mallows_pmf(param, r)
    return pl_pmf(param, r)


def param_sample(param: ModelParam, rng: np.random.Generator) -> Ranking:
    if isinstance(param, MallowsParam):
        return mallows_sample(param, rng)
    return pl_sample(param, rng)


# ---------------------------------------------------------------------------
# expected majority graphs
# ---------------------------------------------------------------------------


def expected_wmg(x: ModelParam | ParameterProfile) -> WeightedMajorityGraph:
    """Expected majority graph, in closed form (no sampling).

    For a Mallows parameter the margin on a central pair at gap k is
    2 * mallows_pairwise(phi, k) - 1, oriented by the central ranking; for
    Plackett-Luce it is (theta_a - theta_b)/(theta_a + theta_b).  A
    parameter profile yields the weight-summed graph.  Exact under
    Fraction parameters, which is what gadget verification requires.
    """
    if isinstance(x, ParameterProfile):
        total = WeightedMajorityGraph.zero(x.m, exact=_profile_exact(x))
        for p, w in x.entries:
            total = total + expected_wmg(p) * w
        return total
    m = x.m
    exact = _param_exact(x)
    if isinstance(x, MallowsParam):
        edges = []
        order = x.central.order
        for i in range(m):
            for j in range(i + 1, m):
                margin = 2 * mallows_pairwise(x.phi, j - i) - 1
                edges.append((order[i], order[j], margin))
        return WeightedMajorityGraph.from_edges(m, edges, exact=exact)
    edges = []
    for a in range(m):
        for b in range(a + 1, m):
            edges.append((a, b, (x.theta[a] - x.theta[b]) / (x.theta[a] + x.theta[b])))
    return WeightedMajorityGraph.from_edges(m, edges, exact=exact)


def _param_exact(param: ModelParam) -> bool:
    if isinstance(param, MallowsParam):
        return isinstance(param.phi, (Fraction, int))
    return all(isinstance(t, (Fraction, int)) for t in param.theta)


def _profile_exact(pp: ParameterProfile) -> bool:
    return all(_param_exact(p) for p, _ in pp.entries) and all(
        isinstance(w, (Fraction, int)) for _, w in pp.entries
    )


# ---------------------------------------------------------------------------
# profile sampling
# ---------------------------------------------------------------------------

_pmf_cache: dict[ModelParam, np.ndarray] = {}

#: largest m for which sampling enumerates the m! outcomes and draws counts
SAMPLE_ENUM_MAX_M = 7


def _pmf_vector(param: ModelParam) -> np.ndarray:
    pmf = _pmf_cache.get(param)
    if pmf is None:
        pmf = np.array(
            [float(param_pmf(param, r)) for r in all_rankings(param.m)], dtype=np.float64
        )
        pmf = pmf / pmf.sum()
        _pmf_cache[param] = pmf
    return pmf


def sample_profile(pp: ParameterProfile, rng: np.random.Generator) -> Profile:
    """Draw one ranking per unit of weight, independently per entry.

    Requires an integral parameter profile.  For small m the draw is
    aggregated: counts over the enumerated m! rankings follow a
    multinomial with the entry's exact density, which is distributed
    identically to per-draw sampling and far faster at gadget scales.
    """
    if not pp.is_integral:
        raise ValueError("sampling requires an integral parameter profile")
    m = pp.m
    if m <= SAMPLE_ENUM_MAX_M:
        rankings = list(permutations(range(m)))
        counts = np.zeros(len(rankings), dtype=np.int64)
        for param, w in pp.entries:
            counts += rng.multinomial(int(w), _pmf_vector(param))
        keep = counts.nonzero()[0]
        votes = np.array([rankings[i] for i in keep], dtype=np.int16).reshape(-1, m)
        return Profile(m, votes, counts[keep])
    rows = []
    for param, w in pp.entries:
        for _ in range(int(w)):
            rows.append(param_sample(param, rng).order)
    prof = Profile.from_rankings(rows, m=m) if rows else Profile.empty(m)
    return prof.aggregated()


# ---------------------------------------------------------------------------
# parameter-profile text format
# ---------------------------------------------------------------------------
#
# Header "model=mallows|pl" and "m=<int>", then one entry per line:
#   <weight> | phi=<value>; central=i1,i2,...   (Mallows)
#   <weight> | theta=t1,t2,...,tm               (Plackett-Luce)


def _format_value(v) -> str:
    return str(v)


def _parse_value(tok: str):
    tok = tok.strip()
    if "/" in tok:
        return Fraction(tok)
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def format_parameter_profile(pp: ParameterProfile) -> str:
    lines = [f"model={pp.family}", f"m={pp.m}"]
    for p, w in pp.entries:
        if isinstance(p, MallowsParam):
            central = ",".join(str(a) for a in p.central.order)
            lines.append(f"{w} | phi={_format_value(p.phi)}; central={central}")
        else:
            theta = ",".join(_format_value(t) for t in p.theta)
            lines.append(f"{w} | theta={theta}")
    return "\n".join(lines) + "\n"


def parse_parameter_profile(text: str) -> ParameterProfile:
    model = None
    m = None
    pairs: list[tuple[ModelParam, Weight]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("model="):
            model = line[6:].strip()
            continue
        if line.startswith("m="):
            m = int(line[2:])
            continue
        if "|" not in line:
            raise ValueError(f"bad entry line: {raw!r}")
        wtok, ptok = line.split("|", 1)
        w = _parse_value(wtok)
        fields = {}
        for part in ptok.split(";"):
            if "=" not in part:
                raise ValueError(f"bad parameter field: {part!r}")
            key, val = part.split("=", 1)
            fields[key.strip()] = val.strip()
        if model == "mallows":
            phi = _parse_value(fields["phi"])
            central = Ranking(tuple(int(t) for t in fields["central"].split(",")))
            pairs.append((MallowsParam(central, phi), w))
        elif model == "pl":
            theta = tuple(_parse_value(t) for t in fields["theta"].split(","))
            pairs.append((PlackettLuceParam(theta), w))
        else:
            raise ValueError(f"unknown or missing model family: {model!r}")
    if m is None:
        raise ValueError("missing m= header")
    return ParameterProfile.from_entries(m, pairs)


def load_parameter_profile(path) -> ParameterProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_parameter_profile(fh.read())


def save_parameter_profile(pp: ParameterProfile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_parameter_profile(pp))
