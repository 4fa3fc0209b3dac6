"""Feynman-diagram combinatorics and Wiener-chaos arithmetic.

Vertices live on a column grid: column k (1-based) holds n_k vertices
(k, 1), ..., (k, n_k).  An admissible diagram is a perfect matching whose
every edge points from a lower column to a strictly higher one.  Balanced
partitions/diagrams are the restricted family used by the moment
lower-bound counting; the chaos helpers give the per-level second-moment
contributions and a seeded Monte Carlo cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import specialfn as sf
from .errors import InvalidParams, NotBalanced, TooLarge
from .model import (
    ModelParams,
    big_theta,
    dalang_satisfied,
    theta,
)
from .moments import _require_dalang

__all__ = [
    "Partition",
    "FeynmanDiagram",
    "enumerate_admissible",
    "is_balanced_partition",
    "enumerate_balanced",
    "count_balanced",
    "count_lower_bound",
    "crossing_vanishes",
    "chaos_term",
    "chaos_term_mc",
    "exp_tail_facts",
    "stirling_sandwich_holds",
    "diagram_to_line",
    "diagram_from_line",
]

_ENUM_CAP = 12  # exhaustive-enumeration vertex budget

Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]


@dataclass(frozen=True)
class Partition:
    """Column sizes (n_1, ..., n_p); total must be even to admit a matching."""

    n: tuple[int, ...]

    def __post_init__(self):
        if not self.n or any(int(v) != v or v < 1 for v in self.n):
            raise InvalidParams("partition entries must be positive integers")
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))

    @property
    def total(self) -> int:
        return sum(self.n)

    @property
    def p(self) -> int:
        return len(self.n)

    def vertices(self) -> list[Vertex]:
        return [(k, l) for k, nk in enumerate(self.n, start=1) for l in range(1, nk + 1)]


@dataclass(frozen=True)
class FeynmanDiagram:
    partition: Partition
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset(
            ((int(a), int(b)), (int(c), int(d))) for (a, b), (c, d) in self.edges
        )
        object.__setattr__(self, "edges", edges)
        for (k1, _), (k2, _) in edges:
            if not k1 < k2:
                raise InvalidParams("edges must point to a strictly higher column")
        seen: set[Vertex] = set()
        for e in edges:
            for v in e:
                if v in seen:
                    raise InvalidParams(f"vertex {v} appears in two edges")
                seen.add(v)

    def is_admissible(self) -> bool:
        """Every vertex of the partition in exactly one edge."""
        covered = {v for e in self.edges for v in e}
        return covered == set(self.partition.vertices())

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def enumerate_admissible(partition: Partition) -> list[FeynmanDiagram]:
    """All perfect matchings with cross-column, upward-pointing edges."""
    total = partition.total
    if total % 2:
        raise InvalidParams("partition total must be even")
    if total > _ENUM_CAP:
        raise TooLarge(f"enumeration capped at {_ENUM_CAP} vertices, got {total}")
    verts = partition.vertices()
    out: list[FeynmanDiagram] = []

    def extend(remaining: tuple[Vertex, ...], acc: list[Edge]):
        if not remaining:
            out.append(FeynmanDiagram(partition, frozenset(acc)))
            return
        v = remaining[0]
        rest = remaining[1:]
        for j, w in enumerate(rest):
            if w[0] == v[0]:
                continue  # same column never pairs
            a, b = (v, w) if v[0] < w[0] else (w, v)
            extend(rest[:j] + rest[j + 1 :], acc + [(a, b)])

    extend(tuple(verts), [])
    return out


def _balance_data(p: int, m: int) -> tuple[int, int]:
    if p < 2 or p % 2:
        raise InvalidParams("p must be an even integer >= 2")
    if m < 1:
        raise InvalidParams("m must be a positive integer")
    return (2 * m) // p, (2 * m) % p


def is_balanced_partition(partition: Partition, p: int, m: int) -> bool:
    """Entries in {floor(2m/p), floor(2m/p)+1}, total 2m, first half sums to m."""
    if partition.p != p:
        return False
    m_p, _ = _balance_data(p, m)
    if partition.total != 2 * m:
        return False
    if any(v not in (m_p, m_p + 1) for v in partition.n):
        return False
    return sum(partition.n[: p // 2]) == m


def balanced_partitions(p: int, m: int) -> list[Partition]:
    """All balanced partitions of 2m into p parts."""
    m_p, r_p = _balance_data(p, m)
    if m < p // 2:
        return []
    if r_p % 2:
        return []  # cannot split the overflow evenly across the halves
    half = p // 2
    out = []
    extra = r_p // 2
    for left in itertools.combinations(range(half), extra):
        for right in itertools.combinations(range(half, p), extra):
            n = [m_p] * p
            for i in left + right:
                n[i] += 1
            out.append(Partition(tuple(n)))
    return out


def enumerate_balanced(partition: Partition, p: int, m: int) -> list[FeynmanDiagram]:
    """All balanced diagrams over a balanced partition: horizontal edges
    (same level) from the left half to the right half, one bijection of
    columns per level."""
    if not is_balanced_partition(partition, p, m):
        raise NotBalanced(f"{partition.n} is not a balanced partition of {2*m}")
    half = p // 2
    levels = max(partition.n)
    per_level: list[tuple[list[int], list[int]]] = []
    for lvl in range(1, levels + 1):
        left = [k for k in range(1, half + 1) if partition.n[k - 1] >= lvl]
        right = [k for k in range(half + 1, p + 1) if partition.n[k - 1] >= lvl]
        if len(left) != len(right):
            raise NotBalanced("level occupancies differ between halves")
        per_level.append((left, right))
    out = []
    choices = [
        [list(zip(left, perm)) for perm in itertools.permutations(right)]
        for left, right in per_level
    ]
    for combo in itertools.product(*choices):
        edges = []
        for lvl, pairs in enumerate(combo, start=1):
            for k1, k2 in pairs:
                edges.append(((k1, lvl), (k2, lvl)))
        diagram = FeynmanDiagram(partition, frozenset(edges))
        assert diagram.is_admissible()
        out.append(diagram)
    return out


def count_balanced(p: int, m: int) -> int:
    """Total number of balanced diagrams over all balanced partitions."""
    total = 0
    for part in balanced_partitions(p, m):
        m_p, r_p = _balance_data(p, m)
        total += math.factorial(p // 2) ** m_p * math.factorial(r_p // 2)
    return total


def count_lower_bound(p: int, m: int) -> int:
    """((p/2)!)^{m_p} (r_p/2)! with m_p = floor(2m/p), r_p = 2m mod p."""
    m_p, r_p = _balance_data(p, m)
    if m < p // 2:
        raise InvalidParams("need m >= p/2")
    if r_p % 2:
        raise InvalidParams("2m mod p must be even")
    return math.factorial(p // 2) ** m_p * math.factorial(r_p // 2)


def crossing_vanishes(diagram: FeynmanDiagram) -> bool:
    """True when two edges rooted in one column cross into a common target
    column in reversed level order, which zeroes the time-simplex factor."""
    if not diagram.is_admissible():
        raise InvalidParams("diagram must be admissible")
    edges = diagram.sorted_edges()
    for (s1, t1), (s2, t2) in itertools.combinations(edges, 2):
        if s1[0] == s2[0] and t1[0] == t2[0]:
            if (s1[1] - s2[1]) * (t1[1] - t2[1]) < 0:
                return True
    return False


def simplex_weight_count(diagram: FeynmanDiagram, grid: int = 4) -> int:
    """Discrete surrogate for the time integral: count assignments of grid
    times to vertices respecting strict per-column order, with edge-matched
    times.  Zero iff the simplex indicators are contradictory on the grid."""
    verts = sorted(diagram.partition.vertices())
    if len(verts) > _ENUM_CAP:
        raise TooLarge("surrogate count capped at the enumeration budget")
    # union-find over edge-identified vertices
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in diagram.edges:
        parent[find(a)] = find(b)
    classes = sorted({find(v) for v in verts})
    idx = {c: i for i, c in enumerate(classes)}
    count = 0
    for assign in itertools.product(range(grid), repeat=len(classes)):
        ok = True
        for k, nk in enumerate(diagram.partition.n, start=1):
            col = [assign[idx[find((k, l))]] for l in range(1, nk + 1)]
            if any(col[i] >= col[i + 1] for i in range(len(col) - 1)):
                ok = False
                break
        count += ok
    return count


def chaos_term(p: ModelParams, t: float, k: int) -> float:
    """k-th Wiener-chaos contribution to E[u^2] for constant initial data
    (u1 = 0): u0^2 (lambda^2 Theta Gamma(theta+1))^k t^{k(theta+1)}
    / Gamma(k(theta+1) + 1)."""
    _require_dalang(p)
    if p.u1 != 0.0 and p.beta > 1.0:
        raise InvalidParams("chaos terms implemented for u1 = 0")
    if t <= 0:
        raise InvalidParams("t must be > 0")
    if k < 0 or int(k) != k:
        raise InvalidParams("k must be a nonnegative integer")
    if k == 0:
        return p.u0**2
    th = theta(p)
    a = p.lam**2 * big_theta(p) * sf.gamma(th + 1.0)
    return p.u0**2 * a**k * t ** (k * (th + 1.0)) * sf.rgamma(k * (th + 1.0) + 1.0)


def chaos_term_mc(
    p: ModelParams,
    t: float,
    k: int,
    samples: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of the k-th chaos contribution with standard
    error, sampling the ordered time simplex.

    Space is integrated analytically (the squared-kernel integral is
    Theta dt^theta), leaving lambda^{2k} Theta^k u0^2 times the Dirichlet
    integral of prod (s_{r+1}-s_r)^theta over the simplex.  Gaps are drawn
    from a Dirichlet law tilted by (3 theta + 1)/2, which keeps the weight
    square integrable for every theta > -1 (plain uniform sampling has
    infinite variance once theta <= -1/2).
    """
    _require_dalang(p)
    if p.u1 != 0.0 and p.beta > 1.0:
        raise InvalidParams("chaos terms implemented for u1 = 0")
    if k < 0 or int(k) != k:
        raise InvalidParams("k must be a nonnegative integer")
    if k > 4:
        raise TooLarge("Monte Carlo chaos check capped at k = 4")
    if samples < 2:
        raise InvalidParams("need at least two samples")
    if k == 0:
        return p.u0**2, 0.0
    th = theta(p)
    kap = p.lam**2 * big_theta(p)
    rng = np.random.Generator(np.random.Philox(key=seed))
    # gaps g_0..g_k with sum t; weighted factors attach to g_1..g_k
    tilt = (3.0 * th + 1.0) / 2.0
    conc = np.array([1.0] + [1.0 + tilt] * k)
    gam = rng.gamma(shape=np.tile(conc, (samples, 1)), scale=1.0)
    gaps = gam / gam.sum(axis=1, keepdims=True) * t
    # integrand prod g_r^theta over the simplex, importance weight =
    # dirichlet density on the scaled simplex
    logf = th * np.log(gaps[:, 1:]).sum(axis=1)
    log_norm = math.lgamma(1.0 + k * (1.0 + tilt)) - k * math.lgamma(1.0 + tilt)
    logq = (
        tilt * np.log(gaps[:, 1:] / t).sum(axis=1)
        + log_norm
        - k * math.log(t)
    )
    w = np.exp(logf - logq)
    scale = p.u0**2 * kap**k
    est = scale * float(np.mean(w))
    se = scale * float(np.std(w, ddof=1) / math.sqrt(samples))
    return est, se


def exp_tail_facts(n: int, a: float) -> dict:
    """Log-space facts about the exponential series around its mode.

    half_ratio = exp(-n) sum_{m<n} n^m/m!  (tends to 1/2); tail_lb_ok
    checks sum_{m>=n} (n^m/m!)^a >= exp(a n / 4) with witness constants
    c1 = 1, c2 = a/4.
    """
    if n < 10 or int(n) != n:
        raise InvalidParams("n must be an integer >= 10")
    if a <= 0:
        raise InvalidParams("a must be > 0")
    m = np.arange(0, n)
    logterms = m * math.log(n) - np.array([math.lgamma(v + 1.0) for v in m]) - n
    top = float(np.max(logterms))
    half_ratio = math.exp(top) * float(np.sum(np.exp(logterms - top)))
    # tail sum in log space, m from n onward until terms stop contributing
    m_hi = int(n + 20 * math.sqrt(n) + 60)
    mm = np.arange(n, m_hi)
    logt = a * (mm * math.log(n) - np.array([math.lgamma(v + 1.0) for v in mm]))
    top_t = float(np.max(logt))
    log_tail = top_t + math.log(float(np.sum(np.exp(logt - top_t))))
    tail_lb_ok = log_tail >= a * n / 4.0  # log c1 = 0
    return {"half_ratio": half_ratio, "tail_lb_ok": bool(tail_lb_ok)}


def stirling_sandwich_holds(n: int) -> bool:
    """sqrt(2 pi n)(n/e)^n < n! < 2 sqrt(2 pi n)(n/e)^n, in log space."""
    if n < 1 or int(n) != n:
        raise InvalidParams("n must be a positive integer")
    log_fact = math.lgamma(n + 1.0)
    log_lower = 0.5 * math.log(2.0 * math.pi * n) + n * (math.log(n) - 1.0)
    return log_lower < log_fact < log_lower + math.log(2.0)


def diagram_to_line(diagram: FeynmanDiagram) -> str:
    """`p m | n1,...,np | (k1,l1)-(k2,l2); ...` fixture format."""
    part = diagram.partition
    edges = "; ".join(
        f"({k1},{l1})-({k2},{l2})" for (k1, l1), (k2, l2) in diagram.sorted_edges()
    )
    return f"{part.p} {part.total // 2} | {','.join(map(str, part.n))} | {edges}"


def diagram_from_line(line: str) -> FeynmanDiagram:
    try:
        head, ns, es = (s.strip() for s in line.split("|"))
        p_str, m_str = head.split()
        p, m = int(p_str), int(m_str)
        n = tuple(int(v) for v in ns.split(","))
        edges = []
        if es:
            for chunk in es.split(";"):
                a, b = chunk.strip().split("-")
                k1, l1 = (int(v) for v in a.strip("() ").split(","))
                k2, l2 = (int(v) for v in b.strip("() ").split(","))
                edges.append(((k1, l1), (k2, l2)))
    except (ValueError, IndexError) as exc:
        raise InvalidParams(f"malformed diagram line: {line!r}") from exc
    part = Partition(n)
    if part.p != p or part.total != 2 * m:
        raise InvalidParams("diagram line header inconsistent with partition")
    return FeynmanDiagram(part, frozenset(edges))
