"""Exact combinatorial identities of the removal process, verified brute force.

Every function here is computed by exhaustive enumeration with exact integer
or rational arithmetic (``fractions.Fraction``), never floats: the identities
are exact, and float comparison would mask sign errors in the alternating
sums.  These are the oracles that the fast incremental structures and the
engine's drop accounting are checked against on small instances.

Notation used throughout the docstrings: Q is the number of K_k copies, and
R(S) is the number of complete (k-|S|)-sets inside the common neighborhood of
S (the extension count of S; for |S| = k it degenerates to the 0/1 indicator
that S is complete).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .graph import (
    Graph,
    VertexSet,
    as_vertex_set,
    bits_of,
    count_cliques_in_mask,
    enumerate_cliques_in_mask,
    enumerate_k_cliques,
    mask_of,
)
from .index import CliqueIndex


def _require_clique(g: Graph, u_k: VertexSet, k: int) -> None:
    if len(u_k) != k:
        raise ValueError(f"expected a {k}-set, got {len(u_k)} vertices")
    if not g.is_complete(u_k):
        raise ValueError(f"{u_k} is not complete in the graph")


def q_um(g: Graph, u_k, u_m, k: int) -> int:
    """Number of current K_k whose intersection with clique u_k is exactly u_m."""
    u_k = as_vertex_set(u_k)
    u_m = as_vertex_set(u_m)
    _require_clique(g, u_k, k)
    if not set(u_m) <= set(u_k):
        raise ValueError("u_m must be a subset of u_k")
    mk = mask_of(u_k)
    mm = mask_of(u_m)
    count = 0
    for c in enumerate_k_cliques(g, k):
        if mask_of(c) & mk == mm:
            count += 1
    return count


def q_um_via_inclusion_exclusion(g: Graph, u_k, u_m, k: int) -> int:
    """Same count through the alternating sum of extension counts.

    Sum over z of (-1)^z R(u_m + T_z) for T_z ranging over the z-subsets of
    u_k minus u_m; the z = k - |u_m| term is R of u_k itself, which is 1.
    """
    u_k = as_vertex_set(u_k)
    u_m = as_vertex_set(u_m)
    _require_clique(g, u_k, k)
    rest = tuple(v for v in u_k if v not in set(u_m))
    total = 0
    for z in range(0, len(rest) + 1):
        sign = -1 if z % 2 else 1
        for t in combinations(rest, z):
            total += sign * g.count_r(tuple(sorted(u_m + t)), k)
    return total


def delta_q_formula(g: Graph, u_k, k: int) -> int:
    """One-step drop of Q via the alternating subset sums.

    Sum over m in [2, k-1] of (-1)^m (m-1) times the size-m subset extension
    counts of the removed clique, plus the constant (-1)^k (k-1).
    """
    u_k = as_vertex_set(u_k)
    _require_clique(g, u_k, k)
    total = (-1) ** k * (k - 1)
    for m in range(2, k):
        coeff = (-1) ** m * (m - 1)
        for um in combinations(u_k, m):
            total += coeff * g.count_r(um, k)
    return total


def observed_delta_q(g: Graph, u_k, k: int) -> int:
    """Ground truth drop: enumerate, remove the clique's edges on a copy, re-enumerate."""
    u_k = as_vertex_set(u_k)
    _require_clique(g, u_k, k)
    before = len(enumerate_k_cliques(g, k))
    h = g.copy()
    h.remove_clique_edges(u_k)
    return before - len(enumerate_k_cliques(h, k))


def sign_identity(r: int) -> tuple[int, int]:
    """(sum over j in [2, r] of (-1)^(r-j) C(r, j), and (-1)^r (r-1))."""
    if r < 2:
        raise ValueError("r must be >= 2")
    lhs = sum((-1) ** (r - j) * comb(r, j) for j in range(2, r + 1))
    return lhs, (-1) ** r * (r - 1)


def coefficient_identity(k: int, m: int) -> tuple[int, int]:
    """(C(k-m, 2) + m(k-m), and C(k, 2) - C(m, 2)); the relevant-edge count."""
    if not 2 <= m < k:
        raise ValueError("need 2 <= m < k")
    return comb(k - m, 2) + m * (k - m), comb(k, 2) - comb(m, 2)


def expected_delta_q(g: Graph, k: int) -> tuple[Fraction, Fraction]:
    """Conditional expected change of Q, two independent ways.

    (a) exhaustively: the average of -drop over every current clique as the
    removal candidate; (b) in closed form: (-1)^(k+1) (k-1) minus the
    Q-normalized alternating sums of squared extension counts over the
    complete m-sets, m in [2, k-1].  Both exact rationals; they must agree.
    """
    cliques = enumerate_k_cliques(g, k)
    q = len(cliques)
    if q < 1:
        raise ValueError("no K_k present")
    masks = [mask_of(c) for c in cliques]

    total_drop = 0
    for mu in masks:
        for mc in masks:
            if (mu & mc).bit_count() >= 2:
                total_drop += 1
    exhaustive = Fraction(-total_drop, q)

    formula = Fraction((-1) ** (k + 1) * (k - 1))
    full = (1 << g.n) - 1
    for m in range(2, k):
        sq = 0
        for um in enumerate_cliques_in_mask(g, full, m):
            r = g.count_r(um, k)
            sq += r * r
        # the double-counting step flips the per-clique coefficient's sign
        formula += Fraction(-((-1) ** m) * (m - 1) * sq, q)
    return exhaustive, formula


def double_count_r_sum(g: Graph, k: int, m: int) -> tuple[int, int]:
    """(sum of R over complete m-sets, C(k, m) * Q): each K_k is hit C(k, m) times."""
    if not 2 <= m <= k - 1:
        raise ValueError("need 2 <= m <= k-1")
    full = (1 << g.n) - 1
    lhs = sum(g.count_r(um, k) for um in enumerate_cliques_in_mask(g, full, m))
    rhs = comb(k, m) * count_cliques_in_mask(g, full, k)
    return lhs, rhs


def double_count_r_squared(g: Graph, k: int, m: int) -> tuple[int, int]:
    """(sum over K_k of subset extension counts, sum of R^2 over complete m-sets)."""
    if not 2 <= m <= k - 1:
        raise ValueError("need 2 <= m <= k-1")
    lhs = 0
    for c in enumerate_k_cliques(g, k):
        for um in combinations(c, m):
            lhs += g.count_r(um, k)
    full = (1 << g.n) - 1
    rhs = 0
    for um in enumerate_cliques_in_mask(g, full, m):
        r = g.count_r(um, k)
        rhs += r * r
    return lhs, rhs


# ---------------------------------------------------------------------------
# Counting the cliques whose removal destroys one fixed extension
# ---------------------------------------------------------------------------

def _indicator_weighted_r(g: Graph, s: VertexSet, k: int) -> int:
    """1_S * R(S): zero unless S induces a complete subgraph."""
    if not g.is_complete(s):
        return 0
    if len(s) == k:
        return 1
    return g.count_r(s, k)


@dataclass(frozen=True)
class DestroyingCount:
    """The number of current K_k whose removal knocks u_c out of the extensions of u_star.

    ``brute`` enumerates cliques directly; ``nested_total`` evaluates the
    nested (membership set, completion set) double sum; ``regrouped_total``
    evaluates the regrouped single sum over union sets with the coefficient
    sum over s of (-1)^(h-s) [C(h, s) - C(zeta, s)].  The per-union-size dicts
    expose the anti-diagonal totals of the nested form, which must match the
    regrouped form size by size.
    """

    brute: int
    nested_total: int
    regrouped_total: int
    nested_by_union_size: dict[int, int]
    regrouped_by_union_size: dict[int, int]


def q_destroying(g: Graph, u_star, u_c, k: int) -> DestroyingCount:
    """Count K_k copies containing at least one edge relevant to (u_star, u_c).

    The relevant edges are the C(k-m*, 2) edges inside u_c plus the
    m*(k-m*) edges between u_star and u_c; edges inside u_star are NOT
    relevant, because extension counts never require u_star itself to be
    complete.  Equivalently: K with H = K intersect (u_star + u_c) satisfying
    |H| >= 2 and H meeting u_c.
    """
    u_star = as_vertex_set(u_star)
    u_c = as_vertex_set(u_c)
    m_star = len(u_star)
    if not 2 <= m_star <= k - 1:
        raise ValueError(f"|u_star| must be in [2, k-1], got {m_star}")
    if len(u_c) != k - m_star:
        raise ValueError(f"u_c must have k - |u_star| = {k - m_star} vertices")
    nb = g.common_neighborhood_mask(u_star)
    mc = mask_of(u_c)
    if mc & nb != mc:
        raise ValueError("u_c must lie inside the common neighborhood of u_star")
    if not g.is_complete(u_c):
        raise ValueError("u_c must be complete")

    ms = mask_of(u_star)
    brute = 0
    for c in enumerate_k_cliques(g, k):
        mk = mask_of(c)
        h = mk & (ms | mc)
        if h & mc and h.bit_count() >= 2:
            brute += 1

    both = u_star + u_c

    # Nested form: choose the intersection pattern H (h vertices, at least one
    # from u_c), then the signed completion T_z outside H.
    nested_cells: dict[tuple[int, int], int] = {}
    for h in range(2, k + 1):
        for rho in range(0, h):  # rho from u_star, h - rho >= 1 from u_c
            if rho > m_star or h - rho > len(u_c):
                continue
            for hs in combinations(u_star, rho):
                for hc in combinations(u_c, h - rho):
                    hset = tuple(sorted(hs + hc))
                    rest = tuple(v for v in both if v not in set(hset))
                    for z in range(0, k - h + 1):
                        sign = -1 if z % 2 else 1
                        cell = 0
                        for t in combinations(rest, z):
                            cell += sign * _indicator_weighted_r(g, tuple(sorted(hset + t)), k)
                        nested_cells[(h, z)] = nested_cells.get((h, z), 0) + cell
    nested_by_size: dict[int, int] = {}
    for (h, z), val in nested_cells.items():
        nested_by_size[h + z] = nested_by_size.get(h + z, 0) + val
    nested_total = sum(nested_cells.values())

    # Regrouped form: one term per union set of size h with zeta vertices in
    # u_star, weighted by how many nested (H, T) pairs produce it.
    regrouped_by_size: dict[int, int] = {}
    for h in range(2, k + 1):
        acc = 0
        for zeta in range(0, h + 1):
            if zeta > m_star or h - zeta > len(u_c):
                continue
            coeff = sum((-1) ** (h - s) * (comb(h, s) - comb(zeta, s)) for s in range(2, h + 1))
            if coeff == 0:
                continue
            for hs in combinations(u_star, zeta):
                for hc in combinations(u_c, h - zeta):
                    acc += coeff * _indicator_weighted_r(g, tuple(sorted(hs + hc)), k)
        regrouped_by_size[h] = acc
    regrouped_total = sum(regrouped_by_size.values())

    return DestroyingCount(
        brute=brute,
        nested_total=nested_total,
        regrouped_total=regrouped_total,
        nested_by_union_size=nested_by_size,
        regrouped_by_union_size=regrouped_by_size,
    )


def expected_delta_r(g: Graph, u_star, k: int) -> tuple[Fraction, Fraction]:
    """Conditional expected change of the extension count of u_star, two ways.

    (a) minus the Q-average of the destroying counts over the current
    extensions of u_star; (b) exhaustively, the average drop of R(u_star)
    over all removal candidates.  Exact rationals; must agree.
    """
    u_star = as_vertex_set(u_star)
    m_star = len(u_star)
    if not 2 <= m_star <= k - 1:
        raise ValueError(f"|u_star| must be in [2, k-1], got {m_star}")
    cliques = enumerate_k_cliques(g, k)
    q = len(cliques)
    if q < 1:
        raise ValueError("no K_k present")

    nb = g.common_neighborhood_mask(u_star)
    via_destroying = Fraction(0)
    for u_c in enumerate_cliques_in_mask(g, nb, k - m_star):
        via_destroying -= Fraction(q_destroying(g, u_star, u_c, k).brute, q)

    r_before = g.count_r(u_star, k)
    total = 0
    for c in cliques:
        h = g.copy()
        h.remove_clique_edges(c)
        total += r_before - h.count_r(u_star, k)
    exhaustive = Fraction(-total, q)
    return via_destroying, exhaustive


def one_step_r_drop_bound(g: Graph, removed, u_star, k: int) -> tuple[int, int]:
    """(actual one-step drop of R(u_star), certified upper bound).

    Every destroyed extension contains a vertex w of the removed clique lying
    in the common neighborhood of u_star, and the extensions through a fixed
    w embed into the complete (k - m* - 1)-sets inside the common neighborhood
    of u_star + w.  The bound sums that count over the w's.  (For
    m* = k - 1 the bound term is the count of complete 0-sets, i.e. 1,
    regardless of whether u_star + w is complete.)
    """
    removed = as_vertex_set(removed)
    u_star = as_vertex_set(u_star)
    m_star = len(u_star)
    if not 2 <= m_star <= k - 1:
        raise ValueError(f"|u_star| must be in [2, k-1], got {m_star}")
    _require_clique(g, removed, k)
    before = g.count_r(u_star, k)
    h = g.copy()
    h.remove_clique_edges(removed)
    drop = before - h.count_r(u_star, k)

    nb = g.common_neighborhood_mask(u_star)
    bound = 0
    for w in removed:
        if nb >> w & 1:
            nbw = nb & g.rows[w] & ~(1 << w)
            bound += count_cliques_in_mask(g, nbw, k - m_star - 1)
    return drop, bound


def lemma21_check(values: list[float], eps: float) -> bool:
    """Squared-sum sandwich for values within eps of a common center.

    Checks (sum a)^2 / l <= sum a^2 <= (sum a)^2 / l + 4 l eps^2 with a small
    float slack; a False return would indicate an implementation bug since
    the statement is a theorem whenever a valid center exists.
    """
    if not values:
        raise ValueError("empty list")
    ell = len(values)
    s = sum(values)
    sq = sum(a * a for a in values)
    lo = s * s / ell
    hi = lo + 4 * ell * eps * eps
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    return lo - tol <= sq <= hi + tol


# ---------------------------------------------------------------------------
# Instance generation and the suite runner
# ---------------------------------------------------------------------------

def random_subgraph(n: int, delete_prob: float, rng) -> Graph:
    """K_n minus an independent random edge set."""
    g = Graph.new_complete(n)
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < delete_prob:
                g.remove_edge(a, b)
    return g


def midprocess_states(n: int, k: int, rng, snapshots: int = 2) -> list[Graph]:
    """Graph states harvested from a short run of the actual process."""
    g = Graph.new_complete(n)
    idx = CliqueIndex.build(g, k)
    out = []
    while len(out) < snapshots and len(idx) > 0:
        u = idx.sample_uniform(rng)
        idx.apply_removal(g, u)
        out.append(g.copy())
    return out


def generate_graph_family(max_n: int, seed: int, ks=(3, 4, 5)) -> list[tuple[str, Graph]]:
    """Deterministic test family: complete graphs, random deletions, process states."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    family: list[tuple[str, Graph]] = []
    for n in range(4, max_n + 1):
        family.append((f"K{n}", Graph.new_complete(n)))
        for d in (0.2, 0.45):
            family.append((f"K{n}-rand{d}", random_subgraph(n, d, rng)))
        for k in ks:
            if k <= n:
                for j, g in enumerate(midprocess_states(n, k, rng)):
                    family.append((f"K{n}-proc-k{k}-{j}", g))
    return family


@dataclass
class SuiteResult:
    name: str
    instances: int
    passed: bool
    failures: list[dict]

    def as_dict(self) -> dict:
        return {"name": self.name, "instances": self.instances,
                "passed": self.passed, "failures": self.failures}


def _fail(failures: list[dict], tag: str, g: Graph, **kw) -> None:
    if len(failures) < 5:  # keep counterexample dumps small
        failures.append({"instance": tag, "edges": g.dump_edge_list(), **kw})


def _clique_sample(cliques: list[VertexSet], cap: int, rng) -> list[VertexSet]:
    if len(cliques) <= cap:
        return cliques
    picks = rng.choice(len(cliques), size=cap, replace=False)
    return [cliques[int(i)] for i in sorted(picks.tolist())]


def run_identity_suites(max_n: int = 10, ks=(3, 4, 5), seed: int = 20240817,
                        max_n_destroying: int = 8, clique_cap: int = 40) -> dict:
    """Exhaustively check every exact identity on the generated family.

    Returns a machine-readable report; ``all_passed`` gates the verify CLI's
    exit code.  All comparisons are exact integer or rational equalities.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed + 1)))
    family = generate_graph_family(max_n, seed, ks=ks)
    suites: list[SuiteResult] = []

    # one-step drop decomposition: exact-intersection counts sum to the drop,
    # inclusion-exclusion matches the exact-intersection counts, and the
    # alternating-sum formula matches the observed drop
    inst = 0
    failures: list[dict] = []
    for tag, g in family:
        for k in ks:
            if k > g.n:
                continue
            cliques = enumerate_k_cliques(g, k)
            if not cliques:
                continue
            for u_k in _clique_sample(cliques, clique_cap, rng):
                inst += 1
                observed = observed_delta_q(g, u_k, k)
                formula = delta_q_formula(g, u_k, k)
                total_exact = 0
                ie_ok = True
                for m in range(2, k + 1):
                    for u_m in combinations(u_k, m):
                        direct = q_um(g, u_k, u_m, k)
                        ie = q_um_via_inclusion_exclusion(g, u_k, u_m, k)
                        if direct != ie:
                            ie_ok = False
                        total_exact += direct
                if not (observed == formula == total_exact and ie_ok):
                    _fail(failures, tag, g, k=k, u_k=u_k, observed=observed,
                          formula=formula, exact_sum=total_exact, inclusion_exclusion_ok=ie_ok)
    suites.append(SuiteResult("one_step_drop_decomposition", inst, not failures, failures))

    # conditional expected drop, closed form vs exhaustive average
    inst = 0
    failures = []
    for tag, g in family:
        for k in ks:
            if k > g.n:
                continue
            if not count_cliques_in_mask(g, (1 << g.n) - 1, k):
                continue
            inst += 1
            a, b = expected_delta_q(g, k)
            if a != b:
                _fail(failures, tag, g, k=k, exhaustive=str(a), formula=str(b))
    suites.append(SuiteResult("expected_drop_two_ways", inst, not failures, failures))

    # both double-counting identities
    inst = 0
    failures = []
    for tag, g in family:
        for k in ks:
            if k > g.n:
                continue
            for m in range(2, k):
                inst += 1
                l1, r1 = double_count_r_sum(g, k, m)
                l2, r2 = double_count_r_squared(g, k, m)
                if l1 != r1 or l2 != r2:
                    _fail(failures, tag, g, k=k, m=m,
                          sum_lhs=l1, sum_rhs=r1, sq_lhs=l2, sq_rhs=r2)
    suites.append(SuiteResult("double_counting", inst, not failures, failures))

    # destroying counts: brute force vs both regroupings, totals and per size
    inst = 0
    failures = []
    for tag, g in family:
        if g.n > max_n_destroying:
            continue
        for k in ks:
            if k > g.n:
                continue
            for m_star in range(2, k):
                for u_star in combinations(range(g.n), m_star):
                    nb = g.common_neighborhood_mask(u_star)
                    for u_c in enumerate_cliques_in_mask(g, nb, k - m_star):
                        inst += 1
                        d = q_destroying(g, u_star, u_c, k)
                        if not (d.brute == d.nested_total == d.regrouped_total
                                and d.nested_by_union_size == d.regrouped_by_union_size):
                            _fail(failures, tag, g, k=k, u_star=u_star, u_c=u_c,
                                  brute=d.brute, nested=d.nested_total,
                                  regrouped=d.regrouped_total)
    suites.append(SuiteResult("destroying_count_regroupings", inst, not failures, failures))

    # expected extension-count drop via destroying counts vs exhaustive
    inst = 0
    failures = []
    for tag, g in family:
        if g.n > max_n_destroying:
            continue
        for k in ks:
            if k > g.n or not count_cliques_in_mask(g, (1 << g.n) - 1, k):
                continue
            for m_star in range(2, k):
                for u_star in _clique_sample(list(combinations(range(g.n), m_star)), 6, rng):
                    inst += 1
                    a, b = expected_delta_r(g, u_star, k)
                    if a != b:
                        _fail(failures, tag, g, k=k, u_star=u_star,
                              via_destroying=str(a), exhaustive=str(b))
    suites.append(SuiteResult("expected_extension_drop_two_ways", inst, not failures, failures))

    # certified bound on the one-step extension drop
    inst = 0
    failures = []
    for tag, g in family:
        if g.n > max_n_destroying:
            continue
        for k in ks:
            if k > g.n:
                continue
            cliques = enumerate_k_cliques(g, k)
            for u_k in _clique_sample(cliques, 8, rng):
                for m_star in range(2, k):
                    for u_star in _clique_sample(list(combinations(range(g.n), m_star)), 6, rng):
                        inst += 1
                        drop, bound = one_step_r_drop_bound(g, u_k, u_star, k)
                        if not 0 <= drop <= bound:
                            _fail(failures, tag, g, k=k, removed=u_k,
                                  u_star=u_star, drop=drop, bound=bound)
    suites.append(SuiteResult("one_step_extension_drop_bound", inst, not failures, failures))

    # scalar identities
    inst = 0
    failures = []
    for r in range(2, 13):
        inst += 1
        l, rr = sign_identity(r)
        if l != rr:
            failures.append({"instance": f"sign r={r}", "lhs": l, "rhs": rr})
    for k in range(3, 9):
        for m in range(2, k):
            inst += 1
            l, rr = coefficient_identity(k, m)
            if l != rr:
                failures.append({"instance": f"coeff k={k} m={m}", "lhs": l, "rhs": rr})
    suites.append(SuiteResult("scalar_identities", inst, not failures, failures))

    # squared-sum sandwich on random lists
    inst = 0
    failures = []
    for _ in range(1000):
        inst += 1
        ell = int(rng.integers(1, 40))
        vals = (rng.random(ell) * 20 - 10).tolist()
        eps = (max(vals) - min(vals)) / 2  # midrange center is always valid
        if not lemma21_check(vals, eps):
            failures.append({"instance": "lemma21", "values": vals, "eps": eps})
    suites.append(SuiteResult("squared_sum_sandwich", inst, not failures, failures))

    return {
        "max_n": max_n,
        "max_n_destroying": max_n_destroying,
        "ks": list(ks),
        "seed": seed,
        "family_size": len(family),
        "suites": [s.as_dict() for s in suites],
        "all_passed": all(s.passed for s in suites),
    }
