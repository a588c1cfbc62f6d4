"""User-IRS assignment: preference lists, deferred acceptance with IRSs
proposing, exchange-stability repair under externalities, and baselines.

Rate-dependent routines take a :class:`~irsmatch.rates.DropEvaluator`, which
carries the drop, its phase designs and the link budget.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from .rates import Matching

SWAP_TOL = 1e-9
STAGE2_ITER_FACTOR = 50


@dataclass(frozen=True)
class PreferenceList:
    owner: int
    ranking: tuple
    scores: tuple

    @classmethod
    def from_scores(cls, owner, scores):
        """Rank opposite-side ids by score, highest first; ties to the lower id."""
        scores = [float(s) for s in scores]
        order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
        return cls(owner, tuple(order), tuple(scores[i] for i in order))

    def rank_of(self, other):
        return self.ranking.index(other)

    def __len__(self):
        return len(self.ranking)


@dataclass(frozen=True)
class AssociationMatrix:
    """L association rounds; ``rows[t][k]`` is the IRS paired with user k in round t."""

    rows: tuple

    def __post_init__(self):
        n = len(self.rows)
        for row in self.rows:
            if sorted(row) != list(range(n)):
                raise ValueError(f"association row is not a bijection: {row}")
        pairs = {(k, l) for row in self.rows for k, l in enumerate(row)}
        if len(pairs) != n * n:
            raise ValueError("association rounds do not cover every user-IRS pair exactly once")

    def row_of_pair(self, k, l):
        for t, row in enumerate(self.rows):
            if row[k] == l:
                return t
        raise KeyError((k, l))

    def matchings(self):
        return [Matching(tuple(row)) for row in self.rows]


def build_user_prefs(drop):
    """Each user ranks all IRSs by its interference-free local rate."""
    local = drop.local_rates()
    return [PreferenceList.from_scores(k, local[k]) for k in range(drop.k_users)]


def build_association_matrix(rng, k):
    """Cyclic Latin square under one random relabeling of the IRSs.

    Round t pairs user u with IRS ``sigma((u - t) mod L)``; with ``rng=None``
    sigma is the identity.
    """
    sigma = np.arange(k) if rng is None else rng.permutation(k)
    rows = tuple(tuple(int(sigma[(u - t) % k]) for u in range(k)) for t in range(k))
    return AssociationMatrix(rows)


def association_rates(assoc, drop):
    """(K, L) rates ``R[k, l]`` of user k in the round where it holds IRS l."""
    out = np.empty((drop.k_users, drop.l_irs))
    for row in assoc.rows:
        rates = drop.user_rates(Matching(tuple(row)))
        for k, l in enumerate(row):
            out[k, l] = rates[k]
    return out


def build_irs_prefs(assoc, drop):
    """Each IRS ranks users by the with-interference rate seen in the single
    association round that pairs them."""
    r = association_rates(assoc, drop)
    return [PreferenceList.from_scores(l, r[:, l]) for l in range(drop.l_irs)]


def _rankings(prefs):
    return [tuple(p.ranking) if isinstance(p, PreferenceList) else tuple(p) for p in prefs]


def gale_shapley(irs_prefs, user_prefs):
    """IRS-proposing deferred acceptance on complete lists (K = L).

    Free IRSs propose in index order down their lists; a user holds the best
    proposal seen so far and releases its previous IRS when a preferred one
    proposes.
    """
    irs_lists = _rankings(irs_prefs)
    user_lists = _rankings(user_prefs)
    n = len(irs_lists)
    if len(user_lists) != n:
        raise ValueError("deferred acceptance here needs as many users as IRSs")
    user_rank = [{l: r for r, l in enumerate(lst)} for lst in user_lists]
    next_choice = [0] * n
    held = [None] * n  # held[k] = IRS currently holding user k
    free = list(range(n))
    while free:
        l = free.pop(0)
        if next_choice[l] >= n:
            continue
        k = irs_lists[l][next_choice[l]]
        next_choice[l] += 1
        cur = held[k]
        if cur is None:
            held[k] = l
        elif user_rank[k][l] < user_rank[k][cur]:
            held[k] = l
            free.insert(0, cur)
        else:
            free.insert(0, l)
    return Matching(tuple(held), provenance="gale-shapley-only")


def list_blocking_pairs(matching, irs_prefs, user_prefs):
    """(user, IRS) pairs that prefer each other to their partners in ``matching``."""
    irs_lists = _rankings(irs_prefs)
    user_lists = _rankings(user_prefs)
    user_of = matching.user_of_irs
    out = []
    for k, mine in enumerate(matching.irs_of_user):
        for l in range(matching.size):
            if l == mine:
                continue
            if user_lists[k].index(l) < user_lists[k].index(mine) and irs_lists[l].index(k) < irs_lists[l].index(
                user_of[l]
            ):
                out.append((k, l))
    return out


def _swap_gain(matching, i, j, drop):
    """Rate changes of IRSs i and j if they exchange users."""
    user_of = matching.user_of_irs
    ui, uj = user_of[i], user_of[j]
    before = drop.user_rates(matching)
    after = drop.user_rates(matching.swap_irs(i, j))
    return after[uj] - before[ui], after[ui] - before[uj]


def find_exchange_blocking_pairs(matching, drop, tol=SWAP_TOL):
    """IRS pairs (i < j) that both gain more than ``tol`` by swapping users."""
    out = []
    for i, j in itertools.combinations(range(matching.size), 2):
        gi, gj = _swap_gain(matching, i, j, drop)
        if gi > tol and gj > tol:
            out.append((i, j))
    return out


def stabilize(matching, drop, tol=SWAP_TOL, max_iter=None):
    """Apply beneficial IRS exchanges until none remains.

    Pairs are scanned in lexicographic order and the first beneficial swap is
    applied before rescanning. Exchange dynamics with externalities may cycle,
    so the loop stops (``converged=False``) on a revisited matching or after
    ``max_iter`` swaps (default ``50 * L``).
    """
    n = matching.size
    cap = STAGE2_ITER_FACTOR * n if max_iter is None else max_iter
    current = matching.relabel(provenance="proposed")
    seen = {current.irs_of_user}
    iterations = 0
    while True:
        swap = None
        for i, j in itertools.combinations(range(n), 2):
            gi, gj = _swap_gain(current, i, j, drop)
            if gi > tol and gj > tol:
                swap = (i, j)
                break
        if swap is None:
            return current.relabel(converged=True, iterations=iterations)
        if iterations >= cap:
            return current.relabel(converged=False, iterations=iterations)
        current = current.swap_irs(*swap).relabel(provenance="proposed")
        iterations += 1
        if current.irs_of_user in seen:
            return current.relabel(converged=False, iterations=iterations)
        seen.add(current.irs_of_user)


@dataclass(frozen=True)
class ProposedResult:
    stage1: Matching
    final: Matching
    user_prefs: list
    irs_prefs: list
    association: AssociationMatrix


def propose(drop, rng):
    """Full two-stage assignment: preference lists, deferred acceptance,
    then exchange-stability repair."""
    user_prefs = build_user_prefs(drop)
    assoc = build_association_matrix(rng, drop.k_users)
    irs_prefs = build_irs_prefs(assoc, drop)
    stage1 = gale_shapley(irs_prefs, user_prefs)
    final = stabilize(stage1, drop)
    return ProposedResult(stage1, final, user_prefs, irs_prefs, assoc)


def distance_matching(geometry):
    """Greedy nearest pairs: repeatedly match the closest unmatched user-IRS pair."""
    dist = geometry.irs_user_distances().astype(float)
    n = dist.shape[0]
    if dist.shape[1] != n:
        raise ValueError("distance matching here needs as many users as IRSs")
    irs = [0] * n
    for _ in range(n):
        k, l = np.unravel_index(int(np.argmin(dist)), dist.shape)
        irs[k] = int(l)
        dist[k, :] = np.inf
        dist[:, l] = np.inf
    return Matching(tuple(irs), provenance="distance")


def random_matching(rng, n):
    return Matching(tuple(int(x) for x in rng.permutation(n)), provenance="random")


EXHAUSTIVE_CAP = 8


def exhaustive_best_matching(drop, cap=EXHAUSTIVE_CAP):
    """Sum-rate optimum over all K! matchings (verification oracle)."""
    n = drop.k_users
    if n > cap:
        raise ValueError(f"exhaustive search limited to K <= {cap}, got {n}")
    best, best_rate = None, -np.inf
    for perm in itertools.permutations(range(n)):
        r = drop.sum_rate(perm)
        if r > best_rate:
            best, best_rate = perm, r
    return Matching(best, provenance="exhaustive")
