"""Effective channels, SINR and rates under a user-IRS matching.

Two routes are provided. The formula-level functions (``effective_channel``,
``interference_channel``, ``sinr``, ``sum_rate`` ...) evaluate the model term
by term from a :class:`~irsmatch.channels.ChannelSet` and per-IRS phase
configs. :class:`DropEvaluator` precomputes every reflected row
``f_{k,l}^H Phi G_l`` of a drop once and is what the matching algorithms use
in their inner loops.
"""
from dataclasses import dataclass

import numpy as np

from . import _backend
from .beamforming import zf_precoder
from .linalg import SingularMatrixError

PROVENANCES = ("proposed", "gale-shapley-only", "distance", "random", "exhaustive", "manual")


@dataclass(frozen=True)
class Matching:
    """One-to-one user-IRS assignment; ``irs_of_user[k]`` is IRS mu(k)."""

    irs_of_user: tuple
    provenance: str = "manual"
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        irs = tuple(int(l) for l in self.irs_of_user)
        if sorted(irs) != list(range(len(irs))) or not irs:
            raise ValueError(f"not a bijection: {irs}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "irs_of_user", irs)

    @classmethod
    def from_user_of_irs(cls, user_of_irs, **kw):
        irs = [0] * len(user_of_irs)
        for l, k in enumerate(user_of_irs):
            irs[k] = l
        return cls(tuple(irs), **kw)

    @classmethod
    def identity(cls, n, **kw):
        return cls(tuple(range(n)), **kw)

    @property
    def size(self):
        return len(self.irs_of_user)

    @property
    def user_of_irs(self):
        users = [0] * self.size
        for k, l in enumerate(self.irs_of_user):
            users[l] = k
        return tuple(users)

    def swap_irs(self, i, j):
        """Matching where IRSs ``i`` and ``j`` exchange their users."""
        users = list(self.user_of_irs)
        users[i], users[j] = users[j], users[i]
        return Matching.from_user_of_irs(users, provenance=self.provenance)

    def relabel(self, **kw):
        fields = dict(provenance=self.provenance, converged=self.converged, iterations=self.iterations)
        fields.update(kw)
        return Matching(self.irs_of_user, **fields)


@dataclass(frozen=True)
class LinkBudget:
    per_user_power: np.ndarray
    noise_power: float

    def __post_init__(self):
        p = np.asarray(self.per_user_power, dtype=float)
        if np.any(p < 0):
            raise ValueError("per-user powers must be nonnegative")
        if not self.noise_power > 0:
            raise ValueError("noise power must be positive")
        object.__setattr__(self, "per_user_power", p)

    @classmethod
    def equal_split(cls, total_power, k_users, noise_power):
        return cls(np.full(k_users, total_power / k_users), noise_power)

    @property
    def total_power(self):
        return float(self.per_user_power.sum())


def _reflected_row(f, config, g):
    return (np.conj(f) * config.diagonal()) @ g


def _config_for(configs, l):
    try:
        return configs[l]
    except KeyError:
        raise ValueError(f"no phase configuration for IRS {l}") from None


def effective_channel(k, mu_k, channels, configs):
    """Desired row channel ``h_{d,k}^H + f_{k,mu}^H Phi_mu G_mu`` (length M)."""
    cfg = _config_for(configs, mu_k)
    return np.conj(channels.direct[k]) + _reflected_row(channels.irs_user[k, mu_k], cfg, channels.bs_irs[mu_k])


def interference_channel(k, matching, channels, configs):
    """Sum of reflections through every IRS other than mu(k), each IRS using
    the configuration it holds for its own matched user."""
    m = channels.direct.shape[1]
    out = np.zeros(m, dtype=np.complex128)
    own = matching.irs_of_user[k]
    for l in range(matching.size):
        if l == own:
            continue
        out += _reflected_row(channels.irs_user[k, l], _config_for(configs, l), channels.bs_irs[l])
    return out


def composite_channel(k, matching, channels, configs):
    return effective_channel(k, matching.irs_of_user[k], channels, configs) + interference_channel(
        k, matching, channels, configs
    )


def desired_channels(matching, channels, configs):
    """K x M matrix stacking the desired channels; the ZF precoder input."""
    return np.stack(
        [effective_channel(k, matching.irs_of_user[k], channels, configs) for k in range(matching.size)]
    )


def sinr(k, matching, channels, configs, precoder, budget):
    c = composite_channel(k, matching, channels, configs)
    gains = np.abs(c @ precoder.columns) ** 2
    p = budget.per_user_power
    signal = p[k] * gains[k]
    interference = float(np.dot(p, gains) - signal)
    return float(signal / (interference + budget.noise_power))


def rate_from_sinr(gamma):
    return float(np.log2(1.0 + gamma))


def user_rate(k, matching, channels, configs, precoder, budget):
    return rate_from_sinr(sinr(k, matching, channels, configs, precoder, budget))


def user_rates(matching, channels, configs, budget, precoder=None):
    if precoder is None:
        precoder = zf_precoder(desired_channels(matching, channels, configs))
    return np.array([user_rate(k, matching, channels, configs, precoder, budget) for k in range(matching.size)])


def sum_rate(matching, channels, configs, budget, precoder=None):
    return float(np.sum(user_rates(matching, channels, configs, budget, precoder)))


def local_rate(k, l, channels, bank, budget):
    """Interference-free rate of user k served through IRS l.

    The vector channel gain is scalarized as the squared norm of the effective
    row channel (matched-filter bound); only the induced ranking is used.
    """
    h = effective_channel(k, l, channels, {l: bank[k, l]})
    return rate_from_sinr(float(np.sum(np.abs(h) ** 2)) / budget.noise_power)


class DropEvaluator:
    """Fast rate evaluation for many matchings on one fixed drop.

    ``rows[k, l, j]`` holds ``f_{k,l}^H Phi_{j,l} G_l`` where ``Phi_{j,l}`` is
    the phase design of IRS l for user j. Results are memoized per matching.
    """

    def __init__(self, channels, bank, budget, rows=None):
        self.channels = channels
        self.bank = bank
        self.budget = budget
        k_users, l_irs, _, _ = channels.dims
        self.k_users = k_users
        self.l_irs = l_irs
        self.direct_rows = np.conj(channels.direct)
        if rows is None:
            diag = bank.diagonals(k_users, l_irs)  # (j, l, n)
            rows = np.einsum("kln,jln,lnm->kljm", np.conj(channels.irs_user), diag, channels.bs_irs)
        self.rows = rows
        self._cache = {}
        self.evaluations = 0

    def with_budget(self, budget):
        """Same drop and phase designs, different power/noise budget."""
        return DropEvaluator(self.channels, self.bank, budget, rows=self.rows)

    def desired(self, irs_of_user):
        k = np.arange(self.k_users)
        return self.direct_rows + self.rows[k, list(irs_of_user), k]

    def composite(self, irs_of_user):
        owners = [0] * self.l_irs
        for k, l in enumerate(irs_of_user):
            owners[l] = k
        refl = self.rows[:, np.arange(self.l_irs), owners].sum(axis=1)
        return self.direct_rows + refl

    def user_rates(self, matching):
        key = matching.irs_of_user if isinstance(matching, Matching) else tuple(matching)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        rates, ok, pivot = _backend.kernels.zf_rates(
            self.desired(key), self.composite(key), self.budget.per_user_power, self.budget.noise_power
        )
        if not ok:
            raise SingularMatrixError(pivot)
        self.evaluations += 1
        rates.setflags(write=False)
        self._cache[key] = rates
        return rates

    def sum_rate(self, matching):
        return float(np.sum(self.user_rates(matching)))

    def local_rates(self):
        """(K, L) interference-free rates used for user preference lists."""
        k = np.arange(self.k_users)
        rows = self.direct_rows[:, None, :] + self.rows[k, :, k]
        gain = np.sum(np.abs(rows) ** 2, axis=2)
        return np.log2(1.0 + gain / self.budget.noise_power)
