"""Discrete IRS phase design and ZF precoding at the BS."""
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .linalg import as_matrix, as_vector, right_pseudo_inverse


@dataclass(frozen=True)
class PhaseAlphabet:
    """Uniform B-bit phase set ``{-pi + 2 pi i / 2^B}``."""

    bits: int

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("bits must be nonnegative")

    @property
    def size(self):
        return 2**self.bits

    @property
    def phases(self):
        return -np.pi + (2.0 * np.pi / self.size) * np.arange(self.size)

    @property
    def phasors(self):
        return np.exp(1j * self.phases)


@dataclass(frozen=True)
class PhaseConfig:
    """Per-element alphabet indices and ON/OFF states of one IRS."""

    alphabet: PhaseAlphabet
    indices: np.ndarray
    on_state: np.ndarray = field(default=None)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("indices must be a non-empty 1-D array")
        if idx.min() < 0 or idx.max() >= self.alphabet.size:
            raise ValueError("phase index outside the alphabet")
        on = np.ones(idx.shape, dtype=bool) if self.on_state is None else np.asarray(self.on_state, dtype=bool)
        if on.shape != idx.shape:
            raise ValueError("on_state must match indices in length")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "on_state", on)

    @property
    def phases(self):
        return self.alphabet.phases[self.indices]

    def diagonal(self):
        """Diagonal entries of Phi: unit phasors where ON, zero where OFF."""
        return np.where(self.on_state, self.alphabet.phasors[self.indices], 0.0)

    def matrix(self):
        return np.diag(self.diagonal())

    @classmethod
    def all_off(cls, alphabet, n):
        return cls(alphabet, np.zeros(n, dtype=np.int64), np.zeros(n, dtype=bool))


@dataclass(frozen=True)
class Precoder:
    columns: np.ndarray  # (M, K); column k is w_k

    @property
    def n_users(self):
        return self.columns.shape[1]

    def column(self, k):
        return self.columns[:, k]


def strongest_column(g):
    """Index of the BS-antenna column of ``g`` with the largest norm."""
    return int(np.argmax(np.sum(np.abs(g) ** 2, axis=0)))


def passive_beamform(g, f, alphabet):
    """Greedy element-by-element phase choice for one IRS and one user.

    The strongest column of ``g`` is fixed first; each element then takes the
    alphabet phase that maximizes the magnitude of the running coherent sum
    ``s_n = s_{n-1} + |f_n| |G_{n,m}| e^{j(arg conj f_n + arg G_{n,m} + theta)}``.
    Ties (notably the first step, where ``s_0 = 0``) go to the smallest index.
    Every element is left ON.
    """
    g = as_matrix(g)
    f = as_vector(f)
    if g.shape[0] != f.shape[0]:
        raise ValueError(f"G has {g.shape[0]} rows but f has length {f.shape[0]}")
    m_hat = strongest_column(g)
    idx, _ = _backend.kernels.greedy_phases(f, g[:, m_hat], alphabet.phasors)
    return PhaseConfig(alphabet, idx)


def coherent_sum(g, f, config):
    """Final ``s_N`` of the greedy recursion for a given configuration."""
    g = as_matrix(g)
    col = g[:, strongest_column(g)]
    return complex(np.sum(np.conj(f) * config.diagonal() * col))


def snr_objective(g, f, config):
    """``||f^H Phi G||^2``; the noise normalization is a constant and omitted."""
    g = as_matrix(g)
    f = as_vector(f)
    row = (np.conj(f) * config.diagonal()) @ g
    return float(np.sum(np.abs(row) ** 2))


def zf_precoder(h_eff):
    """Normalized columns of ``H^H (H H^H)^{-1}`` for a K x M channel."""
    w = right_pseudo_inverse(h_eff)
    return Precoder(w / np.linalg.norm(w, axis=0, keepdims=True))


class PhaseBank:
    """Phase configurations for every (user, IRS) pair of one drop.

    The greedy design of a pair depends only on ``f_{k,l}`` and ``G_l``, so it
    is computed once per drop and reused by every matching evaluated on it.
    """

    def __init__(self, configs):
        self._configs = configs  # dict (k, l) -> PhaseConfig

    @classmethod
    def design(cls, channels, alphabet):
        k_users, l_irs, _, _ = channels.dims
        configs = {}
        for k in range(k_users):
            for l in range(l_irs):
                configs[k, l] = passive_beamform(channels.bs_irs[l], channels.irs_user[k, l], alphabet)
        return cls(configs)

    def __getitem__(self, pair):
        return self._configs[pair]

    def __contains__(self, pair):
        return pair in self._configs

    def for_matching(self, matching):
        """Per-IRS configs when each IRS beamforms towards its matched user."""
        return {l: self._configs[k, l] for l, k in enumerate(matching.user_of_irs)}

    def diagonals(self, k_users, l_irs):
        """(K, L, N) array of Phi diagonals indexed by (user, IRS)."""
        return np.stack(
            [np.stack([self._configs[k, l].diagonal() for l in range(l_irs)]) for k in range(k_users)]
        )
