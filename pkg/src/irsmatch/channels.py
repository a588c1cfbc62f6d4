"""Geometry, Rician fading and path loss for one Monte-Carlo drop.

All random draws come from an explicitly passed ``numpy.random.Generator``.
A drop is bit-reproducible given the generator state.
"""
from dataclasses import dataclass

import numpy as np

MIN_USER_DISTANCE = 1.0


def db_to_linear(x_db):
    """Power quantity in dB to linear scale."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class Geometry:
    """Node positions in meters; BS at the origin."""

    bs_position: np.ndarray
    irs_positions: np.ndarray  # (L, 2)
    user_positions: np.ndarray  # (K, 2)

    @property
    def n_users(self):
        return self.user_positions.shape[0]

    @property
    def n_irs(self):
        return self.irs_positions.shape[0]

    def bs_irs_distances(self):
        return np.linalg.norm(self.irs_positions - self.bs_position, axis=1)

    def bs_user_distances(self):
        return np.linalg.norm(self.user_positions - self.bs_position, axis=1)

    def irs_user_distances(self):
        """(K, L) matrix of user-to-IRS distances."""
        diff = self.user_positions[:, None, :] - self.irs_positions[None, :, :]
        return np.linalg.norm(diff, axis=2)


@dataclass(frozen=True)
class FadingParams:
    kappa_g: float = 10.0
    kappa_f: float = 10.0
    d_over_lambda: float = 0.5
    alpha_direct: float = 3.5
    alpha_reflect: float = 2.0
    c_nu: float = 1e-3
    # linear amplitude-like ratio; zeta**2 is the power gain (10 dB -> zeta**2 = 10)
    zeta: float = float(np.sqrt(10.0))
    delta_b: float = 1.0
    delta_u: float = 1.0

    def __post_init__(self):
        if self.kappa_g < 0 or self.kappa_f < 0:
            raise ValueError("Rician factors must be nonnegative")
        if self.c_nu <= 0 or self.zeta <= 0:
            raise ValueError("c_nu and zeta must be positive")
        if self.alpha_direct <= 0 or self.alpha_reflect <= 0:
            raise ValueError("path-loss exponents must be positive")


@dataclass(frozen=True)
class ChannelSet:
    """Realized channels of one drop, path loss already applied.

    direct[k] is h_{d,k} (length M), bs_irs[l] is G_l (N x M) scaled by
    sqrt(L_bi), irs_user[k, l] is f_{k,l} (length N) scaled by sqrt(L_iu).
    """

    direct: np.ndarray  # (K, M)
    bs_irs: np.ndarray  # (L, N, M)
    irs_user: np.ndarray  # (K, L, N)

    @property
    def dims(self):
        k, m = self.direct.shape
        l, n, _ = self.bs_irs.shape
        return k, l, m, n


def ring_irs_positions(n_irs, d_r):
    """IRSs equally spaced in angle on a circle of radius ``d_r``."""
    angles = 2.0 * np.pi * np.arange(n_irs) / n_irs
    return d_r * np.column_stack([np.cos(angles), np.sin(angles)])


def draw_user_positions(rng, n_users, d_r, min_distance=MIN_USER_DISTANCE):
    """Area-uniform users on the disk of radius ``d_r / 2``.

    Users closer than ``min_distance`` to the BS are redrawn one at a time.
    """
    radius = d_r / 2.0
    out = np.empty((n_users, 2))
    for k in range(n_users):
        while True:
            r = radius * np.sqrt(rng.random())
            phi = 2.0 * np.pi * rng.random()
            if r >= min_distance:
                break
        out[k] = r * np.cos(phi), r * np.sin(phi)
    return out


def make_geometry(rng, n_users, n_irs, d_r):
    return Geometry(
        bs_position=np.zeros(2),
        irs_positions=ring_irs_positions(n_irs, d_r),
        user_positions=draw_user_positions(rng, n_users, d_r),
    )


def bearing(src, dst):
    d = np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)
    return float(np.arctan2(d[1], d[0]))


def steering_vector(n, theta, d_over_lambda=0.5):
    """ULA response ``[exp(j 2 pi m d/lambda sin theta)]`` for m = 0..n-1."""
    if n < 1:
        raise ValueError("steering vector needs n >= 1")
    m = np.arange(n)
    return np.exp(1j * 2.0 * np.pi * m * d_over_lambda * np.sin(theta))


def _cn(rng, shape):
    """Circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _rician(los, nlos, kappa):
    if np.isinf(kappa):
        return los.astype(np.complex128)
    return np.sqrt(kappa / (kappa + 1.0)) * los + np.sqrt(1.0 / (kappa + 1.0)) * nlos


def gen_direct_channel(rng, m):
    return _cn(rng, m)


def gen_bs_irs_channel(rng, params, m, n, theta_aoa, theta_aod):
    """Rician BS-IRS channel: rank-one LoS ``a_N(aoa) a_M(aod)^H`` plus CN(0,1) scatter."""
    los = np.outer(
        steering_vector(n, theta_aoa, params.d_over_lambda),
        steering_vector(m, theta_aod, params.d_over_lambda).conj(),
    )
    return _rician(los, _cn(rng, (n, m)), params.kappa_g)


def gen_irs_user_channel(rng, params, n, theta_kl):
    los = steering_vector(n, theta_kl, params.d_over_lambda)
    return _rician(los, _cn(rng, n), params.kappa_f)


def _check_distance(*ds):
    for d in ds:
        if not d > 0:
            raise ValueError(f"distance must be positive, got {d}")


def path_loss_direct(d, params):
    _check_distance(d)
    return params.c_nu * params.delta_b * params.delta_u * d ** (-params.alpha_direct)


def path_loss_bs_irs(d_bi, params):
    _check_distance(d_bi)
    return params.c_nu * params.zeta * d_bi ** (-params.alpha_reflect)


def path_loss_irs_user(d_iu, params):
    _check_distance(d_iu)
    return params.c_nu * params.zeta * d_iu ** (-params.alpha_reflect)


def path_loss_composite(d_bi, d_iu, params):
    """Reflected-link loss ``c_nu^2 zeta^2 (d_bi d_iu)^-alpha``."""
    _check_distance(d_bi, d_iu)
    return params.c_nu**2 * params.zeta**2 * (d_bi * d_iu) ** (-params.alpha_reflect)


def make_drop(rng, geometry, params, m, n):
    """Draw every channel of one drop and apply the square-root path losses.

    The composite loss of each reflected link is split between the shared
    BS-IRS matrix and the per-user IRS-user vector, one ``c_nu * zeta`` factor
    each, so ``L_bi * L_iu`` reproduces the composite formula exactly.
    Draw order: direct channels, then G_l for each IRS, then f_{k,l} row-major.
    """
    k_users, l_irs = geometry.n_users, geometry.n_irs
    bs = geometry.bs_position

    direct = np.empty((k_users, m), dtype=np.complex128)
    for k, d in enumerate(geometry.bs_user_distances()):
        direct[k] = np.sqrt(path_loss_direct(d, params)) * gen_direct_channel(rng, m)

    bs_irs = np.empty((l_irs, n, m), dtype=np.complex128)
    for l, d in enumerate(geometry.bs_irs_distances()):
        pos = geometry.irs_positions[l]
        g = gen_bs_irs_channel(rng, params, m, n, theta_aoa=bearing(pos, bs), theta_aod=bearing(bs, pos))
        bs_irs[l] = np.sqrt(path_loss_bs_irs(d, params)) * g

    d_iu = geometry.irs_user_distances()
    irs_user = np.empty((k_users, l_irs, n), dtype=np.complex128)
    for k in range(k_users):
        for l in range(l_irs):
            theta = bearing(geometry.irs_positions[l], geometry.user_positions[k])
            f = gen_irs_user_channel(rng, params, n, theta)
            irs_user[k, l] = np.sqrt(path_loss_irs_user(d_iu[k, l], params)) * f

    return ChannelSet(direct=direct, bs_irs=bs_irs, irs_user=irs_user)
