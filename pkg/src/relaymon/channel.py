"""Channel primitives: complex Gaussian draws, geometry, path loss and projections.

Conventions
-----------
Row-vector links (R->D and E->D) are stored as column vectors, so a product
written ``h5 w`` in row form is evaluated here as ``np.vdot(h5, w)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateGeometryError(ValueError):
    """Two nodes share a position, so a link distance is zero."""


class RankDeficiencyError(np.linalg.LinAlgError):
    """The projection basis has linearly dependent columns."""


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of one scenario.

    Powers and noise are in watts, distances in km. ``ref_gain`` is the
    large-scale power gain at 1 km, so every ``d**tau`` attenuation term is
    evaluated as ``d**tau / ref_gain``. With the default of 1.0 the path loss
    is exactly ``d**tau``.
    """

    ps_w: float
    pr_w: float
    p_max_w: float
    n0_w: float
    tau: float = 3.0
    n_relay: int = 4
    m_monitor: int = 4
    ref_gain: float = 1.0

    def __post_init__(self):
        checks = [
            ("ps_w", self.ps_w > 0),
            ("pr_w", self.pr_w > 0),
            ("p_max_w", self.p_max_w >= 0),
            ("n0_w", self.n0_w > 0),
            ("tau", self.tau >= 2),
            ("n_relay", self.n_relay >= 1),
            ("m_monitor", self.m_monitor >= 1),
            ("ref_gain", self.ref_gain > 0),
        ]
        for name, ok in checks:
            value = getattr(self, name)
            if not ok or not np.isfinite(value):
                raise ValueError(f"invalid {name}: {value!r}")

    def path_loss(self, d):
        return path_gain_denominator(d, self.tau) / self.ref_gain


@dataclass(frozen=True)
class Topology:
    """2-D positions (km) of source S, relay R, destination D and monitor E."""

    pos_s: tuple[float, float] = (0.0, 0.0)
    pos_r: tuple[float, float] = (2.0, 0.0)
    pos_d: tuple[float, float] = (4.0, 0.0)
    pos_e: tuple[float, float] = (2.0, 3.0)

    def with_monitor(self, x: float, y: float) -> "Topology":
        return Topology(self.pos_s, self.pos_r, self.pos_d, (float(x), float(y)))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One quasi-static draw of the six small-scale fading links.

    ``h1`` S->R (N,), ``h2`` S->D scalar, ``h3`` S->E (M,), ``H4`` R->E (M, N),
    ``h5`` R->D (N,), ``h6`` E->D (M,). ``d`` holds the six link distances in
    the order S->R, S->D, S->E, R->E, R->D, E->D.
    """

    h1: np.ndarray
    h2: complex
    h3: np.ndarray
    H4: np.ndarray
    h5: np.ndarray
    h6: np.ndarray
    d: tuple[float, float, float, float, float, float]

    @property
    def n_relay(self) -> int:
        return self.h1.shape[0]

    @property
    def m_monitor(self) -> int:
        return self.h3.shape[0]

    def with_distances(self, d) -> "ChannelRealization":
        return ChannelRealization(self.h1, self.h2, self.h3, self.H4, self.h5, self.h6, tuple(d))

    def check_shapes(self, params: SystemParams):
        n, m = params.n_relay, params.m_monitor
        expected = {"h1": (n,), "h3": (m,), "H4": (m, n), "h5": (n,), "h6": (m,)}
        for name, shape in expected.items():
            got = np.shape(getattr(self, name))
            if got != shape:
                raise ValueError(f"{name} has shape {got}, expected {shape}")


def derive_seed(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    """Seed for one trial; independent of the order in which trials run."""
    return np.random.SeedSequence([int(master_seed) & (2**64 - 1), int(trial_index)])


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, trial_index)))


def sample_cn01(rng: np.random.Generator, size=None):
    """Draw CN(0, 1) samples: real and imaginary parts are N(0, 1/2).

    The normals come from ``Generator.standard_normal`` (ziggurat on PCG64),
    which is bitwise stable across platforms for a fixed seed. Real parts are
    drawn before imaginary parts.
    """
    if size is None:
        re, im = rng.standard_normal(2)
        return complex(re, im) / np.sqrt(2.0)
    shape = (size,) if np.isscalar(size) else tuple(size)
    z = rng.standard_normal((2,) + shape)
    return (z[0] + 1j * z[1]) / np.sqrt(2.0)


def _dist(a, b) -> float:
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def distances(topology: Topology) -> tuple[float, float, float, float, float, float]:
    """Link distances S->R, S->D, S->E, R->E, R->D, E->D."""
    s, r, d, e = topology.pos_s, topology.pos_r, topology.pos_d, topology.pos_e
    out = (_dist(s, r), _dist(s, d), _dist(s, e), _dist(r, e), _dist(r, d), _dist(e, d))
    names = ("S-R", "S-D", "S-E", "R-E", "R-D", "E-D")
    for name, value in zip(names, out):
        if not value > 0:
            raise DegenerateGeometryError(f"nodes of link {name} are co-located")
    return out


def path_gain_denominator(d, tau):
    """Large-scale attenuation ``d**tau`` dividing every received power."""
    return np.power(d, tau)


def sample_channels(params: SystemParams, topology: Topology, rng: np.random.Generator) -> ChannelRealization:
    d = distances(topology)
    return sample_fading(params, rng, d)


def sample_fading(params: SystemParams, rng: np.random.Generator, d) -> ChannelRealization:
    """Draw the fading links in a fixed order: h1, h2, h3, H4, h5, h6."""
    n, m = params.n_relay, params.m_monitor
    h1 = sample_cn01(rng, n)
    h2 = sample_cn01(rng)
    h3 = sample_cn01(rng, m)
    H4 = sample_cn01(rng, (m, n))
    h5 = sample_cn01(rng, n)
    h6 = sample_cn01(rng, m)
    return ChannelRealization(h1, h2, h3, H4, h5, h6, tuple(float(x) for x in d))


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    return X[:, None] if X.ndim == 1 else X


def project(X, v) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the column space of ``X``.

    Parameters
    ----------
    X : array_like, shape (m,) or (m, k)
        Basis vector or matrix with full column rank.
    v : array_like, shape (m,)

    Raises
    ------
    RankDeficiencyError
        If ``X^H X`` is singular.
    """
    X = _as_matrix(X)
    v = np.asarray(v, dtype=complex)
    gram = X.conj().T @ X
    # relative conditioning guard; an exactly zero column gives cond = inf
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) > 1e14:
        raise RankDeficiencyError("projection basis is rank deficient")
    coeff = np.linalg.solve(gram, X.conj().T @ v)
    return X @ coeff


def project_orth(X, v) -> np.ndarray:
    """Projection of ``v`` onto the orthogonal complement of span(X)."""
    v = np.asarray(v, dtype=complex)
    return v - project(X, v)
