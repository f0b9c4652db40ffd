"""Exact path simulation for fractional and grey Brownian motion.

Provides two exact fBm samplers (dense Cholesky and circulant embedding),
a one-sided stable sampler, the derived M-Wright subordinator sampler, and
their composition into grey Brownian paths (one subordinator draw per
path, multiplying the whole fBm trajectory).

All samplers are driven by an explicit RngSpec and are bit-for-bit
reproducible; batch helpers use one substream per path so that a batch
column equals the corresponding single-path call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import CapacityError, InputError, NumericalError, ParameterError
from .params import GreyParams

__all__ = [
    "RngSpec",
    "DyadicGrid",
    "UniformGrid",
    "Grid",
    "SamplePath",
    "fbm_covariance",
    "sample_fbm_cholesky",
    "sample_fbm_circulant",
    "sample_fbm_cholesky_batch",
    "sample_fbm_circulant_batch",
    "sample_one_sided_stable",
    "sample_mwright",
    "sample_ggbm",
    "sample_ggbm_batch",
]

CHOLESKY_MAX_POINTS = 2 ** 12 + 1
CIRCULANT_MAX_LEVEL = 24
# Circulant eigenvalues in (-tol, 0) are rounding debris and are clipped;
# anything more negative indicates an invalid embedding.
CIRCULANT_EIG_TOL = 1e-9


@dataclass(frozen=True)
class RngSpec:
    """Seed pair identifying one reproducible random substream."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.stream_id < 0:
            raise ParameterError("stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))

    def stream(self, offset: int) -> "RngSpec":
        return RngSpec(self.master_seed, self.stream_id + offset)


@dataclass(frozen=True)
class DyadicGrid:
    """Grid t_j = j / 2^level, j = 0..2^level."""

    level: int

    def __post_init__(self):
        if self.level < 0:
            raise ParameterError("dyadic level must be nonnegative")

    @property
    def n_increments(self) -> int:
        return 2 ** self.level

    def times(self) -> np.ndarray:
        m = self.n_increments
        return np.arange(m + 1) / m


@dataclass(frozen=True)
class UniformGrid:
    """Grid t_j = j / n, j = 0..n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("uniform grid size must be positive")

    @property
    def n_increments(self) -> int:
        return self.n

    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n


Grid = Union[DyadicGrid, UniformGrid]


@dataclass(frozen=True)
class SamplePath:
    """Values of one simulated path on a grid over [0, 1]."""

    grid: Grid
    values: np.ndarray
    params: Optional[GreyParams] = None
    seed: Optional[RngSpec] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or len(values) != self.grid.n_increments + 1:
            raise InputError(
                f"values length {values.shape} does not match grid with "
                f"{self.grid.n_increments} increments"
            )
        if values[0] != 0.0:
            raise InputError("paths start at zero by definition")
        if not np.all(np.isfinite(values)):
            raise InputError("path values must be finite")

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    @property
    def dyadic_level(self) -> int:
        if not isinstance(self.grid, DyadicGrid):
            raise InputError("operation requires a dyadic grid")
        return self.grid.level


def fbm_covariance(hurst: float, s: float, t: float) -> float:
    """Covariance (s^2H + t^2H - |t-s|^2H) / 2 of standard fBm."""
    if not (0.0 < hurst < 1.0):
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise ParameterError("times must lie in [0, 1]")
    h2 = 2.0 * hurst
    return 0.5 * (s ** h2 + t ** h2 - abs(t - s) ** h2)


def _covariance_matrix(hurst: float, times: np.ndarray) -> np.ndarray:
    h2 = 2.0 * hurst
    t = times[:, None]
    s = times[None, :]
    return 0.5 * (t ** h2 + s ** h2 - np.abs(t - s) ** h2)


def _cholesky_factor(hurst: float, times: np.ndarray) -> np.ndarray:
    cov = _covariance_matrix(hurst, times)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * float(np.max(np.diag(cov)))
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(len(times)))
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"fBm covariance not positive definite even with jitter (H={hurst})"
            ) from exc


def _check_cholesky_capacity(grid: Grid) -> None:
    if grid.n_increments + 1 > CHOLESKY_MAX_POINTS:
        raise CapacityError(
            f"Cholesky sampler capped at {CHOLESKY_MAX_POINTS} grid points, "
            f"requested {grid.n_increments + 1}"
        )


def sample_fbm_cholesky(hurst: float, grid: Grid, rng: RngSpec) -> SamplePath:
    """Exact fBm draw on an arbitrary grid by dense Cholesky factorization."""
    if not (0.0 < hurst < 1.0):
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    _check_cholesky_capacity(grid)
    values = _fbm_cholesky_values(hurst, grid, rng.generator(), 1)[:, 0]
    return SamplePath(grid=grid, values=values, params=GreyParams.fbm(hurst), seed=rng)


def _fbm_cholesky_values(
    hurst: float, grid: Grid, gen: np.random.Generator, n_paths: int
) -> np.ndarray:
    """(n_points, n_paths) matrix of fBm values; columns are paths."""
    times = grid.times()[1:]
    factor = _cholesky_factor(hurst, times)
    z = gen.standard_normal((len(times), n_paths))
    out = np.zeros((len(times) + 1, n_paths))
    out[1:] = factor @ z
    return out


def _fgn_circulant_eigenvalues(hurst: float, m: int) -> np.ndarray:
    h2 = 2.0 * hurst
    k = np.arange(m + 1, dtype=float)
    gamma = 0.5 * ((k + 1.0) ** h2 - 2.0 * k ** h2 + np.abs(k - 1.0) ** h2)
    c = np.concatenate([gamma[: m], gamma[m:m + 1], gamma[m - 1:0:-1]])
    eig = np.fft.fft(c).real
    mn = float(eig.min())
    if mn < -CIRCULANT_EIG_TOL:
        raise NumericalError(
            f"circulant embedding produced eigenvalue {mn:.3e} below tolerance "
            f"(H={hurst}, level m={m})"
        )
    return np.clip(eig, 0.0, None)


def _fgn_circulant_unit(
    eig: np.ndarray, gen: np.random.Generator, n_paths: int
) -> np.ndarray:
    """(m, n_paths) unit-spacing fGn draws from precomputed eigenvalues."""
    m = len(eig) // 2
    z = gen.standard_normal((2 * m, n_paths))
    v = np.empty((2 * m, n_paths), dtype=complex)
    v[0] = np.sqrt(eig[0]) * z[0]
    v[m] = np.sqrt(eig[m]) * z[1]
    a = z[2:m + 1]
    b = z[m + 1:2 * m]
    v[1:m] = np.sqrt(eig[1:m, None] / 2.0) * (a + 1j * b)
    v[m + 1:] = np.conj(v[1:m][::-1])
    return np.fft.fft(v, axis=0)[:m].real / math.sqrt(2 * m)


def sample_fbm_circulant(hurst: float, level: int, rng: RngSpec) -> SamplePath:
    """Exact fBm draw on the dyadic grid of the given level by circulant
    embedding of the stationary increment covariance (O(m log m))."""
    if not (0.0 < hurst < 1.0):
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    if level > CIRCULANT_MAX_LEVEL:
        raise CapacityError(f"circulant sampler capped at level {CIRCULANT_MAX_LEVEL}")
    grid = DyadicGrid(level)
    values = _fbm_circulant_values(hurst, level, rng.generator(), 1)[:, 0]
    return SamplePath(grid=grid, values=values, params=GreyParams.fbm(hurst), seed=rng)


def _fbm_circulant_values(
    hurst: float, level: int, gen: np.random.Generator, n_paths: int
) -> np.ndarray:
    m = 2 ** level
    eig = _fgn_circulant_eigenvalues(hurst, m)
    fgn = _fgn_circulant_unit(eig, gen, n_paths)
    fgn *= (1.0 / m) ** hurst
    out = np.zeros((m + 1, n_paths))
    np.cumsum(fgn, axis=0, out=out[1:])
    return out


def sample_fbm_cholesky_batch(
    hurst: float, grid: Grid, rng: RngSpec, n_paths: int
) -> np.ndarray:
    """(n_points, n_paths) fBm batch; column i uses substream rng.stream(i)."""
    if not (0.0 < hurst < 1.0):
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    _check_cholesky_capacity(grid)
    times = grid.times()[1:]
    factor = _cholesky_factor(hurst, times)
    z = _stacked_normals(rng, n_paths, len(times))
    out = np.zeros((len(times) + 1, n_paths))
    out[1:] = factor @ z
    return out


def sample_fbm_circulant_batch(
    hurst: float, level: int, rng: RngSpec, n_paths: int
) -> np.ndarray:
    if not (0.0 < hurst < 1.0):
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    if level > CIRCULANT_MAX_LEVEL:
        raise CapacityError(f"circulant sampler capped at level {CIRCULANT_MAX_LEVEL}")
    m = 2 ** level
    eig = _fgn_circulant_eigenvalues(hurst, m)
    z = _stacked_normals(rng, n_paths, 2 * m)
    v = np.empty((2 * m, n_paths), dtype=complex)
    v[0] = np.sqrt(eig[0]) * z[0]
    v[m] = np.sqrt(eig[m]) * z[1]
    v[1:m] = np.sqrt(eig[1:m, None] / 2.0) * (z[2:m + 1] + 1j * z[m + 1:2 * m])
    v[m + 1:] = np.conj(v[1:m][::-1])
    fgn = np.fft.fft(v, axis=0)[:m].real / math.sqrt(2 * m)
    fgn *= (1.0 / m) ** hurst
    out = np.zeros((m + 1, n_paths))
    np.cumsum(fgn, axis=0, out=out[1:])
    return out


def _stacked_normals(rng: RngSpec, n_paths: int, n_each: int) -> np.ndarray:
    """(n_each, n_paths) standard normals, column i from substream i."""
    out = np.empty((n_each, n_paths))
    for i in range(n_paths):
        out[:, i] = rng.stream(i).generator().standard_normal(n_each)
    return out


def _kanter_stable(beta: float, gen: np.random.Generator, size) -> np.ndarray:
    """One-sided beta-stable draws with Laplace transform exp(-s^beta)."""
    u = gen.uniform(0.0, math.pi, size)
    w = gen.standard_exponential(size)
    tiny = np.finfo(float).tiny
    u = np.clip(u, 1e-300, math.pi * (1.0 - 1e-16))
    w = np.maximum(w, tiny)
    ratio = (1.0 - beta) / beta
    a = (
        np.sin((1.0 - beta) * u)
        * np.sin(beta * u) ** (beta / (1.0 - beta))
        / np.sin(u) ** (1.0 / (1.0 - beta))
    )
    return (a / w) ** ratio


def sample_one_sided_stable(beta: float, rng: RngSpec, size: Optional[int] = None):
    """Strictly positive stable draw(s) with E[exp(-s S)] = exp(-s^beta).

    Kanter's exact representation: S = (a(U)/W)^((1-beta)/beta) with U
    uniform on (0, pi) and W unit exponential.
    """
    if not (0.0 < beta < 1.0):
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    gen = rng.generator()
    if size is None:
        return float(_kanter_stable(beta, gen, None))
    return _kanter_stable(beta, gen, size)


def sample_mwright(beta: float, rng: RngSpec, size: Optional[int] = None):
    """Draw(s) of the M-Wright subordinator Y: S^(-beta) for one-sided
    stable S, which has density M_beta; beta = 1 is the unit point mass."""
    if not (0.0 < beta <= 1.0):
        raise ParameterError(f"beta must lie in (0, 1], got {beta}")
    if beta == 1.0:
        return 1.0 if size is None else np.ones(size)
    gen = rng.generator()
    if size is None:
        return float(_kanter_stable(beta, gen, None) ** -beta)
    return _kanter_stable(beta, gen, size) ** -beta


def _mwright_from_generator(beta: float, gen: np.random.Generator) -> float:
    # beta = 1 consumes no randomness, so the ggBm path then equals the
    # plain fBm path driven by the same substream.
    if beta == 1.0:
        return 1.0
    return float(_kanter_stable(beta, gen, None) ** -beta)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def sample_ggbm(params: GreyParams, grid: Grid, rng: RngSpec) -> SamplePath:
    """Grey Brownian path: sqrt(Y) times a standard fBm path with
    H = alpha/2, Y drawn once per path from the M-Wright law.

    Dyadic grids (and uniform grids whose size is a power of two) use the
    circulant sampler; other uniform grids fall back to Cholesky and
    inherit its size cap.  The subordinator is drawn before the Gaussian
    block, from the same substream.
    """
    gen = rng.generator()
    y = _mwright_from_generator(params.beta, gen)
    hurst = params.hurst
    if isinstance(grid, DyadicGrid):
        values = _fbm_circulant_values(hurst, grid.level, gen, 1)[:, 0]
    elif _is_power_of_two(grid.n):
        level = grid.n.bit_length() - 1
        if level > CIRCULANT_MAX_LEVEL:
            raise CapacityError(f"grid size 2^{level} exceeds circulant cap")
        values = _fbm_circulant_values(hurst, level, gen, 1)[:, 0]
    else:
        _check_cholesky_capacity(grid)
        values = _fbm_cholesky_values(hurst, grid, gen, 1)[:, 0]
    return SamplePath(grid=grid, values=math.sqrt(y) * values, params=params, seed=rng)


def sample_ggbm_batch(
    params: GreyParams, grid: Grid, rng: RngSpec, n_paths: int
) -> np.ndarray:
    """(n_points, n_paths) grey Brownian batch, one substream per path;
    column i reproduces sample_ggbm(params, grid, rng.stream(i))."""
    hurst = params.hurst
    use_circulant = isinstance(grid, DyadicGrid) or _is_power_of_two(grid.n)
    if use_circulant:
        level = grid.level if isinstance(grid, DyadicGrid) else grid.n.bit_length() - 1
        if level > CIRCULANT_MAX_LEVEL:
            raise CapacityError(f"grid size 2^{level} exceeds circulant cap")
        m = 2 ** level
        eig = _fgn_circulant_eigenvalues(hurst, m)
    else:
        _check_cholesky_capacity(grid)
        times = grid.times()[1:]
        factor = _cholesky_factor(hurst, times)
        m = len(times)

    n_points = grid.n_increments + 1
    out = np.empty((n_points, n_paths))
    ys = np.empty(n_paths)
    if use_circulant:
        z = np.empty((2 * m, n_paths))
    else:
        z = np.empty((m, n_paths))
    for i in range(n_paths):
        gen = rng.stream(i).generator()
        ys[i] = _mwright_from_generator(params.beta, gen)
        z[:, i] = gen.standard_normal(z.shape[0])
    if use_circulant:
        v = np.empty((2 * m, n_paths), dtype=complex)
        v[0] = np.sqrt(eig[0]) * z[0]
        v[m] = np.sqrt(eig[m]) * z[1]
        v[1:m] = np.sqrt(eig[1:m, None] / 2.0) * (z[2:m + 1] + 1j * z[m + 1:2 * m])
        v[m + 1:] = np.conj(v[1:m][::-1])
        fgn = np.fft.fft(v, axis=0)[:m].real / math.sqrt(2 * m)
        fgn *= (1.0 / m) ** hurst
        out[0] = 0.0
        np.cumsum(fgn, axis=0, out=out[1:])
    else:
        out[0] = 0.0
        out[1:] = factor @ z
    out *= np.sqrt(ys)[None, :]
    return out
