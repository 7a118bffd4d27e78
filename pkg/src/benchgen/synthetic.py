"""
Synthetic benchmarks: y = X beta_true + xi with AR(1)-correlated Gaussian
features and noise rescaled to an exact signal-to-noise ratio.

Randomness comes from numpy's PCG64 bit generator. SeedSequence(seed) is
spawned into two child streams: the first draws X, the second draws the noise
direction. The support of beta_true is deterministic and uses no randomness.
"""
from __future__ import annotations

import numpy as np

from src.benchgen.benchmark import Benchmark
from src.benchgen.bounds import BoundsKind, compute_bounds
from src.benchgen.fidelity import FidelitySchedule
from src.benchgen.synthetic_spec import PRESETS, SyntheticSpec
from src.config.logging import get_logger
from src.criteria.cv import CvConfig
from src.lasso.dataset import Dataset

logger = get_logger(__name__)


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    x_seq, noise_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(x_seq)), np.random.Generator(np.random.PCG64(noise_seq))


def ar1_design(n: int, d: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """Rows i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|, built column by column."""
    eps = rng.standard_normal((n, d))
    X = np.empty((n, d), order="F")
    X[:, 0] = eps[:, 0]
    innovation = np.sqrt(1.0 - rho ** 2)
    for j in range(1, d):
        X[:, j] = rho * X[:, j - 1] + innovation * eps[:, j]
    return X


def true_coefficients(d: int, d_e: int) -> np.ndarray:
    """
    d_e nonzeros at positions 0, s, 2s, ... with s = d // d_e. Magnitudes are
    1, (d_e-1)/d_e, ..., 1/d_e and signs alternate starting positive.
    """
    beta = np.zeros(d)
    step = d // d_e
    k = np.arange(d_e)
    beta[k * step] = np.where(k % 2 == 0, 1.0, -1.0) * (d_e - k) / d_e
    return beta


def make_synthetic(
    spec: SyntheticSpec,
    name: str | None = None,
    criterion: CvConfig | None = None,
    fidelity: FidelitySchedule | None = None,
) -> Benchmark:
    rng_x, rng_noise = _streams(spec.seed)
    X = ar1_design(spec.n, spec.d, spec.rho, rng_x)
    beta_true = true_coefficients(spec.d, spec.d_e)

    signal = X @ beta_true
    direction = rng_noise.standard_normal(spec.n)
    xi = direction * (np.linalg.norm(signal) / (spec.snr * np.linalg.norm(direction)))
    y = signal + xi

    name = name or f"synthetic_n{spec.n}_d{spec.d}_de{spec.d_e}"
    dataset = Dataset(X=X, y=y, name=name)
    lam_min, lam_max = compute_bounds(dataset, BoundsKind.SYNTHETIC)
    logger.info(
        "built synthetic benchmark %s (n=%d, d=%d, d_e=%d, snr=%g, seed=%d)",
        name, spec.n, spec.d, spec.d_e, spec.snr, spec.seed,
    )
    return Benchmark(
        dataset=dataset,
        lam_min=lam_min,
        lam_max=lam_max,
        name=name,
        bounds_kind=BoundsKind.SYNTHETIC,
        criterion=criterion or CvConfig(),
        fidelity=fidelity or FidelitySchedule(),
        beta_true=beta_true,
        spec=spec,
    )


def make_preset(name: str, noise: bool = False, seed: int | None = None) -> Benchmark:
    """One of synt_simple / synt_medium / synt_high / synt_hard, noiseless (SNR 10) or noisy (SNR 3)."""
    kwargs = {} if seed is None else {"seed": seed}
    spec = SyntheticSpec.preset(name, noise=noise, **kwargs)
    return make_synthetic(spec, name=f"{name}_noisy" if noise else name)


PRESET_NAMES = tuple(PRESETS)
