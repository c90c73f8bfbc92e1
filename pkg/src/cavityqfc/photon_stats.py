"""Second-order correlation through conversion and noise admixture.

The analytic chain propagates a heralded source's cross-correlation
``g2_in`` through the converter: mixing the converted signal with
uncorrelated Poissonian noise at intensity ratio ``zeta`` degrades it to

    g2_out = (g2_in * zeta + 1) / (zeta + 1),

and removing the cavity divides ``zeta`` by the conversion-enhancement
factor.  A Monte Carlo coincidence simulator validates the chain: each
time bin draws a pair number from a two-mode thermal distribution
``P(n) = mu^n / (1+mu)^(n+1)`` (cross-correlation ``2 + 1/mu`` in the
low-efficiency limit), detectors click with per-photon efficiencies, and
independent Poisson noise contaminates the signal arm.

The per-bin inner loops run on a compiled kernel when available and on a
NumPy fallback otherwise (see ``cavityqfc._mc``); both consume identical
uniform-variate streams, so histograms are reproducible bit for bit for a
given ``(seed, shard plan)`` regardless of backend or worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _mc
from .conversion import ConversionResponse
from .errors import CoverageError
from .fitting import ScanSeries

__all__ = [
    "G2Record",
    "SourceModel",
    "CoincidenceHistogram",
    "g2_out",
    "zeta_from_g2",
    "predict_nocavity_g2",
    "thermal_source_g2",
    "noise_rate_for_intensity_ratio",
    "flat_top_spectrum",
    "lorentzian_spectrum",
    "gaussian_spectrum",
    "broadband_conversion_efficiency",
    "simulate_coincidences",
    "g2_from_histogram",
    "mc_backend_name",
]

_CHUNK = 1 << 20
_LOW_STATISTICS_BINS = 10_000


def mc_backend_name() -> str:
    """Which Monte Carlo backend is active: ``"cython"`` or ``"numpy"``."""
    return _mc.BACKEND_NAME


@dataclass(frozen=True)
class G2Record:
    """A second-order cross-correlation estimate."""

    g2: float
    stderr: float
    window_ns: float
    resolution_ns: float

    def __post_init__(self):
        if self.g2 < 0:
            raise ValueError("g2 must be non-negative")
        if self.stderr < 0:
            raise ValueError("stderr must be non-negative")

    @property
    def nonclassical(self) -> bool:
        """True when the estimate exceeds the classical bound 2 by its stderr."""
        return self.g2 - self.stderr > 2.0


@dataclass(frozen=True)
class SourceModel:
    """Two-mode thermal pair source with lossy detection and signal noise."""

    mean_pairs_per_bin: float
    herald_efficiency: float
    signal_efficiency: float
    noise_rate_per_bin: float = 0.0
    bins: int = 10_000_000
    seed: int = 0

    def __post_init__(self):
        if self.mean_pairs_per_bin <= 0:
            raise ValueError("mean_pairs_per_bin must be positive")
        for name in ("herald_efficiency", "signal_efficiency"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.noise_rate_per_bin < 0:
            raise ValueError("noise_rate_per_bin must be non-negative")
        if self.bins < 1:
            raise ValueError("bins must be positive")


@dataclass(frozen=True)
class CoincidenceHistogram:
    """Delay-binned coincidence counts."""

    delay_bins_ns: np.ndarray
    counts: np.ndarray
    accidental_level: float
    resolution_ns: float
    low_statistics: bool = False

    def __post_init__(self):
        if len(self.delay_bins_ns) != len(self.counts):
            raise ValueError("delay axis and counts must have equal length")
        if np.any(np.asarray(self.counts) < 0):
            raise ValueError("counts must be non-negative")


def g2_out(g2_in: float, zeta: float) -> float:
    """Cross-correlation after admixing Poissonian noise at ratio ``zeta``.

    Monotone in ``zeta``, interpolating between 1 (pure noise) and
    ``g2_in`` (no noise).
    """
    if g2_in < 1.0:
        raise ValueError("g2_in must be at least 1")
    if zeta < 0.0:
        raise ValueError("zeta must be non-negative")
    if np.isinf(zeta):
        return g2_in
    return (g2_in * zeta + 1.0) / (zeta + 1.0)


def zeta_from_g2(g2_in: float, g2_out_value: float) -> float:
    """Signal-to-noise intensity ratio implied by the observed degradation.

    Exact inverse of :func:`g2_out`: ``(g2_out - 1) / (g2_in - g2_out)``.
    """
    if not 1.0 < g2_out_value < g2_in:
        raise ValueError("need 1 < g2_out < g2_in to infer an intensity ratio")
    return (g2_out_value - 1.0) / (g2_in - g2_out_value)


def predict_nocavity_g2(g2_in: float, zeta: float, enhancement: float) -> float:
    """Cross-correlation the same source would show without the cavity.

    Removing the cavity lowers the conversion efficiency, hence the SNR
    and ``zeta``, by the enhancement factor while the noise is unchanged.
    """
    if enhancement < 1.0:
        raise ValueError("enhancement must be at least 1")
    return g2_out(g2_in, zeta / enhancement)


def thermal_source_g2(
    mu: float, eta_herald: float, eta_signal: float, noise_rate_per_bin: float = 0.0
) -> float:
    """Exact click-level cross-correlation of the simulated source model.

    Uses the geometric moment ``E[x^n] = 1/(1 + mu*(1-x))`` of the thermal
    pair number.  Approaches ``2 + 1/mu`` as the efficiencies vanish; at
    finite efficiency the value is lower, which is why quantitative Monte
    Carlo checks should compare against this expression.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    a = mu * eta_herald
    b = mu * eta_signal
    c = mu * (eta_herald + eta_signal - eta_herald * eta_signal)
    keep = np.exp(-noise_rate_per_bin)
    p_h = a / (1.0 + a)
    p_s = (b - np.expm1(-noise_rate_per_bin)) / (1.0 + b)
    # joint probability arranged as a difference of same-order terms so the
    # eta -> 0 limit stays accurate in floating point
    p_hs = p_h - keep * mu * eta_herald * (1.0 - eta_signal) / ((1.0 + b) * (1.0 + c))
    return p_hs / (p_h * p_s)


def noise_rate_for_intensity_ratio(mu: float, eta_signal: float, zeta: float) -> float:
    """Poisson noise mean per bin giving signal/noise ratio ``zeta``.

    The signal-arm click rate without noise is ``mu*eta/(1 + mu*eta)``;
    the returned ``nu`` makes the standalone noise click rate
    ``1 - exp(-nu)`` smaller by the factor ``zeta``.
    """
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    signal_rate = mu * eta_signal / (1.0 + mu * eta_signal)
    noise_rate = signal_rate / zeta
    if noise_rate >= 1.0:
        raise ValueError("requested zeta implies a noise click rate of one or more")
    return float(-np.log1p(-noise_rate))


def _normalized_spectrum(offsets_GHz: np.ndarray, weights: np.ndarray) -> ScanSeries:
    norm = np.trapezoid(weights, offsets_GHz)
    return ScanSeries(offsets_GHz, weights / norm, unit="GHz")


def flat_top_spectrum(width_GHz: float, samples: int = 4001) -> ScanSeries:
    """Unit-area rectangular photon spectrum of full width ``width_GHz``."""
    if width_GHz <= 0:
        raise ValueError("width_GHz must be positive")
    offsets = np.linspace(-width_GHz / 2.0, width_GHz / 2.0, samples)
    return _normalized_spectrum(offsets, np.ones_like(offsets))


def lorentzian_spectrum(fwhm_GHz: float, span_GHz: float, samples: int = 4001) -> ScanSeries:
    """Unit-area Lorentzian photon spectrum sampled over ``span_GHz``."""
    if fwhm_GHz <= 0 or span_GHz <= 0:
        raise ValueError("fwhm_GHz and span_GHz must be positive")
    offsets = np.linspace(-span_GHz / 2.0, span_GHz / 2.0, samples)
    hwhm = fwhm_GHz / 2.0
    return _normalized_spectrum(offsets, 1.0 / (offsets**2 + hwhm**2))


def gaussian_spectrum(fwhm_GHz: float, span_GHz: float, samples: int = 4001) -> ScanSeries:
    """Unit-area Gaussian photon spectrum sampled over ``span_GHz``."""
    if fwhm_GHz <= 0 or span_GHz <= 0:
        raise ValueError("fwhm_GHz and span_GHz must be positive")
    offsets = np.linspace(-span_GHz / 2.0, span_GHz / 2.0, samples)
    sigma = fwhm_GHz / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    return _normalized_spectrum(offsets, np.exp(-0.5 * (offsets / sigma) ** 2))


def broadband_conversion_efficiency(
    photon_spectrum: ScanSeries, response: ConversionResponse
) -> float:
    """Conversion efficiency of a photon wider than the cavity line.

    Trapezoidal quadrature of ``S(d) * |r_rs(d)|^2`` over the photon
    spectrum (abscissa in GHz offset from resonance, unit area).  The
    sampled response must cover the photon's support.
    """
    if photon_spectrum.unit != "GHz":
        raise ValueError("photon spectrum abscissa must be tagged GHz")
    offsets_MHz = photon_spectrum.abscissa * 1e3
    grid = response.detunings_MHz
    if offsets_MHz[0] < grid.min() - 1e-9 or offsets_MHz[-1] > grid.max() + 1e-9:
        raise CoverageError("response grid narrower than the photon spectrum")
    area = np.trapezoid(photon_spectrum.values, photon_spectrum.abscissa)
    if abs(area - 1.0) > 1e-6:
        raise ValueError(f"photon spectrum must have unit area, got {area:.6g}")
    efficiency = np.interp(offsets_MHz, grid, np.abs(response.r_rs) ** 2)
    return float(np.trapezoid(photon_spectrum.values * efficiency, photon_spectrum.abscissa))


def _click_tables(model: SourceModel):
    """Pair-number CDF and per-n click probabilities for the kernels."""
    mu = model.mean_pairs_per_bin
    ratio = mu / (1.0 + mu)
    # truncate where the remaining tail is far below one draw in 1e7
    n_max = max(8, int(np.ceil(np.log(1e-18) / np.log(ratio))))
    n = np.arange(n_max + 1, dtype=float)
    pair_cdf = 1.0 - ratio ** (n[:-1] + 1.0)  # P(N <= j), j = 0..n_max-1
    p_herald = 1.0 - (1.0 - model.herald_efficiency) ** n
    p_signal = 1.0 - (1.0 - model.signal_efficiency) ** n * np.exp(
        -model.noise_rate_per_bin
    )
    return pair_cdf, p_herald, p_signal


def _shard_bounds(bins: int, n_shards: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, bins, n_shards + 1).astype(int)
    return [(int(edges[i]), int(edges[i + 1])) for i in range(n_shards)]


def simulate_coincidences(
    model: SourceModel,
    delay_span_bins: int = 30,
    resolution_ns: float = 0.8,
    n_shards: int = 1,
    workers: int = 1,
) -> CoincidenceHistogram:
    """Simulate a coincidence histogram over delays ``[-k, +k]`` bins.

    Time bins are split into ``n_shards`` contiguous blocks, each driven
    by an independent random stream spawned from ``(seed, shard index)``.
    Click generation may run on ``workers`` threads; the merged histogram
    is identical to the single-worker result for the same shard plan
    because each block's clicks depend only on its own stream.
    """
    if delay_span_bins < 1:
        raise ValueError("delay_span_bins must be positive")
    if n_shards < 1 or workers < 1:
        raise ValueError("n_shards and workers must be positive")
    bins = int(model.bins)
    pair_cdf, p_herald, p_signal = _click_tables(model)
    herald = np.empty(bins, dtype=np.uint8)
    signal = np.empty(bins, dtype=np.uint8)
    streams = np.random.SeedSequence(model.seed).spawn(n_shards)
    bounds = _shard_bounds(bins, n_shards)

    def fill(shard: int) -> None:
        rng = np.random.default_rng(streams[shard])
        start, stop = bounds[shard]
        for lo in range(start, stop, _CHUNK):
            hi = min(lo + _CHUNK, stop)
            m = hi - lo
            u_pairs = rng.random(m)
            u_herald = rng.random(m)
            u_signal = rng.random(m)
            herald[lo:hi], signal[lo:hi] = _mc.thermal_clicks(
                u_pairs, u_herald, u_signal, pair_cdf, p_herald, p_signal
            )

    if workers > 1 and n_shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(n_shards)))
    else:
        for shard in range(n_shards):
            fill(shard)

    counts = _mc.delay_histogram(herald, signal, int(delay_span_bins))
    k = int(delay_span_bins)
    delays = np.arange(-k, k + 1, dtype=float) * resolution_ns
    off_peak = np.concatenate([counts[:k], counts[k + 1 :]])
    return CoincidenceHistogram(
        delay_bins_ns=delays,
        counts=counts,
        accidental_level=float(off_peak.mean()),
        resolution_ns=resolution_ns,
        low_statistics=bins < _LOW_STATISTICS_BINS,
    )


def g2_from_histogram(histogram: CoincidenceHistogram, window_ns: float) -> G2Record:
    """Estimate g2 as peak-window counts over the accidental expectation.

    The window must span an integer number of delay bins; it is placed on
    the contiguous stretch with the highest total.  The standard error
    propagates Poisson fluctuations of both the window and the off-window
    counts.  Widening the window beyond the correlation peak dilutes the
    estimate toward one.
    """
    m_float = window_ns / histogram.resolution_ns
    m = int(round(m_float))
    if m < 1 or abs(m_float - m) > 1e-9:
        raise ValueError("window_ns must be a positive integer multiple of the resolution")
    counts = np.asarray(histogram.counts, dtype=float)
    n_bins = len(counts)
    if n_bins - m < 10:
        raise ValueError("need at least 10 off-window bins for the accidental level")
    window_sums = np.convolve(counts, np.ones(m), mode="valid")
    start = int(np.argmax(window_sums))
    peak = float(window_sums[start])
    off = np.concatenate([counts[:start], counts[start + m :]])
    off_total = float(off.sum())
    if off_total == 0:
        raise ValueError("zero accidental counts: g2 ratio undefined")
    accidental_per_window = off.mean() * m
    g2 = peak / accidental_per_window
    stderr = g2 * np.sqrt(1.0 / max(peak, 1.0) + 1.0 / off_total)
    return G2Record(
        g2=float(g2),
        stderr=float(stderr),
        window_ns=float(window_ns),
        resolution_ns=histogram.resolution_ns,
    )
