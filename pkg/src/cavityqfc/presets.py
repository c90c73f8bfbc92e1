"""Named parameter presets for the command-line workbench.

``1540`` is the default configuration (conversion of a 780 nm signal to
1540 nm with a 1581 nm pump); ``1522`` is the higher-finesse variant with
a 1600 nm pump; ``nv`` is the anti-resonant SPDC-noise design point with
the detection band at 1587 nm.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conversion import CavityParams, WavelengthConfig
from .noise import NoiseParams

__all__ = ["Preset", "PRESETS", "DEFAULT_PRESET"]


@dataclass(frozen=True)
class Preset:
    name: str
    cavity: CavityParams
    alpha_tilde_per_mW: float
    alpha_noise_cps_per_mW: float
    bpf_GHz: float
    t_circ: float
    wavelengths: WavelengthConfig | None = None
    B_ref_per_mW: float | None = None
    L_ref_mm: float | None = None
    broadening_MHz_per_mW: float | None = None

    def noise(self) -> NoiseParams:
        return NoiseParams.from_cavity(
            self.cavity, self.alpha_noise_cps_per_mW, self.alpha_tilde_per_mW
        )

    @property
    def alpha_MHz_per_mW(self) -> float:
        """Measured linewidth-broadening slope; falls back to the model value."""
        if self.broadening_MHz_per_mW is not None:
            return self.broadening_MHz_per_mW
        return self.alpha_tilde_per_mW * self.cavity.gamma_all_MHz


PRESETS: dict[str, Preset] = {
    "1540": Preset(
        name="1540",
        cavity=CavityParams(
            fsr_MHz=5200.0,
            gamma_all_MHz=70.4,
            gamma_r_ratio=0.7,
            length_mm=13.26,
            group_index=2.1739,
        ),
        alpha_tilde_per_mW=1.0 / 144.0,
        alpha_noise_cps_per_mW=230.0,
        bpf_GHz=3.79,
        t_circ=0.08,
        wavelengths=WavelengthConfig(signal_nm=780.0, pump_nm=1581.0, converted_nm=1540.0),
        B_ref_per_mW=17.3e-3,
        L_ref_mm=45.0,
        broadening_MHz_per_mW=0.49,
    ),
    "1522": Preset(
        name="1522",
        cavity=CavityParams(
            fsr_MHz=5200.0,
            gamma_all_MHz=34.4,
            gamma_r_ratio=0.7,
            length_mm=13.26,
            group_index=2.1739,
        ),
        alpha_tilde_per_mW=1.0 / 61.0,
        alpha_noise_cps_per_mW=85.0,
        bpf_GHz=3.88,
        t_circ=0.08,
        wavelengths=WavelengthConfig(signal_nm=780.0, pump_nm=1600.0, converted_nm=1522.0),
        B_ref_per_mW=3.6e-3,
        L_ref_mm=20.0,
        broadening_MHz_per_mW=0.56,
    ),
    # anti-resonant SPDC design point: cavity on the 3229 nm idler, finesse 45,
    # detection band 0.03 nm around 1587 nm
    "nv": Preset(
        name="nv",
        cavity=CavityParams(fsr_MHz=5000.0, gamma_all_MHz=5000.0 / 45.0, gamma_r_ratio=1.0),
        alpha_tilde_per_mW=1.0 / 144.0,
        alpha_noise_cps_per_mW=230.0,
        bpf_GHz=3.5712,
        t_circ=0.08,
    ),
}

DEFAULT_PRESET = "1540"
