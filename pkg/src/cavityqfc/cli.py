"""Command-line workbench.

Subcommands
-----------
model     sampled transmission/conversion spectra for a list of pump powers
fit       fit a scan file: resonance width vs power, or saturating noise
snr       normalized SNR curves, the configuration table, or the minimum
          finesse for cavity dominance
fsr       free-spectral-range extraction from a periodic scan file
generate  deterministic synthetic datasets (fwhm, noise, comb, coincidence)
g2        analytic correlation chain and/or the Monte Carlo estimate
design    anti-resonant SPDC-noise suppression report

Common flags: ``--input``, ``--output`` (default stdout), ``--format
{csv,json}``, ``--seed`` (default 1234), ``--preset {1540,1522,nv}`` and
repeatable ``--param key=value`` overrides, validated per subcommand.

Exit codes: 0 success, 2 usage error, 3 parse error, 4 domain error,
5 numeric failure, 6 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import conversion, fitting, noise, photon_stats, snr
from .dataio import fmt, read_scan_csv, render_csv, render_json, write_text
from .errors import (
    NoPeriodicity,
    NumericFailure,
    ParseError,
    SamplingError,
    ShapeError,
    WorkbenchError,
)
from .presets import DEFAULT_PRESET, PRESETS

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4
EXIT_NUMERIC = 5
EXIT_IO = 6

DEFAULT_SEED = 1234


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


_SCHEMAS: dict[str, dict[str, type | object]] = {
    "model": {"powers": _floats, "span_MHz": float, "samples": int},
    "fit": {"model": str, "gamma_r_ratio": float},
    "snr": {"mode": str, "finesse": _floats, "fc": float, "fs": float,
            "grid": int, "tolerance": float},
    "fsr": {},
    "generate": {
        "model": str, "points": int, "pmax_mW": float,
        "alpha_MHz_per_mW": float, "gamma_all_MHz": float,
        "alpha_noise_cps_per_mW": float, "alpha_tilde_per_mW": float,
        "gamma_r_ratio": float, "noise": str, "noise_frac": float,
        "span_nm": float, "step_nm": float, "bpf_nm": float,
        "power_mW": float, "target_mean": float,
        "mu": float, "eta_herald": float, "eta_signal": float,
        "nu": float, "zeta": float, "bins": int, "span_bins": int,
        "resolution_ns": float,
    },
    "g2": {
        "g2_in": float, "zeta": float, "enhancement": float,
        "g2_out_obs": float, "mc": int,
        "mu": float, "eta_herald": float, "eta_signal": float, "nu": float,
        "bins": int, "span_bins": int, "resolution_ns": float,
        "window_ns": float, "shards": int, "workers": int,
    },
    "design": {"finesse": float, "fsr_GHz": float, "bpf_nm": float, "center_nm": float},
}


def _parse_params(command: str, pairs: list[str]) -> dict:
    schema = _SCHEMAS[command]
    params: dict = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {pair!r}")
        key = key.strip()
        if key not in schema:
            raise UsageError(
                f"unknown parameter {key!r} for {command!r}; "
                f"valid: {', '.join(sorted(schema))}"
            )
        try:
            params[key] = schema[key](value.strip())
        except ValueError:
            raise UsageError(f"cannot parse --param {pair!r}") from None
    return params


def _render_kv_csv(pairs: dict, provenance: dict | None = None) -> str:
    lines = [f"# {k} = {v}" for k, v in (provenance or {}).items()]
    lines.append("key,value")
    for key, value in pairs.items():
        lines.append(f"{key},{fmt(value)}")
    return "\n".join(lines) + "\n"


def _flatten(payload: dict, prefix: str = "") -> dict:
    flat: dict = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, prefix=f"{name}."))
        elif np.isscalar(value) or isinstance(value, bool):
            flat[name] = value
    return flat


def _emit(args, payload: dict, csv_columns=None, provenance=None) -> str:
    """JSON by default; CSV renders columns when given, else key/value rows."""
    if args.format == "json":
        return render_json(payload)
    if csv_columns is not None:
        return render_csv(csv_columns, provenance)
    return _render_kv_csv(_flatten(payload), provenance)


def cmd_model(args, params) -> str:
    preset = PRESETS[args.preset]
    cav = preset.cavity
    powers = params.get("powers", [33.3, 94.0, 148.0])
    samples = params.get("samples", 1201)
    if samples < 16:
        raise ValueError("samples must be at least 16")
    widest = cav.gamma_all_MHz * (1.0 + preset.alpha_tilde_per_mW * max(max(powers), 0.0))
    span = params.get("span_MHz", 8.0 * widest)
    grid = np.linspace(-span / 2.0, span / 2.0, samples)
    blocks = []
    for power in powers:
        drive = conversion.PumpDrive(power, preset.alpha_tilde_per_mW)
        response = conversion.sample_response(cav, drive, grid)
        blocks.append((power, np.abs(response.t_ss) ** 2, np.abs(response.r_rs) ** 2))
    if args.format == "json":
        return render_json({
            "preset": preset.name,
            "detunings_MHz": grid,
            "spectra": [
                {"power_mW": p, "transmission": t, "conversion": r}
                for p, t, r in blocks
            ],
        })
    power_col = np.concatenate([np.full(samples, p) for p, _, _ in blocks])
    columns = [
        ("power_mW", power_col),
        ("detuning_MHz", np.tile(grid, len(blocks))),
        ("transmission", np.concatenate([t for _, t, _ in blocks])),
        ("conversion", np.concatenate([r for _, _, r in blocks])),
    ]
    return render_csv(columns, {"command": "model", "preset": preset.name})


def cmd_fit(args, params) -> str:
    if not args.input:
        raise UsageError("fit requires --input")
    model = params.get("model")
    if model not in ("fwhm", "noise"):
        raise UsageError("fit requires --param model=fwhm or model=noise")
    series, provenance = read_scan_csv(args.input)
    if model == "fwhm":
        result = fitting.fit_linear(series)
        parameters = {
            "alpha_MHz_per_mW": result.parameters["slope"],
            "gamma_all_MHz": result.parameters["intercept"],
        }
        errors = {
            "alpha_MHz_per_mW": result.std_errors["slope"],
            "gamma_all_MHz": result.std_errors["intercept"],
        }
    else:
        gamma_r = params.get("gamma_r_ratio", PRESETS[args.preset].cavity.gamma_r_ratio)
        result = fitting.fit_saturating_noise(series, gamma_r)
        parameters = dict(result.parameters)
        errors = dict(result.std_errors)
    payload = {
        "model": model,
        "input": args.input,
        "parameters": parameters,
        "std_errors": errors,
        "residual_norm": result.residual_norm,
        "converged": result.converged,
        "iterations": result.iterations,
    }
    if not result.converged:
        raise NumericFailure(f"fit did not converge: {payload}")
    if args.format == "csv":
        flat = {f"{k}": v for k, v in parameters.items()}
        flat.update({f"stderr_{k}": v for k, v in errors.items()})
        flat["residual_norm"] = result.residual_norm
        return _render_kv_csv(flat, {"command": "fit", "model": model})
    return render_json(payload)


def cmd_snr(args, params) -> str:
    mode = params.get("mode", "curves")
    if mode == "curves":
        finesses = params.get("finesse", [8.0 / np.pi, 25.0])
        grid = params.get("grid", 256)
        curves = [snr.normalized_snr_curves(F, grid)[0] for F in finesses]
        curves.append(snr.normalized_snr_curves(finesses[0], grid)[1])
        if args.format == "json":
            return render_json({
                "curves": [
                    {"label": c.label,
                     "efficiencies": c.efficiencies,
                     "snr": c.snr_values}
                    for c in curves
                ]
            })
        label_col = np.concatenate(
            [np.full(len(c.efficiencies), i) for i, c in enumerate(curves)]
        )
        provenance = {"command": "snr", "mode": "curves"}
        for i, c in enumerate(curves):
            provenance[f"curve_{i}"] = c.label
        return render_csv(
            [
                ("curve", label_col),
                ("efficiency", np.concatenate([c.efficiencies for c in curves])),
                ("snr", np.concatenate([c.snr_values for c in curves])),
            ],
            provenance,
        )
    if mode == "table":
        fc = params.get("fc", 74.0)
        fs = params.get("fs", 1.0)
        table = snr.snr_config_table(fc, fs)
        return _emit(args, {"F_c": fc, "F_s": fs, "table": table})
    if mode == "min-finesse":
        tolerance = params.get("tolerance", 1e-3)
        value = snr.min_finesse_for_dominance(tolerance)
        return _emit(args, {"min_finesse": value, "tolerance": tolerance})
    raise UsageError("snr mode must be curves, table or min-finesse")


def cmd_fsr(args, params) -> str:
    if not args.input:
        raise UsageError("fsr requires --input")
    series, provenance = read_scan_csv(args.input)
    value, err = fitting.extract_fsr(series)
    if args.format == "csv":
        freqs, power = fitting.periodogram(series)
        half = len(freqs) // 2
        return render_csv(
            [("frequency_per_unit", freqs[1 : half + 1]), ("power", power[1 : half + 1])],
            {"command": "fsr", "fsr_GHz": fmt(value), "uncertainty_GHz": fmt(err)},
        )
    return render_json({"fsr_GHz": value, "uncertainty_GHz": err, "input": args.input})


def _generate_fwhm(args, params, preset, rng):
    points = params.get("points", 26)
    pmax = params.get("pmax_mW", 250.0)
    alpha = params.get("alpha_MHz_per_mW", preset.alpha_MHz_per_mW)
    gamma_all = params.get("gamma_all_MHz", preset.cavity.gamma_all_MHz)
    power = np.linspace(0.0, pmax, points)
    values = gamma_all + alpha * power
    provenance = {
        "command": "generate", "model": "fwhm", "seed": args.seed,
        "alpha_MHz_per_mW": fmt(alpha), "gamma_all_MHz": fmt(gamma_all),
    }
    columns = [("power_mW", power), ("fwhm_MHz", values)]
    if params.get("noise") == "gauss":
        frac = params.get("noise_frac", 0.05)
        sigma = frac * values
        values = values + rng.normal(0.0, sigma)
        provenance["noise"] = f"gauss {fmt(frac)}"
        columns = [("power_mW", power), ("fwhm_MHz", values), ("sigma_MHz", sigma)]
    return columns, provenance


def _generate_noise(args, params, preset, rng):
    points = params.get("points", 12)
    pmax = params.get("pmax_mW", 250.0)
    alpha_noise = params.get("alpha_noise_cps_per_mW", preset.alpha_noise_cps_per_mW)
    alpha_tilde = params.get("alpha_tilde_per_mW", preset.alpha_tilde_per_mW)
    gamma_r = params.get("gamma_r_ratio", preset.cavity.gamma_r_ratio)
    power = np.linspace(pmax / points, pmax, points)
    values = gamma_r * alpha_noise * power / (2.0 * (1.0 + alpha_tilde * power))
    provenance = {
        "command": "generate", "model": "noise", "seed": args.seed,
        "alpha_noise_cps_per_mW": fmt(alpha_noise),
        "alpha_tilde_per_mW": fmt(alpha_tilde), "gamma_r_ratio": fmt(gamma_r),
    }
    columns = [("power_mW", power), ("counts_cps", values)]
    if params.get("noise") == "gauss":
        frac = params.get("noise_frac", 0.05)
        sigma = frac * values
        values = values + rng.normal(0.0, sigma)
        provenance["noise"] = f"gauss {fmt(frac)}"
        columns = [("power_mW", power), ("counts_cps", values), ("sigma_cps", sigma)]
    return columns, provenance


def _generate_comb(args, params, preset, rng):
    span_nm = params.get("span_nm", 2.0)
    step_nm = params.get("step_nm", 0.01)
    bpf_nm = params.get("bpf_nm", 0.03)
    power = params.get("power_mW", 100.0)
    center_nm = preset.wavelengths.converted_nm if preset.wavelengths else 1540.0
    noise_params = preset.noise()
    ghz_per_nm = conversion.bandwidth_nm_to_GHz(1.0, center_nm)
    wavelengths = center_nm + np.arange(
        -span_nm / 2.0, span_nm / 2.0 + step_nm / 2.0, step_nm
    )
    offsets = (wavelengths - center_nm) * ghz_per_nm
    half_window = bpf_nm * ghz_per_nm / 2.0
    values = np.array([
        noise.comb_rate_in_band(
            preset.cavity, noise_params, power, f - half_window, f + half_window
        )
        for f in offsets
    ])
    provenance = {
        "command": "generate", "model": "comb", "seed": args.seed,
        "power_mW": fmt(power), "bpf_nm": fmt(bpf_nm),
        "center_nm": fmt(center_nm), "fsr_GHz": fmt(preset.cavity.fsr_MHz * 1e-3),
    }
    if params.get("noise") == "poisson":
        target = params.get("target_mean", 25.0)
        scale = target / values.mean()
        values = rng.poisson(values * scale).astype(float)
        provenance["noise"] = f"poisson target_mean={fmt(target)}"
    return [("wavelength_nm", wavelengths), ("counts_cps", values)], provenance


def _source_model_from(args, params) -> photon_stats.SourceModel:
    mu = params.get("mu", 0.55)
    eta_h = params.get("eta_herald", 0.1)
    eta_s = params.get("eta_signal", 0.1)
    if "nu" in params:
        nu = params["nu"]
    elif "zeta" in params:
        nu = photon_stats.noise_rate_for_intensity_ratio(mu, eta_s, params["zeta"])
    else:
        nu = 0.0
    return photon_stats.SourceModel(
        mean_pairs_per_bin=mu,
        herald_efficiency=eta_h,
        signal_efficiency=eta_s,
        noise_rate_per_bin=nu,
        bins=params.get("bins", 10_000_000),
        seed=args.seed,
    )


def _generate_coincidence(args, params, preset, rng):
    model = _source_model_from(args, params)
    histogram = photon_stats.simulate_coincidences(
        model,
        delay_span_bins=params.get("span_bins", 30),
        resolution_ns=params.get("resolution_ns", 0.8),
    )
    provenance = {
        "command": "generate", "model": "coincidence", "seed": args.seed,
        "mu": fmt(model.mean_pairs_per_bin),
        "eta_herald": fmt(model.herald_efficiency),
        "eta_signal": fmt(model.signal_efficiency),
        "nu": fmt(model.noise_rate_per_bin), "bins": model.bins,
        "resolution_ns": fmt(histogram.resolution_ns),
        "backend": photon_stats.mc_backend_name(),
    }
    return [("delay_ns", histogram.delay_bins_ns), ("counts", histogram.counts)], provenance


_GENERATORS = {
    "fwhm": _generate_fwhm,
    "noise": _generate_noise,
    "comb": _generate_comb,
    "coincidence": _generate_coincidence,
}


def cmd_generate(args, params) -> str:
    model = params.get("model")
    if model not in _GENERATORS:
        raise UsageError(
            f"unknown dataset model {model!r}; valid: {', '.join(sorted(_GENERATORS))}"
        )
    rng = np.random.default_rng(args.seed)
    columns, provenance = _GENERATORS[model](args, params, PRESETS[args.preset], rng)
    if args.format == "json":
        payload = {"provenance": provenance}
        payload.update({name: np.asarray(col) for name, col in columns})
        return render_json(payload)
    return render_csv(columns, provenance)


def cmd_g2(args, params) -> str:
    if params.get("mc"):
        model = _source_model_from(args, params)
        histogram = photon_stats.simulate_coincidences(
            model,
            delay_span_bins=params.get("span_bins", 30),
            resolution_ns=params.get("resolution_ns", 0.8),
            n_shards=params.get("shards", 1),
            workers=params.get("workers", 1),
        )
        window = params.get("window_ns", histogram.resolution_ns)
        record = photon_stats.g2_from_histogram(histogram, window)
        payload = {
            "g2": record.g2, "stderr": record.stderr,
            "window_ns": record.window_ns, "resolution_ns": record.resolution_ns,
            "accidental_level": histogram.accidental_level,
            "nonclassical": record.nonclassical,
            "low_statistics": histogram.low_statistics,
            "backend": photon_stats.mc_backend_name(),
            "seed": args.seed,
        }
        if args.format == "csv":
            return render_csv(
                [("delay_ns", histogram.delay_bins_ns), ("counts", histogram.counts)],
                {k: fmt(v) if not isinstance(v, str) else v for k, v in payload.items()},
            )
        return render_json(payload)

    g2_in = params.get("g2_in", 3.819)
    payload: dict = {"g2_in": g2_in}
    if "g2_out_obs" in params:
        payload["zeta_from_g2"] = photon_stats.zeta_from_g2(g2_in, params["g2_out_obs"])
    zeta = params.get("zeta")
    if zeta is not None:
        payload["zeta"] = zeta
        payload["g2_out"] = photon_stats.g2_out(g2_in, zeta)
        enhancement = params.get("enhancement")
        if enhancement is not None:
            payload["enhancement"] = enhancement
            payload["g2_nocav"] = photon_stats.predict_nocavity_g2(g2_in, zeta, enhancement)
    if g2_in > 2.0:
        payload["zeta_classical"] = 1.0 / (g2_in - 2.0)
    return _emit(args, payload)


def cmd_design(args, params) -> str:
    report = snr.nv_design_report(
        params.get("finesse", 45.0),
        params.get("fsr_GHz", 5.0),
        params.get("bpf_nm", 0.03),
        params.get("center_nm", 1587.0),
    )
    return _emit(args, {
        "finesse": report.finesse,
        "fsr_GHz": report.fsr_GHz,
        "bpf_GHz": report.bpf_GHz,
        "suppression_factor": report.suppression_factor,
        "over_tenfold": report.over_tenfold,
        "threshold": report.threshold,
    })


_COMMANDS = {
    "model": cmd_model,
    "fit": cmd_fit,
    "snr": cmd_snr,
    "fsr": cmd_fsr,
    "generate": cmd_generate,
    "g2": cmd_g2,
    "design": cmd_design,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityqfc",
        description="Cavity-enhanced frequency-conversion workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in _COMMANDS.items():
        p = sub.add_parser(name, help=handler.__doc__)
        p.add_argument("--input", default=None)
        p.add_argument("--output", default=None)
        # dataset-producing commands write CSV by default, results JSON
        default_format = "csv" if name in ("generate", "model") else "json"
        p.add_argument("--format", choices=["csv", "json"], default=default_format)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--preset", choices=sorted(PRESETS), default=DEFAULT_PRESET)
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params = _parse_params(args.command, args.param)
        text = _COMMANDS[args.command](args, params)
        write_text(args.output, text)
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NoPeriodicity, SamplingError, ShapeError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except WorkbenchError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
