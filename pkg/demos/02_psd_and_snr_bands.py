#!/usr/bin/env python3
"""How the band-ratio SNR reads a pulse spectrum.

Extracts the POS pulse from a clean synthetic trace and from a pulse-free
noise trace, estimates both PSDs, and shades the signal windows (heart-rate
fundamental +/- 0.1 Hz and its second harmonic) against the noise band.
Saves a figure next to this script when matplotlib is available; always
prints the numeric story.

Usage: python demos/02_psd_and_snr_bands.py
"""

from pathlib import Path

from pulsegrade import synth
from pulsegrade.methods import extract
from pulsegrade.spectral import find_peak, signal_band_mask, snr, welch_psd


def describe(name, trace):
    pulse = extract(trace, "pos")
    spec = welch_psd(pulse)
    peak = find_peak(spec)
    value = snr(spec, peak.hz)
    print(f"{name:8s} peak {peak.hz*60:6.1f} bpm   SNR {value:+6.2f} dB")
    return spec, peak.hz, value


def main():
    clean = synth.generate(synth.clean_spec(hr_bpm=72, seed=0))
    noise = synth.generate(synth.pure_noise_spec(seed=0))

    print("POS extraction, Welch PSD, band-ratio SNR:\n")
    spec_c, f_c, _ = describe("clean", clean)
    spec_n, f_n, _ = describe("noise", noise)
    print("\nThe clean trace concentrates power at the pulse fundamental and")
    print("harmonic; noise spreads it across the whole 0.75-2.5 Hz band, so")
    print("its best-case SNR hovers near the flat-spectrum value of -5.3 dB.")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("\nmatplotlib not installed; skipping the figure")
        return

    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
    for ax, (title, spec, f1) in zip(axes, [("clean pulse", spec_c, f_c),
                                            ("pure noise", spec_n, f_n)]):
        band = spec.band_mask()
        sig = signal_band_mask(spec.freqs_hz, f1)
        ax.semilogy(spec.freqs_hz[band], spec.power[band], lw=1.0, color="k")
        ax.fill_between(spec.freqs_hz[band], 1e-12, spec.power[band].max() * 2,
                        where=sig[band], alpha=0.25, color="tab:green",
                        label="signal windows")
        ax.set_title(title)
        ax.set_xlabel("frequency (Hz)")
        ax.legend(loc="upper right")
    axes[0].set_ylabel("PSD")
    out = Path(__file__).with_name("psd_snr_bands.png")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"\nwrote {out}")


if __name__ == "__main__":
    main()
