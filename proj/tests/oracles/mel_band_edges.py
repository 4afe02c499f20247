#!/usr/bin/env python3
"""Brute-force reference for mel band edges.

Independent of the C++ implementation: evaluates the mel formula point by
point and applies the push-up repair. Output is pasted into
tests/unit/subband_test.cc and tests/acceptance/acceptance_main.cc.
"""
import math


def mel(f):
    return 2595.0 * math.log10(1.0 + f / 700.0)


def inv_mel(m):
    return 700.0 * (10.0 ** (m / 2595.0) - 1.0)


def edges(num_bins, num_bands, fs):
    fft_size = 2 * (num_bins - 1)
    bin_hz = fs / fft_size
    m_max = mel(fs / 2.0)
    out = [0]
    for k in range(1, num_bands):
        hz = inv_mel(k * m_max / num_bands)
        out.append(int(math.floor(hz / bin_hz + 0.5)))
    out.append(num_bins)
    for k in range(1, num_bands + 1):
        if out[k] <= out[k - 1]:
            out[k] = out[k - 1] + 1
    out[num_bands] = num_bins
    for k in range(num_bands - 1, 0, -1):
        if out[k] >= out[k + 1]:
            out[k] = out[k + 1] - 1
    return out


if __name__ == "__main__":
    for k in (8, 16, 32, 64):
        e = edges(257, k, 16000.0)
        w = [b - a for a, b in zip(e, e[1:])]
        print(f"K={k}: {{{', '.join(map(str, e))}}}")
        print(f"  widths={w} max={max(w)}")
