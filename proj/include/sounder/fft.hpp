#pragma once

// Self-contained double-precision FFT: iterative radix-2 for power-of-two
// lengths, Bluestein's chirp-z reduction for everything else. Sized for the
// spectra this library computes (up to a few million points), not for
// throughput-critical work.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace sounder {

namespace detail {

inline void fft_radix2_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n < 2)
        return;
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Chirp-z: expresses an arbitrary-length DFT as a circular convolution,
// evaluated with power-of-two FFTs. Quadratic phase indices are reduced
// mod 2n to keep the trig arguments small.
inline std::vector<std::complex<double>> fft_bluestein(const std::vector<std::complex<double>>& x,
                                                       bool inverse) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t idx = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = sign * M_PI * static_cast<double>(idx) / static_cast<double>(n);
        chirp[k] = {std::cos(ang), std::sin(ang)};
    }
    const std::size_t m = std::bit_ceil(2 * n - 1);
    std::vector<std::complex<double>> a(m, {0.0, 0.0});
    std::vector<std::complex<double>> b(m, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k)
        a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k)
        b[k] = b[m - k] = std::conj(chirp[k]);
    fft_radix2_inplace(a, false);
    fft_radix2_inplace(b, false);
    for (std::size_t k = 0; k < m; ++k)
        a[k] *= b[k];
    fft_radix2_inplace(a, true);
    std::vector<std::complex<double>> out(n);
    const double scale = 1.0 / static_cast<double>(m); // undo unnormalised inverse
    for (std::size_t k = 0; k < n; ++k)
        out[k] = a[k] * chirp[k] * scale;
    return out;
}

} // namespace detail

/// Unnormalised forward DFT of arbitrary length.
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x) {
    if (x.empty())
        throw InvalidArgument("fft of an empty vector");
    if (std::has_single_bit(x.size())) {
        detail::fft_radix2_inplace(x, false);
        return x;
    }
    return detail::fft_bluestein(x, false);
}

/// Inverse DFT, normalised by 1/n (ifft(fft(x)) == x).
inline std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> x) {
    if (x.empty())
        throw InvalidArgument("ifft of an empty vector");
    if (std::has_single_bit(x.size()))
        detail::fft_radix2_inplace(x, true);
    else
        x = detail::fft_bluestein(x, true);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : x)
        v *= scale;
    return x;
}

} // namespace sounder
