#pragma once

#include <complex>
#include <vector>

#include "phlab/errors.hpp"

namespace phlab {

// In-place radix-2 FFT; n must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw Error(ErrorCode::ConfigInvalid, "FFT size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * M_PI / double(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wl{std::cos(ang), std::sin(ang)};
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                auto u = a[i + k];
                auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= double(n);
    }
}

// Row-major N x N grid transform, forward: sum_x f(x) e^{-2 pi i k.x / N}.
inline void fft2_inplace(std::vector<std::complex<double>>& grid, int n, bool inverse) {
    if (int(grid.size()) != n * n)
        throw Error(ErrorCode::ConfigInvalid, "fft2: size mismatch");
    std::vector<std::complex<double>> tmp(n);
    for (int r = 0; r < n; ++r) {
        tmp.assign(grid.begin() + std::size_t(r) * n, grid.begin() + std::size_t(r + 1) * n);
        fft_inplace(tmp, inverse);
        std::copy(tmp.begin(), tmp.end(), grid.begin() + std::size_t(r) * n);
    }
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) tmp[r] = grid[std::size_t(r) * n + c];
        fft_inplace(tmp, inverse);
        for (int r = 0; r < n; ++r) grid[std::size_t(r) * n + c] = tmp[r];
    }
}

}  // namespace phlab
