// series.hpp — Truncated complex power series in the strong-pumping parameter x = 1/nbar
//
// Order-8 truncation is what the eigenvalue expansion needs; all binomial and
// multinomial compositions used by the spectral chain reduce to arithmetic on
// these coefficient arrays.

#pragma once

#include <array>
#include <complex>

namespace vsys::detail {

inline constexpr int series_order = 9;  // coefficients of x^0 .. x^8

struct Series {
    std::array<std::complex<double>, series_order> c{};

    std::complex<double>& operator[](int k) { return c[static_cast<std::size_t>(k)]; }
    const std::complex<double>& operator[](int k) const { return c[static_cast<std::size_t>(k)]; }
};

inline Series operator+(const Series& a, const Series& b) {
    Series out;
    for (int k = 0; k < series_order; ++k) out[k] = a[k] + b[k];
    return out;
}

inline Series operator-(const Series& a, const Series& b) {
    Series out;
    for (int k = 0; k < series_order; ++k) out[k] = a[k] - b[k];
    return out;
}

inline Series operator*(const Series& a, const Series& b) {
    Series out;
    for (int i = 0; i < series_order; ++i)
        for (int j = 0; j + i < series_order; ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

inline Series operator*(std::complex<double> s, const Series& a) {
    Series out;
    for (int k = 0; k < series_order; ++k) out[k] = s * a[k];
    return out;
}

// (1 + s)^q for a series s with s[0] == 0, via the generalized binomial series.
inline Series binomial_power(const Series& s, double q) {
    Series out;
    out[0] = 1.0;
    Series term;
    term[0] = 1.0;
    double coef = 1.0;
    for (int m = 1; m < series_order; ++m) {
        coef *= (q - (m - 1)) / m;
        term = term * s;
        for (int k = 0; k < series_order; ++k) out[k] += coef * term[k];
    }
    return out;
}

} // namespace vsys::detail
