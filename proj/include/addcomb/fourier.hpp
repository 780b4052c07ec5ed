#pragma once

// Fourier analysis on G with fixed normalizations:
//   fhat(chi)  = (1/|G|) sum_x f(x) conj(chi(x))      (functions)
//   muhat(chi) =         sum_x mu(x) conj(chi(x))     (measures)
//   inversion    f(x) = sum_chi fhat(chi) chi(x)
//   (f*g)(x)  = E_y f(y) g(x-y),   (f*mu)(x) = sum_y f(x-y) mu(y)
//
// The transform comes in two flavours: a naive character-sum oracle and a
// fast axis-separated version (radix-2 per power-of-two axis, tabulated
// character sums otherwise; the all-factors-2 case reduces to an exact
// Walsh-Hadamard butterfly).  The fast path is validated against the oracle
// in the test suite and both share the exact-root snapping below.

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "addcomb/group.hpp"

namespace addcomb {

using Density = std::vector<double>;  // dense real-valued function on G
using FourierTable = std::vector<cplx>;

namespace detail {

/// e^{sign * 2*pi*i * t / n} with the four cardinal directions snapped to
/// exact values, so +-1/+-i characters introduce no rounding at all.
inline cplx unit_root(std::uint64_t t, std::uint64_t n, int sign) {
    t %= n;
    if (t == 0) return {1.0, 0.0};
    if (2 * t == n) return {-1.0, 0.0};
    const double s = sign < 0 ? -1.0 : 1.0;
    if (4 * t == n) return {0.0, s};
    if (4 * t == 3 * n) return {0.0, -s};
    const double a = s * 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n);
    return {std::cos(a), std::sin(a)};
}

inline void fft_pow2_inplace(std::vector<cplx>& a, int sign) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {  // bit reversal
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        for (size_t i = 0; i < n; i += len) {
            for (size_t j = 0; j < len / 2; ++j) {
                const cplx w = unit_root(j, len, sign);
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

inline void dft_line_naive(std::vector<cplx>& line, int sign) {
    const size_t n = line.size();
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    for (size_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (size_t m = 0; m < n; ++m) acc += line[m] * unit_root(k * m % n, n, sign);
        out[k] = acc;
    }
    line = std::move(out);
}

}  // namespace detail

/// In-place unnormalized transform sum over G, sign=-1 forward, +1 backward.
inline void transform_sum(const GroupSpec& g, std::vector<cplx>& data, int sign) {
    const auto& factors = g.factors();
    std::uint64_t stride = 1;
    for (size_t j = factors.size(); j-- > 0;) {
        const std::uint64_t n = factors[j];
        if (n > 1) {
            const std::uint64_t block = stride * n;
            std::vector<cplx> line(n);
            for (std::uint64_t base = 0; base < g.order(); base += block) {
                for (std::uint64_t off = 0; off < stride; ++off) {
                    for (std::uint64_t m = 0; m < n; ++m) line[m] = data[base + off + m * stride];
                    if (n == 2) {
                        const cplx u = line[0], v = line[1];
                        line[0] = u + v;  // exact +-1 butterfly
                        line[1] = u - v;
                    } else if ((n & (n - 1)) == 0) {
                        detail::fft_pow2_inplace(line, sign);
                    } else {
                        detail::dft_line_naive(line, sign);
                    }
                    for (std::uint64_t m = 0; m < n; ++m) data[base + off + m * stride] = line[m];
                }
            }
        }
        stride *= n;
    }
}

/// Direct O(|G|^2) character-sum transform; the independent oracle the fast
/// path is checked against.  Unnormalized sum, forward sign.
inline FourierTable dft_naive(const GroupSpec& g, const std::vector<cplx>& f) {
    const std::uint64_t n = g.order();
    if (n > 4096) throw BudgetError("dft_naive: |G| > 4096");
    FourierTable out(n, cplx{0.0, 0.0});
    for (std::uint64_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (std::uint64_t x = 0; x < n; ++x) {
            acc += f[x] * detail::unit_root(g.phase(static_cast<Idx>(k), static_cast<Idx>(x)), g.exponent(), -1);
        }
        out[k] = acc;
    }
    return out;
}

inline FourierTable dft(const GroupSpec& g, const Density& f) {
    std::vector<cplx> data(f.begin(), f.end());
    transform_sum(g, data, -1);
    const double inv = 1.0 / static_cast<double>(g.order());
    for (auto& c : data) c *= inv;
    return data;
}

inline FourierTable dft_measure(const GroupSpec& g, const Measure& mu) {
    std::vector<cplx> data(mu.weights().begin(), mu.weights().end());
    transform_sum(g, data, -1);
    return data;
}

/// Inversion: f(x) = sum_chi coeff(chi) chi(x).
inline std::vector<cplx> idft(const GroupSpec& g, const FourierTable& coeff) {
    std::vector<cplx> data(coeff);
    transform_sum(g, data, +1);
    return data;
}

inline Density idft_real(const GroupSpec& g, const FourierTable& coeff) {
    auto c = idft(g, coeff);
    Density out(c.size());
    for (size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

// ---- convolutions (computed directly over supports: exact support facts) ----

inline Density convolve(const GroupSpec& g, const Density& f, const Density& h) {
    const std::uint64_t n = g.order();
    if (n * n > (std::uint64_t{1} << 26)) throw BudgetError("convolve: dense O(|G|^2) over budget");
    Density out(n, 0.0);
    for (std::uint64_t y = 0; y < n; ++y) {
        if (f[y] == 0.0) continue;
        for (std::uint64_t x = 0; x < n; ++x) out[x] += f[y] * h[g.sub(static_cast<Idx>(x), static_cast<Idx>(y))];
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= inv;
    return out;
}

inline Density convolve_fm(const GroupSpec& g, const Density& f, const Measure& mu) {
    const std::uint64_t n = g.order();
    Density out(n, 0.0);
    for (std::uint64_t y = 0; y < n; ++y) {
        const double w = mu[static_cast<Idx>(y)];
        if (w == 0.0) continue;
        for (std::uint64_t x = 0; x < n; ++x) out[x] += f[g.sub(static_cast<Idx>(x), static_cast<Idx>(y))] * w;
    }
    return out;
}

inline Measure convolve_mm(const GroupSpec& g, const Measure& mu, const Measure& nu) {
    Measure out(g);
    for (std::uint64_t y = 0; y < g.order(); ++y) {
        const double wy = mu[static_cast<Idx>(y)];
        if (wy == 0.0) continue;
        for (std::uint64_t z = 0; z < g.order(); ++z) {
            const double wz = nu[static_cast<Idx>(z)];
            if (wz == 0.0) continue;
            out.at(g.add(static_cast<Idx>(y), static_cast<Idx>(z))) += wy * wz;
        }
    }
    return out;
}

// ---- norms ----

inline double lp_norm(const Density& f, double p) {
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (double v : f) m = std::max(m, std::abs(v));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    double s = 0.0;
    for (double v : f) s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

inline double lpmu_norm(const Density& f, const Measure& mu, double p) {
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (size_t x = 0; x < f.size(); ++x)
            if (mu[static_cast<Idx>(x)] > 0.0) m = std::max(m, std::abs(f[x]));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("lpmu_norm: p must be >= 1");
    double s = 0.0;
    for (size_t x = 0; x < f.size(); ++x) {
        const double w = mu[static_cast<Idx>(x)];
        if (w > 0.0) s += std::pow(std::abs(f[x]), p) * w;
    }
    return std::pow(s, 1.0 / p);
}

/// <f, mu> = integral of f against mu.
inline double integrate(const Density& f, const Measure& mu) {
    double s = 0.0, c = 0.0;
    for (size_t x = 0; x < f.size(); ++x) {
        const double y = f[x] * mu[static_cast<Idx>(x)] - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

inline Density indicator(const GroupSpec& g, const GroupSet& s) {
    Density f(g.order(), 0.0);
    for (Idx x : s.members()) f[x] = 1.0;
    return f;
}

// ---- large spectrum ----

/// Spec_eps(f, mu) = { chi : |(f dmu)^(chi)| >= eps * ||f||_{L1(mu)} }.
inline std::vector<Idx> large_spectrum(const GroupSpec& g, const Density& f, const Measure& mu, double eps) {
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("large_spectrum: eps must lie in (0,1]");
    Measure fmu(g);
    double l1 = 0.0;
    for (std::uint64_t x = 0; x < g.order(); ++x) {
        const double w = f[x] * mu[static_cast<Idx>(x)];
        fmu.at(static_cast<Idx>(x)) = w;
        l1 += std::abs(f[x]) * mu[static_cast<Idx>(x)];
    }
    if (l1 == 0.0) throw std::invalid_argument("large_spectrum: f vanishes on supp(mu)");
    const FourierTable hat = dft_measure(g, fmu);
    std::vector<Idx> out;
    const double thr = eps * l1;
    for (std::uint64_t k = 0; k < g.order(); ++k) {
        if (std::abs(hat[k]) >= thr) out.push_back(static_cast<Idx>(k));
    }
    return out;
}

/// Spec_kappa(mu) = { chi : |muhat(chi)| >= kappa } for a probability measure.
inline std::vector<Idx> measure_spectrum(const GroupSpec& g, const Measure& mu, double kappa) {
    const FourierTable hat = dft_measure(g, mu);
    std::vector<Idx> out;
    for (std::uint64_t k = 0; k < g.order(); ++k)
        if (std::abs(hat[k]) >= kappa) out.push_back(static_cast<Idx>(k));
    return out;
}

}  // namespace addcomb
