#pragma once

// Bohr sets B = { x : |1 - gamma(x)| <= delta_gamma for all gamma in Gamma }
// with per-character widths in (0,2].  Everything is driven by the entry
// time of an element,
//     entry(x) = max_gamma |1 - gamma(x)| / delta_gamma,
// so that x lies in the dilate B_rho exactly when entry(x) <= rho.  The
// dilate-size function t -> |B_t| is a right-continuous step function whose
// breakpoints are the entry values; entropy, regularity certification and
// the annihilator bound all work on that step function, never on a sampled
// grid.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "addcomb/fourier.hpp"
#include "addcomb/group.hpp"

namespace addcomb {

class BohrSet {
  public:
    BohrSet() : BohrSet(GroupSpec{}, {}, {}) {}

    BohrSet(GroupSpec g, std::vector<Idx> freq, std::vector<double> width)
        : g_(std::move(g)), freq_(std::move(freq)), width_(std::move(width)) {
        if (freq_.size() != width_.size()) throw std::invalid_argument("bohr: one width per frequency");
        for (double d : width_)
            if (!(d > 0.0) || d > 2.0) throw std::invalid_argument("bohr: width must lie in (0,2]");
        const std::uint64_t n = g_.order();
        entry_.assign(n, 0.0);
        for (size_t i = 0; i < freq_.size(); ++i) {
            for (std::uint64_t x = 0; x < n; ++x) {
                const double e = g_.char_dist(freq_[i], static_cast<Idx>(x)) / width_[i];
                if (e > entry_[x]) entry_[x] = e;
            }
        }
        sorted_ = entry_;
        std::sort(sorted_.begin(), sorted_.end());
    }

    const GroupSpec& group() const { return g_; }
    const std::vector<Idx>& freq() const { return freq_; }
    const std::vector<double>& width() const { return width_; }
    double entry(Idx x) const { return entry_[x]; }
    const std::vector<double>& sorted_entries() const { return sorted_; }

    bool contains(Idx x, double rho = 1.0) const { return entry_[x] <= rho; }

    /// |B_t| as a function of the dilation parameter t >= 0.
    std::uint64_t size_at(double t) const {
        return static_cast<std::uint64_t>(std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin());
    }

    std::uint64_t size() const { return size_at(1.0); }

    GroupSet set_at(double t) const {
        GroupSet s(g_);
        for (std::uint64_t x = 0; x < g_.order(); ++x)
            if (entry_[x] <= t) s.insert(static_cast<Idx>(x));
        return s;
    }

    GroupSet members() const { return set_at(1.0); }

  private:
    GroupSpec g_;
    std::vector<Idx> freq_;
    std::vector<double> width_;
    std::vector<double> entry_;
    std::vector<double> sorted_;
};

inline BohrSet bohr_build(const GroupSpec& g, std::vector<Idx> freq, std::vector<double> width) {
    return BohrSet(g, std::move(freq), std::move(width));
}

/// Dilate with the width cap applied eagerly: widths become min(rho*delta, 2).
inline BohrSet dilate(const BohrSet& b, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("dilate: rho must be positive");
    std::vector<double> w(b.width());
    for (double& d : w) d = std::min(rho * d, 2.0);
    return BohrSet(b.group(), b.freq(), std::move(w));
}

/// Meet in the lattice of Bohr sets: union of frequency sets, min of widths.
inline BohrSet meet(const BohrSet& a, const BohrSet& b) {
    require_same_spec(a.group(), b.group());
    std::vector<Idx> freq(a.freq());
    std::vector<double> width(a.width());
    for (size_t i = 0; i < b.freq().size(); ++i) {
        auto it = std::find(freq.begin(), freq.end(), b.freq()[i]);
        if (it == freq.end()) {
            freq.push_back(b.freq()[i]);
            width.push_back(b.width()[i]);
        } else {
            width[static_cast<size_t>(it - freq.begin())] =
                std::min(width[static_cast<size_t>(it - freq.begin())], b.width()[i]);
        }
    }
    return BohrSet(a.group(), std::move(freq), std::move(width));
}

/// h(B) = log |B_2| / |B_{1/2}|.
inline double entropy(const BohrSet& b) {
    return std::log(static_cast<double>(b.size_at(2.0)) / static_cast<double>(b.size_at(0.5)));
}

inline Measure bohr_measure(const BohrSet& b, double rho = 1.0) {
    return Measure::uniform(b.group(), b.set_at(rho));
}

struct RegularityCertificate {
    double lambda = 1.0;
    int C = 16;
    double entropy = 0.0;  // h(B_lambda)
    bool verified = false;
};

struct RegularBohr {
    BohrSet set;
    RegularityCertificate cert;
};

namespace detail {

/// Exact-breakpoint check that B (as given) is C-regular:
///   1/(1+C h |eta|) <= |B_{1+eta}| / |B_1| <= 1 + C h |eta|
/// for all |eta| <= min(1, 1/(C h)).  The dilate-size step function makes it
/// enough to test at entry-value breakpoints (from both sides) plus the range
/// endpoints.
inline bool check_regular(const BohrSet& b, int C) {
    const double h = entropy(b);
    const double base = static_cast<double>(b.size());
    if (base == 0.0) return false;
    const double eta_max = h > 0.0 ? std::min(1.0, 1.0 / (C * h)) : 1.0;
    const double lo = 1.0 - eta_max, hi = 1.0 + eta_max;

    auto ok_at = [&](double count, double eta) {
        const double bound = 1.0 + C * h * std::abs(eta);
        const double ratio = count / base;
        return ratio <= bound + 1e-12 && ratio * bound >= 1.0 - 1e-12;
    };

    const auto& ent = b.sorted_entries();
    auto first = std::lower_bound(ent.begin(), ent.end(), lo);
    auto last = std::upper_bound(ent.begin(), ent.end(), hi);
    for (auto it = first; it != last; ++it) {
        const double t = *it;
        const double eta = t - 1.0;
        const double at = static_cast<double>(b.size_at(t));
        const double below = static_cast<double>(it - ent.begin());  // |B_{t-}|
        if (!ok_at(at, eta)) return false;
        if (t > lo && !ok_at(below, eta)) return false;
    }
    if (!ok_at(static_cast<double>(b.size_at(lo)), -eta_max)) return false;
    if (!ok_at(static_cast<double>(b.size_at(hi)), eta_max)) return false;
    return true;
}

}  // namespace detail

inline constexpr int kDefaultRegularityConstant = 16;

/// Find lambda in [1,2] and the smallest escalation C = 16*2^j such that
/// B_lambda is certifiably C-regular.  Candidate lambdas are gap midpoints of
/// the entry breakpoints in [1,2] together with a fixed coarse grid.
inline RegularBohr find_regular(const BohrSet& b, int c_start = kDefaultRegularityConstant) {
    std::vector<double> cands;
    for (int k = 0; k <= 16; ++k) cands.push_back(1.0 + k / 16.0);
    const auto& ent = b.sorted_entries();
    auto first = std::lower_bound(ent.begin(), ent.end(), 1.0);
    auto last = std::upper_bound(ent.begin(), ent.end(), 2.0);
    for (auto it = first; it != last; ++it) {
        auto nx = it + 1;
        if (nx != last && *nx > *it) cands.push_back(0.5 * (*it + *nx));
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    for (int C = c_start; C <= (1 << 24); C *= 2) {
        for (double lam : cands) {
            BohrSet cand = dilate(b, lam);
            if (detail::check_regular(cand, C)) {
                RegularityCertificate cert{lam, C, entropy(cand), true};
                return RegularBohr{std::move(cand), cert};
            }
        }
    }
    throw VerificationError("find_regular: no certifiable lambda in [1,2] (escalation exhausted)");
}

struct AnnihilatorBound {
    double bound = 0.0;       // 2 |B_{1+rho} \ B_{1-rho}| / (kappa |B|)
    std::uint64_t spec_size = 0;
    double max_dist = 0.0;    // max observed |1-gamma(y)| over Spec x B_rho
    bool verified = false;
};

/// Explicit proof-level inequality behind the annihilator property: every
/// gamma with |betahat(gamma)| >= kappa satisfies
///   |1 - gamma(y)| <= 2 |B_{1+rho} \ B_{1-rho}| / (kappa |B|)   for y in B_rho,
/// the factor 2 coming from |B delta (B+y)| <= 2 |B_{1+rho} \ B_{1-rho}|.
inline AnnihilatorBound annihilator_bound(const BohrSet& b, double kappa, double rho) {
    if (!(kappa > 0.0) || kappa > 1.0) throw std::invalid_argument("annihilator_bound: kappa in (0,1]");
    if (!(rho > 0.0)) throw std::invalid_argument("annihilator_bound: rho > 0");
    const GroupSpec& g = b.group();
    const Measure beta = bohr_measure(b, 1.0);
    const std::vector<Idx> spec = measure_spectrum(g, beta, kappa);
    AnnihilatorBound out;
    out.spec_size = spec.size();
    const double shell = static_cast<double>(b.size_at(1.0 + rho) - b.size_at(1.0 - rho));
    out.bound = 2.0 * shell / (kappa * static_cast<double>(b.size()));
    const GroupSet brho = b.set_at(rho);
    for (Idx gamma : spec) {
        for (Idx y : brho.members()) {
            out.max_dist = std::max(out.max_dist, g.char_dist(gamma, y));
        }
    }
    out.verified = out.max_dist <= out.bound + 1e-9;
    return out;
}

}  // namespace addcomb
