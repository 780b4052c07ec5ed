#pragma once

// Finite abelian groups G = Z_{n_1} x ... x Z_{n_r}: elements, characters,
// subsets and probability measures.  Elements are addressed by their
// mixed-radix index in [0, |G|); sets are bitmaps over that range, so the
// sumset and convolution loops stay cache friendly at desk scale (|G| <= 2^16).

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace addcomb {

using std::size_t;
using cplx = std::complex<double>;

/// Element or character index inside a GroupSpec (mixed-radix).
using Idx = std::uint32_t;

/// Thrown when an operation would exceed the configured desk-scale budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a verified postcondition fails to hold.
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kMaxGroupOrder = std::uint64_t{1} << 20;

/// A finite abelian group presented as a product of cyclic factors.
/// Immutable after construction; all element/character arithmetic is exact.
class GroupSpec {
  public:
    GroupSpec() : GroupSpec(std::vector<std::uint32_t>{1}) {}

    explicit GroupSpec(std::vector<std::uint32_t> factors) : factors_(std::move(factors)) {
        if (factors_.empty()) throw std::invalid_argument("group: at least one cyclic factor required");
        order_ = 1;
        exponent_ = 1;
        strides_.resize(factors_.size());
        for (size_t j = factors_.size(); j-- > 0;) {
            if (factors_[j] < 1) throw std::invalid_argument("group: cyclic factor must be >= 1");
            strides_[j] = order_;
            order_ *= factors_[j];
            if (order_ > kMaxGroupOrder) throw BudgetError("group: order exceeds desk-scale budget");
            exponent_ = std::lcm<std::uint64_t>(exponent_, factors_[j]);
        }
        phase_scale_.resize(factors_.size());
        for (size_t j = 0; j < factors_.size(); ++j) phase_scale_[j] = exponent_ / factors_[j];
    }

    const std::vector<std::uint32_t>& factors() const { return factors_; }
    size_t rank() const { return factors_.size(); }
    std::uint64_t order() const { return order_; }
    /// Exponent of G (lcm of the factors); every character phase is a
    /// multiple of 1/exponent, which keeps |1-gamma(x)| comparisons exact.
    std::uint64_t exponent() const { return exponent_; }

    bool operator==(const GroupSpec& o) const { return factors_ == o.factors_; }

    std::vector<std::uint32_t> residues(Idx x) const {
        std::vector<std::uint32_t> r(factors_.size());
        for (size_t j = 0; j < factors_.size(); ++j) {
            r[j] = static_cast<std::uint32_t>((x / strides_[j]) % factors_[j]);
        }
        return r;
    }

    Idx index_of(const std::vector<std::uint32_t>& residues) const {
        if (residues.size() != factors_.size())
            throw std::invalid_argument("element: residue count does not match group rank");
        std::uint64_t x = 0;
        for (size_t j = 0; j < factors_.size(); ++j) {
            if (residues[j] >= factors_[j]) throw std::invalid_argument("element: residue out of range");
            x += std::uint64_t{residues[j]} * strides_[j];
        }
        return static_cast<Idx>(x);
    }

    Idx add(Idx a, Idx b) const {
        std::uint64_t out = 0;
        for (size_t j = 0; j < factors_.size(); ++j) {
            const std::uint64_t n = factors_[j];
            const std::uint64_t ra = (a / strides_[j]) % n;
            const std::uint64_t rb = (b / strides_[j]) % n;
            std::uint64_t rs = ra + rb;
            if (rs >= n) rs -= n;
            out += rs * strides_[j];
        }
        return static_cast<Idx>(out);
    }

    Idx neg(Idx a) const {
        std::uint64_t out = 0;
        for (size_t j = 0; j < factors_.size(); ++j) {
            const std::uint64_t n = factors_[j];
            const std::uint64_t ra = (a / strides_[j]) % n;
            out += (ra == 0 ? 0 : n - ra) * strides_[j];
        }
        return static_cast<Idx>(out);
    }

    Idx sub(Idx a, Idx b) const { return add(a, neg(b)); }

    /// Integer phase t in [0, exponent) with gamma(x) = exp(2*pi*i * t / exponent).
    /// Exact: all comparisons between character values reduce to integers.
    std::uint64_t phase(Idx chr, Idx x) const {
        std::uint64_t t = 0;
        const std::uint64_t L = exponent_;
        for (size_t j = 0; j < factors_.size(); ++j) {
            const std::uint64_t n = factors_[j];
            const std::uint64_t d = (chr / strides_[j]) % n;
            const std::uint64_t r = (x / strides_[j]) % n;
            t = (t + d * r % L * phase_scale_[j]) % L;
        }
        return t;
    }

    cplx char_eval(Idx chr, Idx x) const {
        const std::uint64_t t = phase(chr, x);
        const std::uint64_t L = exponent_;
        if (t == 0) return {1.0, 0.0};  // snap the cardinal directions exactly
        if (2 * t == L) return {-1.0, 0.0};
        if (4 * t == L) return {0.0, 1.0};
        if (4 * t == 3 * L) return {0.0, -1.0};
        const double a = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(L);
        return {std::cos(a), std::sin(a)};
    }

    /// |1 - gamma(x)| = 2 sin(pi * min(t, L-t) / L); deterministic given the
    /// integer phase, so Bohr membership tests are reproducible.
    double char_dist(Idx chr, Idx x) const { return dist_of_phase(phase(chr, x)); }

    double dist_of_phase(std::uint64_t t) const {
        const std::uint64_t L = exponent_;
        const std::uint64_t tt = std::min(t, L - t);  // t in [0, L)
        return 2.0 * std::sin(std::numbers::pi * static_cast<double>(tt) / static_cast<double>(L));
    }

    bool is_elementary_2() const {
        return std::all_of(factors_.begin(), factors_.end(), [](std::uint32_t n) { return n == 2; });
    }

  private:
    std::vector<std::uint32_t> factors_;
    std::vector<std::uint64_t> strides_;
    std::vector<std::uint64_t> phase_scale_;
    std::uint64_t order_ = 1;
    std::uint64_t exponent_ = 1;
};

inline void require_same_spec(const GroupSpec& a, const GroupSpec& b) {
    if (!(a == b)) throw std::invalid_argument("mismatched group specs");
}

/// A subset of G as a bitmap over element indices.
class GroupSet {
  public:
    GroupSet() = default;
    explicit GroupSet(const GroupSpec& g) : n_(g.order()), bits_((g.order() + 63) / 64, 0) {}

    static GroupSet singleton(const GroupSpec& g, Idx x) {
        GroupSet s(g);
        s.insert(x);
        return s;
    }

    static GroupSet full(const GroupSpec& g) {
        GroupSet s(g);
        for (std::uint64_t x = 0; x < g.order(); ++x) s.insert(static_cast<Idx>(x));
        return s;
    }

    std::uint64_t universe() const { return n_; }
    std::uint64_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    bool contains(Idx x) const { return (bits_[x >> 6] >> (x & 63)) & 1; }

    void insert(Idx x) {
        std::uint64_t& w = bits_[x >> 6];
        const std::uint64_t m = std::uint64_t{1} << (x & 63);
        count_ += !(w & m);
        w |= m;
    }

    void erase(Idx x) {
        std::uint64_t& w = bits_[x >> 6];
        const std::uint64_t m = std::uint64_t{1} << (x & 63);
        count_ -= !!(w & m);
        w &= ~m;
    }

    std::vector<Idx> members() const {
        std::vector<Idx> out;
        out.reserve(count_);
        for (size_t w = 0; w < bits_.size(); ++w) {
            std::uint64_t b = bits_[w];
            while (b) {
                out.push_back(static_cast<Idx>((w << 6) + std::countr_zero(b)));
                b &= b - 1;
            }
        }
        return out;
    }

    GroupSet& operator|=(const GroupSet& o) {
        for (size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
        recount();
        return *this;
    }

    GroupSet& operator&=(const GroupSet& o) {
        for (size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
        recount();
        return *this;
    }

    bool operator==(const GroupSet& o) const { return n_ == o.n_ && bits_ == o.bits_; }

    bool subset_of(const GroupSet& o) const {
        for (size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] & ~o.bits_[i]) return false;
        return true;
    }

  private:
    void recount() {
        count_ = 0;
        for (std::uint64_t w : bits_) count_ += std::popcount(w);
    }

    std::uint64_t n_ = 0;
    std::uint64_t count_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Image of a set under x -> x + shift.
inline GroupSet translate(const GroupSpec& g, const GroupSet& s, Idx shift) {
    GroupSet out(g);
    for (Idx x : s.members()) out.insert(g.add(x, shift));
    return out;
}

inline GroupSet negate(const GroupSpec& g, const GroupSet& s) {
    GroupSet out(g);
    for (Idx x : s.members()) out.insert(g.neg(x));
    return out;
}

/// A nonnegative measure on G, dense over element indices.
class Measure {
  public:
    Measure() = default;
    explicit Measure(const GroupSpec& g) : w_(g.order(), 0.0) {}

    static Measure uniform(const GroupSpec& g, const GroupSet& support) {
        if (support.empty()) throw std::invalid_argument("uniform_measure: empty support");
        Measure m(g);
        const double p = 1.0 / static_cast<double>(support.size());
        for (Idx x : support.members()) m.w_[x] = p;
        return m;
    }

    static Measure point_mass(const GroupSpec& g, Idx x) {
        Measure m(g);
        m.w_[x] = 1.0;
        return m;
    }

    double operator[](Idx x) const { return w_[x]; }
    double& at(Idx x) { return w_[x]; }
    size_t dim() const { return w_.size(); }
    const std::vector<double>& weights() const { return w_; }

    double mass() const {
        double s = 0.0, c = 0.0;
        for (double v : w_) {  // Kahan; masses feed 1e-12 comparisons
            const double y = v - c;
            const double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        return s;
    }

    GroupSet support(const GroupSpec& g) const {
        GroupSet s(g);
        for (size_t x = 0; x < w_.size(); ++x)
            if (w_[x] != 0.0) s.insert(static_cast<Idx>(x));
        return s;
    }

    /// Pushforward under negation: mu_{-S} from mu_S.
    Measure reflected(const GroupSpec& g) const {
        Measure m(g);
        for (size_t x = 0; x < w_.size(); ++x)
            if (w_[x] != 0.0) m.w_[g.neg(static_cast<Idx>(x))] += w_[x];
        return m;
    }

  private:
    std::vector<double> w_;
};

}  // namespace addcomb
