#pragma once

// Sumset arithmetic, doubling statistics, Plünnecke selection, covering
// lemmas, growth profiles, and the Croot-Sisask almost-periodicity engine.
//
// Every covering / almost-periodicity result that is consumed downstream is
// re-verified here by direct enumeration before it is returned; a sampling
// artefact can therefore never propagate a false certificate.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "addcomb/fourier.hpp"
#include "addcomb/group.hpp"
#include "addcomb/rng.hpp"

namespace addcomb {

inline GroupSet sumset(const GroupSpec& g, const GroupSet& a, const GroupSet& b) {
    const GroupSet& small = a.size() <= b.size() ? a : b;
    const GroupSet& large = a.size() <= b.size() ? b : a;
    GroupSet out(g);
    for (Idx s : small.members()) out |= translate(g, large, s);
    return out;
}

/// n-fold iterated sumset nA; 0A = {0}.
inline GroupSet iterated(const GroupSpec& g, unsigned n, const GroupSet& a) {
    GroupSet acc = GroupSet::singleton(g, 0);
    for (unsigned i = 0; i < n; ++i) acc = sumset(g, acc, a);
    return acc;
}

inline GroupSet difference_set(const GroupSpec& g, const GroupSet& a, const GroupSet& b) {
    return sumset(g, a, negate(g, b));
}

/// Span(T) = { sum_t eps_t t : eps in {-1,0,1}^T }.
inline GroupSet span_set(const GroupSpec& g, const std::vector<Idx>& t) {
    if (t.size() > 24) throw BudgetError("span: |T| > 24");
    GroupSet acc = GroupSet::singleton(g, 0);
    for (Idx x : t) {
        GroupSet next = acc;
        next |= translate(g, acc, x);
        next |= translate(g, acc, g.neg(x));
        acc = std::move(next);
    }
    return acc;
}

struct DoublingStats {
    std::uint64_t card_a = 0, card_s = 0, card_sum = 0, card_2a_minus_2a = 0;
    double K = 1.0;  // |A+S| / min(|A|, |S|)
};

inline DoublingStats doubling_stats(const GroupSpec& g, const GroupSet& a, const GroupSet& s) {
    if (a.empty() || s.empty()) throw std::invalid_argument("doubling: empty set");
    DoublingStats out;
    out.card_a = a.size();
    out.card_s = s.size();
    out.card_sum = sumset(g, a, s).size();
    const GroupSet d = difference_set(g, a, a);
    out.card_2a_minus_2a = sumset(g, d, d).size();
    out.K = static_cast<double>(out.card_sum) / static_cast<double>(std::min(out.card_a, out.card_s));
    return out;
}

// ---- Plünnecke selection ----

struct PlunneckeSelection {
    GroupSet s_prime;
    double ratio = 0.0;  // |A + S'| / |S'|
    bool exhaustive = false;
    // Diagnostics for the doubling chain on the selected set (reported).
    std::uint64_t card_asp = 0;           // |A + S'|
    std::uint64_t card_asp_doubled = 0;   // |(A+S') + (A+S')|
    bool chain_holds = false;             // |(A+S')+(A+S')| <= K^4 |A+S'|
};

namespace detail {

inline void plunnecke_dfs(const GroupSpec& g, const std::vector<Idx>& s_elems, size_t i, std::vector<Idx>& chosen,
                          const GroupSet& a, const GroupSet& accum, double& best_ratio, std::vector<Idx>& best) {
    if (i == s_elems.size()) {
        if (!chosen.empty()) {
            const double r = static_cast<double>(accum.size()) / static_cast<double>(chosen.size());
            if (r < best_ratio) {
                best_ratio = r;
                best = chosen;
            }
        }
        return;
    }
    plunnecke_dfs(g, s_elems, i + 1, chosen, a, accum, best_ratio, best);
    GroupSet extended = accum;
    extended |= translate(g, a, s_elems[i]);
    chosen.push_back(s_elems[i]);
    plunnecke_dfs(g, s_elems, i + 1, chosen, a, extended, best_ratio, best);
    chosen.pop_back();
}

}  // namespace detail

/// Select non-empty S' in S minimizing |A+S'|/|S'|: exhaustive subset scan
/// for |S| <= 20, first-improvement removal search otherwise (flagged).
inline PlunneckeSelection plunnecke_select(const GroupSpec& g, const GroupSet& a, const GroupSet& s,
                                           double chain_K = 0.0) {
    if (a.empty() || s.empty()) throw std::invalid_argument("plunnecke_select: empty input");
    PlunneckeSelection out;
    std::vector<Idx> chosen_elems;
    if (s.size() <= 20) {
        out.exhaustive = true;
        std::vector<Idx> s_elems = s.members();
        std::vector<Idx> chosen;
        double best_ratio = std::numeric_limits<double>::infinity();
        detail::plunnecke_dfs(g, s_elems, 0, chosen, a, GroupSet(g), best_ratio, chosen_elems);
        out.ratio = best_ratio;
    } else {
        std::vector<Idx> cur = s.members();
        auto ratio_of = [&](const std::vector<Idx>& elems) {
            GroupSet sp(g);
            for (Idx x : elems) sp.insert(x);
            return static_cast<double>(sumset(g, a, sp).size()) / static_cast<double>(elems.size());
        };
        double cur_ratio = ratio_of(cur);
        bool improved = true;
        while (improved && cur.size() > 1) {
            improved = false;
            for (size_t i = 0; i < cur.size(); ++i) {
                std::vector<Idx> cand = cur;
                cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(i));
                const double r = ratio_of(cand);
                if (r < cur_ratio - 1e-12) {
                    cur = std::move(cand);
                    cur_ratio = r;
                    improved = true;
                    break;
                }
            }
        }
        chosen_elems = cur;
        out.ratio = cur_ratio;
    }
    GroupSet sp(g);
    for (Idx x : chosen_elems) sp.insert(x);
    out.s_prime = sp;
    const GroupSet asp = sumset(g, a, sp);
    out.card_asp = asp.size();
    out.card_asp_doubled = sumset(g, asp, asp).size();
    if (chain_K <= 0.0) {
        const DoublingStats st = doubling_stats(g, a, s);
        chain_K = st.K;
    }
    out.chain_holds = static_cast<double>(out.card_asp_doubled) <=
                      chain_K * chain_K * chain_K * chain_K * static_cast<double>(out.card_asp) + 1e-9;
    return out;
}

// ---- Croot-Sisask almost-periods ----

struct AlmostPeriodSet {
    GroupSet X;
    double eps = 0.0;
    double p = 2.0;
    std::string mode;  // "oracle" | "sampled"
    double max_displacement = 0.0;  // max over X of ||rho_x(f*mu_S) - f*mu_S||_p / ||f||_p
    int sample_tuple_len = 0;       // k in the sampled mode, 0 for oracle
};

namespace detail {

inline double displacement(const GroupSpec& g, const Density& conv, Idx x, double p) {
    double s = 0.0;
    for (std::uint64_t y = 0; y < g.order(); ++y) {
        const double d = std::abs(conv[g.add(static_cast<Idx>(y), x)] - conv[y]);
        if (d != 0.0) s += std::pow(d, p);
    }
    return std::pow(s, 1.0 / p);
}

}  // namespace detail

/// Brute-force filter: keep every candidate x whose translate moves f*mu_S
/// by at most eps * ||f||_p in ell^p.  Defaults to scanning all of G.
inline AlmostPeriodSet almost_periods_oracle(const GroupSpec& g, const Density& f, const GroupSet& s, double eps,
                                             double p, const std::vector<Idx>* candidates = nullptr) {
    if (s.empty()) throw std::invalid_argument("almost_periods: empty S");
    const Density conv = convolve_fm(g, f, Measure::uniform(g, s));
    const double base = lp_norm(f, p);
    AlmostPeriodSet out;
    out.X = GroupSet(g);
    out.eps = eps;
    out.p = p;
    out.mode = "oracle";
    auto consider = [&](Idx x) {
        const double d = detail::displacement(g, conv, x, p);
        if (d <= eps * base + 1e-12) {
            out.X.insert(x);
            out.X.insert(g.neg(x));
            out.max_displacement = std::max(out.max_displacement, d / base);
        }
    };
    if (candidates) {
        for (Idx x : *candidates) consider(x);
    } else {
        for (std::uint64_t x = 0; x < g.order(); ++x) consider(static_cast<Idx>(x));
    }
    out.X.insert(0);
    return out;
}

struct SampleConfig {
    double c_cs = 16.0;     // k = ceil(c_cs * p / eps^2)
    int tuples = 48;        // tuples drawn per escalation round
    int escalations = 3;    // doublings of k before giving up
    std::uint64_t seed = 1;
};

/// Sampled Croot-Sisask: draw S-valued tuples, keep a tuple whose empirical
/// average is ell^p-close to f*mu_S, pigeonhole its diagonal translates over
/// T, and return the difference set of the good translates.  Every member is
/// re-verified against the oracle predicate before returning.
inline AlmostPeriodSet almost_periods_sampled(const GroupSpec& g, const Density& f, const GroupSet& s,
                                              const GroupSet& t, double eps, double p, const SampleConfig& cfg) {
    if (s.empty() || t.empty()) throw std::invalid_argument("almost_periods: empty S or T");
    const Density conv = convolve_fm(g, f, Measure::uniform(g, s));
    const double base = lp_norm(f, p);
    const std::vector<Idx> s_elems = s.members();
    std::mt19937_64 rng(cfg.seed);

    std::uint64_t k = static_cast<std::uint64_t>(std::ceil(cfg.c_cs * p / (eps * eps)));
    for (int esc = 0; esc <= cfg.escalations; ++esc, k *= 2) {
        for (int trial = 0; trial < cfg.tuples; ++trial) {
            // Empirical average h_z(y) = (1/k) sum_i f(y - z_i).
            Density h(g.order(), 0.0);
            for (std::uint64_t i = 0; i < k; ++i) {
                const Idx z = s_elems[uniform_below(rng, s_elems.size())];
                for (std::uint64_t y = 0; y < g.order(); ++y) h[y] += f[g.sub(static_cast<Idx>(y), z)];
            }
            const double inv_k = 1.0 / static_cast<double>(k);
            for (auto& v : h) v *= inv_k;

            auto err_at_shift = [&](Idx shift) {
                // || h(. - shift) - f*mu_S ||_p
                double acc = 0.0;
                for (std::uint64_t y = 0; y < g.order(); ++y) {
                    const double d = std::abs(h[g.sub(static_cast<Idx>(y), shift)] - conv[y]);
                    if (d != 0.0) acc += std::pow(d, p);
                }
                return std::pow(acc, 1.0 / p);
            };
            if (err_at_shift(0) > 0.5 * eps * base) continue;  // tuple not good

            std::vector<Idx> good;
            for (Idx tt : t.members())
                if (err_at_shift(tt) <= 0.5 * eps * base) good.push_back(tt);
            if (good.empty()) continue;

            // Difference set of good diagonal translates carries the
            // triangle-inequality guarantee at tolerance eps.
            AlmostPeriodSet out;
            out.X = GroupSet(g);
            out.eps = eps;
            out.p = p;
            out.mode = "sampled";
            out.sample_tuple_len = static_cast<int>(k);
            for (Idx u : good) {
                for (Idx v : good) {
                    const Idx x = g.sub(u, v);
                    if (out.X.contains(x)) continue;
                    const double d = detail::displacement(g, conv, x, p);  // mandatory re-verification
                    if (d <= eps * base + 1e-12) {
                        out.X.insert(x);
                        out.max_displacement = std::max(out.max_displacement, d / base);
                    }
                }
            }
            out.X.insert(0);
            return out;
        }
    }
    throw VerificationError("almost_periods_sampled: no good tuple after escalations (k exhausted)");
}

struct AmplifiedPeriods {
    GroupSet kX;
    int k = 1;
    double bound = 0.0;             // k * eps' * ||f||_p
    double max_displacement = 0.0;  // observed over kX
    bool verified = false;
};

/// Compute kX and directly verify the triangle-inequality displacement bound.
inline AmplifiedPeriods amplify_periods(const GroupSpec& g, const AlmostPeriodSet& x, int k, const Density& f,
                                        const GroupSet& s, double p) {
    const Density conv = convolve_fm(g, f, Measure::uniform(g, s));
    const double base = lp_norm(f, p);
    AmplifiedPeriods out;
    out.k = k;
    out.kX = iterated(g, static_cast<unsigned>(k), x.X);
    out.bound = static_cast<double>(k) * x.eps * base;
    for (Idx z : out.kX.members()) {
        out.max_displacement = std::max(out.max_displacement, detail::displacement(g, conv, z, p));
    }
    out.verified = out.max_displacement <= out.bound + 1e-9;
    return out;
}

struct KeyInvariance {
    AlmostPeriodSet X;
    GroupSet kX;
    int k = 1;
    double p = 2.0;
    double eps = 0.0;
    double eps_inner = 0.0;          // per-period level used before amplification
    double max_corr_err = 0.0;       // max over kX of |mu_{-A} * 1_{A+S} * mu_{-S}(x) - 1|
    bool corr_verified = false;
    bool containment_verified = false;  // kX subset of (A+S) - (A+S)
};

/// Almost-periods aplified to the correlation certificate of the key
/// proposition: |mu_{-A} * 1_{A+S} * mu_{-S}(x) - 1| <= eps for all x in kX,
/// verified pointwise.  T parametrizes where the periods are sampled from
/// (the pipeline passes T = A); p defaults to 2 + log K.
inline KeyInvariance key_invariance(const GroupSpec& g, const GroupSet& a, const GroupSet& s, const GroupSet& t,
                                    double eps, int k, bool sampled = false, const SampleConfig& cfg = {}) {
    if (a.empty() || s.empty()) throw std::invalid_argument("key_invariance: empty input");
    const GroupSet as = sumset(g, a, s);
    const double K_h = static_cast<double>(as.size()) / static_cast<double>(a.size());
    const double p = 2.0 + std::max(0.0, std::log(K_h));
    const Density f = indicator(g, as);
    const GroupSet neg_s = negate(g, s);

    const Density conv1 = convolve_fm(g, f, Measure::uniform(g, neg_s));
    const Density corr = convolve_fm(g, conv1, Measure::uniform(g, negate(g, a)));
    const GroupSet diff = difference_set(g, as, as);

    KeyInvariance out;
    out.k = k;
    out.p = p;
    out.eps = eps;
    double eps_inner = eps / static_cast<double>(k);
    for (int attempt = 0; attempt < 4; ++attempt, eps_inner *= 0.5) {
        out.X = sampled ? almost_periods_sampled(g, f, neg_s, t, eps_inner, p, cfg)
                        : almost_periods_oracle(g, f, neg_s, eps_inner, p);
        out.eps_inner = eps_inner;
        out.kX = iterated(g, static_cast<unsigned>(k), out.X.X);
        out.max_corr_err = 0.0;
        for (Idx x : out.kX.members()) out.max_corr_err = std::max(out.max_corr_err, std::abs(corr[x] - 1.0));
        out.corr_verified = out.max_corr_err <= eps + 1e-9;
        if (out.corr_verified) break;
    }
    out.containment_verified = out.kX.subset_of(diff);
    return out;
}

// ---- covering lemmas ----

struct CoveringResult {
    std::vector<Idx> T;
    unsigned k = 0;
    bool size_ok = false;         // |T| < k
    bool containment_ok = false;  // A subset of Span(T) + S - S
    std::uint64_t hull_size = 0;
};

namespace detail {

/// Greedy maximal S-dissociated subset of A: T is S-dissociated iff the
/// 2^|T| subset-sum translates of S are pairwise disjoint, equivalently
/// |subsums(T) + S| = 2^|T| |S|; maintained incrementally via W = subsums+S.
inline std::vector<Idx> greedy_dissociated(const GroupSpec& g, const GroupSet& a, const GroupSet& s) {
    std::vector<Idx> t;
    GroupSet w = s;
    for (Idx x : a.members()) {
        GroupSet shifted = translate(g, w, x);
        shifted &= w;
        if (shifted.empty()) {
            t.push_back(x);
            w |= translate(g, w, x);
        }
    }
    return t;
}

}  // namespace detail

/// Variant of Chang's covering lemma: requires |kA + S| < 2^k |S| and returns
/// T subset of A with |T| < k and A subset of Span(T) + S - S, both verified
/// by enumeration.  kA is taken with 0 adjoined (sums of at most k elements):
/// the exact-k reading falsifies the lemma for 0 not in A, e.g. a basis of
/// F_2^3 against S = {0}.
inline CoveringResult cover_variant(const GroupSpec& g, const GroupSet& a, const GroupSet& s, unsigned k) {
    if (a.empty() || s.empty()) throw std::invalid_argument("cover_variant: empty input");
    GroupSet a0 = a;
    a0.insert(0);
    const std::uint64_t lhs = sumset(g, iterated(g, k, a0), s).size();
    const long double rhs = std::pow(2.0L, static_cast<long double>(k)) * static_cast<long double>(s.size());
    if (!(static_cast<long double>(lhs) < rhs)) {
        throw std::invalid_argument("cover_variant: precondition |kA+S| < 2^k|S| fails (" + std::to_string(lhs) +
                                    " >= 2^" + std::to_string(k) + " * " + std::to_string(s.size()) + ")");
    }
    CoveringResult out;
    out.k = k;
    out.T = detail::greedy_dissociated(g, a, s);
    out.size_ok = out.T.size() < k;
    const GroupSet hull = difference_set(g, sumset(g, span_set(g, out.T), s), s);
    out.hull_size = hull.size();
    out.containment_ok = a.subset_of(hull);
    if (!out.size_ok) throw VerificationError("cover_variant: |T| >= k despite premise");
    if (!out.containment_ok) throw VerificationError("cover_variant: containment failed");
    return out;
}

struct ChangCover {
    std::vector<Idx> T;
    bool containment_ok = false;
    double reference = 0.0;  // K log(KL), O-constant unspecified: reported only
    std::uint64_t hull_size = 0;
};

/// Chang's covering lemma, classical accounting: greedy maximal S-dissociated
/// T subset of A; containment verified, |T| reported against K log KL.
inline ChangCover chang_cover(const GroupSpec& g, const GroupSet& a, const GroupSet& s) {
    if (a.empty() || s.empty()) throw std::invalid_argument("chang_cover: empty input");
    ChangCover out;
    out.T = detail::greedy_dissociated(g, a, s);
    const GroupSet hull = difference_set(g, sumset(g, span_set(g, out.T), s), s);
    out.hull_size = hull.size();
    out.containment_ok = a.subset_of(hull);
    const double kc = static_cast<double>(sumset(g, a, a).size()) / static_cast<double>(a.size());
    const double lc = static_cast<double>(sumset(g, a, s).size()) / static_cast<double>(s.size());
    out.reference = kc * std::log(std::max(2.0, kc * lc));
    if (!out.containment_ok) throw VerificationError("chang_cover: containment failed");
    return out;
}

// ---- growth ----

inline std::vector<std::uint64_t> growth_profile(const GroupSpec& g, const GroupSet& x, unsigned n_max) {
    std::vector<std::uint64_t> out;
    GroupSet acc = GroupSet::singleton(g, 0);
    for (unsigned n = 1; n <= n_max; ++n) {
        acc = sumset(g, acc, x);
        out.push_back(acc.size());
    }
    return out;
}

/// Fitted polynomial-growth exponent: max_n log(|nX|/|X|) / log n over n >= 2.
inline double growth_exponent(const std::vector<std::uint64_t>& profile) {
    double d = 0.0;
    for (size_t n = 2; n <= profile.size(); ++n) {
        const double r = std::log(static_cast<double>(profile[n - 1]) / static_cast<double>(profile[0])) /
                         std::log(static_cast<double>(n));
        d = std::max(d, r);
    }
    return d;
}

struct GrowthVerdict {
    bool premise_ok = false;     // 2X - X subset of Span(T) + X - X
    bool inequality_ok = false;  // |(n+1)X - X| <= (2n+1)^|T| |X - X| for n <= n_max
    unsigned n_max = 0;
};

inline GrowthVerdict growth_from_cover(const GroupSpec& g, const GroupSet& x, const std::vector<Idx>& t,
                                       unsigned n_max) {
    GrowthVerdict out;
    out.n_max = n_max;
    const GroupSet xmx = difference_set(g, x, x);
    const GroupSet hull = sumset(g, span_set(g, t), xmx);
    out.premise_ok = difference_set(g, iterated(g, 2, x), x).subset_of(hull);
    if (!out.premise_ok) return out;
    out.inequality_ok = true;
    for (unsigned n = 1; n <= n_max; ++n) {
        const std::uint64_t lhs = difference_set(g, iterated(g, n + 1, x), x).size();
        const long double rhs =
            std::pow(static_cast<long double>(2 * n + 1), static_cast<long double>(t.size())) *
            static_cast<long double>(xmx.size());
        if (static_cast<long double>(lhs) > rhs) out.inequality_ok = false;
    }
    return out;
}

}  // namespace addcomb
