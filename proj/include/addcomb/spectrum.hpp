#pragma once

// Riesz products, relative dissociativity, the relative Chang entropy bound,
// and the annihilating-dissociated-sets construction.
//
// The sup over omega of a Riesz-product mean is approximated from below by
// cyclic coordinate ascent over m-th roots of unity: the integrand is
// real-affine in each omega(lambda) over the unit disc, so every coordinate
// optimum sits on the circle.  A missed witness can only shorten the greedy
// chain; every downstream conclusion is re-verified directly, so grid
// resolution never produces a false certificate.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "addcomb/bohr.hpp"
#include "addcomb/fourier.hpp"
#include "addcomb/group.hpp"
#include "addcomb/rng.hpp"

namespace addcomb {

/// Precomputed character values over the support of mu for one Lambda.
class RieszWorkspace {
  public:
    RieszWorkspace(const GroupSpec& g, const std::vector<Idx>& lambda, const Measure& mu) {
        for (std::uint64_t x = 0; x < g.order(); ++x) {
            if (mu[static_cast<Idx>(x)] > 0.0) {
                support_.push_back(static_cast<Idx>(x));
                weight_.push_back(mu[static_cast<Idx>(x)]);
            }
        }
        vals_.resize(lambda.size());
        for (size_t i = 0; i < lambda.size(); ++i) {
            vals_[i].resize(support_.size());
            for (size_t j = 0; j < support_.size(); ++j) vals_[i][j] = g.char_eval(lambda[i], support_[j]);
        }
    }

    size_t arity() const { return vals_.size(); }

    double eval(std::span<const cplx> omega) const {
        double acc = 0.0;
        for (size_t j = 0; j < support_.size(); ++j) {
            double prod = weight_[j];
            for (size_t i = 0; i < vals_.size(); ++i) {
                prod *= 1.0 + (omega[i] * vals_[i][j]).real();
            }
            acc += prod;
        }
        return acc;
    }

    /// Integral as an affine function of coordinate i: value = A + Re(omega_i B).
    std::pair<double, cplx> affine_in(size_t i, std::span<const cplx> omega) const {
        double a = 0.0;
        cplx b{0.0, 0.0};
        for (size_t j = 0; j < support_.size(); ++j) {
            double q = weight_[j];
            for (size_t l = 0; l < vals_.size(); ++l) {
                if (l == i) continue;
                q *= 1.0 + (omega[l] * vals_[l][j]).real();
            }
            a += q;
            b += q * vals_[i][j];
        }
        return {a, b};
    }

  private:
    std::vector<Idx> support_;
    std::vector<double> weight_;
    std::vector<std::vector<cplx>> vals_;
};

/// Exact expectation of p_{omega,Lambda} = prod (1 + Re omega(l) l(x)) under mu.
inline double riesz_eval(const GroupSpec& g, const std::vector<Idx>& lambda, const std::vector<cplx>& omega,
                         const Measure& mu) {
    if (lambda.size() != omega.size()) throw std::invalid_argument("riesz_eval: one omega per lambda");
    for (const cplx& w : omega)
        if (std::abs(w) > 1.0 + 1e-12) throw std::invalid_argument("riesz_eval: |omega| <= 1 required");
    return RieszWorkspace(g, lambda, mu).eval(omega);
}

struct DissociativityReport {
    double max_found = 1.0;  // certified lower bound on sup over omega
    std::vector<cplx> omega;
    double level = 0.0;       // K
    bool dissociated = false; // max_found <= exp(K)
    int grid = 32;
};

inline constexpr int kDefaultPhaseGrid = 32;
inline constexpr int kDefaultAscentStarts = 5;

/// Maximize the Riesz-product mean by cyclic coordinate ascent over m-th
/// roots of unity with multi-start; verdict compares the best value found
/// against exp(K).  With early_exit the search stops at the first witness
/// above the threshold.
inline DissociativityReport dissociation_test(const GroupSpec& g, const std::vector<Idx>& lambda, const Measure& mu,
                                              double level, int grid = kDefaultPhaseGrid,
                                              int starts = kDefaultAscentStarts, bool early_exit = true) {
    if (grid < 8) throw std::invalid_argument("dissociation_test: phase grid must be >= 8");
    DissociativityReport rep;
    rep.level = level;
    rep.grid = grid;
    rep.omega.assign(lambda.size(), cplx{1.0, 0.0});
    if (lambda.empty()) {
        rep.max_found = mu.mass();
        rep.dissociated = rep.max_found <= std::exp(level) + 1e-12;
        return rep;
    }
    const RieszWorkspace ws(g, lambda, mu);
    std::vector<cplx> roots(static_cast<size_t>(grid));
    for (int j = 0; j < grid; ++j) roots[static_cast<size_t>(j)] = detail::unit_root(static_cast<std::uint64_t>(j),
                                                                                      static_cast<std::uint64_t>(grid), 1);
    const double threshold = std::exp(level);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);

    for (int s = 0; s < starts; ++s) {
        std::vector<cplx> omega(lambda.size());
        for (auto& w : omega) w = s == 0 ? cplx{1.0, 0.0} : roots[uniform_below(rng, roots.size())];
        double cur = ws.eval(omega);
        for (int sweep = 0; sweep < 64; ++sweep) {
            bool improved = false;
            for (size_t i = 0; i < omega.size(); ++i) {
                const auto [a, b] = ws.affine_in(i, omega);
                double best = cur;
                cplx best_w = omega[i];
                for (const cplx& u : roots) {
                    const double v = a + (u * b).real();
                    if (v > best + 1e-15) {
                        best = v;
                        best_w = u;
                    }
                }
                if (best > cur) {
                    // ascent is monotone by construction
                    omega[i] = best_w;
                    cur = best;
                    improved = true;
                }
            }
            if (cur > rep.max_found) {
                rep.max_found = cur;
                rep.omega = omega;
            }
            if (early_exit && rep.max_found > threshold + 1e-12) {
                rep.dissociated = false;
                return rep;
            }
            if (!improved) break;
        }
    }
    rep.dissociated = rep.max_found <= threshold + 1e-12;
    return rep;
}

struct EntropyEstimate {
    std::vector<Idx> lambda;  // greedy maximal K-dissociated chain
    double eta = 1.0;
    int chain_steps = 0;
    bool overflowed = false;  // chain wanted to exceed the size cap
};

/// Greedy chain Lambda_0 = {} in Lambda_1 in ..., adding gamma only if the
/// extension passes the eta_{i+1} = (i+1) eta / 2(k+1) dissociation test.
inline EntropyEstimate max_dissociated(const GroupSpec& g, const std::vector<Idx>& delta, const Measure& mu,
                                       double eta, int k_cap, int grid = kDefaultPhaseGrid) {
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("max_dissociated: eta in (0,1]");
    EntropyEstimate out;
    out.eta = eta;
    std::vector<char> used(delta.size(), 0);
    for (int i = 0;; ++i) {
        if (static_cast<int>(out.lambda.size()) > k_cap) {
            out.overflowed = true;
            return out;
        }
        const double eta_next = (i + 1) * eta / (2.0 * (k_cap + 1));
        bool added = false;
        for (size_t c = 0; c < delta.size(); ++c) {
            if (used[c]) continue;
            std::vector<Idx> cand = out.lambda;
            cand.push_back(delta[c]);
            if (dissociation_test(g, cand, mu, eta_next, grid).dissociated) {
                out.lambda = std::move(cand);
                used[c] = 1;
                added = true;
                break;
            }
        }
        out.chain_steps = i + 1;
        if (!added) break;
        if (static_cast<int>(out.lambda.size()) > k_cap) {
            out.overflowed = true;
            return out;
        }
    }
    return out;
}

/// Property harness for monotonicity of dissociativity: if (Lambda, mu, K)
/// certifies dissociated at this grid then (Lambda' subset, mu' * mu, K' >= K)
/// must as well.  Returns false only on a violation (none expected).
inline bool monotonicity_check(const GroupSpec& g, const std::vector<Idx>& lambda, const std::vector<Idx>& lambda_sub,
                               const Measure& mu, const Measure& mu_other, double level, double level_up,
                               int grid = kDefaultPhaseGrid) {
    const auto base = dissociation_test(g, lambda, mu, level, grid);
    if (!base.dissociated) return true;  // nothing to propagate
    const Measure conv = convolve_mm(g, mu_other, mu);
    const auto derived = dissociation_test(g, lambda_sub, conv, level_up, grid);
    return derived.dissociated;
}

struct ChangBound {
    std::vector<Idx> spec;
    EntropyEstimate estimate;
    double l_f = 0.0;        // ||f||_{L2(mu)} / ||f||_{L1(mu)}
    double reference = 0.0;  // eps^{-2} log(2 L_f)  (O-constant unspecified)
    double ratio = 0.0;      // |Lambda| / reference
};

/// Relative Chang bound: Spec_eps(f, mu) has (1, mu)-relative entropy
/// O(eps^{-2} log 2 L_f).  The greedy lower bound is computed and the ratio
/// against the reference value is reported, never asserted.
inline ChangBound chang_bound(const GroupSpec& g, const Density& f, const Measure& mu, double eps,
                              int grid = kDefaultPhaseGrid) {
    ChangBound out;
    out.spec = large_spectrum(g, f, mu, eps);
    out.l_f = lpmu_norm(f, mu, 2.0) / lpmu_norm(f, mu, 1.0);
    out.reference = std::log(2.0 * out.l_f) / (eps * eps);
    int k_cap = std::max(1, static_cast<int>(std::ceil(out.reference)));
    for (int attempt = 0; attempt < 8; ++attempt, k_cap *= 2) {
        out.estimate = max_dissociated(g, out.spec, mu, 1.0, k_cap, grid);
        if (!out.estimate.overflowed) break;
    }
    out.ratio = out.reference > 0.0 ? static_cast<double>(out.estimate.lambda.size()) / out.reference : 0.0;
    return out;
}

struct AnnihilateResult {
    std::vector<Idx> lambda;
    double rho = 0.0;        // scale of the beta_rho factors
    double rho_prime = 0.0;  // dilate of B in the composite set
    double nu = 0.0;         // dilate of the width-2 Bohr set on Lambda
    double target = 0.0;
    double max_dist = 0.0;   // max over x in B'', gamma in Delta of |1-gamma(x)|
    bool verified = false;
    int k_cap = 0;
    int grid = kDefaultPhaseGrid;
    std::vector<Idx> bpp_freq;
    std::vector<double> bpp_width;
};

namespace detail {

inline std::vector<Idx> span_characters(const GroupSpec& g, const std::vector<Idx>& lambda) {
    if (lambda.size() > 14) throw BudgetError("annihilate_spectrum: |Lambda| > 14 in span search");
    std::vector<Idx> span{0};
    for (Idx l : lambda) {
        std::vector<Idx> next;
        next.reserve(span.size() * 3);
        for (Idx v : span) {
            next.push_back(v);
            next.push_back(g.add(v, l));
            next.push_back(g.add(v, g.neg(l)));
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        span = std::move(next);
    }
    return span;
}

}  // namespace detail

/// Annihilating dissociated sets: run the greedy chain against
/// beta+ = beta_{1+L rho} * beta_rho^{(*L)}, locate for every gamma in Delta
/// a lambda in Span(Lambda) with |betahat_rho(gamma - lambda)| >= 1/2, and
/// pick (rho', nu) by direct verification so that the composite Bohr set
/// B'' = B_{rho'} meet B'_nu annihilates Delta to within the target.
inline AnnihilateResult annihilate_spectrum(const RegularBohr& rb, const std::vector<Idx>& delta, double eta,
                                            double target, int k_cap_hint, int grid = kDefaultPhaseGrid) {
    const BohrSet& b = rb.set;
    const GroupSpec& g = b.group();
    AnnihilateResult out;
    out.target = target;
    out.grid = grid;

    int k_cap = std::max(1, k_cap_hint);
    for (int grid_escalation = 0; grid_escalation < 3; ++grid_escalation, grid *= 2) {
        for (int k_escalation = 0; k_escalation < 4; ++k_escalation, k_cap *= 2) {
            const double L_real = std::ceil(k_cap * std::log2(3.0) + std::log2(2.0 * (k_cap + 1) / eta));
            const unsigned L = static_cast<unsigned>(std::max(1.0, L_real));

            // Largest dyadic rho with |B_{1+2L rho}| <= (1+eta/3)|B|; the
            // pointwise domination beta <= (1+eta/3) beta+ follows.
            double rho = 1.0;
            const double cap = (1.0 + eta / 3.0) * static_cast<double>(b.size());
            while (rho > 1e-9 && static_cast<double>(b.size_at(1.0 + 2.0 * L * rho)) > cap) rho *= 0.5;
            if (rho <= 1e-9) continue;
            out.rho = rho;

            // beta+ via transforms of the two uniform measures.
            const Measure beta_outer = bohr_measure(b, 1.0 + L * rho);
            const Measure beta_rho = bohr_measure(b, rho);
            FourierTable t_out = dft_measure(g, beta_outer);
            const FourierTable t_rho = dft_measure(g, beta_rho);
            for (std::uint64_t i = 0; i < g.order(); ++i) {
                cplx pw{1.0, 0.0};
                for (unsigned l = 0; l < L; ++l) pw *= t_rho[i];
                t_out[i] *= pw;
            }
            std::vector<cplx> plus_vals = idft(g, t_out);
            Measure beta_plus(g);
            double mass = 0.0;
            for (std::uint64_t i = 0; i < g.order(); ++i) {
                const double v = std::max(0.0, plus_vals[i].real() / static_cast<double>(g.order()));
                beta_plus.at(static_cast<Idx>(i)) = v;
                mass += v;
            }
            for (std::uint64_t i = 0; i < g.order(); ++i) beta_plus.at(static_cast<Idx>(i)) /= mass;

            EntropyEstimate chain = max_dissociated(g, delta, beta_plus, eta, k_cap, grid);
            if (chain.overflowed) continue;  // escalate k_cap
            out.lambda = chain.lambda;
            out.k_cap = k_cap;
            out.grid = grid;

            // Span search: every gamma in Delta must sit within betahat_rho
            // reach of Span(Lambda).
            const std::vector<Idx> span = detail::span_characters(g, out.lambda);
            bool span_ok = true;
            for (Idx gamma : delta) {
                bool found = false;
                for (Idx l : span) {
                    if (std::abs(t_rho[g.sub(gamma, l)]) >= 0.5 - 1e-12) {
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    span_ok = false;
                    break;
                }
            }
            if (!span_ok) break;  // escalate phase grid

            // Direct search for (rho', nu) meeting the target.
            const BohrSet bprime = out.lambda.empty()
                                       ? BohrSet(g, {}, {})
                                       : BohrSet(g, out.lambda, std::vector<double>(out.lambda.size(), 2.0));
            for (int j = 1; j <= 20; ++j) {
                const double rp = rho * std::pow(0.5, j);
                const double nu = std::pow(0.5, j);
                BohrSet bpp = meet(dilate(b, rp), dilate(bprime, nu));
                double worst = 0.0;
                const GroupSet mem = bpp.members();
                for (Idx gamma : delta) {
                    for (Idx x : mem.members()) worst = std::max(worst, g.char_dist(gamma, x));
                    if (worst > target) break;
                }
                if (worst <= target) {
                    out.rho_prime = rp;
                    out.nu = nu;
                    out.max_dist = worst;
                    out.verified = true;
                    out.bpp_freq = bpp.freq();
                    out.bpp_width = bpp.width();
                    return out;
                }
            }
            break;  // targets unreachable at this grid: escalate grid
        }
    }
    throw VerificationError("annihilate_spectrum: escalations exhausted without a verified annihilator");
}

}  // namespace addcomb
