#include "ensctrl/multidim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ensctrl {

int kalman_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol_rank) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(b.cols());
    if (a.cols() != n || b.rows() != n) throw std::invalid_argument("kalman_rank: shape mismatch");
    Eigen::MatrixXd w(n, n * m);
    Eigen::MatrixXd block = b;
    for (int k = 0; k < n; ++k) {
        w.middleCols(k * m, m) = block;
        if (k + 1 < n) block = a * block;
    }
    return numerical_rank(w, tol_rank);
}

ReparameterizedSystem build_reparameterized(const std::vector<Channel>& channels,
                                            const std::vector<double>& eta,
                                            const AnalysisConfig& cfg) {
    if (eta.size() != channels.size())
        throw std::invalid_argument("eta tuple size does not match channel count");
    ReparameterizedSystem rs;
    rs.eta = eta;
    std::vector<Eigen::MatrixXd> grams;
    int total = 0;
    const int m = channels.empty() ? 0 : channels[0].input_row.cols();
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const EnsembleGramian g = build_gramian(channels[i].decomposition, channels[i].lambda,
                                                channels[i].input_row, eta[i], cfg);
        rs.kappas.push_back(g.kappa());
        total += g.kappa();
        grams.push_back(g.D);
    }
    rs.a_sys = Eigen::MatrixXd::Zero(total, total);
    rs.b_sys = Eigen::MatrixXd::Zero(total, m);
    int offset = 0;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const int k = rs.kappas[i];
        rs.a_sys.block(offset, offset, k, k) = eta[i] * Eigen::MatrixXd::Identity(k, k);
        rs.b_sys.middleRows(offset, k) = grams[i];
        offset += k;
    }
    return rs;
}

ReparameterizedSystem build_reparameterized(const SpectralProfile& profile,
                                            const SampledField& btilde,
                                            const std::vector<double>& eta,
                                            const AnalysisConfig& cfg) {
    std::vector<Channel> channels;
    for (std::size_t i = 0; i < profile.lambda.size(); ++i) {
        const SampledField& lam = profile.lambda[i];
        channels.push_back({lam, decompose(lam, cfg.tol_mono), btilde.row(static_cast<int>(i))});
    }
    return build_reparameterized(channels, eta, cfg);
}

namespace {

bool row_vanishes(const SampledField& b, int row, double tol_vanish) {
    const double scale = b.uniform_norm();
    double lowest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < b.grid_size(); ++j)
        lowest = std::min(lowest, b.value(j).row(row).cwiseAbs().maxCoeff());
    return lowest <= tol_vanish * scale;
}

bool in_guard_band(const Channel& ch, double value) {
    const double range = ch.decomposition.range_hi - ch.decomposition.range_lo;
    const double guard = 2.0 * range / (ch.lambda.grid_size() - 1);
    for (double f : junction_images(ch.decomposition, ch.lambda))
        if (std::fabs(value - f) < guard) return true;
    return false;
}

}  // namespace

std::vector<std::vector<double>> sample_eta_tuples(const std::vector<Channel>& channels,
                                                   const AnalysisConfig& cfg,
                                                   int per_channel, int n_tuples) {
    const int n = static_cast<int>(channels.size());
    if (n > 8) throw std::invalid_argument("channel count above 8 is not supported");

    std::vector<std::vector<double>> strata(n);
    for (int i = 0; i < n; ++i)
        strata[i] = sample_etas(channels[i].decomposition, channels[i].lambda, per_channel);

    std::vector<std::vector<double>> tuples;
    if (n <= 3) {
        std::vector<std::size_t> idx(n, 0);
        for (;;) {
            std::vector<double> t(n);
            for (int i = 0; i < n; ++i) t[i] = strata[i][idx[i]];
            tuples.push_back(std::move(t));
            int i = n - 1;
            while (i >= 0 && ++idx[i] == strata[i].size()) idx[i--] = 0;
            if (i < 0) break;
        }
    } else {
        // Latin hypercube over the per-channel ranges, folds skipped by
        // snapping to the guard-band edge.
        std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ull);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::vector<int>> perms(n);
        for (int i = 0; i < n; ++i) {
            perms[i].resize(n_tuples);
            std::iota(perms[i].begin(), perms[i].end(), 0);
            std::shuffle(perms[i].begin(), perms[i].end(), rng);
        }
        for (int t = 0; t < n_tuples; ++t) {
            std::vector<double> tup(n);
            for (int i = 0; i < n; ++i) {
                const double lo = channels[i].decomposition.range_lo;
                const double range = channels[i].decomposition.range_hi - lo;
                double val = lo + (perms[i][t] + unit(rng)) * range / n_tuples;
                for (int attempt = 0; attempt < 8 && in_guard_band(channels[i], val); ++attempt)
                    val = lo + (perms[i][t] + unit(rng)) * range / n_tuples;
                tup[i] = val;
            }
            bool guarded = false;
            for (int i = 0; i < n; ++i) guarded = guarded || in_guard_band(channels[i], tup[i]);
            if (!guarded) tuples.push_back(std::move(tup));
        }
    }

    // Collision tuples: rank deficiencies from shared spectra sit exactly on
    // the variety where channels take equal values, which generic sampling
    // misses. For every channel subset with overlapping ranges, pin those
    // channels to a common value.
    std::mt19937_64 rng(cfg.seed + 0x5851f42d4c957f2dull);
    const int c_count = n <= 3 ? per_channel : 8;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        if (std::popcount(mask) < 2) continue;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                lo = std::max(lo, channels[i].decomposition.range_lo);
                hi = std::min(hi, channels[i].decomposition.range_hi);
            }
        if (!(hi > lo)) continue;

        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
            if (!(mask & (1u << i))) rest.push_back(i);

        std::vector<std::vector<double>> completions;
        if (n <= 3) {
            completions.push_back({});
            for (int i : rest) {
                std::vector<std::vector<double>> next;
                for (const auto& c : completions)
                    for (double v : strata[i]) {
                        auto cc = c;
                        cc.push_back(v);
                        next.push_back(std::move(cc));
                    }
                completions = std::move(next);
            }
        } else {
            for (int rep = 0; rep < 4; ++rep) {
                std::vector<double> c;
                for (int i : rest) c.push_back(strata[i][rng() % strata[i].size()]);
                completions.push_back(std::move(c));
            }
        }

        for (int k = 0; k < c_count; ++k) {
            const double s = lo + (k + 0.5) * (hi - lo) / c_count;
            bool guarded = false;
            for (int i = 0; i < n; ++i)
                if ((mask & (1u << i)) && in_guard_band(channels[i], s)) guarded = true;
            if (guarded) continue;
            for (const auto& c : completions) {
                std::vector<double> tup(n);
                std::size_t r = 0;
                for (int i = 0; i < n; ++i)
                    tup[i] = (mask & (1u << i)) ? s : c[r++];
                tuples.push_back(std::move(tup));
            }
        }
    }
    return tuples;
}

Verdict ensemble_verdict_once(const SampledField& a, const SampledField& b,
                              const AnalysisConfig& cfg, int per_channel, int n_tuples) {
    Verdict v;
    v.config = cfg;
    const int n = a.rows();
    for (int i = 0; i < n; ++i) {
        if (row_vanishes(b, i, cfg.tol_vanish)) {
            v.status = Status::NotControllable;
            v.evidence.push_back({Reason::VanishingInput, {}, {}, -1, -1,
                                  "input row " + std::to_string(i) + " vanishes somewhere on K"});
            return v;
        }
    }

    const SpectralProfile profile = classify(a, cfg);
    if (profile.tag == StructureTag::Unsupported) {
        v.status = Status::Inconclusive;
        v.evidence.push_back({Reason::UnsupportedStructure, {}, {}, -1, -1, profile.note});
        return v;
    }

    if (profile.tag == StructureTag::JordanBlock) {
        const BranchDecomposition dec = decompose(profile.lambda[0], cfg.tol_mono);
        if (!dec.degenerate && dec.branches.size() == 1) {
            // Single Jordan block with injective eigenvalue: controllable
            // exactly when B(beta) keeps full row rank across K.
            for (int j = 0; j < a.grid_size(); ++j) {
                const int r = numerical_rank(b.value(j), cfg.tol_rank);
                if (r < n) {
                    v.status = Status::NotControllable;
                    v.evidence.push_back({Reason::KalmanRankDeficient, {b.grid_point(j)}, {}, r, n,
                                          "rank(B(beta)) < n at beta=" +
                                              std::to_string(b.grid_point(j))});
                    return v;
                }
            }
            v.status = Status::Controllable;
            return v;
        }
        // Non-injective eigenvalue: fall through to the diagonal counterpart
        // with n identical curves.
    }

    SampledField btilde = b;
    if (profile.needs_transform()) {
        btilde = transformed_inputs(profile, b);
        for (int i = 0; i < n; ++i) {
            if (row_vanishes(btilde, i, cfg.tol_vanish)) {
                v.status = Status::NotControllable;
                v.evidence.push_back({Reason::VanishingInput, {}, {}, -1, -1,
                                      "transformed input row " + std::to_string(i) +
                                          " vanishes somewhere on K"});
                return v;
            }
        }
    }

    // Eigensolver noise can turn an exactly constant curve into a faintly
    // varying one; judge flatness against the matrix scale, not the curve's
    // own range.
    const double a_scale = std::max(a.uniform_norm(), 1.0);
    std::vector<Channel> channels;
    for (int i = 0; i < n; ++i) {
        Channel ch{profile.lambda[i], decompose(profile.lambda[i], cfg.tol_mono),
                   btilde.row(i)};
        if (ch.decomposition.range_hi - ch.decomposition.range_lo <= 1e-12 * a_scale)
            ch.decomposition.degenerate = true;
        if (ch.decomposition.degenerate) {
            v.status = Status::NotControllable;
            v.evidence.push_back({Reason::DegenerateDrift, {}, {}, -1, -1,
                                  "eigenvalue curve " + std::to_string(i) +
                                      " is constant on a subinterval"});
            return v;
        }
        channels.push_back(std::move(ch));
    }

    for (const auto& tuple : sample_eta_tuples(channels, cfg, per_channel, n_tuples)) {
        const ReparameterizedSystem rs = build_reparameterized(channels, tuple, cfg);
        const int rank = kalman_rank(rs.a_sys, rs.b_sys, cfg.tol_rank);
        if (rank < rs.total_dim()) {
            v.status = Status::NotControllable;
            v.evidence.push_back({Reason::KalmanRankDeficient, tuple, rs.kappas, rank,
                                  rs.total_dim(), "stacked Kalman test fails"});
            return v;
        }
    }
    v.status = Status::Controllable;
    return v;
}

Verdict ensemble_verdict(const EnsembleSystem& sys, const AnalysisConfig& cfg) {
    Verdict first = ensemble_verdict_once(sys.sample_a(cfg.n_grid), sys.sample_b(cfg.n_grid),
                                          cfg, cfg.eta_per_channel, cfg.n_tuples);
    if (!cfg.stability_check) return first;

    AnalysisConfig fine = cfg;
    fine.n_grid = 2 * cfg.n_grid - 1;
    Verdict second =
        ensemble_verdict_once(sys.sample_a(fine.n_grid), sys.sample_b(fine.n_grid), fine,
                              2 * cfg.eta_per_channel, 2 * cfg.n_tuples);
    if (second.status != first.status) {
        Verdict v;
        v.config = cfg;
        v.status = Status::Inconclusive;
        v.evidence.push_back({Reason::GridUnstable, {}, {}, -1, -1,
                              "verdict flipped from " + to_string(first.status) + " to " +
                                  to_string(second.status) + " under grid doubling"});
        return v;
    }
    return first;
}

}  // namespace ensctrl
