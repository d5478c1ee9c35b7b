#include "ensctrl/scalar_verdict.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace ensctrl {

std::string to_string(Status s) {
    switch (s) {
        case Status::Controllable: return "Controllable";
        case Status::NotControllable: return "NotControllable";
        case Status::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string to_string(Reason r) {
    switch (r) {
        case Reason::NonInjectiveSingleInput: return "NonInjectiveSingleInput";
        case Reason::VanishingInput: return "VanishingInput";
        case Reason::GramianRankDeficient: return "GramianRankDeficient";
        case Reason::DegenerateDrift: return "DegenerateDrift";
        case Reason::GridUnstable: return "GridUnstable";
        case Reason::KalmanRankDeficient: return "KalmanRankDeficient";
        case Reason::UnsupportedStructure: return "UnsupportedStructure";
    }
    return "?";
}

int numerical_rank(const Eigen::MatrixXd& m, double tol_rank, Eigen::VectorXd* sv) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd& s = svd.singularValues();
    if (sv) *sv = s;
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double thr = tol_rank * s(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thr) ++rank;
    return rank;
}

ScalarEnsemble ScalarEnsemble::from_expressions(const expr::NodePtr& a,
                                                const std::vector<expr::NodePtr>& b,
                                                CompactInterval k) {
    ScalarEnsemble sys;
    sys.drift = [a, k](int n) { return SampledField::sample_scalar(a, k, n); };
    sys.inputs = [b, k](int n) { return SampledField::sample(ExprMatrix{b}, k, n); };
    return sys;
}

namespace {

// min over grid of the row's max-abs entry, relative to the field's sup-norm.
bool row_vanishes(const SampledField& inputs, int row, double tol_vanish) {
    const double scale = inputs.uniform_norm();
    double lowest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < inputs.grid_size(); ++j)
        lowest = std::min(lowest, inputs.value(j).row(row).cwiseAbs().maxCoeff());
    return lowest <= tol_vanish * scale;
}

}  // namespace

Verdict single_input_verdict(const SampledField& a, const SampledField& b,
                             const AnalysisConfig& cfg) {
    Verdict v;
    v.config = cfg;
    const BranchDecomposition d = decompose(a, cfg.tol_mono);
    if (d.degenerate) {
        v.status = Status::NotControllable;
        v.evidence.push_back({Reason::DegenerateDrift, {}, {}, -1, -1,
                              "drift is constant on a subinterval"});
        return v;
    }
    if (d.branches.size() > 1) {
        v.status = Status::NotControllable;
        v.evidence.push_back({Reason::NonInjectiveSingleInput, {}, {}, -1, -1,
                              "drift has " + std::to_string(d.branches.size()) +
                                  " injective branches but one input"});
        return v;
    }
    if (row_vanishes(b, 0, cfg.tol_vanish)) {
        v.status = Status::NotControllable;
        v.evidence.push_back({Reason::VanishingInput, {}, {}, -1, -1,
                              "input vanishes somewhere on K"});
        return v;
    }
    v.status = Status::Controllable;
    return v;
}

EnsembleGramian build_gramian(const BranchDecomposition& d, const SampledField& a,
                              const SampledField& input_row, double eta,
                              const AnalysisConfig& cfg) {
    const Preimage p =
        preimage(d, a, eta, cfg.tol_val, cfg.merge_tolerance(a.spacing()));
    EnsembleGramian g;
    g.eta = eta;
    g.preimage_points = p.points;
    g.D.resize(p.kappa(), input_row.cols());
    for (int i = 0; i < p.kappa(); ++i) g.D.row(i) = input_row.eval_at(p.points[i]);
    g.rank = numerical_rank(g.D, cfg.tol_rank, &g.singular_values);
    return g;
}

EnsembleGramian build_gramian(const SampledField& a, const SampledField& input_row,
                              double eta, const AnalysisConfig& cfg) {
    return build_gramian(decompose(a, cfg.tol_mono), a, input_row, eta, cfg);
}

std::vector<double> sample_etas(const BranchDecomposition& d, const SampledField& a,
                                int n_eta) {
    const double lo = d.range_lo, hi = d.range_hi;
    const double range = hi - lo;
    const double guard = 2.0 * range / (a.grid_size() - 1);
    const std::vector<double> folds = junction_images(d, a);
    std::vector<double> etas;
    etas.reserve(n_eta);
    for (int k = 0; k < n_eta; ++k) {
        const double eta = lo + (k + 0.5) * range / n_eta;
        bool guarded = false;
        for (double f : folds)
            if (std::fabs(eta - f) < guard) { guarded = true; break; }
        if (!guarded) etas.push_back(eta);
    }
    return etas;
}

Verdict multi_input_verdict_once(const SampledField& a, const SampledField& inputs,
                                 const AnalysisConfig& cfg, int n_eta) {
    Verdict v;
    v.config = cfg;
    // With one input the injectivity criterion is exact and sharper than eta
    // sampling: a fold narrower than the sampling guard bands would otherwise
    // slip through.
    if (inputs.cols() == 1) return single_input_verdict(a, inputs, cfg);
    if (row_vanishes(inputs, 0, cfg.tol_vanish)) {
        v.status = Status::NotControllable;
        v.evidence.push_back({Reason::VanishingInput, {}, {}, -1, -1,
                              "input row vanishes somewhere on K"});
        return v;
    }
    const BranchDecomposition d = decompose(a, cfg.tol_mono);
    if (d.degenerate) {
        v.status = Status::NotControllable;
        v.evidence.push_back({Reason::DegenerateDrift, {}, {}, -1, -1,
                              "drift is constant on a subinterval"});
        return v;
    }
    for (double eta : sample_etas(d, a, n_eta)) {
        const EnsembleGramian g = build_gramian(d, a, inputs, eta, cfg);
        if (g.rank < g.kappa()) {
            v.status = Status::NotControllable;
            v.evidence.push_back({Reason::GramianRankDeficient, {eta}, {g.kappa()},
                                  g.rank, g.kappa(), "rank(D(eta)) < kappa(eta)"});
            return v;
        }
    }
    v.status = Status::Controllable;
    return v;
}

Verdict multi_input_verdict(const ScalarEnsemble& sys, const AnalysisConfig& cfg) {
    const SampledField a = sys.drift(cfg.n_grid);
    const SampledField b = sys.inputs(cfg.n_grid);
    Verdict first = multi_input_verdict_once(a, b, cfg, cfg.n_eta);
    if (!cfg.stability_check) return first;

    const int fine_grid = 2 * cfg.n_grid - 1;
    AnalysisConfig fine = cfg;
    fine.n_grid = fine_grid;
    Verdict second = multi_input_verdict_once(sys.drift(fine_grid), sys.inputs(fine_grid),
                                              fine, 2 * cfg.n_eta);
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
