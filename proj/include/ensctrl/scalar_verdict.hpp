#pragma once

#include <functional>

#include "ensctrl/branch.hpp"
#include "ensctrl/verdict.hpp"

namespace ensctrl {

/// Ensemble Controllability Gramian D(eta): one row of input evaluations per
/// preimage point of eta, in ascending beta order.
struct EnsembleGramian {
    double eta;
    Eigen::MatrixXd D;            // kappa x m
    int rank;
    Eigen::VectorXd singular_values;
    std::vector<double> preimage_points;
    int kappa() const { return static_cast<int>(preimage_points.size()); }
};

/// Scalar ensemble dx/dt = a(beta) x + B(beta) U given as samplers so the
/// engine can redo the analysis on a refined grid.
struct ScalarEnsemble {
    std::function<SampledField(int n_grid)> drift;   // 1x1
    std::function<SampledField(int n_grid)> inputs;  // 1xm

    static ScalarEnsemble from_expressions(const expr::NodePtr& a,
                                           const std::vector<expr::NodePtr>& b,
                                           CompactInterval k);
};

/// Injectivity of the drift plus a nowhere-vanishing input.
Verdict single_input_verdict(const SampledField& a, const SampledField& b,
                             const AnalysisConfig& cfg = {});

EnsembleGramian build_gramian(const SampledField& a, const SampledField& input_row,
                              double eta, const AnalysisConfig& cfg = {});
EnsembleGramian build_gramian(const BranchDecomposition& d, const SampledField& a,
                              const SampledField& input_row, double eta,
                              const AnalysisConfig& cfg);

/// rank(D(eta)) = kappa(eta) over stratified eta samples, with a grid-doubling
/// stability pass. Disagreement between grids yields Inconclusive.
Verdict multi_input_verdict(const ScalarEnsemble& sys, const AnalysisConfig& cfg = {});

/// Single decision at a fixed grid, no stability pass.
Verdict multi_input_verdict_once(const SampledField& a, const SampledField& inputs,
                                 const AnalysisConfig& cfg, int n_eta);

/// Stratified eta samples over the drift range, skipping a guard band around
/// branch-junction images where kappa is discontinuous.
std::vector<double> sample_etas(const BranchDecomposition& d, const SampledField& a,
                                int n_eta);

}  // namespace ensctrl
