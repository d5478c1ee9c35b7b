#pragma once

#include "ensctrl/scalar_verdict.hpp"
#include "ensctrl/spectral.hpp"
#include "ensctrl/system.hpp"

namespace ensctrl {

/// Classical controllability test: rank [B | AB | ... | A^(N-1)B].
int kalman_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol_rank);

/// One eigenvalue curve together with its branch structure and the matching
/// row of the (transformed) input matrix.
struct Channel {
    SampledField lambda;
    BranchDecomposition decomposition;
    SampledField input_row;  // 1 x m
};

/// Finite-dimensional block system indexed by an eigenvalue tuple: block i is
/// eta_i * I_kappa_i, fed by the channel Gramian D_i(eta_i).
struct ReparameterizedSystem {
    std::vector<double> eta;
    std::vector<int> kappas;
    Eigen::MatrixXd a_sys;  // N x N
    Eigen::MatrixXd b_sys;  // N x m
    int total_dim() const { return static_cast<int>(a_sys.rows()); }
};

ReparameterizedSystem build_reparameterized(const std::vector<Channel>& channels,
                                            const std::vector<double>& eta,
                                            const AnalysisConfig& cfg);

/// Convenience overload operating on a spectral profile plus transformed
/// input matrix; row i of btilde is channel i's input row.
ReparameterizedSystem build_reparameterized(const SpectralProfile& profile,
                                            const SampledField& btilde,
                                            const std::vector<double>& eta,
                                            const AnalysisConfig& cfg);

/// Full decision for the n-dimensional ensemble, with the grid-doubling
/// stability pass.
Verdict ensemble_verdict(const EnsembleSystem& sys, const AnalysisConfig& cfg = {});

/// Single decision at the grid fixed in cfg, no stability pass.
Verdict ensemble_verdict_once(const SampledField& a, const SampledField& b,
                              const AnalysisConfig& cfg, int per_channel, int n_tuples);

/// The eta tuples a decision samples: a product grid of per-channel strata
/// for n <= 3, a seeded Latin hypercube otherwise, in both cases augmented
/// with collision tuples where channels sharing spectrum take equal values.
std::vector<std::vector<double>> sample_eta_tuples(const std::vector<Channel>& channels,
                                                   const AnalysisConfig& cfg,
                                                   int per_channel, int n_tuples);

}  // namespace ensctrl
