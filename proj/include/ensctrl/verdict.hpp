#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace ensctrl {

enum class Status { Controllable, NotControllable, Inconclusive };

enum class Reason {
    NonInjectiveSingleInput,
    VanishingInput,
    GramianRankDeficient,
    DegenerateDrift,
    GridUnstable,
    KalmanRankDeficient,
    UnsupportedStructure,
};

std::string to_string(Status s);
std::string to_string(Reason r);

struct Evidence {
    Reason reason;
    std::vector<double> eta;   // failing eta or eta tuple, possibly empty
    std::vector<int> kappas;   // per-channel preimage cardinalities
    int rank = -1;
    int required_rank = -1;
    std::string detail;
};

/// Every numerical knob behind a verdict; recorded in certificates so that a
/// claim can be reproduced.
struct AnalysisConfig {
    int n_grid = 201;
    int n_eta = 128;            // scalar-channel eta samples
    int eta_per_channel = 32;   // product-grid samples per channel, n <= 3
    int n_tuples = 4096;        // Latin-hypercube tuples, 4 <= n <= 8
    double tol_rank = 1e-8;
    double tol_mono = 1e-9;
    double tol_merge = -1.0;    // < 0: use 2x grid spacing
    double tol_val = 1e-8;
    double tol_vanish = 1e-8;
    double cond_max = 1e8;
    std::uint64_t seed = 0;
    bool stability_check = true;

    double merge_tolerance(double spacing) const {
        return tol_merge >= 0.0 ? tol_merge : 2.0 * spacing;
    }
};

struct Verdict {
    Status status = Status::Inconclusive;
    std::vector<Evidence> evidence;
    AnalysisConfig config;

    bool controllable() const { return status == Status::Controllable; }
};

/// Numerical rank by singular values with a relative threshold.
int numerical_rank(const Eigen::MatrixXd& m, double tol_rank,
                   Eigen::VectorXd* singular_values = nullptr);

}  // namespace ensctrl
