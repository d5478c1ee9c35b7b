#pragma once

#include <vector>

#include "ensctrl/field.hpp"

namespace ensctrl {

/// Maximal subinterval of K on which the drift is strictly monotone,
/// identified by inclusive grid-node indices.
struct Branch {
    int first;
    int last;
    int sign;  // +1 increasing, -1 decreasing
};

struct BranchDecomposition {
    std::vector<Branch> branches;
    bool degenerate = false;   // drift locally constant on some subinterval
    double range_lo = 0.0;     // S = a(K)
    double range_hi = 0.0;
};

struct Preimage {
    double eta;
    std::vector<double> points;  // ascending beta
    int kappa() const { return static_cast<int>(points.size()); }
};

struct BranchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Splits K at sign changes of consecutive finite differences of the sampled
/// drift. A run of more than one grid step with |delta| below tol_mono times
/// the drift's value range marks the decomposition degenerate.
BranchDecomposition decompose(const SampledField& a, double tol_mono);

/// All preimage points of eta under the interpolant of a, one candidate per
/// branch whose image contains eta; candidates closer than tol_merge collapse
/// to a single point.
Preimage preimage(const BranchDecomposition& d, const SampledField& a, double eta,
                  double tol_val, double tol_merge);

/// Drift values at interior branch junctions (fold points). Rank sampling
/// keeps a guard band around these; kappa is discontinuous across them.
std::vector<double> junction_images(const BranchDecomposition& d, const SampledField& a);

}  // namespace ensctrl
