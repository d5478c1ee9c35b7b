#pragma once

#include "ensctrl/system.hpp"

namespace ensctrl {

/// Piecewise-constant control on [0, T]: P uniform segments, one value row
/// per segment.
struct ControlSchedule {
    double horizon;
    int segments;
    Eigen::MatrixXd values;  // P x m
};

struct SteeringReport {
    double predicted_error = 0.0;   // sup-norm of the least-squares residual
    double simulated_error = 0.0;   // sup-norm against the target after simulation
    double epsilon = 0.0;
    double energy = 0.0;            // sum of squared values times segment length
    bool converged = false;
};

/// Discretized reachability map: column block (p, j) is the final-state
/// response of input channel j held at 1 over segment p, per grid point.
/// Shape (n_grid * n, P * m); the zero-initial-state response is G vec(U).
Eigen::MatrixXd reachability_operator(const SampledField& a, const SampledField& b,
                                      double horizon, int segments);

/// Ridge-regularized least squares against the target deviation, followed by
/// a verification simulation.
std::pair<ControlSchedule, SteeringReport> synthesize(
    const SampledField& a, const SampledField& b, const SampledField& x0,
    const SampledField& xf, double horizon, int segments, double ridge = -1.0,
    double epsilon = 0.0, int steps_per_segment = 64);

/// Fixed-step RK4 integration at every grid point independently; returns the
/// final state x(T, .).
SampledField simulate(const SampledField& a, const SampledField& b, const SampledField& x0,
                      const ControlSchedule& schedule, int steps_per_segment);

}  // namespace ensctrl
