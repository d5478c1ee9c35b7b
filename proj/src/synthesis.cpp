#include "ensctrl/synthesis.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ensctrl/expm.hpp"

namespace ensctrl {

Eigen::MatrixXd reachability_operator(const SampledField& a, const SampledField& b,
                                      double horizon, int segments) {
    if (horizon <= 0.0) throw std::invalid_argument("horizon must be positive");
    if (segments < 1) throw std::invalid_argument("segment count must be at least 1");
    const int g = a.grid_size();
    const int n = a.rows();
    const int m = b.cols();
    const double dt = horizon / segments;

    Eigen::MatrixXd op(g * n, segments * m);
    for (int j = 0; j < g; ++j) {
        const Eigen::MatrixXd& ag = a.value(j);
        const Eigen::MatrixXd step = expm(ag * dt);
        // Response of the last segment; earlier segments pick up one more
        // propagation through exp(A dt) each.
        Eigen::MatrixXd block = expm_integral(ag, dt) * b.value(j);
        for (int p = segments - 1; p >= 0; --p) {
            op.block(j * n, p * m, n, m) = block;
            if (p > 0) block = step * block;
        }
    }
    return op;
}

SampledField simulate(const SampledField& a, const SampledField& b, const SampledField& x0,
                      const ControlSchedule& schedule, int steps_per_segment) {
    if (steps_per_segment < 1) throw std::invalid_argument("steps_per_segment must be >= 1");
    const int g = a.grid_size();
    const int n = a.rows();
    const double dt = schedule.horizon / schedule.segments;
    const double h = dt / steps_per_segment;

    std::vector<Eigen::MatrixXd> final_states(g);
    for (int j = 0; j < g; ++j) {
        const Eigen::MatrixXd& ag = a.value(j);
        const Eigen::MatrixXd& bg = b.value(j);
        Eigen::VectorXd x = x0.value(j).col(0);
        for (int p = 0; p < schedule.segments; ++p) {
            const Eigen::VectorXd bu = bg * schedule.values.row(p).transpose();
            const auto f = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
                return ag * y + bu;
            };
            for (int s = 0; s < steps_per_segment; ++s) {
                const Eigen::VectorXd k1 = f(x);
                const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
                const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
                const Eigen::VectorXd k4 = f(x + h * k3);
                x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        final_states[j] = x;
    }
    return SampledField(a.interval(), g, n, 1, std::move(final_states));
}

std::pair<ControlSchedule, SteeringReport> synthesize(
    const SampledField& a, const SampledField& b, const SampledField& x0,
    const SampledField& xf, double horizon, int segments, double ridge, double epsilon,
    int steps_per_segment) {
    const int g = a.grid_size();
    const int n = a.rows();
    const int m = b.cols();

    const Eigen::MatrixXd op = reachability_operator(a, b, horizon, segments);

    // Target deviation from the free evolution of x0.
    Eigen::VectorXd r(g * n);
    for (int j = 0; j < g; ++j)
        r.segment(j * n, n) =
            xf.value(j).col(0) - expm(a.value(j) * horizon) * x0.value(j).col(0);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (ridge < 0.0) ridge = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;

    const Eigen::VectorXd projected = svd.matrixU().transpose() * r;
    Eigen::VectorXd filtered(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const double s = sv(i);
        const double denom = s * s + ridge * ridge;
        filtered(i) = denom > 0.0 ? s / denom * projected(i) : 0.0;
    }
    const Eigen::VectorXd u = svd.matrixV() * filtered;

    ControlSchedule schedule{horizon, segments,
                             Eigen::Map<const Eigen::MatrixXd>(u.data(), m, segments)
                                 .transpose()};

    SteeringReport report;
    report.epsilon = epsilon;
    report.predicted_error = (op * u - r).cwiseAbs().maxCoeff();
    report.energy = schedule.values.squaredNorm() * (horizon / segments);

    const SampledField reached = simulate(a, b, x0, schedule, steps_per_segment);
    double err = 0.0;
    for (int j = 0; j < g; ++j)
        err = std::max(err,
                       (reached.value(j).col(0) - xf.value(j).col(0)).cwiseAbs().maxCoeff());
    report.simulated_error = err;
    report.converged = epsilon > 0.0 && err <= epsilon;
    return {schedule, report};
}

}  // namespace ensctrl
