#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>

#include "ensctrl/field.hpp"

namespace testutil {

using ensctrl::CompactInterval;
using ensctrl::SampledField;

/// Tabulates an entrywise callback on a uniform grid.
inline SampledField make_field(CompactInterval k, int n_grid, int rows, int cols,
                               const std::function<double(double, int, int)>& f) {
    std::vector<Eigen::MatrixXd> values;
    values.reserve(n_grid);
    for (int j = 0; j < n_grid; ++j) {
        const double beta = k.lo + j * (k.hi - k.lo) / (n_grid - 1);
        Eigen::MatrixXd v(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) v(r, c) = f(beta, r, c);
        values.push_back(std::move(v));
    }
    return SampledField(k, n_grid, rows, cols, std::move(values));
}

inline SampledField make_scalar_field(CompactInterval k, int n_grid,
                                      const std::function<double(double)>& f) {
    return make_field(k, n_grid, 1, 1, [&](double b, int, int) { return f(b); });
}

/// Random polynomial with coefficients in [-2, 2].
inline std::function<double(double)> random_poly(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::vector<double> c(deg(rng) + 1);
    for (double& x : c) x = coef(rng);
    return [c](double b) {
        double acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * b + c[i];
        return acc;
    };
}

}  // namespace testutil
