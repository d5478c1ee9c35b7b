#pragma once

#include <optional>
#include <string>

#include "ensctrl/field.hpp"
#include "ensctrl/verdict.hpp"

namespace ensctrl {

/// Parsed system description: dx/dt = A(beta) x + B(beta) U on K.
struct EnsembleSystem {
    std::string param_name = "beta";
    CompactInterval interval{0.0, 1.0};
    int n = 0;
    int m = 0;
    ExprMatrix a_expr;  // n x n
    ExprMatrix b_expr;  // n x m
    std::optional<ExprMatrix> x0_expr;  // n x 1
    std::optional<ExprMatrix> xf_expr;  // n x 1

    SampledField sample_a(int n_grid) const { return SampledField::sample(a_expr, interval, n_grid); }
    SampledField sample_b(int n_grid) const { return SampledField::sample(b_expr, interval, n_grid); }
    SampledField sample_x0(int n_grid) const { return SampledField::sample(*x0_expr, interval, n_grid); }
    SampledField sample_xf(int n_grid) const { return SampledField::sample(*xf_expr, interval, n_grid); }
};

}  // namespace ensctrl
