#include "ensctrl/field.hpp"

#include <cmath>

namespace ensctrl {

SampledField::SampledField(CompactInterval k, int n_grid, int rows, int cols,
                           std::vector<Eigen::MatrixXd> values)
    : interval_(k), n_grid_(n_grid), rows_(rows), cols_(cols), values_(std::move(values)) {
    if (n_grid_ < 2) throw std::invalid_argument("grid size must be at least 2");
    if (static_cast<int>(values_.size()) != n_grid_)
        throw std::invalid_argument("value count does not match grid size");
    for (const auto& v : values_) {
        if (v.rows() != rows_ || v.cols() != cols_)
            throw std::invalid_argument("inconsistent value shape");
        if (!v.allFinite()) throw std::invalid_argument("non-finite field value");
    }
}

SampledField SampledField::sample(const ExprMatrix& e, CompactInterval k, int n_grid) {
    if (n_grid < 2) throw std::invalid_argument("grid size must be at least 2");
    const int rows = static_cast<int>(e.size());
    if (rows == 0) throw std::invalid_argument("empty expression matrix");
    const int cols = static_cast<int>(e[0].size());
    std::vector<Eigen::MatrixXd> values(n_grid);
    for (int j = 0; j < n_grid; ++j) {
        const double beta = k.lo + j * (k.hi - k.lo) / (n_grid - 1);
        Eigen::MatrixXd m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            if (static_cast<int>(e[r].size()) != cols)
                throw std::invalid_argument("ragged expression matrix");
            for (int c = 0; c < cols; ++c) {
                try {
                    m(r, c) = expr::evaluate(e[r][c], beta);
                } catch (const expr::EvalError& err) {
                    throw expr::EvalError(
                        std::string(err.what()) + " at grid point beta=" + std::to_string(beta),
                        err.subexpr);
                }
            }
        }
        values[j] = std::move(m);
    }
    return SampledField(k, n_grid, rows, cols, std::move(values));
}

SampledField SampledField::sample_scalar(const expr::NodePtr& e, CompactInterval k, int n_grid) {
    return sample(ExprMatrix{{e}}, k, n_grid);
}

double SampledField::uniform_norm() const {
    double best = 0.0;
    for (const auto& v : values_) best = std::max(best, v.cwiseAbs().maxCoeff());
    return best;
}

Eigen::MatrixXd SampledField::eval_at(double beta) const {
    const double lo = interval_.lo, hi = interval_.hi;
    const double slack = 1e-12 * std::max(1.0, std::fabs(lo) + std::fabs(hi));
    if (beta < lo - slack || beta > hi + slack)
        throw std::out_of_range("parameter value outside the compact interval");
    beta = std::min(std::max(beta, lo), hi);
    const double h = spacing();
    int j = h > 0 ? static_cast<int>((beta - lo) / h) : 0;
    j = std::min(j, n_grid_ - 2);
    const double t = h > 0 ? (beta - grid_point(j)) / h : 0.0;
    return (1.0 - t) * values_[j] + t * values_[j + 1];
}

SampledField SampledField::row(int i) const {
    std::vector<Eigen::MatrixXd> values(n_grid_);
    for (int j = 0; j < n_grid_; ++j) values[j] = values_[j].row(i);
    return SampledField(interval_, n_grid_, 1, cols_, std::move(values));
}

SampledField SampledField::operator+(const SampledField& o) const {
    if (o.n_grid_ != n_grid_ || o.rows_ != rows_ || o.cols_ != cols_)
        throw std::invalid_argument("field shape mismatch");
    std::vector<Eigen::MatrixXd> values(n_grid_);
    for (int j = 0; j < n_grid_; ++j) values[j] = values_[j] + o.values_[j];
    return SampledField(interval_, n_grid_, rows_, cols_, std::move(values));
}

}  // namespace ensctrl
