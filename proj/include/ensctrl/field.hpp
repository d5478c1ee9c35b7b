#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ensctrl/expr.hpp"

namespace ensctrl {

/// Compact parameter interval K = [lo, hi].
struct CompactInterval {
    double lo;
    double hi;
    CompactInterval(double l, double h) : lo(l), hi(h) {
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("invalid compact interval");
    }
    double length() const { return hi - lo; }
};

using ExprMatrix = std::vector<std::vector<expr::NodePtr>>;

/// Matrix-valued function on K, stored as values on a uniform grid with
/// piecewise-linear interpolation in between. Immutable after construction.
class SampledField {
public:
    SampledField(CompactInterval k, int n_grid, int rows, int cols,
                 std::vector<Eigen::MatrixXd> values);

    /// Entrywise evaluation of an expression matrix at every grid point.
    /// Domain errors are rethrown with the offending grid point identified.
    static SampledField sample(const ExprMatrix& e, CompactInterval k, int n_grid);
    static SampledField sample_scalar(const expr::NodePtr& e, CompactInterval k, int n_grid);

    const CompactInterval& interval() const { return interval_; }
    int grid_size() const { return n_grid_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double spacing() const { return n_grid_ > 1 ? interval_.length() / (n_grid_ - 1) : 0.0; }
    double grid_point(int j) const {
        return interval_.lo + j * (interval_.hi - interval_.lo) / (n_grid_ - 1);
    }

    const Eigen::MatrixXd& value(int j) const { return values_[j]; }
    double scalar(int j) const { return values_[j](0, 0); }
    bool is_scalar() const { return rows_ == 1 && cols_ == 1; }

    /// sup over the grid of the max-abs entry.
    double uniform_norm() const;

    /// Piecewise-linear interpolation; throws if beta falls outside K.
    Eigen::MatrixXd eval_at(double beta) const;
    double scalar_at(double beta) const { return eval_at(beta)(0, 0); }

    SampledField row(int i) const;

    SampledField operator+(const SampledField& o) const;

private:
    CompactInterval interval_;
    int n_grid_, rows_, cols_;
    std::vector<Eigen::MatrixXd> values_;
};

}  // namespace ensctrl
