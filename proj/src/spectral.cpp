#include "ensctrl/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace ensctrl {

std::string to_string(StructureTag t) {
    switch (t) {
        case StructureTag::Diagonal: return "Diagonal";
        case StructureTag::Triangular: return "Triangular";
        case StructureTag::DiagonalizableTracked: return "DiagonalizableTracked";
        case StructureTag::JordanBlock: return "JordanBlock";
        case StructureTag::Unsupported: return "Unsupported";
    }
    return "?";
}

namespace {

SampledField curve_from_values(const SampledField& a, const std::vector<double>& v) {
    std::vector<Eigen::MatrixXd> vals(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        vals[j] = Eigen::MatrixXd::Constant(1, 1, v[j]);
    return SampledField(a.interval(), a.grid_size(), 1, 1, std::move(vals));
}

std::vector<SampledField> diagonal_curves(const SampledField& a) {
    const int n = a.rows();
    std::vector<SampledField> curves;
    for (int i = 0; i < n; ++i) {
        std::vector<double> v(a.grid_size());
        for (int j = 0; j < a.grid_size(); ++j) v[j] = a.value(j)(i, i);
        curves.push_back(curve_from_values(a, v));
    }
    return curves;
}

bool is_diagonal(const SampledField& a, double tol) {
    for (int j = 0; j < a.grid_size(); ++j) {
        const Eigen::MatrixXd& m = a.value(j);
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                if (r != c && std::fabs(m(r, c)) > tol) return false;
    }
    return true;
}

bool is_jordan_block(const SampledField& a, double tol) {
    if (a.rows() < 2) return false;
    for (int j = 0; j < a.grid_size(); ++j) {
        const Eigen::MatrixXd& m = a.value(j);
        const double lam = m(0, 0);
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) {
                const double want = r == c ? lam : (c == r + 1 ? 1.0 : 0.0);
                if (std::fabs(m(r, c) - want) > tol) return false;
            }
    }
    return true;
}

bool is_triangular(const SampledField& a, double tol) {
    for (int j = 0; j < a.grid_size(); ++j) {
        const Eigen::MatrixXd& m = a.value(j);
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < r; ++c)
                if (std::fabs(m(r, c)) > tol) return false;
    }
    return true;
}

// Minimal total |delta lambda| assignment between consecutive grid points.
// n <= 8, so exhaustive search over permutations is fine.
std::vector<int> best_assignment(const Eigen::VectorXd& prev, const Eigen::VectorXd& cur) {
    const int n = static_cast<int>(prev.size());
    std::vector<int> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0);
    best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int i = 0; i < n; ++i) cost += std::fabs(prev(i) - cur(perm[i]));
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

SpectralProfile classify(const SampledField& a, const AnalysisConfig& cfg) {
    if (a.rows() != a.cols()) throw std::invalid_argument("classify expects a square field");
    const int n = a.rows();
    const int g = a.grid_size();
    const double scale = std::max(a.uniform_norm(), 1.0);
    const double tol_pattern = 1e-9 * scale;

    SpectralProfile prof;
    if (is_diagonal(a, tol_pattern)) {
        prof.tag = StructureTag::Diagonal;
        prof.lambda = diagonal_curves(a);
        return prof;
    }
    if (is_jordan_block(a, tol_pattern)) {
        prof.tag = StructureTag::JordanBlock;
        prof.lambda = diagonal_curves(a);
        return prof;
    }
    if (is_triangular(a, tol_pattern)) {
        prof.tag = StructureTag::Triangular;
        prof.lambda = diagonal_curves(a);
        return prof;
    }

    // General case: pointwise eigendecomposition plus curve matching.
    const double tol_imag = 1e-8 * scale;
    std::vector<Eigen::VectorXd> lam(g);
    prof.p.resize(g);
    prof.p_inv.resize(g);
    for (int j = 0; j < g; ++j) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(a.value(j));
        if (es.info() != Eigen::Success) {
            prof.tag = StructureTag::Unsupported;
            prof.note = "eigendecomposition failed at beta=" + std::to_string(a.grid_point(j));
            return prof;
        }
        Eigen::VectorXd values(n);
        Eigen::MatrixXd vectors(n, n);
        for (int i = 0; i < n; ++i) {
            const std::complex<double> ev = es.eigenvalues()(i);
            if (std::fabs(ev.imag()) > tol_imag) {
                prof.tag = StructureTag::Unsupported;
                prof.note = "complex eigenvalue at beta=" + std::to_string(a.grid_point(j));
                return prof;
            }
            values(i) = ev.real();
            Eigen::VectorXcd col = es.eigenvectors().col(i);
            // Rotate the complex phase away; a real eigenvalue of a real
            // matrix admits a real eigenvector.
            int pivot = 0;
            col.cwiseAbs().maxCoeff(&pivot);
            col /= col(pivot) / std::abs(col(pivot));
            if (col.imag().cwiseAbs().maxCoeff() > 1e-6) {
                prof.tag = StructureTag::Unsupported;
                prof.note = "complex eigenvector at beta=" + std::to_string(a.grid_point(j));
                return prof;
            }
            vectors.col(i) = col.real();
        }
        if (j == 0) {
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](int x, int y) { return values(x) < values(y); });
            Eigen::VectorXd v2(n);
            Eigen::MatrixXd m2(n, n);
            for (int i = 0; i < n; ++i) {
                v2(i) = values(order[i]);
                m2.col(i) = vectors.col(order[i]);
            }
            values = v2;
            vectors = m2;
        } else {
            const std::vector<int> perm = best_assignment(lam[j - 1], values);
            Eigen::VectorXd v2(n);
            Eigen::MatrixXd m2(n, n);
            for (int i = 0; i < n; ++i) {
                v2(i) = values(perm[i]);
                m2.col(i) = vectors.col(perm[i]);
            }
            values = v2;
            vectors = m2;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors);
        const double smin = svd.singularValues()(n - 1);
        const double cond =
            smin > 0.0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
        prof.max_cond = std::max(prof.max_cond, cond);
        if (cond > cfg.cond_max) {
            prof.tag = StructureTag::Unsupported;
            prof.note = "eigenvector matrix condition " + std::to_string(cond) +
                        " exceeds limit at beta=" + std::to_string(a.grid_point(j)) +
                        "; a triangular form of A, if available, avoids the transform";
            return prof;
        }
        lam[j] = values;
        prof.p[j] = vectors;
        prof.p_inv[j] = vectors.partialPivLu().inverse();
        const double recon =
            (vectors * values.asDiagonal() * prof.p_inv[j] - a.value(j)).cwiseAbs().maxCoeff();
        prof.max_recon_err = std::max(prof.max_recon_err, recon);
    }
    if (prof.max_recon_err > 1e-8 * scale) {
        prof.tag = StructureTag::Unsupported;
        prof.note = "eigendecomposition reconstruction error " +
                    std::to_string(prof.max_recon_err) + " too large";
        return prof;
    }
    prof.tag = StructureTag::DiagonalizableTracked;
    for (int i = 0; i < n; ++i) {
        std::vector<double> v(g);
        for (int j = 0; j < g; ++j) v[j] = lam[j](i);
        prof.lambda.push_back(curve_from_values(a, v));
    }
    return prof;
}

SampledField transformed_inputs(const SpectralProfile& prof, const SampledField& b) {
    if (prof.tag == StructureTag::Diagonal) return b;
    if (prof.tag != StructureTag::DiagonalizableTracked)
        throw SpectralError("transformed_inputs requires a diagonal or tracked profile; " +
                            to_string(prof.tag) + " uses B directly");
    std::vector<Eigen::MatrixXd> values(b.grid_size());
    for (int j = 0; j < b.grid_size(); ++j) values[j] = prof.p_inv[j] * b.value(j);
    return SampledField(b.interval(), b.grid_size(), b.rows(), b.cols(), std::move(values));
}

}  // namespace ensctrl
