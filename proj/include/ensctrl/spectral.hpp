#pragma once

#include "ensctrl/field.hpp"
#include "ensctrl/verdict.hpp"

namespace ensctrl {

enum class StructureTag { Diagonal, Triangular, DiagonalizableTracked, JordanBlock, Unsupported };

std::string to_string(StructureTag t);

/// Pointwise spectral data of A(beta) with eigenvalue curves matched into
/// continuous functions across the grid.
struct SpectralProfile {
    StructureTag tag = StructureTag::Unsupported;
    std::vector<SampledField> lambda;       // n scalar curves
    std::vector<Eigen::MatrixXd> p;         // eigenvector matrix per grid point
    std::vector<Eigen::MatrixXd> p_inv;
    double max_cond = 0.0;
    double max_recon_err = 0.0;             // ||P L P^-1 - A||, max over grid
    std::string note;                       // why Unsupported, when it is

    bool needs_transform() const { return tag == StructureTag::DiagonalizableTracked; }
};

/// Structure detection: exact patterns first (diagonal, Jordan block,
/// triangular), pointwise eigendecomposition with curve tracking otherwise.
/// Complex eigenvalues or ill-conditioned eigenvectors give Unsupported.
SpectralProfile classify(const SampledField& a, const AnalysisConfig& cfg = {});

struct SpectralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Btilde = P^-1 B pointwise. Identity for Diagonal; an error to call for
/// structures that use B directly.
SampledField transformed_inputs(const SpectralProfile& p, const SampledField& b);

}  // namespace ensctrl
