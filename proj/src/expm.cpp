#include "ensctrl/expm.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace ensctrl {

namespace {

// Degree-13 Pade coefficients (Higham, "The scaling and squaring method for
// the matrix exponential revisited").
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    int squarings = 0;
    const double theta13 = 5.371920351148152;
    if (norm > theta13)
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    const Eigen::MatrixXd as = a / std::ldexp(1.0, squarings);

    const Eigen::MatrixXd a2 = as * as;
    const Eigen::MatrixXd a4 = a2 * a2;
    const Eigen::MatrixXd a6 = a2 * a4;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

    const Eigen::MatrixXd u =
        as * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
              kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 + kPade13[1] * id);
    const Eigen::MatrixXd v =
        a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
        kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 + kPade13[0] * id;

    Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

Eigen::MatrixXd expm_integral(const Eigen::MatrixXd& a, double t) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = a * t;
    aug.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n) * t;
    return expm(aug).topRightCorner(n, n);
}

}  // namespace ensctrl
