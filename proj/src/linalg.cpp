#include "faskit/linalg.hpp"

#include "faskit/error.hpp"

#include <string>

namespace faskit {
namespace {

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& B, const char* what) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B.rows(), B.cols());
    qr.setThreshold(kRankTolerance);
    qr.compute(B);
    if (qr.rank() < B.cols()) {
        throw Error(ErrorKind::RankDeficient,
                    std::string(what) + ": columns are collinear (rank " + std::to_string(qr.rank()) +
                        " of " + std::to_string(B.cols()) + ")");
    }
    return qr;
}

void check_projection_shapes(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.rows() != B.rows()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "residualize: " + std::to_string(A.rows()) + " rows vs " + std::to_string(B.rows()));
    }
    if (B.rows() <= B.cols()) {
        throw Error(ErrorKind::InsufficientObservations,
                    "residualize: need more rows than projection columns");
    }
}

}  // namespace

RegressionFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, RobustFlavor flavor) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) {
        throw Error(ErrorKind::DimensionMismatch,
                    "ols: design has " + std::to_string(n) + " rows but y has " + std::to_string(y.size()));
    }
    if (p == 0) throw Error(ErrorKind::DimensionMismatch, "ols: design has no columns");
    if (n <= p) {
        throw Error(ErrorKind::InsufficientObservations,
                    "ols: " + std::to_string(n) + " observations for " + std::to_string(p) + " regressors");
    }
    const auto qr = factorize(X, "ols");

    RegressionFit fit;
    fit.coefficients = qr.solve(y);
    fit.fitted = X * fit.coefficients;
    fit.residuals = y - fit.fitted;
    fit.dof_residual = static_cast<int>(n - p);

    // (X'X)^{-1} = P R^{-1} R^{-T} P'
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd perm = qr.colsPermutation();
    const Eigen::MatrixXd bread = perm * (r_inv * r_inv.transpose()) * perm.transpose();

    const Eigen::MatrixXd scaled = X.array().colwise() * fit.residuals.array();
    const Eigen::MatrixXd meat = scaled.transpose() * scaled;
    Eigen::MatrixXd cov = bread * meat * bread;
    if (flavor == RobustFlavor::HC1) cov *= static_cast<double>(n) / static_cast<double>(n - p);
    fit.robust_cov = 0.5 * (cov + cov.transpose());
    return fit;
}

Eigen::MatrixXd residualize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (B.cols() == 0) {
        if (B.rows() != 0 && B.rows() != A.rows()) {
            throw Error(ErrorKind::DimensionMismatch, "residualize: row counts differ");
        }
        return A;
    }
    check_projection_shapes(A, B);
    const auto qr = factorize(B, "residualize");
    // Q'A with the leading rank rows removed, mapped back: (I - Q1 Q1') A.
    Eigen::MatrixXd rotated = qr.householderQ().transpose() * A;
    rotated.topRows(B.cols()).setZero();
    return qr.householderQ() * rotated;
}

Eigen::MatrixXd projection_coefficients(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (B.cols() == 0) return Eigen::MatrixXd(0, A.cols());
    check_projection_shapes(A, B);
    return factorize(B, "projection").solve(A);
}

Dataset partial_out(const Dataset& dataset) {
    if (dataset.partialled) return dataset;
    dataset.validate();

    const Eigen::Index n = static_cast<Eigen::Index>(dataset.n());
    const Eigen::Index k_w = static_cast<Eigen::Index>(dataset.kw());
    const Eigen::Index k_i = dataset.intercept ? 1 : 0;

    Dataset out = dataset;
    out.controls = Eigen::MatrixXd(n, 0);
    out.control_names.clear();
    out.partialled = true;
    out.absorbed = static_cast<int>(k_w + k_i);
    if (k_w + k_i == 0) return out;

    Eigen::MatrixXd design(n, k_w + k_i);
    if (k_i == 1) design.col(0).setOnes();
    if (k_w > 0) design.rightCols(k_w) = dataset.controls;

    const Eigen::Index k_z = static_cast<Eigen::Index>(dataset.kz());
    Eigen::MatrixXd stacked(n, 2 + k_z);
    stacked.col(0) = dataset.y;
    stacked.col(1) = dataset.x;
    stacked.rightCols(k_z) = dataset.instruments;

    Eigen::MatrixXd resid = residualize(stacked, design);
    for (Eigen::Index j = 0; j < resid.cols(); ++j) {
        if (resid.col(j).norm() <= 1e-12 * stacked.col(j).norm()) resid.col(j).setZero();
    }
    out.y = resid.col(0);
    out.x = resid.col(1);
    out.instruments = resid.rightCols(k_z);
    return out;
}

}  // namespace faskit
