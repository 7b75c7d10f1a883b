#pragma once

#include "faskit/dataset.hpp"

#include <Eigen/Dense>

namespace faskit {

enum class RobustFlavor { HC0, HC1 };

// Relative pivot tolerance of the column-pivoted QR used for every rank decision.
inline constexpr double kRankTolerance = 1e-10;

struct RegressionFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    Eigen::MatrixXd robust_cov;
    int dof_residual = 0;
};

// Least squares of y on the columns of X (no implicit intercept) with a
// heteroskedasticity-robust sandwich covariance.
// Throws RankDeficient, DimensionMismatch, InsufficientObservations.
[[nodiscard]] RegressionFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                RobustFlavor flavor = RobustFlavor::HC1);

// M_B A: residuals of every column of A after projection on the columns of B.
// An empty B (zero columns) returns A unchanged.
[[nodiscard]] Eigen::MatrixXd residualize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// OLS coefficients of every column of A on B; same preconditions as residualize.
[[nodiscard]] Eigen::MatrixXd projection_coefficients(const Eigen::MatrixXd& A,
                                                      const Eigen::MatrixXd& B);

// Replaces y, x and Z by their residuals on [1, W] (the intercept column is
// dropped when dataset.intercept is false). Residual columns that vanish to
// rounding level (norm below 1e-12 of the original) are set to exactly zero.
// Idempotent: an already partialled dataset is returned as is.
[[nodiscard]] Dataset partial_out(const Dataset& dataset);

}  // namespace faskit
