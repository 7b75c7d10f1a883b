#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace faskit {

// An observed sample {y_i, x_i, Z_i, W_i}. Columns of `instruments` are the
// putative instruments Z_1..Z_kz; `controls` holds the exogenous covariates W.
//
// After partial_out() the controls (and the intercept, when enabled) have been
// projected out of y, x and Z; `controls` is then empty and `absorbed` counts
// the projected columns so that small-sample corrections downstream still use
// the right residual degrees of freedom.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::VectorXd x;
    Eigen::MatrixXd instruments;
    std::vector<std::string> instrument_names;
    Eigen::MatrixXd controls;
    std::vector<std::string> control_names;
    std::string outcome_name = "y";
    std::string treatment_name = "x";
    bool intercept = true;
    bool partialled = false;
    int absorbed = 0;
    std::string provenance;

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(y.size()); }
    [[nodiscard]] std::size_t kz() const noexcept {
        return static_cast<std::size_t>(instruments.cols());
    }
    [[nodiscard]] std::size_t kw() const noexcept {
        return static_cast<std::size_t>(controls.cols());
    }

    // Throws Error{DimensionMismatch | InvalidArgument} when any invariant fails:
    // equal column lengths, finite values, kz >= 1, unique column names.
    void validate() const;
};

// Default instrument names "Z1".."Zk" for programmatically built datasets.
std::vector<std::string> default_instrument_names(std::size_t kz);

}  // namespace faskit
