#pragma once

#include "faskit/fas.hpp"
#include "faskit/spec_enum.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace faskit {

// Population primitives of Y = X beta + Z'gamma + U, cov(Z, U) = alpha,
// X = Z'pi + V, var(Z) = sigma_z.
struct PopulationModel {
    double beta = 0.0;
    Eigen::VectorXd gamma;
    Eigen::VectorXd alpha;
    Eigen::VectorXd pi;
    Eigen::MatrixXd sigma_z;
    double var_v = 1.0;
    double var_u = 1.0;

    [[nodiscard]] std::size_t kz() const noexcept { return static_cast<std::size_t>(pi.size()); }

    // Dimensions, finiteness, positive variances, symmetric sigma_z
    // (InvalidModel); smallest eigenvalue of sigma_z > 1e-10 * largest (SingularSigma).
    void validate() const;

    // Every invalid instrument violates exclusion or exogeneity, not both.
    [[nodiscard]] bool invalid_instruments_violate_one_assumption() const noexcept;

    [[nodiscard]] Eigen::VectorXd cov_zx() const;
    [[nodiscard]] Eigen::VectorXd cov_zy() const;
    [[nodiscard]] double var_x() const;
};

// Builds a model with unit error variances.
[[nodiscard]] PopulationModel make_model(double beta, Eigen::VectorXd pi, Eigen::VectorXd gamma,
                                         Eigen::VectorXd alpha, Eigen::MatrixXd sigma_z);

// Population first-stage and reduced-form coefficients of one transformed instrument.
struct SpecMoment {
    double pi = 0.0;
    double psi = 0.0;
};

// Relative tolerance on corr(Z_j~, X) below which a population spec is irrelevant.
inline constexpr double kPopulationRelevanceTolerance = 1e-12;

// Moments for every spec in `specs`. Irrelevant specs get pi snapped to
// exactly zero so the componentwise rule below sees them as such.
[[nodiscard]] std::vector<SpecMoment> population_moments(const PopulationModel& model,
                                                         const std::vector<JustIdSpec>& specs);

// Population analogue of fas_estimate: estimates carry the population pi, psi
// and ratio; f_stat is +inf for relevant specs and 0 otherwise.
[[nodiscard]] FasResult population_fas(const PopulationModel& model, FasMode mode);

// Slack allowed when two componentwise bounds cross by rounding only.
inline constexpr double kIdentifiedSetSlack = 1e-12;

// {b : |psi_j - pi_j b| <= delta_j for all j} as an interval, or empty.
// Bounds that cross by at most kIdentifiedSetSlack * max(1, |b|) are merged
// into a point. A component with pi = 0 either imposes nothing or empties the set.
[[nodiscard]] std::optional<Interval> identified_set(const std::vector<SpecMoment>& moments,
                                                     const std::vector<double>& delta);

struct FrontierPoint {
    double b = 0.0;
    std::vector<double> delta;
    std::optional<Interval> identified_set;
    bool on_frontier = true;
};

// delta_j(b) = |psi_j - b pi_j| for every moment, and the identified set at
// that delta. Points outside [min, max] of the relevant ratios are flagged
// off-frontier.
[[nodiscard]] std::vector<FrontierPoint> frontier(const std::vector<SpecMoment>& moments,
                                                  const std::vector<std::size_t>& relevant,
                                                  const std::vector<double>& b_grid);

inline constexpr std::size_t kDefaultGridPoints = 201;

// Evenly spaced points over [min, max] of the relevant ratios; both ends exact.
[[nodiscard]] std::vector<double> default_grid(const std::vector<SpecMoment>& moments,
                                               const std::vector<std::size_t>& relevant,
                                               std::size_t points = kDefaultGridPoints);

}  // namespace faskit
