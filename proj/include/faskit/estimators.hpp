#pragma once

#include "faskit/dataset.hpp"
#include "faskit/linalg.hpp"
#include "faskit/spec_enum.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace faskit {

struct EstimatorOptions {
    RobustFlavor flavor = RobustFlavor::HC1;
    // Worker threads for per-spec work; 0 means hardware concurrency.
    unsigned threads = 1;
};

enum class SpecStatus { Ok, Degenerate, ZeroFirstStage };

std::string_view to_string(SpecStatus status) noexcept;

// Just-identified IV estimate for one specification. When the status is not
// Ok the estimate is absent; first-stage quantities are kept when computable.
struct SpecEstimate {
    JustIdSpec spec;
    std::optional<double> beta_hat;
    double se = 0.0;
    double pi_hat = 0.0;
    double pi_se = 0.0;
    double psi_hat = 0.0;
    double f_stat = 0.0;
    SpecStatus status = SpecStatus::Ok;
    std::string note;

    [[nodiscard]] bool degenerate() const noexcept { return status != SpecStatus::Ok; }
};

struct TslsResult {
    std::vector<std::string> labels;
    double beta_2sls = 0.0;
    double se = 0.0;
    double f_stat = 0.0;
    double j_stat = 0.0;
    std::optional<double> j_pvalue;
    int j_dof = 0;
    Eigen::VectorXd weights;
    Eigen::VectorXd first_stage;
    // z_j'y / z_j'x for each instrument column on its own.
    Eigen::VectorXd column_estimates;
};

// beta = (zt'y)/(zt'x) with robust SE, first-stage and reduced-form
// coefficients on zt and the robust first-stage F (squared t-ratio).
// Throws DegenerateInstrument or ZeroFirstStage.
[[nodiscard]] SpecEstimate just_id_iv(const Dataset& dataset, const TransformedInstrument& zt,
                                      const EstimatorOptions& options = {});

// Non-throwing per-spec evaluation: degenerate or unidentified specs come
// back flagged instead of raising.
[[nodiscard]] SpecEstimate evaluate_spec(const Dataset& dataset, const JustIdSpec& spec,
                                         const EstimatorOptions& options = {});

// evaluate_spec over a list, in parallel; output order matches `specs`.
[[nodiscard]] std::vector<SpecEstimate> evaluate_specs(const Dataset& dataset,
                                                       const std::vector<JustIdSpec>& specs,
                                                       const EstimatorOptions& options = {});

// 2SLS with the given instrument columns (0-based). Controls, if any, are the
// dataset's own; other instruments are dropped.
// Throws RankDeficient, WeakIdentification, InvalidArgument.
[[nodiscard]] TslsResult tsls(const Dataset& dataset,
                              const std::vector<std::size_t>& instrument_indices,
                              const EstimatorOptions& options = {});

// 2SLS on an explicit instrument matrix. `instruments` must already be
// orthogonal to anything partialled out of the (partialled) dataset; the
// extra_absorbed count enters the small-sample factor only.
[[nodiscard]] TslsResult tsls_with_instruments(const Dataset& dataset,
                                               const Eigen::MatrixXd& instruments,
                                               const EstimatorOptions& options = {},
                                               int extra_absorbed = 0);

enum class PairVariant { Raw, Residualized };

struct PairwiseRow {
    std::size_t first = 0;
    std::size_t second = 0;
    PairVariant variant = PairVariant::Raw;
    std::string label;
    TslsResult result;
};

// Two-instrument 2SLS for every pair {a, b}: raw, and (kz >= 3) with both
// instruments residualized on the remaining ones, which then also enter the
// structural equation as controls.
[[nodiscard]] std::vector<PairwiseRow> tsls_pairwise_report(const Dataset& dataset,
                                                            const EstimatorOptions& options = {});

}  // namespace faskit
