#pragma once

#include "faskit/dataset.hpp"
#include "faskit/dgp.hpp"
#include "faskit/estimators.hpp"
#include "faskit/fas.hpp"
#include "faskit/population.hpp"

#include "json.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace faskit {

// Bumped whenever a field is renamed or removed; additions keep the version.
inline constexpr int kJsonSchemaVersion = 1;

enum class ModeSelection { Excl, Exo, General, All };
enum class EmitFormat { Text, Json };

struct RunConfig {
    ModeSelection mode = ModeSelection::All;
    double cutoff = kDefaultCutoff;
    RobustFlavor flavor = RobustFlavor::HC1;
    EmitFormat emit = EmitFormat::Text;
    std::size_t frontier_grid = kDefaultGridPoints;
    bool pairwise = false;
    unsigned threads = 0;

    // Throws InvalidArgument unless cutoff > 0 and frontier_grid >= 2.
    void validate() const;
};

[[nodiscard]] std::vector<FasMode> requested_modes(ModeSelection mode);

// One line of the decomposition beta_2sls = sum_l w_l beta_l = sum_l w_l beta*_l.
struct WeightRow {
    std::string instrument;
    double weight = 0.0;
    std::optional<double> beta_controlled;  // Z_l | all others
    std::optional<double> beta_marginal;    // Z_l alone
};

struct EstimateReport {
    std::string source;
    std::size_t n = 0;
    std::size_t dropped_rows = 0;
    std::string outcome;
    std::string treatment;
    std::vector<std::string> instruments;
    std::vector<std::string> controls;
    bool intercept = true;
    RunConfig config;

    TslsResult tsls;
    std::vector<WeightRow> weights;
    // Every spec needed by the requested modes, in table order: the fully
    // controlled specs, then the uncontrolled ones, then the rest.
    std::vector<SpecEstimate> specs;
    RelevanceSelection selection;
    std::vector<FasResult> fas;
    std::vector<PairwiseRow> pairwise;
};

[[nodiscard]] EstimateReport run_estimate(const Dataset& dataset, const RunConfig& config,
                                          std::size_t dropped_rows = 0);

struct OracleMode {
    FasResult fas;
    std::vector<SpecMoment> moments;  // aligned with fas.estimates
    std::vector<FrontierPoint> frontier;
};

struct OracleReport {
    PopulationModel model;
    RunConfig config;
    std::vector<OracleMode> modes;
};

[[nodiscard]] OracleReport run_oracle(const PopulationModel& model, const RunConfig& config);

struct EndpointSummary {
    std::size_t nonempty = 0;
    double mean_lo = 0.0;
    double mean_hi = 0.0;
    double sd_lo = 0.0;
    double sd_hi = 0.0;
    std::optional<Interval> population;
};

struct SimulationSummary {
    SimulationConfig config;
    std::size_t replications = 0;
    double cutoff = kDefaultCutoff;
    double mean_beta_2sls = 0.0;
    double sd_beta_2sls = 0.0;
    double median_j_pvalue = 0.0;
    std::vector<FasMode> modes;
    std::vector<EndpointSummary> endpoints;  // aligned with modes
};

// Monte Carlo over `replications` datasets drawn with replication_seed(seed, r).
[[nodiscard]] SimulationSummary run_monte_carlo(const SimulationConfig& config, std::size_t replications,
                                                const RunConfig& run);

[[nodiscard]] nlohmann::json to_json(const EstimateReport& report);
[[nodiscard]] nlohmann::json to_json(const OracleReport& report);
[[nodiscard]] nlohmann::json to_json(const SimulationSummary& summary);

void write_text(std::ostream& out, const EstimateReport& report);
void write_text(std::ostream& out, const OracleReport& report);
void write_text(std::ostream& out, const SimulationSummary& summary);

// Four significant digits, the precision of the text tables.
[[nodiscard]] std::string format_number(double value);

// "FAS_excl: [lo, hi]", "FAS_excl: lo" for a point, or the empty message.
[[nodiscard]] std::string fas_line(const FasResult& result);

}  // namespace faskit
