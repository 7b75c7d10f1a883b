#pragma once

#include "faskit/dataset.hpp"
#include "faskit/estimators.hpp"
#include "faskit/spec_enum.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace faskit {

enum class FasMode { Excl, Exo, General };

std::string_view to_string(FasMode mode) noexcept;

inline constexpr double kDefaultCutoff = 10.0;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool is_point() const noexcept { return lo == hi; }
    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(double value, double tolerance = 0.0) const noexcept {
        return value >= lo - tolerance && value <= hi + tolerance;
    }
    [[nodiscard]] bool within(const Interval& outer, double tolerance = 0.0) const noexcept {
        return lo >= outer.lo - tolerance && hi <= outer.hi + tolerance;
    }
};

enum class RejectReason { LowF, Degenerate, ZeroFirstStage };

std::string_view to_string(RejectReason reason) noexcept;

struct RelevanceSelection {
    double cutoff = kDefaultCutoff;
    std::vector<std::size_t> selected;             // spec ids, ascending
    std::map<std::size_t, RejectReason> rejected;  // spec id -> reason
};

struct FasResult {
    FasMode mode = FasMode::General;
    std::optional<Interval> interval;
    RelevanceSelection selection;
    std::vector<SpecEstimate> estimates;
};

// Does `spec` belong to the family of specifications used by `mode`?
[[nodiscard]] bool in_family(const JustIdSpec& spec, std::size_t kz, FasMode mode) noexcept;

// The specs of enumerate_specs(kz) that belong to `mode`, ids preserved.
[[nodiscard]] std::vector<JustIdSpec> family_specs(std::size_t kz, FasMode mode);

// Hard thresholding on the first-stage F: selected iff not degenerate and
// f_stat >= cutoff. Throws InvalidArgument for cutoff <= 0.
[[nodiscard]] RelevanceSelection select_relevant(const std::vector<SpecEstimate>& estimates,
                                                 double cutoff = kDefaultCutoff);

// Interval [min, max] of beta_hat over the selected estimates; empty when
// nothing is selected.
[[nodiscard]] FasResult assemble_fas(FasMode mode, std::vector<SpecEstimate> estimates,
                                     double cutoff = kDefaultCutoff);

// Estimates every spec of the family for `mode` and assembles the interval.
[[nodiscard]] FasResult fas_estimate(const Dataset& dataset, FasMode mode,
                                     double cutoff = kDefaultCutoff,
                                     const EstimatorOptions& options = {});

// All three sets from a single pass over the General family (the Excl and
// Exo families are subsets of it). Returned in the order Excl, Exo, General.
[[nodiscard]] std::vector<FasResult> fas_estimate_all(const Dataset& dataset,
                                                      double cutoff = kDefaultCutoff,
                                                      const EstimatorOptions& options = {});

}  // namespace faskit
