#pragma once

#include "faskit/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace faskit {

inline constexpr std::size_t kMaxInstruments = 20;

// One just-identified specification: instrument `instrument` is the excluded
// just-identifying instrument, the instruments in `controls` enter as
// controls, and every other instrument is dropped.
//
// Instrument indices are 0-based column indices; `id` is the 1-based
// position in the enumeration order; `label` uses the 1-based Z_{s|r}
// notation, e.g. "Z2|1,3".
struct JustIdSpec {
    std::size_t instrument = 0;
    std::vector<std::size_t> controls;
    std::size_t id = 0;
    std::string label;

    // C = every other instrument (the exclusion-violation family).
    [[nodiscard]] bool all_others_controlled(std::size_t kz) const noexcept {
        return controls.size() + 1 == kz;
    }
    // C = empty (the exogeneity-violation family).
    [[nodiscard]] bool uncontrolled() const noexcept { return controls.empty(); }
};

struct TransformedInstrument {
    JustIdSpec spec;
    Eigen::VectorXd values;
    Eigen::VectorXd projection_coeffs;
};

[[nodiscard]] std::size_t spec_count(std::size_t kz);

[[nodiscard]] std::string spec_label(std::size_t instrument, const std::vector<std::size_t>& controls);

// All kz * 2^(kz-1) specifications, instrument-major; for each instrument the
// control subsets follow a binary counter over the remaining indices in
// ascending order (bit 0 = smallest remaining index).
// Throws InvalidCount (kz < 1) or TooManyInstruments (kz > kMaxInstruments).
[[nodiscard]] std::vector<JustIdSpec> enumerate_specs(std::size_t kz);

// Residual of Z_l on the control instruments of `spec`. The dataset is
// partialled first if needed, so the intercept is always accounted for.
// Throws RankDeficient (collinear controls) or DegenerateInstrument (residual
// sum of squares at most 1e-12 times that of Z_l).
[[nodiscard]] TransformedInstrument transform_instrument(const Dataset& dataset,
                                                         const JustIdSpec& spec);

}  // namespace faskit
