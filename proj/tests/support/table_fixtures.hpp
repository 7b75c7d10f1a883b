#pragma once

// Stored per-spec estimates and first-stage F statistics from two empirical
// applications. The raw data are not bundled, so these feed the selection and
// interval logic directly.

#include "faskit/estimators.hpp"
#include "faskit/spec_enum.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fixture {

struct Row {
    std::string label;
    double beta;
    double f;
};

inline std::vector<faskit::SpecEstimate> build(std::size_t kz, const std::vector<Row>& rows) {
    const auto specs = faskit::enumerate_specs(kz);
    std::vector<faskit::SpecEstimate> out;
    for (const auto& spec : specs) {
        for (const auto& row : rows) {
            if (row.label != spec.label) continue;
            faskit::SpecEstimate e;
            e.spec = spec;
            e.beta_hat = row.beta;
            e.f_stat = row.f;
            out.push_back(e);
        }
    }
    if (out.size() != rows.size()) throw std::logic_error("fixture label not found");
    return out;
}

// Female labor force participation on traditional plough use, two instruments.
inline std::vector<faskit::SpecEstimate> plough() {
    return build(2, {
                        {"Z1|2", -14.31, 78.20},
                        {"Z2|1", 159.6, 0.95},
                        {"Z1", -22.65, 74.01},
                        {"Z2", -46.98, 19.00},
                    });
}

// Export propensity on highway km, three instruments, every specification.
inline std::vector<faskit::SpecEstimate> highway() {
    return build(3, {
                        {"Z1|2,3", 0.28, 58.13},
                        {"Z2|1,3", 3.16, 6.97},
                        {"Z3|1,2", -0.32, 20.00},
                        {"Z1", 0.55, 154.5},
                        {"Z2", 1.09, 35.84},
                        {"Z3", 0.13, 15.97},
                        {"Z1|2", 0.22, 81.14},
                        {"Z1|3", 0.40, 122.45},
                        {"Z2|1", 3.74, 5.29},
                        {"Z2|3", 1.18, 34.31},
                        {"Z3|1", -0.61, 14.27},
                        {"Z3|2", -0.02, 31.07},
                    });
}

}  // namespace fixture
