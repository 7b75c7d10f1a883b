#include "faskit/spec_enum.hpp"

#include "faskit/error.hpp"
#include "faskit/linalg.hpp"

#include <optional>
#include <string>

namespace faskit {

std::size_t spec_count(std::size_t kz) {
    if (kz < 1) throw Error(ErrorKind::InvalidCount, "need at least one instrument");
    if (kz > kMaxInstruments) {
        throw Error(ErrorKind::TooManyInstruments,
                    std::to_string(kz) + " instruments exceeds the cap of " + std::to_string(kMaxInstruments));
    }
    return kz << (kz - 1);
}

std::string spec_label(std::size_t instrument, const std::vector<std::size_t>& controls) {
    std::string label = "Z" + std::to_string(instrument + 1);
    for (std::size_t i = 0; i < controls.size(); ++i) {
        label += (i == 0 ? "|" : ",");
        label += std::to_string(controls[i] + 1);
    }
    return label;
}

std::vector<JustIdSpec> enumerate_specs(std::size_t kz) {
    const std::size_t total = spec_count(kz);
    std::vector<JustIdSpec> specs;
    specs.reserve(total);
    const std::size_t subsets = std::size_t{1} << (kz - 1);
    for (std::size_t l = 0; l < kz; ++l) {
        std::vector<std::size_t> others;
        for (std::size_t r = 0; r < kz; ++r) {
            if (r != l) others.push_back(r);
        }
        for (std::size_t mask = 0; mask < subsets; ++mask) {
            JustIdSpec spec;
            spec.instrument = l;
            for (std::size_t bit = 0; bit < others.size(); ++bit) {
                if (mask & (std::size_t{1} << bit)) spec.controls.push_back(others[bit]);
            }
            spec.id = specs.size() + 1;
            spec.label = spec_label(l, spec.controls);
            specs.push_back(std::move(spec));
        }
    }
    return specs;
}

TransformedInstrument transform_instrument(const Dataset& dataset, const JustIdSpec& spec) {
    std::optional<Dataset> owned;
    if (!dataset.partialled) owned = partial_out(dataset);
    const Dataset& data = owned ? *owned : dataset;

    const auto kz = data.kz();
    if (spec.instrument >= kz) {
        throw Error(ErrorKind::InvalidArgument, "spec " + spec.label + " references a missing instrument");
    }
    Eigen::MatrixXd control_cols(static_cast<Eigen::Index>(data.n()),
                                 static_cast<Eigen::Index>(spec.controls.size()));
    for (std::size_t c = 0; c < spec.controls.size(); ++c) {
        if (spec.controls[c] >= kz || spec.controls[c] == spec.instrument) {
            throw Error(ErrorKind::InvalidArgument, "spec " + spec.label + " has an invalid control set");
        }
        control_cols.col(static_cast<Eigen::Index>(c)) =
            data.instruments.col(static_cast<Eigen::Index>(spec.controls[c]));
    }

    const Eigen::VectorXd z = data.instruments.col(static_cast<Eigen::Index>(spec.instrument));
    TransformedInstrument out;
    out.spec = spec;
    if (spec.controls.empty()) {
        out.values = z;
        out.projection_coeffs = Eigen::VectorXd(0);
    } else {
        out.projection_coeffs = projection_coefficients(z, control_cols).col(0);
        out.values = residualize(z, control_cols).col(0);
    }
    if (out.values.squaredNorm() <= 1e-12 * z.squaredNorm()) {
        throw Error(ErrorKind::DegenerateInstrument,
                    "instrument " + spec.label + " has no variation left after removing its controls");
    }
    return out;
}

}  // namespace faskit
