#include "faskit/dataset.hpp"

#include "faskit/error.hpp"

#include <set>

namespace faskit {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InsufficientObservations: return "InsufficientObservations";
        case ErrorKind::TooManyInstruments: return "TooManyInstruments";
        case ErrorKind::InvalidCount: return "InvalidCount";
        case ErrorKind::DegenerateInstrument: return "DegenerateInstrument";
        case ErrorKind::ZeroFirstStage: return "ZeroFirstStage";
        case ErrorKind::WeakIdentification: return "WeakIdentification";
        case ErrorKind::SingularSigma: return "SingularSigma";
        case ErrorKind::InvalidVariance: return "InvalidVariance";
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::FileNotFound: return "FileNotFound";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::EmptyAfterFiltering: return "EmptyAfterFiltering";
    }
    return "Unknown";
}

std::vector<std::string> default_instrument_names(std::size_t kz) {
    std::vector<std::string> names;
    names.reserve(kz);
    for (std::size_t i = 0; i < kz; ++i) names.push_back("Z" + std::to_string(i + 1));
    return names;
}

void Dataset::validate() const {
    const auto rows = y.size();
    if (x.size() != rows || instruments.rows() != rows ||
        (controls.cols() > 0 && controls.rows() != rows)) {
        throw Error(ErrorKind::DimensionMismatch, "dataset columns have unequal lengths");
    }
    if (instruments.cols() < 1) {
        throw Error(ErrorKind::InvalidArgument, "at least one instrument is required");
    }
    if (instrument_names.size() != kz() || control_names.size() != kw()) {
        throw Error(ErrorKind::DimensionMismatch, "column names do not match column counts");
    }
    if (!y.allFinite() || !x.allFinite() || !instruments.allFinite() ||
        (controls.size() > 0 && !controls.allFinite())) {
        throw Error(ErrorKind::InvalidArgument, "dataset contains non-finite values");
    }
    std::set<std::string> seen{outcome_name, treatment_name};
    if (seen.size() != 2) {
        throw Error(ErrorKind::InvalidArgument, "outcome and treatment share the name '" + outcome_name + "'");
    }
    auto check = [&seen](const std::string& name) {
        if (!seen.insert(name).second) {
            throw Error(ErrorKind::InvalidArgument, "duplicate column name '" + name + "'");
        }
    };
    for (const auto& name : instrument_names) check(name);
    for (const auto& name : control_names) check(name);
}

}  // namespace faskit
