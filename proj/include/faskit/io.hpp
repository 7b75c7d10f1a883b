#pragma once

#include "faskit/dataset.hpp"
#include "faskit/population.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace faskit {

struct CsvColumns {
    std::string outcome;
    std::string treatment;
    std::vector<std::string> instruments;
    std::vector<std::string> controls;
    bool intercept = true;
};

struct CsvLoadResult {
    Dataset dataset;
    std::size_t dropped_rows = 0;
};

// Comma-separated, header row first, decimal-point numerics. A referenced
// cell that is blank or "NA" drops its row (listwise deletion); any other
// unparsable or non-finite cell is a ParseError naming the row and column.
// Throws FileNotFound, MissingColumn, ParseError, EmptyAfterFiltering.
[[nodiscard]] CsvLoadResult load_csv(const std::string& path, const CsvColumns& columns);
[[nodiscard]] CsvLoadResult read_csv(std::istream& in, const CsvColumns& columns,
                                     const std::string& source = "<stream>");

// Header outcome,treatment,instruments...,controls...; 17 significant digits.
void write_csv(std::ostream& out, const Dataset& dataset);

// Flat key-value model file:
//
//   # three instruments
//   beta = 1
//   pi = 1, 1, 1
//   gamma = -1, 0, 2
//   alpha = 0, 0, 0
//   sigma_z = 1, 0, 0     (one line per row)
//   sigma_z = 0, 1, 0
//   sigma_z = 0, 0, 1
//   var_v = 1
//   var_u = 1
//   endogeneity = 0.5     (simulation only)
//
// beta and pi are required; gamma and alpha default to zero, sigma_z to the identity,
// var_v and var_u to 1.
struct ModelFile {
    PopulationModel model;
    std::optional<double> endogeneity;
};

[[nodiscard]] ModelFile load_model(const std::string& path);
[[nodiscard]] ModelFile read_model(std::istream& in, const std::string& source = "<stream>");
void write_model(std::ostream& out, const ModelFile& file);

}  // namespace faskit
