#include "faskit/io.hpp"

#include "faskit/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string_view>

namespace faskit {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "NA" || cell == "na"; }

std::optional<double> parse_double(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

CsvLoadResult load_csv(const std::string& path, const CsvColumns& columns) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, "cannot open data file '" + path + "'");
    return read_csv(in, columns, path);
}

CsvLoadResult read_csv(std::istream& in, const CsvColumns& columns, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, source + ": missing header row");
    std::vector<std::string> header;
    for (auto field : split(line, ',')) header.push_back(unquote(field));

    // Every referenced name must be used once and exist exactly once.
    std::map<std::string, std::string> roles;
    auto claim = [&roles](const std::string& name, const std::string& role) {
        if (name.empty()) throw Error(ErrorKind::MissingColumn, "no column given for the " + role);
        const auto [it, fresh] = roles.emplace(name, role);
        if (!fresh) {
            throw Error(ErrorKind::MissingColumn,
                        "column '" + name + "' is used as both " + it->second + " and " + role);
        }
    };
    claim(columns.outcome, "outcome");
    claim(columns.treatment, "treatment");
    for (const auto& name : columns.instruments) claim(name, "instrument");
    for (const auto& name : columns.controls) claim(name, "control");
    if (columns.instruments.empty()) throw Error(ErrorKind::MissingColumn, "no instrument columns given");

    auto locate = [&](const std::string& name) {
        std::optional<std::size_t> found;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] != name) continue;
            if (found) throw Error(ErrorKind::MissingColumn, source + ": column '" + name + "' appears twice in the header");
            found = i;
        }
        if (!found) throw Error(ErrorKind::MissingColumn, source + ": no column named '" + name + "'");
        return *found;
    };
    std::vector<std::string> names{columns.outcome, columns.treatment};
    names.insert(names.end(), columns.instruments.begin(), columns.instruments.end());
    names.insert(names.end(), columns.controls.begin(), columns.controls.end());
    std::vector<std::size_t> positions;
    for (const auto& name : names) positions.push_back(locate(name));

    std::vector<std::vector<double>> rows;
    std::size_t dropped = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(line_no) + " has " +
                                                   std::to_string(fields.size()) + " fields, expected " +
                                                   std::to_string(header.size()));
        }
        std::vector<double> values;
        values.reserve(positions.size());
        bool missing = false;
        for (std::size_t c = 0; c < positions.size(); ++c) {
            const std::string cell = unquote(fields[positions[c]]);
            if (is_missing(cell)) {
                missing = true;
                break;
            }
            const auto value = parse_double(cell);
            if (!value) {
                throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(line_no) + ", column '" +
                                                       names[c] + "': cannot parse '" + cell + "' as a finite number");
            }
            values.push_back(*value);
        }
        if (missing) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw Error(ErrorKind::EmptyAfterFiltering,
                    source + ": no complete rows (" + std::to_string(dropped) + " dropped for missing values)");
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto kz = static_cast<Eigen::Index>(columns.instruments.size());
    const auto kw = static_cast<Eigen::Index>(columns.controls.size());
    CsvLoadResult out;
    Dataset& d = out.dataset;
    d.y.resize(n);
    d.x.resize(n);
    d.instruments.resize(n, kz);
    d.controls.resize(n, kw);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        d.y(i) = r[0];
        d.x(i) = r[1];
        for (Eigen::Index j = 0; j < kz; ++j) d.instruments(i, j) = r[static_cast<std::size_t>(2 + j)];
        for (Eigen::Index j = 0; j < kw; ++j) d.controls(i, j) = r[static_cast<std::size_t>(2 + kz + j)];
    }
    d.outcome_name = columns.outcome;
    d.treatment_name = columns.treatment;
    d.instrument_names = columns.instruments;
    d.control_names = columns.controls;
    d.intercept = columns.intercept;
    d.provenance = source;
    d.validate();
    out.dropped_rows = dropped;
    return out;
}

void write_csv(std::ostream& out, const Dataset& dataset) {
    out << dataset.outcome_name << ',' << dataset.treatment_name;
    for (const auto& name : dataset.instrument_names) out << ',' << name;
    for (const auto& name : dataset.control_names) out << ',' << name;
    out << '\n';
    const auto old_precision = out.precision(17);
    for (Eigen::Index i = 0; i < dataset.y.size(); ++i) {
        out << dataset.y(i) << ',' << dataset.x(i);
        for (Eigen::Index j = 0; j < dataset.instruments.cols(); ++j) out << ',' << dataset.instruments(i, j);
        for (Eigen::Index j = 0; j < dataset.controls.cols(); ++j) out << ',' << dataset.controls(i, j);
        out << '\n';
    }
    out.precision(old_precision);
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, "cannot open model file '" + path + "'");
    return read_model(in, path);
}

ModelFile read_model(std::istream& in, const std::string& source) {
    std::map<std::string, std::vector<double>> vectors;
    std::map<std::string, double> scalars;
    std::vector<std::vector<double>> sigma_rows;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto where = [&] { return source + ": line " + std::to_string(line_no); };
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, where() + ": expected 'key = value'");
        const std::string key(trim(text.substr(0, eq)));
        std::vector<double> values;
        for (auto field : split(text.substr(eq + 1), ',')) {
            const auto value = parse_double(field);
            if (!value) throw Error(ErrorKind::ParseError, where() + ": cannot parse '" + std::string(field) + "'");
            values.push_back(*value);
        }
        if (key == "pi" || key == "gamma" || key == "alpha") {
            if (!vectors.emplace(key, values).second) throw Error(ErrorKind::ParseError, where() + ": duplicate key " + key);
        } else if (key == "sigma_z") {
            sigma_rows.push_back(values);
        } else if (key == "beta" || key == "var_v" || key == "var_u" || key == "endogeneity") {
            if (values.size() != 1) throw Error(ErrorKind::ParseError, where() + ": " + key + " takes one value");
            if (!scalars.emplace(key, values[0]).second) {
                throw Error(ErrorKind::ParseError, where() + ": duplicate key " + key);
            }
        } else {
            throw Error(ErrorKind::ParseError, where() + ": unknown key '" + key + "'");
        }
    }

    const auto to_vector = [](const std::vector<double>& v) {
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
    };
    if (!vectors.count("pi")) throw Error(ErrorKind::ParseError, source + ": missing required key 'pi'");
    if (!scalars.count("beta")) throw Error(ErrorKind::ParseError, source + ": missing required key 'beta'");
    ModelFile file;
    PopulationModel& m = file.model;
    m.pi = to_vector(vectors["pi"]);
    const auto k = m.pi.size();
    m.beta = scalars["beta"];
    m.gamma = vectors.count("gamma") ? to_vector(vectors["gamma"]) : Eigen::VectorXd::Zero(k);
    m.alpha = vectors.count("alpha") ? to_vector(vectors["alpha"]) : Eigen::VectorXd::Zero(k);
    if (sigma_rows.empty()) {
        m.sigma_z = Eigen::MatrixXd::Identity(k, k);
    } else {
        if (static_cast<Eigen::Index>(sigma_rows.size()) != k) {
            throw Error(ErrorKind::ParseError, source + ": sigma_z needs " + std::to_string(k) + " rows");
        }
        m.sigma_z.resize(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            const auto& row = sigma_rows[static_cast<std::size_t>(i)];
            if (static_cast<Eigen::Index>(row.size()) != k) {
                throw Error(ErrorKind::ParseError, source + ": sigma_z row " + std::to_string(i + 1) + " needs " +
                                                       std::to_string(k) + " entries");
            }
            for (Eigen::Index j = 0; j < k; ++j) m.sigma_z(i, j) = row[static_cast<std::size_t>(j)];
        }
    }
    if (scalars.count("var_v")) m.var_v = scalars["var_v"];
    if (scalars.count("var_u")) m.var_u = scalars["var_u"];
    if (scalars.count("endogeneity")) file.endogeneity = scalars["endogeneity"];
    m.validate();
    return file;
}

void write_model(std::ostream& out, const ModelFile& file) {
    const PopulationModel& m = file.model;
    const auto old_precision = out.precision(17);
    auto vec = [&out](const char* key, const Eigen::VectorXd& v) {
        out << key << " =";
        for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : " ") << v(i);
        out << '\n';
    };
    out << "beta = " << m.beta << '\n';
    vec("pi", m.pi);
    vec("gamma", m.gamma);
    vec("alpha", m.alpha);
    for (Eigen::Index i = 0; i < m.sigma_z.rows(); ++i) vec("sigma_z", m.sigma_z.row(i).transpose());
    out << "var_v = " << m.var_v << '\n' << "var_u = " << m.var_u << '\n';
    if (file.endogeneity) out << "endogeneity = " << *file.endogeneity << '\n';
    out.precision(old_precision);
}

}  // namespace faskit
