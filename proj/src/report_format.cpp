#include "faskit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace faskit {

using nlohmann::json;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", value);
    std::string s(buf);
    if (s == "-0") s = "0";
    return s;
}

namespace {

std::string fas_name(FasMode mode) {
    switch (mode) {
        case FasMode::Excl: return "FAS_excl";
        case FasMode::Exo: return "FAS_exo";
        case FasMode::General: return "FAS";
    }
    return "FAS";
}

std::string_view flavor_name(RobustFlavor f) { return f == RobustFlavor::HC0 ? "hc0" : "hc1"; }

std::string_view mode_name(ModeSelection m) {
    switch (m) {
        case ModeSelection::Excl: return "excl";
        case ModeSelection::Exo: return "exo";
        case ModeSelection::General: return "general";
        case ModeSelection::All: return "all";
    }
    return "all";
}

// JSON has no inf or nan; those become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json interval_json(const std::optional<Interval>& iv) {
    if (!iv) return json{{"empty", true}, {"lo", nullptr}, {"hi", nullptr}};
    return json{{"empty", false}, {"lo", num(iv->lo)}, {"hi", num(iv->hi)}};
}

std::string interval_text(const std::optional<Interval>& iv) {
    if (!iv) return "empty";
    if (iv->is_point()) return format_number(iv->lo);
    return "[" + format_number(iv->lo) + ", " + format_number(iv->hi) + "]";
}

json tsls_json(const TslsResult& t) {
    return json{{"instruments", t.labels},
                {"beta", num(t.beta_2sls)},
                {"se", num(t.se)},
                {"first_stage_f", num(t.f_stat)},
                {"j_stat", num(t.j_stat)},
                {"j_pvalue", num(t.j_pvalue)},
                {"j_dof", t.j_dof}};
}

std::string opt_text(const std::optional<double>& v) { return v ? format_number(*v) : "-"; }

// Left-aligns the first `left` columns and right-aligns the rest.
class Table {
public:
    explicit Table(std::vector<std::string> header, std::size_t left = 1) : left_(left) {
        rows_.push_back(std::move(header));
    }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    void print(std::ostream& out, const std::string& indent = "  ") const {
        std::vector<std::size_t> width;
        for (const auto& row : rows_) {
            if (width.size() < row.size()) width.resize(row.size(), 0);
            for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
        }
        for (const auto& row : rows_) {
            std::string line = indent;
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) line += "  ";
                const std::string pad(width[c] - row[c].size(), ' ');
                line += c < left_ ? row[c] + pad : pad + row[c];
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out << line << '\n';
        }
    }

private:
    std::size_t left_;
    std::vector<std::vector<std::string>> rows_;
};

std::string relevance_text(const RelevanceSelection& sel, std::size_t id) {
    if (std::binary_search(sel.selected.begin(), sel.selected.end(), id)) return "selected";
    const auto it = sel.rejected.find(id);
    return it == sel.rejected.end() ? "-" : "rejected (" + std::string(to_string(it->second)) + ")";
}

}  // namespace

std::string fas_line(const FasResult& result) {
    const std::string name = fas_name(result.mode);
    if (!result.interval) return name + ": empty (no relevant instruments)";
    return name + ": " + interval_text(result.interval);
}

json to_json(const EstimateReport& r) {
    json j;
    j["schema"] = "faskit.estimate";
    j["schema_version"] = kJsonSchemaVersion;
    j["data"] = {{"source", r.source},         {"n", r.n},
                 {"dropped_rows", r.dropped_rows}, {"outcome", r.outcome},
                 {"treatment", r.treatment},   {"instruments", r.instruments},
                 {"controls", r.controls},     {"intercept", r.intercept}};
    j["config"] = {{"mode", mode_name(r.config.mode)},
                   {"cutoff", r.config.cutoff},
                   {"robust", flavor_name(r.config.flavor)},
                   {"pairwise", r.config.pairwise}};
    j["tsls"] = tsls_json(r.tsls);

    json weights = json::array();
    for (const auto& w : r.weights) {
        weights.push_back({{"instrument", w.instrument},
                           {"weight", num(w.weight)},
                           {"beta_controlled", num(w.beta_controlled)},
                           {"beta_marginal", num(w.beta_marginal)}});
    }
    j["weights"] = weights;

    const std::size_t kz = r.instruments.size();
    json specs = json::array();
    for (const auto& e : r.specs) {
        std::vector<std::string> controls;
        for (std::size_t c : e.spec.controls) controls.push_back(r.instruments[c]);
        const auto rej = r.selection.rejected.find(e.spec.id);
        specs.push_back({{"id", e.spec.id},
                         {"label", e.spec.label},
                         {"instrument", r.instruments[e.spec.instrument]},
                         {"controls", controls},
                         {"excl", in_family(e.spec, kz, FasMode::Excl)},
                         {"exo", in_family(e.spec, kz, FasMode::Exo)},
                         {"beta", num(e.beta_hat)},
                         {"se", e.beta_hat ? num(e.se) : json(nullptr)},
                         {"pi", num(e.pi_hat)},
                         {"pi_se", num(e.pi_se)},
                         {"psi", num(e.psi_hat)},
                         {"f", num(e.f_stat)},
                         {"status", to_string(e.status)},
                         {"note", e.note},
                         {"selected", rej == r.selection.rejected.end()},
                         {"reason", rej == r.selection.rejected.end() ? json(nullptr)
                                                                       : json(to_string(rej->second))}});
    }
    j["specs"] = specs;

    json fas = json::array();
    for (const auto& f : r.fas) {
        json entry = interval_json(f.interval);
        entry["mode"] = to_string(f.mode);
        entry["selected"] = f.selection.selected;
        fas.push_back(entry);
    }
    j["fas"] = fas;

    json pairs = json::array();
    for (const auto& p : r.pairwise) {
        json entry = tsls_json(p.result);
        entry["label"] = p.label;
        entry["variant"] = p.variant == PairVariant::Raw ? "raw" : "residualized";
        pairs.push_back(entry);
    }
    j["pairwise"] = pairs;
    return j;
}

void write_text(std::ostream& out, const EstimateReport& r) {
    out << "source: " << (r.source.empty() ? "<memory>" : r.source) << "  n = " << r.n;
    if (r.dropped_rows > 0) out << "  (" << r.dropped_rows << (r.dropped_rows == 1 ? " row" : " rows") << " dropped)";
    out << '\n';
    out << "outcome: " << r.outcome << "  treatment: " << r.treatment << "  instruments: ";
    for (std::size_t i = 0; i < r.instruments.size(); ++i) out << (i ? "," : "") << r.instruments[i];
    out << "  controls: ";
    if (r.controls.empty()) out << "none";
    for (std::size_t i = 0; i < r.controls.size(); ++i) out << (i ? "," : "") << r.controls[i];
    out << "  intercept: " << (r.intercept ? "yes" : "no") << '\n';
    out << "robust: " << flavor_name(r.config.flavor) << "  cutoff: " << format_number(r.config.cutoff) << "\n\n";

    out << "2SLS, all instruments\n";
    Table t({"beta", "se", "F", "J", "p-value", "dof"}, 0);
    t.add({format_number(r.tsls.beta_2sls), format_number(r.tsls.se), format_number(r.tsls.f_stat),
           format_number(r.tsls.j_stat), r.tsls.j_pvalue ? format_number(*r.tsls.j_pvalue) : "n/a",
           std::to_string(r.tsls.j_dof)});
    t.print(out);

    out << "\nweight decomposition\n";
    Table w({"instrument", "weight", "beta_l", "beta*_l"});
    double sum = 0.0;
    std::optional<double> controlled = 0.0, marginal = 0.0;
    for (const auto& row : r.weights) {
        sum += row.weight;
        if (controlled && row.beta_controlled) {
            *controlled += row.weight * *row.beta_controlled;
        } else {
            controlled.reset();
        }
        if (marginal && row.beta_marginal) {
            *marginal += row.weight * *row.beta_marginal;
        } else {
            marginal.reset();
        }
        w.add({row.instrument, format_number(row.weight), opt_text(row.beta_controlled), opt_text(row.beta_marginal)});
    }
    w.add({"sum", format_number(sum), opt_text(controlled), opt_text(marginal)});
    w.print(out);

    out << "\njust-identified specifications\n";
    Table s({"id", "spec", "beta", "se", "pi", "psi", "F", "relevance"}, 2);
    for (const auto& e : r.specs) {
        s.add({std::to_string(e.spec.id), e.spec.label, opt_text(e.beta_hat),
               e.beta_hat ? format_number(e.se) : "-", format_number(e.pi_hat), format_number(e.psi_hat),
               format_number(e.f_stat), relevance_text(r.selection, e.spec.id)});
    }
    s.print(out);
    out << '\n';
    for (const auto& f : r.fas) out << fas_line(f) << '\n';

    if (!r.pairwise.empty()) {
        out << "\npairwise 2SLS\n";
        Table p({"pair", "beta", "se", "F", "J", "p-value"});
        for (const auto& row : r.pairwise) {
            p.add({row.label, format_number(row.result.beta_2sls), format_number(row.result.se),
                   format_number(row.result.f_stat), format_number(row.result.j_stat),
                   row.result.j_pvalue ? format_number(*row.result.j_pvalue) : "n/a"});
        }
        p.print(out);
    }
}

namespace {

json model_json(const PopulationModel& m) {
    auto vec = [](const Eigen::VectorXd& v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
        return a;
    };
    json sigma = json::array();
    for (Eigen::Index i = 0; i < m.sigma_z.rows(); ++i) sigma.push_back(vec(m.sigma_z.row(i).transpose()));
    return json{{"beta", num(m.beta)}, {"pi", vec(m.pi)},        {"gamma", vec(m.gamma)}, {"alpha", vec(m.alpha)},
                {"sigma_z", sigma},    {"var_v", num(m.var_v)}, {"var_u", num(m.var_u)}};
}

}  // namespace

json to_json(const OracleReport& r) {
    json j;
    j["schema"] = "faskit.oracle";
    j["schema_version"] = kJsonSchemaVersion;
    j["model"] = model_json(r.model);
    j["config"] = {{"mode", mode_name(r.config.mode)}, {"grid", r.config.frontier_grid}};
    json modes = json::array();
    for (const auto& om : r.modes) {
        json specs = json::array();
        for (std::size_t i = 0; i < om.fas.estimates.size(); ++i) {
            const auto& e = om.fas.estimates[i];
            specs.push_back({{"id", e.spec.id},
                             {"label", e.spec.label},
                             {"pi", num(om.moments[i].pi)},
                             {"psi", num(om.moments[i].psi)},
                             {"ratio", num(e.beta_hat)},
                             {"relevant", e.beta_hat.has_value()}});
        }
        json points = json::array();
        for (const auto& p : om.frontier) {
            json delta = json::array();
            for (double d : p.delta) delta.push_back(num(d));
            points.push_back({{"b", num(p.b)},
                              {"delta", delta},
                              {"identified_set", interval_json(p.identified_set)},
                              {"on_frontier", p.on_frontier}});
        }
        json entry = interval_json(om.fas.interval);
        entry["mode"] = to_string(om.fas.mode);
        entry["specs"] = specs;
        entry["frontier"] = points;
        modes.push_back(entry);
    }
    j["modes"] = modes;
    return j;
}

void write_text(std::ostream& out, const OracleReport& r) {
    const auto& m = r.model;
    out << "population model: beta = " << format_number(m.beta) << "  kz = " << m.kz() << '\n';
    for (const auto& om : r.modes) {
        out << '\n' << to_string(om.fas.mode) << " specifications\n";
        Table s({"id", "spec", "pi", "psi", "ratio", "relevant"}, 2);
        for (std::size_t i = 0; i < om.fas.estimates.size(); ++i) {
            const auto& e = om.fas.estimates[i];
            s.add({std::to_string(e.spec.id), e.spec.label, format_number(om.moments[i].pi),
                   format_number(om.moments[i].psi), opt_text(e.beta_hat), e.beta_hat ? "yes" : "no"});
        }
        s.print(out);
        out << fas_line(om.fas) << '\n';

        out << "frontier (" << om.frontier.size() << " points)\n";
        std::vector<std::string> header{"b"};
        for (const auto& e : om.fas.estimates) header.push_back("delta[" + e.spec.label + "]");
        header.push_back("identified set");
        header.push_back("on frontier");
        Table f(header, 0);
        for (const auto& p : om.frontier) {
            std::vector<std::string> row{format_number(p.b)};
            for (double d : p.delta) row.push_back(format_number(d));
            row.push_back(p.identified_set && p.identified_set->is_point() ? "{" + format_number(p.b) + "}"
                                                                             : interval_text(p.identified_set));
            row.push_back(p.on_frontier ? "yes" : "no");
            f.add(std::move(row));
        }
        f.print(out);
    }
}

json to_json(const SimulationSummary& s) {
    json j;
    j["schema"] = "faskit.simulate";
    j["schema_version"] = kJsonSchemaVersion;
    j["model"] = model_json(s.config.model);
    j["config"] = {{"n", s.config.n},
                   {"seed", s.config.seed},
                   {"error_law", s.config.error_law == ErrorLaw::Gaussian ? "gaussian" : "chi2"},
                   {"endogeneity", s.config.endogeneity},
                   {"replications", s.replications},
                   {"cutoff", s.cutoff}};
    j["tsls"] = {{"mean_beta", num(s.mean_beta_2sls)},
                 {"sd_beta", num(s.sd_beta_2sls)},
                 {"median_j_pvalue", num(s.median_j_pvalue)}};
    json modes = json::array();
    for (std::size_t i = 0; i < s.modes.size(); ++i) {
        const auto& e = s.endpoints[i];
        modes.push_back({{"mode", to_string(s.modes[i])},
                         {"nonempty", e.nonempty},
                         {"mean_lo", num(e.mean_lo)},
                         {"mean_hi", num(e.mean_hi)},
                         {"sd_lo", num(e.sd_lo)},
                         {"sd_hi", num(e.sd_hi)},
                         {"population", interval_json(e.population)}});
    }
    j["modes"] = modes;
    return j;
}

void write_text(std::ostream& out, const SimulationSummary& s) {
    out << "monte carlo: " << s.replications << " replications, n = " << s.config.n << ", seed = " << s.config.seed
        << ", errors " << (s.config.error_law == ErrorLaw::Gaussian ? "gaussian" : "chi2") << '\n';
    out << "2SLS: mean " << format_number(s.mean_beta_2sls) << "  sd " << format_number(s.sd_beta_2sls)
        << "  median J p-value " << format_number(s.median_j_pvalue) << "\n\n";
    Table t({"set", "population", "mean lo", "sd lo", "mean hi", "sd hi", "non-empty"});
    for (std::size_t i = 0; i < s.modes.size(); ++i) {
        const auto& e = s.endpoints[i];
        t.add({fas_name(s.modes[i]), interval_text(e.population), format_number(e.mean_lo), format_number(e.sd_lo),
               format_number(e.mean_hi), format_number(e.sd_hi),
               std::to_string(e.nonempty) + "/" + std::to_string(s.replications)});
    }
    t.print(out);
}

}  // namespace faskit
