#include "faskit/cli.hpp"

#include "faskit/error.hpp"
#include "faskit/io.hpp"
#include "faskit/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <map>
#include <ostream>

namespace faskit {
namespace {

struct Options {
    // estimate
    std::string data;
    std::string outcome = "y";
    std::string treatment = "x";
    std::vector<std::string> instruments;
    std::vector<std::string> controls;
    bool no_intercept = false;
    // oracle / simulate
    std::string model;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::size_t replications = 0;
    std::string out_path;
    ErrorLaw error_law = ErrorLaw::Gaussian;
    std::optional<double> endogeneity;
    // shared
    RunConfig run;
};

void add_shared(CLI::App* cmd, Options& o) {
    const std::map<std::string, ModeSelection> modes{{"excl", ModeSelection::Excl},
                                                     {"exo", ModeSelection::Exo},
                                                     {"general", ModeSelection::General},
                                                     {"all", ModeSelection::All}};
    const std::map<std::string, EmitFormat> emits{{"text", EmitFormat::Text}, {"json", EmitFormat::Json}};
    cmd->add_option("--mode", o.run.mode, "excl, exo, general or all")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    cmd->add_option("--emit", o.run.emit, "text or json")->transform(CLI::CheckedTransformer(emits, CLI::ignore_case));
    cmd->add_option("--cutoff", o.run.cutoff, "first-stage F cutoff")->capture_default_str();
    cmd->add_option("--threads", o.run.threads, "worker threads, 0 = all cores")
        ->envname("FASKIT_THREADS")
        ->capture_default_str();
}

void add_robust(CLI::App* cmd, Options& o) {
    const std::map<std::string, RobustFlavor> flavors{{"hc0", RobustFlavor::HC0}, {"hc1", RobustFlavor::HC1}};
    cmd->add_option("--robust", o.run.flavor, "hc0 or hc1")->transform(CLI::CheckedTransformer(flavors, CLI::ignore_case));
}

void emit(std::ostream& out, const RunConfig& run, const auto& report) {
    if (run.emit == EmitFormat::Json) {
        out << to_json(report).dump(2) << '\n';
    } else {
        write_text(out, report);
    }
}

void cmd_estimate(const Options& o, std::ostream& out) {
    CsvColumns cols{o.outcome, o.treatment, o.instruments, o.controls, !o.no_intercept};
    const CsvLoadResult loaded = load_csv(o.data, cols);
    emit(out, o.run, run_estimate(loaded.dataset, o.run, loaded.dropped_rows));
}

void cmd_oracle(const Options& o, std::ostream& out) {
    const ModelFile file = load_model(o.model);
    emit(out, o.run, run_oracle(file.model, o.run));
}

void cmd_simulate(const Options& o, std::ostream& out) {
    const ModelFile file = load_model(o.model);
    SimulationConfig cfg;
    cfg.model = file.model;
    cfg.n = o.n;
    cfg.seed = o.seed;
    cfg.error_law = o.error_law;
    if (file.endogeneity) cfg.endogeneity = *file.endogeneity;
    if (o.endogeneity) cfg.endogeneity = *o.endogeneity;

    if (o.replications > 0) {
        o.run.validate();
        emit(out, o.run, run_monte_carlo(cfg, o.replications, o.run));
        if (o.out_path.empty()) return;
    }
    const Dataset data = simulate(cfg);
    if (o.out_path.empty() || o.out_path == "-") {
        write_csv(out, data);
        return;
    }
    std::ofstream file_out(o.out_path);
    if (!file_out) throw Error(ErrorKind::FileNotFound, "cannot write '" + o.out_path + "'");
    write_csv(file_out, data);
    if (!file_out) throw Error(ErrorKind::FileNotFound, "failed while writing '" + o.out_path + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Falsification adaptive sets for linear IV models", "faskit"};
    app.require_subcommand(1);
    Options o;

    auto* est = app.add_subcommand("estimate", "estimate FAS intervals from a CSV file");
    est->add_option("--data", o.data, "CSV file")->required();
    est->add_option("--outcome", o.outcome, "outcome column")->capture_default_str();
    est->add_option("--treatment", o.treatment, "treatment column")->capture_default_str();
    est->add_option("--instruments", o.instruments, "instrument columns, comma separated")
        ->delimiter(',')
        ->required();
    est->add_option("--controls", o.controls, "control columns, comma separated")->delimiter(',');
    est->add_flag("--no-intercept", o.no_intercept, "do not partial out a constant");
    est->add_flag("--pairwise", o.run.pairwise, "add the two-instrument 2SLS comparison");
    add_shared(est, o);
    add_robust(est, o);

    auto* ora = app.add_subcommand("oracle", "population FAS and falsification frontier of a model file");
    ora->add_option("--model", o.model, "model file")->required();
    ora->add_option("--grid", o.run.frontier_grid, "frontier grid points")->capture_default_str();
    add_shared(ora, o);

    auto* sim = app.add_subcommand("simulate", "draw data from a model file, or run a Monte Carlo");
    sim->add_option("--model", o.model, "model file")->required();
    sim->add_option("--n", o.n, "observations per dataset")->capture_default_str();
    sim->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sim->add_option("--out", o.out_path, "write the dataset as CSV here (- for stdout)");
    sim->add_option("--replications", o.replications, "Monte Carlo replications; prints a summary");
    sim->add_option("--endogeneity", o.endogeneity, "corr(V, eps), overrides the model file");
    const std::map<std::string, ErrorLaw> laws{{"gaussian", ErrorLaw::Gaussian}, {"chi2", ErrorLaw::ScaledChiSquare}};
    sim->add_option("--error-law", o.error_law, "gaussian or chi2")
        ->transform(CLI::CheckedTransformer(laws, CLI::ignore_case));
    add_shared(sim, o);
    add_robust(sim, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "faskit: usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (est->parsed()) {
            cmd_estimate(o, out);
        } else if (ora->parsed()) {
            cmd_oracle(o, out);
        } else {
            cmd_simulate(o, out);
        }
    } catch (const Error& e) {
        err << "faskit: error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "faskit: error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace faskit
