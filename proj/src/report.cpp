#include "faskit/report.hpp"

#include "faskit/error.hpp"
#include "faskit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace faskit {

void RunConfig::validate() const {
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
        throw Error(ErrorKind::InvalidArgument, "cutoff must be a positive number");
    }
    if (frontier_grid < 2) throw Error(ErrorKind::InvalidArgument, "frontier grid needs at least two points");
}

std::vector<FasMode> requested_modes(ModeSelection mode) {
    switch (mode) {
        case ModeSelection::Excl: return {FasMode::Excl};
        case ModeSelection::Exo: return {FasMode::Exo};
        case ModeSelection::General: return {FasMode::General};
        case ModeSelection::All: return {FasMode::Excl, FasMode::Exo, FasMode::General};
    }
    return {};
}

namespace {

// Fully controlled specs first, then uncontrolled ones, then everything else
// in enumeration order; restricted to the families in `modes`.
std::vector<JustIdSpec> table_specs(std::size_t kz, const std::vector<FasMode>& modes) {
    const auto all = enumerate_specs(kz);
    auto wanted = [&](const JustIdSpec& s) {
        return std::any_of(modes.begin(), modes.end(), [&](FasMode m) { return in_family(s, kz, m); });
    };
    std::vector<JustIdSpec> out;
    std::vector<bool> taken(all.size(), false);
    auto take_if = [&](auto pred) {
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (!taken[i] && pred(all[i]) && wanted(all[i])) {
                taken[i] = true;
                out.push_back(all[i]);
            }
        }
    };
    take_if([kz](const JustIdSpec& s) { return s.all_others_controlled(kz); });
    take_if([](const JustIdSpec& s) { return s.uncontrolled(); });
    take_if([](const JustIdSpec&) { return true; });
    return out;
}

const SpecEstimate* find_spec(const std::vector<SpecEstimate>& specs, std::size_t instrument, bool controlled,
                              std::size_t kz) {
    for (const auto& est : specs) {
        if (est.spec.instrument != instrument) continue;
        if (controlled ? est.spec.all_others_controlled(kz) : est.spec.uncontrolled()) return &est;
    }
    return nullptr;
}

}  // namespace

EstimateReport run_estimate(const Dataset& dataset, const RunConfig& config, std::size_t dropped_rows) {
    config.validate();
    dataset.validate();
    EstimateReport rep;
    rep.source = dataset.provenance;
    rep.n = dataset.n();
    rep.dropped_rows = dropped_rows;
    rep.outcome = dataset.outcome_name;
    rep.treatment = dataset.treatment_name;
    rep.instruments = dataset.instrument_names;
    rep.controls = dataset.control_names;
    rep.intercept = dataset.intercept;
    rep.config = config;

    const EstimatorOptions opts{config.flavor, config.threads};
    const Dataset data = partial_out(dataset);
    const std::size_t kz = data.kz();
    std::vector<std::size_t> all(kz);
    std::iota(all.begin(), all.end(), std::size_t{0});
    rep.tsls = tsls(data, all, opts);
    rep.tsls.labels = dataset.instrument_names;

    const auto modes = requested_modes(config.mode);
    rep.specs = evaluate_specs(data, table_specs(kz, modes), opts);
    rep.selection = select_relevant(rep.specs, config.cutoff);
    for (FasMode mode : modes) {
        std::vector<SpecEstimate> family;
        for (const auto& est : rep.specs) {
            if (in_family(est.spec, kz, mode)) family.push_back(est);
        }
        std::sort(family.begin(), family.end(),
                  [](const SpecEstimate& a, const SpecEstimate& b) { return a.spec.id < b.spec.id; });
        rep.fas.push_back(assemble_fas(mode, std::move(family), config.cutoff));
    }

    // The decomposition needs both the controlled and the marginal estimates,
    // whichever modes were requested.
    std::vector<JustIdSpec> extra;
    for (const auto& spec : table_specs(kz, {FasMode::Excl, FasMode::Exo})) {
        const bool have = std::any_of(rep.specs.begin(), rep.specs.end(),
                                      [&](const SpecEstimate& e) { return e.spec.id == spec.id; });
        if (!have) extra.push_back(spec);
    }
    auto pool = rep.specs;
    for (auto& est : evaluate_specs(data, extra, opts)) pool.push_back(std::move(est));
    for (std::size_t l = 0; l < kz; ++l) {
        WeightRow row;
        row.instrument = dataset.instrument_names[l];
        row.weight = rep.tsls.weights(static_cast<Eigen::Index>(l));
        if (const auto* c = find_spec(pool, l, true, kz)) row.beta_controlled = c->beta_hat;
        if (const auto* m = find_spec(pool, l, false, kz)) row.beta_marginal = m->beta_hat;
        rep.weights.push_back(std::move(row));
    }

    if (config.pairwise && kz >= 2) rep.pairwise = tsls_pairwise_report(data, opts);
    for (auto& row : rep.pairwise) {
        row.result.labels = {dataset.instrument_names[row.first], dataset.instrument_names[row.second]};
    }
    return rep;
}

OracleReport run_oracle(const PopulationModel& model, const RunConfig& config) {
    config.validate();
    model.validate();
    OracleReport rep;
    rep.model = model;
    rep.config = config;
    for (FasMode mode : requested_modes(config.mode)) {
        OracleMode om;
        om.fas = population_fas(model, mode);
        std::vector<JustIdSpec> specs;
        for (const auto& est : om.fas.estimates) specs.push_back(est.spec);
        om.moments = population_moments(model, specs);
        std::vector<std::size_t> relevant;
        for (std::size_t j = 0; j < specs.size(); ++j) {
            if (std::binary_search(om.fas.selection.selected.begin(), om.fas.selection.selected.end(),
                                   specs[j].id)) {
                relevant.push_back(j);
            }
        }
        om.frontier = frontier(om.moments, relevant, default_grid(om.moments, relevant, config.frontier_grid));
        rep.modes.push_back(std::move(om));
    }
    return rep;
}

namespace {

double mean(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

SimulationSummary run_monte_carlo(const SimulationConfig& config, std::size_t replications, const RunConfig& run) {
    run.validate();
    config.model.validate();
    if (replications == 0) throw Error(ErrorKind::InvalidArgument, "replications must be at least 1");

    struct Draw {
        double beta_2sls = 0.0;
        std::optional<double> j_pvalue;
        std::vector<FasResult> fas;
    };
    std::vector<Draw> draws(replications);
    const EstimatorOptions opts{run.flavor, 1};
    parallel_for(replications, run.threads, [&](std::size_t r) {
        SimulationConfig cfg = config;
        cfg.seed = replication_seed(config.seed, r);
        const Dataset data = partial_out(simulate(cfg));
        std::vector<std::size_t> all(data.kz());
        std::iota(all.begin(), all.end(), std::size_t{0});
        const TslsResult t = tsls(data, all, opts);
        draws[r].beta_2sls = t.beta_2sls;
        draws[r].j_pvalue = t.j_pvalue;
        draws[r].fas = fas_estimate_all(data, run.cutoff, opts);
    });

    SimulationSummary sum;
    sum.config = config;
    sum.replications = replications;
    sum.cutoff = run.cutoff;
    sum.modes = requested_modes(run.mode);
    std::vector<double> betas, pvalues;
    for (const auto& d : draws) {
        betas.push_back(d.beta_2sls);
        if (d.j_pvalue) pvalues.push_back(*d.j_pvalue);
    }
    sum.mean_beta_2sls = mean(betas);
    sum.sd_beta_2sls = stddev(betas);
    if (pvalues.empty()) {
        sum.median_j_pvalue = std::numeric_limits<double>::quiet_NaN();
    } else {
        const auto mid = pvalues.begin() + static_cast<std::ptrdiff_t>(pvalues.size() / 2);
        std::nth_element(pvalues.begin(), mid, pvalues.end());
        sum.median_j_pvalue = *mid;
        if (pvalues.size() % 2 == 0) {
            sum.median_j_pvalue = 0.5 * (*mid + *std::max_element(pvalues.begin(), mid));
        }
    }
    for (FasMode mode : sum.modes) {
        const auto slot = static_cast<std::size_t>(mode);  // fas_estimate_all order matches the enum
        std::vector<double> lo, hi;
        for (const auto& d : draws) {
            if (const auto& iv = d.fas[slot].interval) {
                lo.push_back(iv->lo);
                hi.push_back(iv->hi);
            }
        }
        EndpointSummary es;
        es.nonempty = lo.size();
        es.mean_lo = mean(lo);
        es.mean_hi = mean(hi);
        es.sd_lo = stddev(lo);
        es.sd_hi = stddev(hi);
        es.population = population_fas(config.model, mode).interval;
        sum.endpoints.push_back(es);
    }
    return sum;
}

}  // namespace faskit
