#include "faskit/fas.hpp"

#include "faskit/error.hpp"

#include <algorithm>
#include <cmath>

namespace faskit {

std::string_view to_string(FasMode mode) noexcept {
    switch (mode) {
        case FasMode::Excl: return "excl";
        case FasMode::Exo: return "exo";
        case FasMode::General: return "general";
    }
    return "unknown";
}

std::string_view to_string(RejectReason reason) noexcept {
    switch (reason) {
        case RejectReason::LowF: return "low-F";
        case RejectReason::Degenerate: return "degenerate";
        case RejectReason::ZeroFirstStage: return "zero-first-stage";
    }
    return "unknown";
}

bool in_family(const JustIdSpec& spec, std::size_t kz, FasMode mode) noexcept {
    switch (mode) {
        case FasMode::Excl: return spec.all_others_controlled(kz);
        case FasMode::Exo: return spec.uncontrolled();
        case FasMode::General: return true;
    }
    return false;
}

std::vector<JustIdSpec> family_specs(std::size_t kz, FasMode mode) {
    std::vector<JustIdSpec> out;
    for (auto& spec : enumerate_specs(kz)) {
        if (in_family(spec, kz, mode)) out.push_back(std::move(spec));
    }
    return out;
}

RelevanceSelection select_relevant(const std::vector<SpecEstimate>& estimates, double cutoff) {
    if (!(cutoff > 0.0)) throw Error(ErrorKind::InvalidArgument, "relevance cutoff must be positive");
    RelevanceSelection sel;
    sel.cutoff = cutoff;
    for (const auto& est : estimates) {
        const std::size_t id = est.spec.id;
        switch (est.status) {
            case SpecStatus::Degenerate: sel.rejected[id] = RejectReason::Degenerate; continue;
            case SpecStatus::ZeroFirstStage: sel.rejected[id] = RejectReason::ZeroFirstStage; continue;
            case SpecStatus::Ok: break;
        }
        if (est.f_stat >= cutoff && est.beta_hat) {
            sel.selected.push_back(id);
        } else {
            sel.rejected[id] = RejectReason::LowF;
        }
    }
    std::sort(sel.selected.begin(), sel.selected.end());
    return sel;
}

FasResult assemble_fas(FasMode mode, std::vector<SpecEstimate> estimates, double cutoff) {
    FasResult res;
    res.mode = mode;
    res.selection = select_relevant(estimates, cutoff);
    res.estimates = std::move(estimates);
    for (const auto& est : res.estimates) {
        if (!std::binary_search(res.selection.selected.begin(), res.selection.selected.end(), est.spec.id)) {
            continue;
        }
        const double b = *est.beta_hat;
        if (!res.interval) {
            res.interval = Interval{b, b};
        } else {
            res.interval->lo = std::min(res.interval->lo, b);
            res.interval->hi = std::max(res.interval->hi, b);
        }
    }
    return res;
}

FasResult fas_estimate(const Dataset& dataset, FasMode mode, double cutoff, const EstimatorOptions& options) {
    if (!(cutoff > 0.0)) throw Error(ErrorKind::InvalidArgument, "relevance cutoff must be positive");
    const Dataset data = partial_out(dataset);
    return assemble_fas(mode, evaluate_specs(data, family_specs(data.kz(), mode), options), cutoff);
}

std::vector<FasResult> fas_estimate_all(const Dataset& dataset, double cutoff, const EstimatorOptions& options) {
    if (!(cutoff > 0.0)) throw Error(ErrorKind::InvalidArgument, "relevance cutoff must be positive");
    const Dataset data = partial_out(dataset);
    const std::size_t kz = data.kz();
    const auto all = evaluate_specs(data, enumerate_specs(kz), options);

    std::vector<FasResult> out;
    for (FasMode mode : {FasMode::Excl, FasMode::Exo}) {
        std::vector<SpecEstimate> family;
        for (const auto& est : all) {
            if (in_family(est.spec, kz, mode)) family.push_back(est);
        }
        out.push_back(assemble_fas(mode, std::move(family), cutoff));
    }
    out.push_back(assemble_fas(FasMode::General, all, cutoff));
    return out;
}

}  // namespace faskit
