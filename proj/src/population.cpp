#include "faskit/population.hpp"

#include "faskit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace faskit {

void PopulationModel::validate() const {
    const auto k = static_cast<Eigen::Index>(kz());
    if (k < 1) throw Error(ErrorKind::InvalidModel, "model needs at least one instrument (pi is empty)");
    if (gamma.size() != k || alpha.size() != k || sigma_z.rows() != k || sigma_z.cols() != k) {
        throw Error(ErrorKind::InvalidModel, "model dimensions disagree: pi has " + std::to_string(k) + " entries");
    }
    if (!std::isfinite(beta) || !pi.allFinite() || !gamma.allFinite() || !alpha.allFinite() ||
        !sigma_z.allFinite()) {
        throw Error(ErrorKind::InvalidModel, "model contains non-finite values");
    }
    if (!(var_v > 0.0) || !(var_u > 0.0) || !std::isfinite(var_v) || !std::isfinite(var_u)) {
        throw Error(ErrorKind::InvalidModel, "error variances must be positive");
    }
    const double scale = sigma_z.cwiseAbs().maxCoeff();
    if ((sigma_z - sigma_z.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error(ErrorKind::InvalidModel, "sigma_z is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_z, Eigen::EigenvaluesOnly);
    const double largest = eig.eigenvalues().maxCoeff();
    if (!(largest > 0.0) || eig.eigenvalues().minCoeff() <= 1e-10 * largest) {
        throw Error(ErrorKind::SingularSigma, "sigma_z is not positive definite");
    }
}

bool PopulationModel::invalid_instruments_violate_one_assumption() const noexcept {
    for (Eigen::Index l = 0; l < pi.size(); ++l) {
        if (gamma(l) != 0.0 && alpha(l) != 0.0) return false;
    }
    return true;
}

Eigen::VectorXd PopulationModel::cov_zx() const { return sigma_z * pi; }

Eigen::VectorXd PopulationModel::cov_zy() const { return sigma_z * pi * beta + sigma_z * gamma + alpha; }

double PopulationModel::var_x() const { return pi.dot(sigma_z * pi) + var_v; }

PopulationModel make_model(double beta, Eigen::VectorXd pi, Eigen::VectorXd gamma, Eigen::VectorXd alpha,
                           Eigen::MatrixXd sigma_z) {
    PopulationModel m;
    m.beta = beta;
    m.pi = std::move(pi);
    m.gamma = std::move(gamma);
    m.alpha = std::move(alpha);
    m.sigma_z = std::move(sigma_z);
    return m;
}

std::vector<SpecMoment> population_moments(const PopulationModel& model, const std::vector<JustIdSpec>& specs) {
    model.validate();
    const Eigen::VectorXd czx = model.cov_zx();
    const Eigen::VectorXd czy = model.cov_zy();
    const double var_x = model.var_x();
    const Eigen::MatrixXd& sigma = model.sigma_z;

    std::vector<SpecMoment> out;
    out.reserve(specs.size());
    for (const auto& spec : specs) {
        const auto l = static_cast<Eigen::Index>(spec.instrument);
        if (l >= sigma.rows()) throw Error(ErrorKind::InvalidArgument, "spec " + spec.label + " exceeds the model");
        double var = sigma(l, l);
        double cx = czx(l);
        double cy = czy(l);
        if (!spec.controls.empty()) {
            const auto m = static_cast<Eigen::Index>(spec.controls.size());
            Eigen::MatrixXd s_cc(m, m);
            Eigen::VectorXd s_cl(m), cx_c(m), cy_c(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                const auto ci = static_cast<Eigen::Index>(spec.controls[static_cast<std::size_t>(i)]);
                s_cl(i) = sigma(ci, l);
                cx_c(i) = czx(ci);
                cy_c(i) = czy(ci);
                for (Eigen::Index j = 0; j < m; ++j) {
                    s_cc(i, j) = sigma(ci, static_cast<Eigen::Index>(spec.controls[static_cast<std::size_t>(j)]));
                }
            }
            // Linear projection of Z_l on Z_C: phi = S_CC^{-1} S_Cl.
            const Eigen::VectorXd phi = s_cc.llt().solve(s_cl);
            var -= s_cl.dot(phi);
            cx -= phi.dot(cx_c);
            cy -= phi.dot(cy_c);
        }
        SpecMoment mom;
        mom.psi = cy / var;
        const bool relevant = std::abs(cx) > kPopulationRelevanceTolerance * std::sqrt(var * var_x);
        mom.pi = relevant ? cx / var : 0.0;
        out.push_back(mom);
    }
    return out;
}

FasResult population_fas(const PopulationModel& model, FasMode mode) {
    const auto specs = family_specs(model.kz(), mode);
    const auto moments = population_moments(model, specs);
    std::vector<SpecEstimate> estimates;
    estimates.reserve(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        SpecEstimate est;
        est.spec = specs[i];
        est.pi_hat = moments[i].pi;
        est.psi_hat = moments[i].psi;
        if (moments[i].pi != 0.0) {
            est.beta_hat = moments[i].psi / moments[i].pi;
            est.f_stat = std::numeric_limits<double>::infinity();
        } else {
            est.note = "population first stage is zero";
        }
        estimates.push_back(std::move(est));
    }
    return assemble_fas(mode, std::move(estimates), kDefaultCutoff);
}

std::optional<Interval> identified_set(const std::vector<SpecMoment>& moments, const std::vector<double>& delta) {
    if (moments.size() != delta.size()) {
        throw Error(ErrorKind::DimensionMismatch, "identified_set: moments and delta differ in length");
    }
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < moments.size(); ++j) {
        const double d = delta[j];
        if (!(d >= 0.0)) throw Error(ErrorKind::InvalidArgument, "identified_set: delta must be non-negative");
        const auto [pi, psi] = moments[j];
        if (pi == 0.0) {
            if (std::abs(psi) <= d) continue;
            return std::nullopt;
        }
        double a = (psi - d) / pi;
        double b = (psi + d) / pi;
        if (pi < 0.0) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    }
    if (lo <= hi) return Interval{lo, hi};
    const double slack = kIdentifiedSetSlack * std::max({1.0, std::abs(lo), std::abs(hi)});
    if (lo - hi <= slack) {
        const double mid = 0.5 * (lo + hi);
        return Interval{mid, mid};
    }
    return std::nullopt;
}

namespace {

std::optional<Interval> ratio_range(const std::vector<SpecMoment>& moments, const std::vector<std::size_t>& relevant) {
    std::optional<Interval> range;
    for (std::size_t j : relevant) {
        if (j >= moments.size()) throw Error(ErrorKind::InvalidArgument, "relevant index out of range");
        if (moments[j].pi == 0.0) continue;
        const double r = moments[j].psi / moments[j].pi;
        if (!range) {
            range = Interval{r, r};
        } else {
            range->lo = std::min(range->lo, r);
            range->hi = std::max(range->hi, r);
        }
    }
    return range;
}

}  // namespace

std::vector<FrontierPoint> frontier(const std::vector<SpecMoment>& moments, const std::vector<std::size_t>& relevant,
                                    const std::vector<double>& b_grid) {
    const auto range = ratio_range(moments, relevant);
    std::vector<FrontierPoint> out;
    out.reserve(b_grid.size());
    for (double b : b_grid) {
        FrontierPoint pt;
        pt.b = b;
        pt.delta.reserve(moments.size());
        for (const auto& m : moments) pt.delta.push_back(std::abs(m.psi - b * m.pi));
        pt.identified_set = identified_set(moments, pt.delta);
        pt.on_frontier = range && range->contains(b);
        out.push_back(std::move(pt));
    }
    return out;
}

std::vector<double> default_grid(const std::vector<SpecMoment>& moments, const std::vector<std::size_t>& relevant,
                                 std::size_t points) {
    if (points < 2) throw Error(ErrorKind::InvalidArgument, "frontier grid needs at least two points");
    const auto range = ratio_range(moments, relevant);
    if (!range) return {};
    if (range->is_point()) return {range->lo};
    std::vector<double> grid(points);
    const double step = range->width() / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = range->lo + step * static_cast<double>(i);
    grid.back() = range->hi;
    return grid;
}

}  // namespace faskit
