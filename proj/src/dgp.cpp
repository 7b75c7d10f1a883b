#include "faskit/dgp.hpp"

#include "faskit/error.hpp"

#include <cmath>
#include <string>

namespace faskit {

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication) noexcept {
    std::uint64_t z = seed + (replication + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

Dataset simulate(const SimulationConfig& config) {
    const PopulationModel& model = config.model;
    model.validate();
    if (config.n < 10) throw Error(ErrorKind::InvalidArgument, "simulation needs n >= 10");
    const double rho = config.endogeneity;
    if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::InvalidArgument, "endogeneity correlation must lie in (-1, 1)");

    const auto k = static_cast<Eigen::Index>(model.kz());
    const Eigen::MatrixXd chol = model.sigma_z.llt().matrixL();
    const Eigen::VectorXd eta = model.sigma_z.llt().solve(model.alpha);
    const double var_eps = model.var_u - model.alpha.dot(eta);
    if (!(var_eps > 0.0)) {
        throw Error(ErrorKind::InvalidVariance,
                    "var_u = " + std::to_string(model.var_u) + " is too small for the exogeneity violation alpha");
    }
    const double sd_eps = std::sqrt(var_eps);
    const double sd_v = std::sqrt(model.var_v);
    const double rho_c = std::sqrt(1.0 - rho * rho);
    const bool chi = config.error_law == ErrorLaw::ScaledChiSquare;
    const double var_z1 = model.sigma_z(0, 0);

    const auto n = static_cast<Eigen::Index>(config.n);
    Dataset data;
    data.y.resize(n);
    data.x.resize(n);
    data.instruments.resize(n, k);
    data.controls = Eigen::MatrixXd(n, 0);
    data.instrument_names = default_instrument_names(model.kz());
    data.provenance = "simulate(n=" + std::to_string(config.n) + ", seed=" + std::to_string(config.seed) + ")";

    Rng rng(config.seed);
    auto draw = [&rng, chi] {
        const double e = rng.normal();
        return chi ? (e * e - 1.0) / std::sqrt(2.0) : e;
    };
    Eigen::VectorXd e_z(k);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) e_z(j) = rng.normal();
        const Eigen::VectorXd z = chol * e_z;
        const double e1 = draw();
        const double e2 = draw();
        const double h = chi ? std::sqrt(0.5 * (1.0 + z(0) * z(0) / var_z1)) : 1.0;
        const double v = sd_v * h * e1;
        const double eps = sd_eps * h * (rho * e1 + rho_c * e2);
        const double u = z.dot(eta) + eps;
        const double x = z.dot(model.pi) + v;
        data.x(i) = x;
        data.y(i) = x * model.beta + z.dot(model.gamma) + u;
        data.instruments.row(i) = z.transpose();
    }
    return data;
}

}  // namespace faskit
