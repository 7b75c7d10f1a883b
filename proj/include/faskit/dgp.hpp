#pragma once

#include "faskit/dataset.hpp"
#include "faskit/population.hpp"

#include <cstddef>
#include <cstdint>
#include <random>

namespace faskit {

enum class ErrorLaw { Gaussian, ScaledChiSquare };

struct SimulationConfig {
    PopulationModel model;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    ErrorLaw error_law = ErrorLaw::Gaussian;
    // corr(V, eps) where U = Z' sigma_z^{-1} alpha + eps.
    double endogeneity = 0.5;
};

// Sub-seed for replication r: splitmix64 applied to seed + (r + 1) * 0x9E3779B97F4A7C15.
[[nodiscard]] std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication) noexcept;

// mt19937_64 with a hand-rolled standard normal (Marsaglia polar method on
// 53-bit uniforms) so draws do not depend on the standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Draws n observations from the model:
//   Z = L e_z with L L' = sigma_z,
//   V = sd_v * e_1,  eps = sd_eps * (rho e_1 + sqrt(1 - rho^2) e_2),
//   U = Z' sigma_z^{-1} alpha + eps,  X = Z'pi + V,  Y = X beta + Z'gamma + U,
// where sd_eps^2 = var_u - alpha' sigma_z^{-1} alpha. Under ScaledChiSquare
// e_1, e_2 are standardized chi-square(1) draws scaled by
// sqrt((1 + Z_1^2 / var(Z_1)) / 2), which keeps cov(Z, U) = alpha while making
// the errors heteroskedastic.
// Throws InvalidVariance (sd_eps^2 <= 0), InvalidArgument (n < 10, |rho| >= 1).
[[nodiscard]] Dataset simulate(const SimulationConfig& config);

}  // namespace faskit
