#include "faskit/linalg.hpp"
#include "faskit/spec_enum.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <set>

using namespace faskit;

namespace {

std::vector<std::string> labels(const std::vector<JustIdSpec>& specs) {
    std::vector<std::string> out;
    for (const auto& s : specs) out.push_back(s.label);
    return out;
}

}  // namespace

TEST_CASE("two instruments give four specs") {
    const auto specs = enumerate_specs(2);
    CHECK(labels(specs) == std::vector<std::string>{"Z1", "Z1|2", "Z2", "Z2|1"});
    std::set<std::string> expected{"Z1|2", "Z2|1", "Z1", "Z2"};
    const auto names = labels(specs);
    CHECK(std::set<std::string>(names.begin(), names.end()) == expected);
}

TEST_CASE("three instruments give twelve specs in binary-counter order") {
    const auto specs = enumerate_specs(3);
    REQUIRE(specs.size() == 12);
    CHECK(labels(specs) == std::vector<std::string>{"Z1", "Z1|2", "Z1|3", "Z1|2,3", "Z2", "Z2|1", "Z2|3", "Z2|1,3",
                                                    "Z3", "Z3|1", "Z3|2", "Z3|1,2"});
    for (std::size_t i = 0; i < specs.size(); ++i) CHECK(specs[i].id == i + 1);
    CHECK(specs[3].controls == std::vector<std::size_t>{1, 2});
}

TEST_CASE("spec counts") {
    CHECK(enumerate_specs(1).size() == 1);
    CHECK(enumerate_specs(4).size() == 32);
    for (std::size_t kz = 1; kz <= 10; ++kz) {
        const auto specs = enumerate_specs(kz);
        CHECK(specs.size() == kz * (std::size_t{1} << (kz - 1)));
        CHECK(spec_count(kz) == specs.size());
        // Each instrument appears with every subset of the others exactly once.
        std::set<std::pair<std::size_t, std::vector<std::size_t>>> seen;
        for (const auto& s : specs) {
            CHECK(std::find(s.controls.begin(), s.controls.end(), s.instrument) == s.controls.end());
            CHECK(std::is_sorted(s.controls.begin(), s.controls.end()));
            seen.emplace(s.instrument, s.controls);
        }
        CHECK(seen.size() == specs.size());
    }
}

TEST_CASE("enumeration bounds") {
    CHECK_THROWS_KIND(enumerate_specs(0), ErrorKind::InvalidCount);
    CHECK_THROWS_KIND(enumerate_specs(21), ErrorKind::TooManyInstruments);
    CHECK(spec_label(1, {0, 2}) == "Z2|1,3");
}

namespace {

Dataset correlated_pair(std::uint64_t seed, std::size_t n = 400) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    Dataset d;
    d.y.resize(static_cast<Eigen::Index>(n));
    d.x.resize(static_cast<Eigen::Index>(n));
    d.instruments.resize(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < d.y.size(); ++i) {
        const double a = N(rng), b = N(rng);
        d.instruments(i, 0) = a + 1.0;
        d.instruments(i, 1) = 0.5 * a + std::sqrt(0.75) * b - 2.0;
        d.x(i) = d.instruments(i, 0) + d.instruments(i, 1) + N(rng);
        d.y(i) = d.x(i) + N(rng);
    }
    d.instrument_names = default_instrument_names(2);
    return d;
}

}  // namespace

TEST_CASE("transform without controls demeans") {
    const Dataset d = correlated_pair(31);
    const auto t = transform_instrument(d, enumerate_specs(2)[0]);
    CHECK(t.projection_coeffs.size() == 0);
    const Eigen::ArrayXd expected = d.instruments.col(0).array() - d.instruments.col(0).mean();
    CHECK((t.values.array() - expected).abs().maxCoeff() < 1e-12);
}

TEST_CASE("transform is orthogonal to its controls") {
    const Dataset d = correlated_pair(32);
    const auto t = transform_instrument(d, enumerate_specs(2)[1]);  // Z1|2
    const Eigen::VectorXd z2 = d.instruments.col(1).array() - d.instruments.col(1).mean();
    const double corr = t.values.dot(z2) / (t.values.norm() * z2.norm());
    CHECK(std::abs(corr) < 1e-8);
    CHECK(std::abs(t.values.sum()) < 1e-8 * t.values.norm());
    REQUIRE(t.projection_coeffs.size() == 1);
    const Eigen::MatrixXd W = (Eigen::MatrixXd(d.y.size(), 2) << Eigen::VectorXd::Ones(d.y.size()), d.instruments.col(1)).finished();
    CHECK(t.projection_coeffs(0) == doctest::Approx(oracle::ols_coef(W, d.instruments.col(0))(1)).epsilon(1e-12));
}

TEST_CASE("copied instrument is degenerate") {
    Dataset d = correlated_pair(33);
    d.instruments.col(1) = d.instruments.col(0);
    CHECK_THROWS_KIND(transform_instrument(d, enumerate_specs(2)[3]), ErrorKind::DegenerateInstrument);
}

TEST_CASE("double residualization identity for two instruments") {
    // M_{z1} M_{z2} z1 = -z_{2|1} phi_21 on demeaned data.
    const Dataset d = partial_out(correlated_pair(34));
    const Eigen::MatrixXd z1 = d.instruments.col(0);
    const Eigen::MatrixXd z2 = d.instruments.col(1);
    const Eigen::MatrixXd lhs = residualize(residualize(z1, z2), z1);
    const double phi21 = z2.col(0).dot(z1.col(0)) / z2.col(0).squaredNorm();
    const auto z2_1 = transform_instrument(d, enumerate_specs(2)[3]);
    const Eigen::VectorXd rhs = -z2_1.values * phi21;
    CHECK((lhs.col(0) - rhs).norm() <= 1e-9 * rhs.norm());
}

TEST_CASE("transform does not depend on the order of listed controls") {
    std::mt19937_64 rng(35);
    const Dataset d = oracle::random_dataset(rng, {300, 4, 1});
    JustIdSpec spec;
    spec.instrument = 0;
    spec.controls = {1, 2, 3};
    spec.label = spec_label(0, spec.controls);
    const auto a = transform_instrument(d, spec);
    spec.controls = {3, 1, 2};
    const auto b = transform_instrument(d, spec);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transform rejects bad specs") {
    const Dataset d = correlated_pair(36);
    JustIdSpec spec;
    spec.instrument = 2;
    CHECK_THROWS_KIND(transform_instrument(d, spec), ErrorKind::InvalidArgument);
    spec.instrument = 0;
    spec.controls = {0};
    CHECK_THROWS_KIND(transform_instrument(d, spec), ErrorKind::InvalidArgument);
}
