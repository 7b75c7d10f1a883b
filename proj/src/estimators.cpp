#include "faskit/estimators.hpp"

#include "faskit/chi_square.hpp"
#include "faskit/error.hpp"
#include "faskit/parallel.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace faskit {
namespace {

constexpr double kZeroFirstStage = 1e-12;
constexpr double kWeakIdentification = 1e-12;

const Dataset& prepared(const Dataset& dataset, std::optional<Dataset>& storage) {
    if (dataset.partialled) return dataset;
    storage = partial_out(dataset);
    return *storage;
}

// Small-sample factor for a regression with k parameters on top of what was
// already absorbed by partialling.
double small_sample_factor(RobustFlavor flavor, std::size_t n, std::size_t k) {
    if (n <= k) {
        throw Error(ErrorKind::InsufficientObservations,
                    std::to_string(n) + " observations for " + std::to_string(k) + " parameters");
    }
    if (flavor == RobustFlavor::HC0) return 1.0;
    return static_cast<double>(n) / static_cast<double>(n - k);
}

Eigen::MatrixXd gather(const Dataset& data, const std::vector<std::size_t>& indices) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(data.n()), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t c = 0; c < indices.size(); ++c) {
        if (indices[c] >= data.kz()) {
            throw Error(ErrorKind::InvalidArgument,
                        "instrument index " + std::to_string(indices[c]) + " out of range");
        }
        out.col(static_cast<Eigen::Index>(c)) = data.instruments.col(static_cast<Eigen::Index>(indices[c]));
    }
    return out;
}

// Robust variance of a single-coefficient ratio a'w / a'b with meat sum a_i^2 r_i^2.
double ratio_variance(const Eigen::VectorXd& a, const Eigen::VectorXd& r, double denominator, double factor) {
    const double meat = (a.array().square() * r.array().square()).sum();
    return factor * meat / (denominator * denominator);
}

// Fills everything computable for a transformed instrument; sets the status
// instead of throwing so callers decide.
SpecEstimate compute_spec(const Dataset& data, const TransformedInstrument& zt, const EstimatorOptions& options) {
    SpecEstimate est;
    est.spec = zt.spec;

    const Eigen::VectorXd& z = zt.values;
    if (static_cast<std::size_t>(z.size()) != data.n()) {
        throw Error(ErrorKind::DimensionMismatch, "transformed instrument length differs from the sample");
    }
    const double zz = z.squaredNorm();
    if (zz == 0.0) {
        est.status = SpecStatus::Degenerate;
        est.note = "instrument has no variation";
        return est;
    }
    if (data.x.squaredNorm() == 0.0) {
        est.status = SpecStatus::Degenerate;
        est.note = "treatment has no variation after partialling out";
        return est;
    }

    const Eigen::MatrixXd controls = gather(data, zt.spec.controls);
    Eigen::MatrixXd xy(static_cast<Eigen::Index>(data.n()), 2);
    xy.col(0) = data.x;
    xy.col(1) = data.y;
    const Eigen::MatrixXd xy_c = residualize(xy, controls);
    const Eigen::VectorXd x_c = xy_c.col(0);
    const Eigen::VectorXd y_c = xy_c.col(1);

    const std::size_t params = static_cast<std::size_t>(data.absorbed) + zt.spec.controls.size() + 1;
    const double factor = small_sample_factor(options.flavor, data.n(), params);

    const double zx = z.dot(data.x);
    const double zy = z.dot(data.y);
    est.pi_hat = zx / zz;
    est.psi_hat = zy / zz;

    const Eigen::VectorXd v = x_c - z * est.pi_hat;
    const double pi_var = ratio_variance(z, v, zz, factor);
    est.pi_se = std::sqrt(pi_var);
    if (pi_var > 0.0) {
        est.f_stat = est.pi_hat * est.pi_hat / pi_var;
    } else {
        est.f_stat = est.pi_hat != 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }

    if (std::abs(zx) <= kZeroFirstStage * std::sqrt(zz) * data.x.norm()) {
        est.status = SpecStatus::ZeroFirstStage;
        est.note = "first stage is numerically zero";
        return est;
    }

    const double beta = zy / zx;
    const Eigen::VectorXd u = y_c - x_c * beta;
    est.beta_hat = beta;
    est.se = std::sqrt(ratio_variance(z, u, zx, factor));
    return est;
}

std::string pair_label(const std::string& a, const std::string& b) { return a + ", " + b; }

}  // namespace

std::string_view to_string(SpecStatus status) noexcept {
    switch (status) {
        case SpecStatus::Ok: return "ok";
        case SpecStatus::Degenerate: return "degenerate";
        case SpecStatus::ZeroFirstStage: return "zero-first-stage";
    }
    return "unknown";
}

SpecEstimate just_id_iv(const Dataset& dataset, const TransformedInstrument& zt, const EstimatorOptions& options) {
    std::optional<Dataset> storage;
    const Dataset& data = prepared(dataset, storage);
    SpecEstimate est = compute_spec(data, zt, options);
    switch (est.status) {
        case SpecStatus::Ok: return est;
        case SpecStatus::Degenerate:
            throw Error(ErrorKind::DegenerateInstrument, zt.spec.label + ": " + est.note);
        case SpecStatus::ZeroFirstStage:
            throw Error(ErrorKind::ZeroFirstStage, zt.spec.label + ": " + est.note);
    }
    return est;
}

SpecEstimate evaluate_spec(const Dataset& dataset, const JustIdSpec& spec, const EstimatorOptions& options) {
    std::optional<Dataset> storage;
    const Dataset& data = prepared(dataset, storage);
    try {
        return compute_spec(data, transform_instrument(data, spec), options);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateInstrument && e.kind() != ErrorKind::RankDeficient) throw;
        SpecEstimate est;
        est.spec = spec;
        est.status = SpecStatus::Degenerate;
        est.note = e.what();
        return est;
    }
}

std::vector<SpecEstimate> evaluate_specs(const Dataset& dataset, const std::vector<JustIdSpec>& specs,
                                         const EstimatorOptions& options) {
    std::optional<Dataset> storage;
    const Dataset& data = prepared(dataset, storage);
    std::vector<SpecEstimate> out(specs.size());
    parallel_for(specs.size(), options.threads, [&](std::size_t i) { out[i] = evaluate_spec(data, specs[i], options); });
    return out;
}

TslsResult tsls_with_instruments(const Dataset& dataset, const Eigen::MatrixXd& instruments,
                                 const EstimatorOptions& options, int extra_absorbed) {
    std::optional<Dataset> storage;
    const Dataset& data = prepared(dataset, storage);
    const auto k = static_cast<std::size_t>(instruments.cols());
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "2SLS needs at least one instrument");
    if (static_cast<std::size_t>(instruments.rows()) != data.n()) {
        throw Error(ErrorKind::DimensionMismatch, "instrument matrix rows differ from the sample size");
    }
    const std::size_t n = data.n();
    const std::size_t absorbed = static_cast<std::size_t>(data.absorbed + extra_absorbed);
    const double first_factor = small_sample_factor(options.flavor, n, absorbed + k);
    const double structural_factor = small_sample_factor(options.flavor, n, absorbed + 1);

    const RegressionFit first = ols(instruments, data.x, RobustFlavor::HC0);
    const Eigen::VectorXd& x_hat = first.fitted;
    const double xpx = data.x.dot(x_hat);
    if (!(xpx > kWeakIdentification * data.x.squaredNorm())) {
        throw Error(ErrorKind::WeakIdentification, "instruments carry no information on the treatment");
    }

    TslsResult res;
    res.first_stage = first.coefficients;
    res.beta_2sls = x_hat.dot(data.y) / xpx;
    const Eigen::VectorXd u = data.y - data.x * res.beta_2sls;
    res.se = std::sqrt(ratio_variance(x_hat, u, xpx, structural_factor));

    const Eigen::VectorXd zx = instruments.transpose() * data.x;
    const Eigen::VectorXd zy = instruments.transpose() * data.y;
    res.weights = first.coefficients.cwiseProduct(zx) / xpx;
    res.column_estimates = zy.cwiseQuotient(zx);

    const Eigen::MatrixXd pi_cov = first.robust_cov * first_factor;
    const Eigen::LDLT<Eigen::MatrixXd> pi_ldlt(pi_cov);
    const double wald = first.coefficients.dot(pi_ldlt.solve(first.coefficients));
    res.f_stat = (pi_ldlt.info() == Eigen::Success && std::isfinite(wald))
                     ? wald / static_cast<double>(k)
                     : std::numeric_limits<double>::infinity();

    res.j_dof = static_cast<int>(k) - 1;
    if (k == 1) return res;

    // Two-step efficient GMM: weight from first-step (2SLS) residuals, then
    // the criterion at the second-step estimate.
    const Eigen::MatrixXd scaled = instruments.array().colwise() * u.array();
    const Eigen::MatrixXd meat = scaled.transpose() * scaled;
    const Eigen::LDLT<Eigen::MatrixXd> meat_ldlt(meat);
    if (meat_ldlt.info() != Eigen::Success || !meat_ldlt.isPositive() ||
        meat_ldlt.vectorD().minCoeff() <= 1e-14 * meat_ldlt.vectorD().maxCoeff()) {
        res.j_stat = 0.0;
        res.j_pvalue = 1.0;
        return res;
    }
    const Eigen::VectorXd w_zx = meat_ldlt.solve(zx);
    const double beta_gmm = w_zx.dot(zy) / w_zx.dot(zx);
    const Eigen::VectorXd moments = instruments.transpose() * (data.y - data.x * beta_gmm);
    res.j_stat = std::max(0.0, moments.dot(meat_ldlt.solve(moments)));
    res.j_pvalue = chi_square_sf(res.j_stat, static_cast<double>(res.j_dof));
    return res;
}

TslsResult tsls(const Dataset& dataset, const std::vector<std::size_t>& instrument_indices,
                const EstimatorOptions& options) {
    std::optional<Dataset> storage;
    const Dataset& data = prepared(dataset, storage);
    if (std::set<std::size_t>(instrument_indices.begin(), instrument_indices.end()).size() !=
        instrument_indices.size()) {
        throw Error(ErrorKind::InvalidArgument, "instrument indices must be distinct");
    }
    TslsResult res = tsls_with_instruments(data, gather(data, instrument_indices), options);
    for (std::size_t idx : instrument_indices) res.labels.push_back(spec_label(idx, {}));
    return res;
}

std::vector<PairwiseRow> tsls_pairwise_report(const Dataset& dataset, const EstimatorOptions& options) {
    std::optional<Dataset> storage;
    const Dataset& data = prepared(dataset, storage);
    const std::size_t kz = data.kz();
    if (kz < 2) throw Error(ErrorKind::InvalidArgument, "pairwise comparison needs at least two instruments");

    std::vector<PairwiseRow> rows;
    for (std::size_t a = 0; a < kz; ++a) {
        for (std::size_t b = a + 1; b < kz; ++b) {
            PairwiseRow raw;
            raw.first = a;
            raw.second = b;
            raw.variant = PairVariant::Raw;
            raw.result = tsls(data, {a, b}, options);
            raw.label = pair_label(spec_label(a, {}), spec_label(b, {}));
            rows.push_back(std::move(raw));

            if (kz < 3) continue;
            std::vector<std::size_t> rest;
            for (std::size_t r = 0; r < kz; ++r) {
                if (r != a && r != b) rest.push_back(r);
            }
            const Eigen::MatrixXd rest_cols = gather(data, rest);
            Dataset reduced = data;
            Eigen::MatrixXd stacked(static_cast<Eigen::Index>(data.n()), 4);
            stacked << data.y, data.x, data.instruments.col(static_cast<Eigen::Index>(a)),
                data.instruments.col(static_cast<Eigen::Index>(b));
            const Eigen::MatrixXd resid = residualize(stacked, rest_cols);
            reduced.y = resid.col(0);
            reduced.x = resid.col(1);
            reduced.instruments = resid.rightCols(2);
            reduced.instrument_names = {data.instrument_names.at(a), data.instrument_names.at(b)};
            reduced.absorbed = data.absorbed + static_cast<int>(rest.size());

            PairwiseRow row;
            row.first = a;
            row.second = b;
            row.variant = PairVariant::Residualized;
            row.result = tsls_with_instruments(reduced, reduced.instruments, options);
            row.result.labels = {spec_label(a, rest), spec_label(b, rest)};
            row.label = pair_label(row.result.labels[0], row.result.labels[1]);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace faskit
