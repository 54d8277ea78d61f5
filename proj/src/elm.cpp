#include "emdcast/error.hpp"
#include "emdcast/predict.hpp"

#include <cmath>
#include <random>

namespace emdcast {

std::string to_string(Engine e) {
    return e == Engine::ELM ? "elm" : "svr";
}

Engine parse_engine(const std::string& name) {
    if (name == "elm") return Engine::ELM;
    if (name == "svr" || name == "svm") return Engine::SVR;
    throw InputError("unknown engine '" + name + "' (expected elm or svr)");
}

FeatureScaling FeatureScaling::fit(const FeatureMatrix& fm) {
    FeatureScaling s;
    const std::size_t f = fm.width();
    s.mean.assign(f, 0.0);
    s.std.assign(f, 1.0);
    if (fm.rows.empty()) {
        return s;
    }
    const auto n = static_cast<double>(fm.row_count());
    for (std::size_t j = 0; j < f; ++j) {
        double m = 0.0;
        for (const auto& row : fm.rows) {
            m += row[j];
        }
        m /= n;
        double ss = 0.0;
        for (const auto& row : fm.rows) {
            ss += (row[j] - m) * (row[j] - m);
        }
        const double sd = std::sqrt(ss / n);
        s.mean[j] = m;
        // Zero marks a constant feature; apply() then centres without scaling.
        s.std[j] = sd > 1e-12 * std::max(1.0, std::abs(m)) ? sd : 0.0;
    }
    return s;
}

Eigen::VectorXd FeatureScaling::apply(std::span<const double> row) const {
    if (row.size() != mean.size()) {
        throw InputError("feature vector has width " + std::to_string(row.size()) +
                         ", model expects " + std::to_string(mean.size()));
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(row.size()));
    for (std::size_t j = 0; j < row.size(); ++j) {
        const double centred = row[j] - mean[j];
        out(static_cast<Eigen::Index>(j)) = std[j] > 0.0 ? centred / std[j] : centred;
    }
    return out;
}

bool FeatureScaling::all_constant() const {
    for (double s : std) {
        if (s > 0.0) {
            return false;
        }
    }
    return true;
}

namespace {

double sigmoid(double z) {
    return 1.0 / (1.0 + std::exp(-z));
}

Eigen::VectorXd hidden_layer(const ElmModel& m, const Eigen::VectorXd& scaled) {
    Eigen::VectorXd z = m.input_weights * scaled + m.biases;
    return z.unaryExpr(&sigmoid);
}

} // namespace

ElmModel elm_train(const FeatureMatrix& fm, int hidden_count, std::uint64_t seed) {
    if (hidden_count < 1) {
        throw InputError("ELM needs at least one hidden neuron");
    }
    if (fm.rows.empty()) {
        throw InputError("ELM needs at least one training row");
    }
    ElmModel m;
    m.hidden_count = hidden_count;
    m.seed = seed;
    m.feature_scaling = FeatureScaling::fit(fm);
    if (m.feature_scaling.all_constant()) {
        throw InputError("ELM training features are all constant; scaling is undefined");
    }

    const auto f = static_cast<Eigen::Index>(fm.width());
    const auto h = static_cast<Eigen::Index>(hidden_count);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    m.input_weights.resize(h, f);
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < f; ++c) {
            m.input_weights(r, c) = uniform(rng);
        }
    }
    m.biases.resize(h);
    for (Eigen::Index r = 0; r < h; ++r) {
        m.biases(r) = uniform(rng);
    }

    const auto rows = static_cast<Eigen::Index>(fm.row_count());
    Eigen::MatrixXd H(rows, h);
    Eigen::VectorXd y(rows);
    for (Eigen::Index t = 0; t < rows; ++t) {
        const auto& row = fm.rows[static_cast<std::size_t>(t)];
        H.row(t) = hidden_layer(m, m.feature_scaling.apply(row)).transpose();
        y(t) = fm.targets[static_cast<std::size_t>(t)];
    }

    // Minimum-norm least squares through the thin SVD, singular values below
    // 1e-10 * sigma_max treated as zero.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? 1e-10 * s(0) : 0.0;
    Eigen::VectorXd uty = svd.matrixU().transpose() * y;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        uty(i) = s(i) > cutoff ? uty(i) / s(i) : 0.0;
    }
    m.output_weights = svd.matrixV() * uty;
    return m;
}

double elm_predict(const ElmModel& model, std::span<const double> x) {
    const auto scaled = model.feature_scaling.apply(x);
    return model.output_weights.dot(hidden_layer(model, scaled));
}

} // namespace emdcast
