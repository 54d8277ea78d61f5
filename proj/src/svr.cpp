#include "emdcast/error.hpp"
#include "emdcast/predict.hpp"
#include "emdcast/series.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace emdcast {

namespace {

double rbf(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double gamma) {
    return std::exp(-gamma * (u - v).squaredNorm());
}

// Dual of epsilon-SVR over 2l variables: alpha_t for t < l (sign +1) and alpha*_t for
// t >= l (sign -1). Q_st = y_s y_t K(s mod l, t mod l); linear term p_t = eps -/+ z_t.
class SmoSolver {
public:
    SmoSolver(const Eigen::MatrixXd& kernel, std::span<const double> targets, double C, double eps,
              const SvrSolverOptions& options)
        : k_(kernel), l_(targets.size()), C_(C), tol_(options.kkt_tolerance),
          cap_(options.iteration_factor * static_cast<long>(targets.size())),
          alpha_(2 * l_, 0.0), grad_(2 * l_), sign_(2 * l_) {
        for (std::size_t t = 0; t < l_; ++t) {
            sign_[t] = 1.0;
            sign_[t + l_] = -1.0;
            grad_[t] = eps - targets[t];
            grad_[t + l_] = eps + targets[t];
        }
    }

    void solve() {
        while (true) {
            std::size_t i = 0;
            std::size_t j = 0;
            if (!select_working_set(i, j)) {
                return;
            }
            if (iterations_ >= cap_) {
                std::ostringstream msg;
                msg << "SMO did not reach KKT tolerance " << tol_ << " within " << cap_
                    << " iterations (rows=" << l_ << ", C=" << C_ << ", gap=" << last_gap_ << ")";
                throw ComputationError(msg.str());
            }
            ++iterations_;
            update_pair(i, j);
        }
    }

    double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t free = 0;
        for (std::size_t t = 0; t < 2 * l_; ++t) {
            const double yg = sign_[t] * grad_[t];
            if (at_upper(t)) {
                if (sign_[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
            } else if (at_lower(t)) {
                if (sign_[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
            } else {
                ++free;
                sum_free += yg;
            }
        }
        return free > 0 ? sum_free / static_cast<double>(free) : (ub + lb) / 2.0;
    }

    double coefficient(std::size_t row) const { return alpha_[row] - alpha_[row + l_]; }
    long iterations() const { return iterations_; }

private:
    double kern(std::size_t s, std::size_t t) const {
        return k_(static_cast<Eigen::Index>(s % l_), static_cast<Eigen::Index>(t % l_));
    }
    bool at_upper(std::size_t t) const { return alpha_[t] >= C_; }
    bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }
    bool in_up(std::size_t t) const { return sign_[t] > 0 ? !at_upper(t) : !at_lower(t); }
    bool in_low(std::size_t t) const { return sign_[t] > 0 ? !at_lower(t) : !at_upper(t); }

    // Second-order working set selection; false once the maximal violation is below tol.
    bool select_working_set(std::size_t& out_i, std::size_t& out_j) {
        constexpr double tau = 1e-12;
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = 2 * l_;
        for (std::size_t t = 0; t < 2 * l_; ++t) {
            if (in_up(t) && -sign_[t] * grad_[t] >= gmax) {
                gmax = -sign_[t] * grad_[t];
                i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = 2 * l_;
        const double* col_i = i < 2 * l_ ? k_.col(static_cast<Eigen::Index>(i % l_)).data() : nullptr;
        for (std::size_t t = 0; t < 2 * l_; ++t) {
            if (!in_low(t)) {
                continue;
            }
            const double yg = sign_[t] * grad_[t];
            gmax2 = std::max(gmax2, yg);
            if (col_i == nullptr) {
                continue;
            }
            const double diff = gmax + yg;
            if (diff > 0.0) {
                // RBF diagonal is 1.
                double quad = 2.0 - 2.0 * col_i[t < l_ ? t : t - l_];
                if (quad <= 0.0) {
                    quad = tau;
                }
                const double obj = -(diff * diff) / quad;
                if (obj <= best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        last_gap_ = gmax + gmax2;
        if (i == 2 * l_ || j == 2 * l_ || last_gap_ < tol_) {
            return false;
        }
        out_i = i;
        out_j = j;
        return true;
    }

    void update_pair(std::size_t i, std::size_t j) {
        constexpr double tau = 1e-12;
        const double yi = sign_[i];
        const double yj = sign_[j];
        const double qij = yi * yj * kern(i, j);
        const double old_i = alpha_[i];
        const double old_j = alpha_[j];
        double& ai = alpha_[i];
        double& aj = alpha_[j];
        if (yi != yj) {
            double quad = kern(i, i) + kern(j, j) + 2.0 * qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) { aj = 0.0; ai = diff; }
            } else {
                if (ai < 0.0) { ai = 0.0; aj = -diff; }
            }
            if (diff > 0.0) {
                if (ai > C_) { ai = C_; aj = C_ - diff; }
            } else {
                if (aj > C_) { aj = C_; ai = C_ + diff; }
            }
        } else {
            double quad = kern(i, i) + kern(j, j) - 2.0 * qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C_) {
                if (ai > C_) { ai = C_; aj = sum - C_; }
            } else {
                if (aj < 0.0) { aj = 0.0; ai = sum; }
            }
            if (sum > C_) {
                if (aj > C_) { aj = C_; ai = sum - C_; }
            } else {
                if (ai < 0.0) { ai = 0.0; aj = sum; }
            }
        }
        const double di = ai - old_i;
        const double dj = aj - old_j;
        const double* col_i = k_.col(static_cast<Eigen::Index>(i % l_)).data();
        const double* col_j = k_.col(static_cast<Eigen::Index>(j % l_)).data();
        const double wi = yi * di;
        const double wj = yj * dj;
        for (std::size_t s = 0; s < l_; ++s) {
            const double change = wi * col_i[s] + wj * col_j[s];
            grad_[s] += change;
            grad_[s + l_] -= change;
        }
    }

    const Eigen::MatrixXd& k_;
    std::size_t l_;
    double C_;
    double tol_;
    long cap_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
    std::vector<double> sign_;
    long iterations_ = 0;
    double last_gap_ = 0.0;
};

} // namespace

SvrModel svr_train(const FeatureMatrix& fm, double C, double gamma, double epsilon_tube,
                   const SvrSolverOptions& options) {
    if (!(C > 0.0) || !(gamma > 0.0) || !(epsilon_tube >= 0.0)) {
        throw InputError("SVR needs C > 0, gamma > 0 and epsilon_tube >= 0");
    }
    if (fm.rows.empty()) {
        throw InputError("SVR needs at least one training row");
    }
    SvrModel m;
    m.C = C;
    m.gamma = gamma;
    m.epsilon_tube = epsilon_tube;
    m.feature_scaling = FeatureScaling::fit(fm);

    const std::size_t l = fm.row_count();
    m.target_mean = mean(fm.targets);
    const double sd = stddev(fm.targets);
    m.target_scale = sd > 1e-12 * std::max(1.0, std::abs(m.target_mean)) ? sd : 1.0;
    std::vector<double> z(l);
    for (std::size_t t = 0; t < l; ++t) {
        z[t] = (fm.targets[t] - m.target_mean) / m.target_scale;
    }
    std::vector<Eigen::VectorXd> scaled(l);
    for (std::size_t t = 0; t < l; ++t) {
        scaled[t] = m.feature_scaling.apply(fm.rows[t]);
    }
    const auto n = static_cast<Eigen::Index>(l);
    Eigen::MatrixXd kernel(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        kernel(a, a) = 1.0;
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double v = rbf(scaled[static_cast<std::size_t>(a)],
                                 scaled[static_cast<std::size_t>(b)], gamma);
            kernel(a, b) = v;
            kernel(b, a) = v;
        }
    }

    SmoSolver solver(kernel, z, C, epsilon_tube / m.target_scale, options);
    solver.solve();
    m.iterations = solver.iterations();
    m.bias = -solver.rho();
    for (std::size_t t = 0; t < l; ++t) {
        const double c = solver.coefficient(t);
        if (c != 0.0) {
            m.support_vectors.push_back(scaled[t]);
            m.dual_coefficients.push_back(c);
            m.support_indices.push_back(t);
        }
    }
    return m;
}

double svr_decision(const SvrModel& model, std::span<const double> x) {
    const auto scaled = model.feature_scaling.apply(x);
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        f += model.dual_coefficients[i] * rbf(model.support_vectors[i], scaled, model.gamma);
    }
    return f;
}

double svr_predict(const SvrModel& model, std::span<const double> x) {
    return model.target_mean + model.target_scale * svr_decision(model, x);
}

} // namespace emdcast
