#include "emdcast/spline.hpp"

#include "emdcast/error.hpp"

#include <algorithm>

namespace emdcast {

NaturalSpline::NaturalSpline(std::vector<double> knots, std::vector<double> values)
    : t_(std::move(knots)), y_(std::move(values)) {
    const std::size_t m = t_.size();
    if (m < 2 || y_.size() != m) {
        throw InputError("spline needs at least two knots with matching values");
    }
    for (std::size_t i = 1; i < m; ++i) {
        if (!(t_[i] > t_[i - 1])) {
            throw InputError("spline knots must be strictly increasing");
        }
    }
    m_.assign(m, 0.0);
    if (m == 2) {
        return;
    }
    // Thomas algorithm on the interior second-derivative system.
    const std::size_t k = m - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double h0 = t_[i] - t_[i - 1];
        const double h1 = t_[i + 1] - t_[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < k; ++i) {
        const double lower = t_[i + 1] - t_[i]; // h_{i}, sub-diagonal of row i
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) {
        m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
    }
}

double NaturalSpline::eval_segment(std::size_t seg, double t) const {
    const double t0 = t_[seg];
    const double t1 = t_[seg + 1];
    const double h = t1 - t0;
    if (t < t0 || t > t1) {
        // Outside the knot span the natural spline continues linearly.
        const double secant = (y_[seg + 1] - y_[seg]) / h;
        const bool left = t < t0;
        const double slope = left ? secant - h * (2.0 * m_[seg] + m_[seg + 1]) / 6.0
                                  : secant + h * (m_[seg] + 2.0 * m_[seg + 1]) / 6.0;
        const std::size_t end = left ? seg : seg + 1;
        return y_[end] + slope * (t - t_[end]);
    }
    const double a = (t1 - t) / h;
    const double b = (t - t0) / h;
    return a * y_[seg] + b * y_[seg + 1] +
           ((a * a * a - a) * m_[seg] + (b * b * b - b) * m_[seg + 1]) * h * h / 6.0;
}

double NaturalSpline::operator()(double t) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t seg = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    seg = std::min(seg, t_.size() - 2);
    return eval_segment(seg, t);
}

std::vector<double> NaturalSpline::sample(std::size_t n) const {
    std::vector<double> out(n);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        while (seg + 2 < t_.size() && t > t_[seg + 1]) {
            ++seg;
        }
        out[i] = eval_segment(seg, t);
    }
    return out;
}

} // namespace emdcast
