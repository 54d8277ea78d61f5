#pragma once

#include <span>
#include <vector>

namespace emdcast {

/// Natural cubic spline (zero second derivative at both knots' ends).
/// Knot positions must be strictly increasing; two knots give the straight line.
class NaturalSpline {
public:
    NaturalSpline(std::vector<double> knots, std::vector<double> values);

    double operator()(double t) const;

    /// Evaluates at 0, 1, ..., n-1 in a single sweep over the knots.
    std::vector<double> sample(std::size_t n) const;

private:
    double eval_segment(std::size_t seg, double t) const;

    std::vector<double> t_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at the knots
};

} // namespace emdcast
