#pragma once

#include <span>
#include <string>
#include <vector>

namespace emdcast {

/// Lagged design matrix. Row r predicts targets[r] from samples strictly before it.
struct FeatureMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    std::vector<int> lag_labels; ///< ascending, in hours
    std::string source;

    std::size_t row_count() const noexcept { return rows.size(); }
    std::size_t width() const noexcept { return lag_labels.size(); }
    /// Column j as a contiguous vector.
    std::vector<double> column(std::size_t j) const;
    /// Rows [begin, end) with their targets.
    FeatureMatrix subset(std::size_t begin, std::size_t end) const;
};

/// Candidate lag pool: 1..24 plus 48, 72 and 168 hours.
std::vector<int> default_lag_pool();

/// Row t (t = max lag .. N-1) holds x[t - lag] for each lag in ascending order.
FeatureMatrix build_lag_matrix(std::span<const double> x, std::vector<int> lags,
                               std::string source = {});

/// Plug-in mutual information in nats from an equal-width joint histogram.
double mutual_information(std::span<const double> a, std::span<const double> b, int bins = 16);

struct MrmrSelection {
    std::vector<int> lags;         ///< in selection order
    std::vector<double> relevance; ///< MI(feature; target) of each selected lag
    std::vector<double> scores;    ///< greedy criterion value at the time of selection
};

/// Greedy mRMR with the difference criterion; ties go to the smaller lag.
MrmrSelection mrmr_select(const FeatureMatrix& fm, std::size_t k, int bins = 16);

} // namespace emdcast
