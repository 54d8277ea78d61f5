#include "emdcast/features.hpp"

#include "emdcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emdcast {

std::vector<double> FeatureMatrix::column(std::size_t j) const {
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out[r] = rows[r][j];
    }
    return out;
}

FeatureMatrix FeatureMatrix::subset(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows.size()) {
        throw InputError("feature matrix subset out of range");
    }
    FeatureMatrix out;
    out.lag_labels = lag_labels;
    out.source = source;
    out.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                    rows.begin() + static_cast<std::ptrdiff_t>(end));
    out.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(begin),
                       targets.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

std::vector<int> default_lag_pool() {
    std::vector<int> lags;
    for (int l = 1; l <= 24; ++l) {
        lags.push_back(l);
    }
    lags.insert(lags.end(), {48, 72, 168});
    return lags;
}

FeatureMatrix build_lag_matrix(std::span<const double> x, std::vector<int> lags,
                               std::string source) {
    if (lags.empty()) {
        throw InputError("lag set must not be empty");
    }
    std::ranges::sort(lags);
    lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
    if (lags.front() < 1) {
        throw InputError("lags must be positive");
    }
    const auto max_lag = static_cast<std::size_t>(lags.back());
    if (max_lag >= x.size()) {
        throw InputError("lag " + std::to_string(max_lag) + " does not fit a series of " +
                         std::to_string(x.size()) + " samples");
    }
    FeatureMatrix fm;
    fm.lag_labels = lags;
    fm.source = std::move(source);
    fm.rows.reserve(x.size() - max_lag);
    fm.targets.reserve(x.size() - max_lag);
    for (std::size_t t = max_lag; t < x.size(); ++t) {
        std::vector<double> row(lags.size());
        for (std::size_t j = 0; j < lags.size(); ++j) {
            row[j] = x[t - static_cast<std::size_t>(lags[j])];
        }
        fm.rows.push_back(std::move(row));
        fm.targets.push_back(x[t]);
    }
    return fm;
}

namespace {

std::vector<int> discretize(std::span<const double> v, int bins) {
    const auto [lo, hi] = std::ranges::minmax(v);
    std::vector<int> out(v.size(), 0);
    if (!(hi > lo)) {
        return out;
    }
    const double width = (hi - lo) / bins;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int b = static_cast<int>((v[i] - lo) / width);
        out[i] = std::clamp(b, 0, bins - 1);
    }
    return out;
}

double binned_mi(const std::vector<int>& a, const std::vector<int>& b, int bins) {
    const auto nb = static_cast<std::size_t>(bins);
    std::vector<double> joint(nb * nb, 0.0);
    std::vector<double> pa(nb, 0.0);
    std::vector<double> pb(nb, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[static_cast<std::size_t>(a[i]) * nb + static_cast<std::size_t>(b[i])] += 1.0;
        pa[static_cast<std::size_t>(a[i])] += 1.0;
        pb[static_cast<std::size_t>(b[i])] += 1.0;
    }
    const auto n = static_cast<double>(a.size());
    double mi = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const double c = joint[i * nb + j];
            if (c > 0.0) {
                mi += c / n * std::log(c * n / (pa[i] * pb[j]));
            }
        }
    }
    return std::max(mi, 0.0);
}

} // namespace

double mutual_information(std::span<const double> a, std::span<const double> b, int bins) {
    if (a.size() != b.size() || a.size() < 2) {
        throw InputError("mutual information needs two sequences of equal length >= 2");
    }
    if (bins < 2) {
        throw InputError("mutual information needs at least 2 bins");
    }
    return binned_mi(discretize(a, bins), discretize(b, bins), bins);
}

MrmrSelection mrmr_select(const FeatureMatrix& fm, std::size_t k, int bins) {
    const std::size_t f = fm.width();
    if (k < 1 || k > f) {
        throw InputError("mRMR k=" + std::to_string(k) + " out of range 1.." + std::to_string(f));
    }
    if (bins < 2) {
        throw InputError("mutual information needs at least 2 bins");
    }
    if (fm.row_count() < 2) {
        throw InputError("mRMR needs at least 2 rows");
    }
    std::vector<std::vector<int>> coded(f);
    for (std::size_t j = 0; j < f; ++j) {
        coded[j] = discretize(fm.column(j), bins);
    }
    const auto target = discretize(fm.targets, bins);
    std::vector<double> relevance(f);
    for (std::size_t j = 0; j < f; ++j) {
        relevance[j] = binned_mi(coded[j], target, bins);
    }

    MrmrSelection sel;
    std::vector<bool> taken(f, false);
    std::vector<double> redundancy_sum(f, 0.0);
    for (std::size_t step = 0; step < k; ++step) {
        std::size_t best = f;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < f; ++j) {
            if (taken[j]) {
                continue;
            }
            const double score =
                step == 0 ? relevance[j] : relevance[j] - redundancy_sum[j] / static_cast<double>(step);
            if (score > best_score ||
                (score == best_score && best < f && fm.lag_labels[j] < fm.lag_labels[best])) {
                best_score = score;
                best = j;
            }
        }
        taken[best] = true;
        sel.lags.push_back(fm.lag_labels[best]);
        sel.relevance.push_back(relevance[best]);
        sel.scores.push_back(best_score);
        for (std::size_t j = 0; j < f; ++j) {
            if (!taken[j]) {
                redundancy_sum[j] += binned_mi(coded[j], coded[best], bins);
            }
        }
    }
    return sel;
}

} // namespace emdcast
