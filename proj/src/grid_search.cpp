#include "emdcast/error.hpp"
#include "emdcast/metrics.hpp"
#include "emdcast/predict.hpp"
#include "emdcast/series.hpp"

#include <cmath>
#include <limits>

namespace emdcast {

EngineModel train_engine(const FeatureMatrix& fm, Engine engine, const EngineParams& params,
                         std::uint64_t seed) {
    switch (engine) {
    case Engine::ELM: return elm_train(fm, params.hidden, seed);
    case Engine::SVR: return svr_train(fm, params.C, params.gamma, params.epsilon_tube);
    }
    throw InputError("unknown engine");
}

double predict(const EngineModel& model, std::span<const double> x) {
    struct Visitor {
        std::span<const double> x;
        double operator()(const ConstantModel& m) const { return m.value; }
        double operator()(const ElmModel& m) const { return elm_predict(m, x); }
        double operator()(const SvrModel& m) const { return svr_predict(m, x); }
    };
    return std::visit(Visitor{x}, model);
}

std::vector<EngineParams> default_grid(Engine engine, double target_std) {
    std::vector<EngineParams> grid;
    if (engine == Engine::ELM) {
        for (int h : {10, 25, 50, 100, 200}) {
            EngineParams p;
            p.hidden = h;
            grid.push_back(p);
        }
        return grid;
    }
    for (double c : {0.1, 1.0, 10.0, 100.0}) {
        for (double g : {0.01, 0.1, 1.0, 10.0}) {
            EngineParams p;
            p.C = c;
            p.gamma = g;
            p.epsilon_tube = 0.01 * target_std;
            grid.push_back(p);
        }
    }
    return grid;
}

GridSearchResult grid_search_cv(const FeatureMatrix& fm, Engine engine,
                                const std::vector<EngineParams>& grid, int folds,
                                std::uint64_t seed) {
    if (grid.empty()) {
        throw InputError("grid search needs at least one candidate");
    }
    if (folds < 2) {
        throw InputError("grid search needs at least 2 folds");
    }
    const std::size_t rows = fm.row_count();
    if (rows < static_cast<std::size_t>(folds)) {
        throw InputError("grid search has " + std::to_string(folds) + " folds but only " +
                         std::to_string(rows) + " rows");
    }
    const auto k = static_cast<std::size_t>(folds);

    GridSearchResult result;
    result.folds = folds;
    result.cv_scores.assign(grid.size(), std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double total = 0.0;
        bool failed = false;
        for (std::size_t f = 0; f < k && !failed; ++f) {
            const std::size_t lo = f * rows / k;
            const std::size_t hi = (f + 1) * rows / k;
            FeatureMatrix train;
            train.lag_labels = fm.lag_labels;
            train.source = fm.source;
            for (std::size_t r = 0; r < rows; ++r) {
                if (r < lo || r >= hi) {
                    train.rows.push_back(fm.rows[r]);
                    train.targets.push_back(fm.targets[r]);
                }
            }
            try {
                const auto model = train_engine(train, engine, grid[c], seed);
                std::vector<double> pred;
                pred.reserve(hi - lo);
                for (std::size_t r = lo; r < hi; ++r) {
                    pred.push_back(predict(model, fm.rows[r]));
                }
                total += rmse(std::span(fm.targets).subspan(lo, hi - lo), pred);
            } catch (const ComputationError&) {
                failed = true;
            }
        }
        if (!failed && std::isfinite(total)) {
            result.cv_scores[c] = total / static_cast<double>(k);
        }
    }
    std::size_t best = grid.size();
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (std::isfinite(result.cv_scores[c]) &&
            (best == grid.size() || result.cv_scores[c] < result.cv_scores[best])) {
            best = c;
        }
    }
    if (best == grid.size()) {
        throw ComputationError("every grid candidate failed to train");
    }
    result.best_index = best;
    result.best_params = grid[best];
    return result;
}

} // namespace emdcast
