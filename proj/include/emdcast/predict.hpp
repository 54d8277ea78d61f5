#pragma once

#include "emdcast/features.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace emdcast {

enum class Engine { ELM, SVR };

std::string to_string(Engine e);
Engine parse_engine(const std::string& name);

/// Per-feature standardization fitted on training rows. Constant features keep unit scale.
struct FeatureScaling {
    std::vector<double> mean;
    std::vector<double> std;

    static FeatureScaling fit(const FeatureMatrix& fm);
    Eigen::VectorXd apply(std::span<const double> row) const;
    bool all_constant() const;
};

struct ElmModel {
    Eigen::MatrixXd input_weights; ///< hidden x features
    Eigen::VectorXd biases;
    Eigen::VectorXd output_weights;
    int hidden_count = 0;
    std::uint64_t seed = 0;
    FeatureScaling feature_scaling;
};

/// The dual is solved on standardized targets, z = (y - target_mean) / target_scale, so C,
/// the KKT tolerance and the dual coefficients are all in target-std units.
struct SvrModel {
    std::vector<Eigen::VectorXd> support_vectors; ///< in standardized feature space
    std::vector<double> dual_coefficients;        ///< alpha - alpha*
    std::vector<std::size_t> support_indices;     ///< training row of each support vector
    double bias = 0.0;                            ///< in standardized target units
    double target_mean = 0.0;
    double target_scale = 1.0;
    double gamma = 1.0;
    double C = 1.0;
    double epsilon_tube = 0.0;
    FeatureScaling feature_scaling;
    long iterations = 0;
};

/// Predicts a fixed value; used for components whose training targets are constant.
struct ConstantModel {
    double value = 0.0;
};

struct EngineParams {
    int hidden = 50;
    double C = 1.0;
    double gamma = 0.1;
    double epsilon_tube = 0.0;
};

struct GridSearchResult {
    EngineParams best_params;
    std::size_t best_index = 0;
    std::vector<double> cv_scores; ///< mean validation RMSE per candidate, grid order
    int folds = 5;
};

struct SvrSolverOptions {
    double kkt_tolerance = 1e-3;
    /// Iteration cap as a multiple of the training row count.
    long iteration_factor = 1000;
};

ElmModel elm_train(const FeatureMatrix& fm, int hidden_count, std::uint64_t seed);
double elm_predict(const ElmModel& model, std::span<const double> x);

/// epsilon_tube is given in target units.
SvrModel svr_train(const FeatureMatrix& fm, double C, double gamma, double epsilon_tube,
                   const SvrSolverOptions& options = {});
double svr_predict(const SvrModel& model, std::span<const double> x);
/// Decision value in standardized target units (before mapping back to target units).
double svr_decision(const SvrModel& model, std::span<const double> x);

using EngineModel = std::variant<ConstantModel, ElmModel, SvrModel>;

EngineModel train_engine(const FeatureMatrix& fm, Engine engine, const EngineParams& params,
                         std::uint64_t seed);
double predict(const EngineModel& model, std::span<const double> x);

/// Hidden sizes {10,25,50,100,200} for ELM; C x gamma over {0.1,1,10,100} x {0.01,0.1,1,10}
/// with the tube fixed at 1% of target_std for SVR.
std::vector<EngineParams> default_grid(Engine engine, double target_std);

/// K-fold CV over contiguous time blocks; ties resolve to the earliest candidate.
GridSearchResult grid_search_cv(const FeatureMatrix& fm, Engine engine,
                                const std::vector<EngineParams>& grid, int folds = 5,
                                std::uint64_t seed = 0);

} // namespace emdcast
