#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "covsel/basis.hpp"
#include "covsel/matrix.hpp"

namespace covsel {

/// n i.i.d. replicates of a zero-mean process observed at p fixed points.
/// Row i of data() is x_i = (X_i(t_1), ..., X_i(t_p)).
class SampleSet {
public:
    SampleSet(Mat data, DesignPoints points);

    int n() const { return static_cast<int>(data_.rows()); }
    int p() const { return static_cast<int>(data_.cols()); }
    const Mat& data() const { return data_; }
    const DesignPoints& points() const { return points_; }

    SampleSet scaled(double c) const { return SampleSet(c * data_, points_); }
    /// Subtracts the empirical mean from every replicate. Outside the
    /// zero-mean theory; provided for exploratory use.
    SampleSet centered() const;

    /// CSV with header row = design points, one replicate per data row.
    static SampleSet from_csv(const std::string& path);
    void to_csv(const std::string& path) const;

private:
    Mat data_;
    DesignPoints points_;
};

/// Sigma_hat_m = Pi_m S Pi_m, with the model that produced it.
struct CovarianceEstimate {
    SymMat sigma_hat;
    std::vector<int> model;
    Index projector_rank;
};

/// Per-model selection criterion pieces: ure = residual_sq + 2 gamma_sq / n.
struct ModelScore {
    std::vector<int> model;
    double ure;
    double gamma_sq;
    double residual_sq;
};

struct SelectionResult {
    std::vector<ModelScore> scores;
    std::size_t selected;  // index into scores
    CovarianceEstimate estimate;

    std::string to_json() const;
};

/// S = (1/n) sum_i x_i x_i^T. No mean-centering.
SymMat empirical_covariance(const SampleSet& x);

/// Projection estimator Sigma_hat_m = Pi_m S Pi_m.
CovarianceEstimate sigma_hat(const SampleSet& x, const DesignMatrix& d);

/// gamma_hat^2_m = 1/(n-1) sum_i || Pi x_i x_i^T Pi - Sigma_hat_m ||_F^2.
/// Works entirely with p x p matrices.
double gamma_hat_sq(const SampleSet& x, const DesignMatrix& d);

/// Unbiased-risk-estimate score of one model.
ModelScore ure_score(const SampleSet& x, const DesignMatrix& d);

/// Scores every model and picks the URE minimizer; ties go to the earliest
/// model in the collection.
SelectionResult select_model(const SampleSet& x, const std::vector<DesignMatrix>& collection);

}  // namespace covsel
