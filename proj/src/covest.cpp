#include "covsel/covest.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "covsel/io.hpp"

namespace covsel {

namespace {

// Sigma_hat and the score pieces for one model, given the precomputed S.
struct ScoredModel {
    Mat sigma_hat;
    double residual_sq;
    double gamma_sq;
    double ure;
};

ScoredModel score_against(const Mat& x_data, const Mat& s, const DesignMatrix& d) {
    const auto n = x_data.rows();
    const Mat& pi = d.projector.mat();
    Mat sh = pi * s * pi;
    sh = 0.5 * (sh + sh.transpose());

    const double residual_sq = (s - sh).squaredNorm();

    // gamma^2 = 1/(n-1) sum_i ||y_i y_i^T - sh||^2 with y_i = Pi x_i,
    // expanded as ||y_i||^4 - 2 y_i^T sh y_i + ||sh||^2.
    const Mat y = x_data * pi;  // rows are y_i^T (Pi symmetric)
    const Mat z = y * sh;
    const Vec row_sq = y.rowwise().squaredNorm();
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        acc += row_sq(i) * row_sq(i) - 2.0 * z.row(i).dot(y.row(i));
    }
    acc += static_cast<double>(n) * sh.squaredNorm();
    const double gamma_sq = acc / static_cast<double>(n - 1);

    const double ure = residual_sq + 2.0 * gamma_sq / static_cast<double>(n);
    return ScoredModel{std::move(sh), residual_sq, gamma_sq, ure};
}

CovarianceEstimate make_estimate(Mat sh, const DesignMatrix& d) {
    // Containment in S(G_m) holds by construction; check the PSD slack.
    const double scale = sh.norm();
    Eigen::SelfAdjointEigenSolver<Mat> eig(sh, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("decomposition failed");
    }
    if (eig.eigenvalues().minCoeff() < -1e-8 * scale) {
        throw std::runtime_error("projection produced an indefinite estimate");
    }
    return CovarianceEstimate{SymMat(std::move(sh)), d.model, d.projector.rank()};
}

}  // namespace

SampleSet::SampleSet(Mat data, DesignPoints points)
    : data_(std::move(data)), points_(std::move(points)) {
    if (data_.rows() < 3) {
        throw std::invalid_argument("SampleSet: need n >= 3 replicates");
    }
    if (data_.cols() != points_.size()) {
        throw std::invalid_argument("SampleSet: data width does not match design points");
    }
    if (!data_.allFinite()) {
        throw std::invalid_argument("SampleSet: entries must be finite");
    }
}

SampleSet SampleSet::centered() const {
    Mat c = data_;
    c.rowwise() -= data_.colwise().mean();
    return SampleSet(std::move(c), points_);
}

SampleSet SampleSet::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty sample file: " + path);
    }
    DesignPoints points(parse_csv_row(line));
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(parse_csv_row(line));
        if (static_cast<int>(rows.back().size()) != points.size()) {
            throw std::runtime_error("sample row width does not match header: " + path);
        }
    }
    Mat data(static_cast<Index>(rows.size()), points.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < points.size(); ++j) {
            data(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
        }
    }
    return SampleSet(std::move(data), std::move(points));
}

void SampleSet::to_csv(const std::string& path) const {
    std::ostringstream out;
    for (int j = 0; j < points_.size(); ++j) {
        if (j > 0) out << ',';
        out << format_double(points_[j]);
    }
    out << '\n';
    for (Index i = 0; i < data_.rows(); ++i) {
        for (Index j = 0; j < data_.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(data_(i, j));
        }
        out << '\n';
    }
    write_file(path, out.str());
}

SymMat empirical_covariance(const SampleSet& x) {
    const Mat& d = x.data();
    Mat s = d.transpose() * d / static_cast<double>(x.n());
    s = 0.5 * (s + s.transpose());
    return SymMat(std::move(s));
}

CovarianceEstimate sigma_hat(const SampleSet& x, const DesignMatrix& d) {
    if (!(x.points() == d.points)) {
        throw std::invalid_argument("sigma_hat: sample and design points differ");
    }
    const Mat s = empirical_covariance(x).mat();
    ScoredModel sm = score_against(x.data(), s, d);
    return make_estimate(std::move(sm.sigma_hat), d);
}

double gamma_hat_sq(const SampleSet& x, const DesignMatrix& d) {
    if (!(x.points() == d.points)) {
        throw std::invalid_argument("gamma_hat_sq: sample and design points differ");
    }
    const Mat s = empirical_covariance(x).mat();
    return score_against(x.data(), s, d).gamma_sq;
}

ModelScore ure_score(const SampleSet& x, const DesignMatrix& d) {
    if (!(x.points() == d.points)) {
        throw std::invalid_argument("ure_score: sample and design points differ");
    }
    const Mat s = empirical_covariance(x).mat();
    ScoredModel sm = score_against(x.data(), s, d);
    return ModelScore{d.model, sm.ure, sm.gamma_sq, sm.residual_sq};
}

SelectionResult select_model(const SampleSet& x, const std::vector<DesignMatrix>& collection) {
    if (collection.empty()) {
        throw std::invalid_argument("select_model: empty model collection");
    }
    for (const auto& d : collection) {
        if (!(x.points() == d.points)) {
            throw std::invalid_argument("select_model: sample and design points differ");
        }
    }
    const Mat s = empirical_covariance(x).mat();

    std::vector<ModelScore> scores;
    scores.reserve(collection.size());
    std::size_t best = 0;
    double best_ure = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < collection.size(); ++k) {
        ScoredModel sm = score_against(x.data(), s, collection[k]);
        scores.push_back(ModelScore{collection[k].model, sm.ure, sm.gamma_sq, sm.residual_sq});
        if (sm.ure < best_ure) {  // strict: ties keep the earliest model
            best_ure = sm.ure;
            best = k;
        }
    }
    ScoredModel sm = score_against(x.data(), s, collection[best]);
    CovarianceEstimate est = make_estimate(std::move(sm.sigma_hat), collection[best]);
    return SelectionResult{std::move(scores), best, std::move(est)};
}

std::string SelectionResult::to_json() const {
    nlohmann::json j;
    j["selected"] = {
        {"index", selected},
        {"m", scores[selected].model.size()},
        {"model", scores[selected].model},
    };
    j["scores"] = nlohmann::json::array();
    for (const auto& sc : scores) {
        j["scores"].push_back({
            {"m", sc.model.size()},
            {"model", sc.model},
            {"ure", sc.ure},
            {"gamma_sq", sc.gamma_sq},
            {"residual_sq", sc.residual_sq},
        });
    }
    return j.dump(2);
}

}  // namespace covsel
