#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "covsel/basis.hpp"
#include "covsel/covest.hpp"
#include "covsel/matrix.hpp"

namespace covsel {

enum class ProcessKind { basis_gaussian, basis_uniform, brownian_bridge };

/// Generative description of a simulated process at fixed design points.
///
/// basis_gaussian / basis_uniform: X(t) = sum_{lambda<=m_star} c_lambda
/// g_lambda(t) with independent coefficients of variance
/// variance_profile(lambda), Gaussian or uniform on [-sqrt(3), sqrt(3)]
/// (scaled). brownian_bridge: Gaussian vectors with kernel s(1-t), s <= t.
struct ProcessSpec {
    ProcessKind kind;
    BasisFamily basis;
    int m_star;
    std::function<double(int)> variance_profile;
    DesignPoints points;
    std::uint64_t seed;

    static ProcessSpec basis_gaussian(BasisFamily basis, int m_star,
                                      std::function<double(int)> variance_profile,
                                      DesignPoints points, std::uint64_t seed);
    static ProcessSpec basis_uniform(BasisFamily basis, int m_star,
                                     std::function<double(int)> variance_profile,
                                     DesignPoints points, std::uint64_t seed);
    static ProcessSpec brownian_bridge(DesignPoints points, std::uint64_t seed);
};

/// The exact covariance matrix of the process at its design points.
SymMat true_sigma(const ProcessSpec& spec);

/// Reusable linear sampling form x = F z of a process; the factor F is
/// computed once (for the Brownian bridge via eigendecomposition with
/// negative eigenvalues clipped at zero).
class ProcessSampler {
public:
    explicit ProcessSampler(const ProcessSpec& spec);

    /// n i.i.d. rows drawn from substream `stream` of the spec's seed.
    Mat draw(int n, std::uint64_t stream) const;

    const DesignPoints& points() const { return points_; }

private:
    Mat factor_;  // p x k
    bool uniform_ = false;
    std::uint64_t seed_ = 0;
    DesignPoints points_;
};

/// n i.i.d. replicates, deterministic given (spec.seed, stream).
/// Replicate-level parallelism elsewhere relies on distinct stream indices.
SampleSet simulate(const ProcessSpec& spec, int n);
SampleSet simulate(const ProcessSpec& spec, int n, std::uint64_t stream);

/// Monte Carlo estimate of the risk curve m -> E ||Sigma - Sigma_hat_m||^2
/// together with its exact bias term and estimated variance term.
struct RiskCurve {
    std::vector<int> models;            // model sizes |m|
    std::vector<double> risk;           // MC mean of ||Sigma - Sigma_hat_m||^2
    std::vector<double> std_err;        // replicate std error of risk
    std::vector<double> bias_sq;        // exact ||Sigma - Pi Sigma Pi||^2
    std::vector<double> variance_term;  // estimate of tr((Pi x Pi) Phi) / n
    std::vector<double> var_std_err;
    std::vector<double> decomp_std_err;  // std error of risk - bias - variance
    int reps = 0;

    std::string to_csv() const;  // columns: m,risk,std_err,bias_sq,variance_term
    void write_csv(const std::string& path) const;
};

/// reps independent SampleSets of size n; throws "reps too small" below 100.
RiskCurve mc_risk_curve(const ProcessSpec& spec, const std::vector<DesignMatrix>& collection,
                        int n, int reps, int threads = 1);

/// Model size minimizing the estimated risk; ties go to the smallest m.
int oracle_model(const RiskCurve& curve);

struct TracePhiEstimate {
    double value;
    double std_err;
    int pool;
};

/// tr(Phi) = E ||x x^T - Sigma||^2 from a pool of single draws
/// (Phi itself is never materialized). Requires pool >= 10^4.
TracePhiEstimate trace_phi(const ProcessSpec& spec, int pool, int threads = 1);

struct OracleInequalityReport {
    double a;
    double lhs;       // MC mean of ||Sigma_hat_{m_hat} - Sigma||^2
    double lhs_se;
    double inf_risk;  // min_m of the MC risk curve
    double inf_risk_se;
    double trace_phi_value;
    double trace_phi_se;
    double rhs;  // (1 + 1/A) inf_risk + (4 + A) tr(Phi)/n
    double combined_se;
    int n = 0;
    int reps = 0;
    bool holds = false;

    std::string to_json() const;
};

/// Monte Carlo check of the selected estimator's oracle bound for a given
/// A > 0. Requires reps >= 500.
OracleInequalityReport verify_oracle_inequality(const ProcessSpec& spec,
                                                const std::vector<DesignMatrix>& collection,
                                                int n, int reps, double a, int threads = 1);

}  // namespace covsel
