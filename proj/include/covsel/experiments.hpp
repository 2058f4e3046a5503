#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covsel/sim.hpp"
#include "covsel/verify.hpp"

namespace covsel {

/// User-facing run description. Unset fields fall back to the chosen
/// example's defaults; a JSON config file fills fields the same way and
/// command-line flags override both.
struct ExperimentConfig {
    std::string example = "custom";  // ex1 | ex1b | ex2 | ex3 | custom
    std::optional<int> n, p, M, m_star;
    std::optional<std::string> basis;         // fourier | cosine | brownian-bridge | csv:<path>
    std::optional<std::string> coefficients;  // gaussian | uniform
    std::optional<std::string> variance_profile;
    std::optional<std::string> grid;  // endpoint | interior | left
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<int> threads;
    bool center = false;
    std::string out_dir = ".";
    std::string data_file;  // select: analyze a SampleSet CSV instead of simulating
    std::string sabotage;   // "" or "gamma-factor" (verify test hook)

    static ExperimentConfig from_json_file(const std::string& path);
    void apply_json_text(const std::string& text);
};

/// Fully resolved experiment; every field concrete.
struct Experiment {
    std::string example;
    int n, p, M, m_star;
    std::string basis_name;
    std::string coefficients;
    std::string variance_profile_name;
    std::function<double(int)> variance_profile;
    GridConvention grid;
    std::uint64_t seed;
    int reps;
    int threads;
    bool center;
    std::string out_dir;
    std::string data_file;
    double gamma_factor;  // 1.0, or 2.0 under --sabotage gamma-factor

    DesignPoints make_points() const;
    BasisFamily make_basis() const;
    ProcessSpec make_spec() const;
    std::vector<DesignMatrix> make_collection(const DesignPoints& points) const;
};

Experiment resolve(const ExperimentConfig& config);

/// "constant:v" -> v, "offset-geometric:a:b" -> a + b^lambda,
/// "inverse-poly:k" -> lambda^-k.
std::function<double(int)> parse_variance_profile(const std::string& text);

/// Simulate (or load) one sample, run URE model selection, write
/// ure_curve.csv, selected.json, sigma_hat.csv and (when the truth is known)
/// sigma_true.csv into out_dir. Returns the process exit code.
int cmd_select(const ExperimentConfig& config);

/// Monte Carlo risk curve and oracle model: risk_curve.csv + oracle.json.
int cmd_risk_curve(const ExperimentConfig& config);

/// Write samples.csv (replicates x design points) + sigma_true.csv.
int cmd_simulate(const ExperimentConfig& config);

/// Run the algebraic identity suite, the URE / gamma^2 unbiasedness Monte
/// Carlo checks, the risk-decomposition hard check and the oracle-inequality
/// check; write verify.json. Returns 0 iff everything passed, else 1.
int cmd_verify(const ExperimentConfig& config, bool json_to_stdout);

}  // namespace covsel
