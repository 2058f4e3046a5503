#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "covsel/experiments.hpp"

namespace {

struct CommonFlags {
    std::string example;
    std::string config_file;
    int n = 0, p = 0, big_m = 0, m_star = 0;
    std::string basis, coefficients, variance_profile, grid;
    std::uint64_t seed = 0;
    int reps = 0, threads = 0;
    bool center = false;
    std::string out_dir;
    std::string data_file;
    std::string sabotage;
};

void add_common_options(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--example", f.example, "ex1 | ex1b | ex2 | ex3 | custom");
    sub->add_option("--config", f.config_file, "JSON config file (flags override it)");
    sub->add_option("--n", f.n, "number of replicates");
    sub->add_option("--p", f.p, "number of design points");
    sub->add_option("--M", f.big_m, "largest nested model size");
    sub->add_option("--m-star", f.m_star, "truncation of the simulated process");
    sub->add_option("--basis", f.basis, "fourier | cosine | brownian-bridge | csv:<path>");
    sub->add_option("--coefficients", f.coefficients, "gaussian | uniform");
    sub->add_option("--variance-profile", f.variance_profile,
                    "constant:v | offset-geometric:a:b | inverse-poly:k");
    sub->add_option("--grid", f.grid, "endpoint | interior | left");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--reps", f.reps, "Monte Carlo replicates");
    sub->add_option("--threads", f.threads, "worker threads (output is thread-count invariant)");
    sub->add_flag("--center", f.center, "subtract the empirical mean first (leaves the theory)");
    sub->add_option("--out", f.out_dir, "output directory");
}

covsel::ExperimentConfig build_config(const CLI::App* sub, const CommonFlags& f) {
    covsel::ExperimentConfig cfg;
    if (!f.config_file.empty()) cfg = covsel::ExperimentConfig::from_json_file(f.config_file);
    if (sub->count("--example")) cfg.example = f.example;
    if (sub->count("--n")) cfg.n = f.n;
    if (sub->count("--p")) cfg.p = f.p;
    if (sub->count("--M")) cfg.M = f.big_m;
    if (sub->count("--m-star")) cfg.m_star = f.m_star;
    if (sub->count("--basis")) cfg.basis = f.basis;
    if (sub->count("--coefficients")) cfg.coefficients = f.coefficients;
    if (sub->count("--variance-profile")) cfg.variance_profile = f.variance_profile;
    if (sub->count("--grid")) cfg.grid = f.grid;
    if (sub->count("--seed")) cfg.seed = f.seed;
    if (sub->count("--reps")) cfg.reps = f.reps;
    if (sub->count("--threads")) cfg.threads = f.threads;
    if (f.center) cfg.center = true;
    if (sub->count("--out")) cfg.out_dir = f.out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariance-function estimation by projection with URE model selection"};
    app.require_subcommand(1);

    CommonFlags select_flags, risk_flags, sim_flags, verify_flags;

    CLI::App* select = app.add_subcommand("select", "pick the URE-minimizing model");
    add_common_options(select, select_flags);
    select->add_option("--data", select_flags.data_file,
                       "analyze a SampleSet CSV instead of simulating");

    CLI::App* risk = app.add_subcommand("risk-curve", "Monte Carlo risk curve and oracle model");
    add_common_options(risk, risk_flags);

    CLI::App* simulate = app.add_subcommand("simulate", "write a simulated SampleSet");
    add_common_options(simulate, sim_flags);

    CLI::App* verify = app.add_subcommand("verify", "run the correctness suites");
    add_common_options(verify, verify_flags);
    bool verify_json = false;
    verify->add_flag("--json", verify_json, "print the machine-readable report to stdout");
    verify->add_option("--sabotage", verify_flags.sabotage,
                       "test hook: gamma-factor doubles gamma^2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (select->parsed()) {
            auto cfg = build_config(select, select_flags);
            if (select->count("--data")) cfg.data_file = select_flags.data_file;
            return covsel::cmd_select(cfg);
        }
        if (risk->parsed()) {
            return covsel::cmd_risk_curve(build_config(risk, risk_flags));
        }
        if (simulate->parsed()) {
            return covsel::cmd_simulate(build_config(simulate, sim_flags));
        }
        if (verify->parsed()) {
            auto cfg = build_config(verify, verify_flags);
            if (verify->count("--sabotage")) cfg.sabotage = verify_flags.sabotage;
            return covsel::cmd_verify(cfg, verify_json);
        }
    } catch (const std::exception& e) {
        std::cerr << "covsel: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
