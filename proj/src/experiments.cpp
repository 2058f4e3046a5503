#include "covsel/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "covsel/io.hpp"

namespace covsel {

namespace {

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

struct Preset {
    int n, p, M, m_star;
    std::string basis;
    std::string coefficients;
    std::string variance_profile;
    int reps;
};

Preset preset_for(const std::string& example) {
    if (example == "ex1") return {50, 35, 31, 35, "fourier", "gaussian", "constant:1", 40000};
    if (example == "ex1b")
        return {60, 35, 34, 35, "fourier", "gaussian", "offset-geometric:0.0475:0.95", 2000};
    if (example == "ex2") return {1000, 40, 20, 50, "cosine", "uniform", "inverse-poly:4", 2000};
    if (example == "ex3") return {100, 35, 20, 0, "brownian-bridge", "gaussian", "constant:1", 8000};
    if (example == "custom") return {100, 20, 10, 0, "cosine", "gaussian", "constant:1", 1000};
    throw std::invalid_argument("unknown example: " + example);
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty() && dir != ".") std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

std::function<double(int)> parse_variance_profile(const std::string& text) {
    const auto parts = split(text, ':');
    try {
        if (parts.size() == 2 && parts[0] == "constant") {
            const double v = std::stod(parts[1]);
            if (v < 0.0) throw std::invalid_argument("negative variance");
            return [v](int) { return v; };
        }
        if (parts.size() == 3 && parts[0] == "offset-geometric") {
            const double a = std::stod(parts[1]);
            const double b = std::stod(parts[2]);
            return [a, b](int lam) { return a + std::pow(b, lam); };
        }
        if (parts.size() == 2 && parts[0] == "inverse-poly") {
            const double k = std::stod(parts[1]);
            return [k](int lam) { return std::pow(static_cast<double>(lam), -k); };
        }
    } catch (const std::invalid_argument&) {
        // fall through to the error below
    }
    throw std::invalid_argument("bad variance profile: " + text +
                                " (expected constant:v, offset-geometric:a:b or inverse-poly:k)");
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    ExperimentConfig cfg;
    cfg.apply_json_text(read_file(path));
    return cfg;
}

void ExperimentConfig::apply_json_text(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.contains("example")) example = j.at("example").get<std::string>();
    if (j.contains("n")) n = j.at("n").get<int>();
    if (j.contains("p")) p = j.at("p").get<int>();
    if (j.contains("M")) M = j.at("M").get<int>();
    if (j.contains("m_star")) m_star = j.at("m_star").get<int>();
    if (j.contains("basis")) basis = j.at("basis").get<std::string>();
    if (j.contains("coefficients")) coefficients = j.at("coefficients").get<std::string>();
    if (j.contains("variance_profile"))
        variance_profile = j.at("variance_profile").get<std::string>();
    if (j.contains("grid")) grid = j.at("grid").get<std::string>();
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("reps")) reps = j.at("reps").get<int>();
    if (j.contains("threads")) threads = j.at("threads").get<int>();
    if (j.contains("center")) center = j.at("center").get<bool>();
    if (j.contains("out")) out_dir = j.at("out").get<std::string>();
    if (j.contains("data")) data_file = j.at("data").get<std::string>();
    if (j.contains("sabotage")) sabotage = j.at("sabotage").get<std::string>();
}

Experiment resolve(const ExperimentConfig& config) {
    const Preset preset = preset_for(config.example);

    Experiment e;
    e.example = config.example;
    e.n = config.n.value_or(preset.n);
    e.p = config.p.value_or(preset.p);
    e.M = config.M.value_or(preset.M);
    e.m_star = config.m_star.value_or(preset.m_star);
    e.basis_name = config.basis.value_or(preset.basis);
    e.coefficients = config.coefficients.value_or(preset.coefficients);
    e.variance_profile_name = config.variance_profile.value_or(preset.variance_profile);
    e.variance_profile = parse_variance_profile(e.variance_profile_name);
    e.grid = grid_convention_from_string(config.grid.value_or("endpoint"));
    e.seed = config.seed.value_or(42);
    e.reps = config.reps.value_or(preset.reps);
    e.threads = config.threads.value_or(default_threads());
    e.center = config.center;
    e.out_dir = config.out_dir;
    e.data_file = config.data_file;

    if (config.example == "custom" && !config.m_star.has_value()) e.m_star = e.M;

    if (config.sabotage.empty()) {
        e.gamma_factor = 1.0;
    } else if (config.sabotage == "gamma-factor") {
        e.gamma_factor = 2.0;
    } else {
        throw std::invalid_argument("unknown sabotage hook: " + config.sabotage);
    }

    if (e.n < 3) throw std::invalid_argument("config requires n >= 3");
    if (e.M < 1) throw std::invalid_argument("config requires M >= 1");
    if (e.p < 2) throw std::invalid_argument("config requires p >= 2");
    if (e.threads < 1) throw std::invalid_argument("config requires threads >= 1");
    if (e.basis_name != "brownian-bridge" && e.m_star < 1) {
        throw std::invalid_argument("config requires m_star >= 1");
    }
    if (e.coefficients != "gaussian" && e.coefficients != "uniform") {
        throw std::invalid_argument("coefficients must be gaussian or uniform");
    }
    return e;
}

DesignPoints Experiment::make_points() const { return DesignPoints::equispaced(p, grid); }

BasisFamily Experiment::make_basis() const {
    if (basis_name == "fourier") return BasisFamily::fourier_scaled(p);
    if (basis_name == "cosine") return BasisFamily::cosine();
    if (basis_name == "brownian-bridge") return BasisFamily::brownian_bridge_kl();
    if (basis_name.rfind("csv:", 0) == 0) {
        return BasisFamily::custom_from_csv(basis_name.substr(4));
    }
    throw std::invalid_argument("unknown basis: " + basis_name);
}

ProcessSpec Experiment::make_spec() const {
    if (basis_name == "brownian-bridge") {
        return ProcessSpec::brownian_bridge(make_points(), seed);
    }
    if (coefficients == "uniform") {
        return ProcessSpec::basis_uniform(make_basis(), m_star, variance_profile, make_points(),
                                          seed);
    }
    return ProcessSpec::basis_gaussian(make_basis(), m_star, variance_profile, make_points(), seed);
}

std::vector<DesignMatrix> Experiment::make_collection(const DesignPoints& points) const {
    return nested_collection(make_basis(), M, points);
}

namespace {

nlohmann::json selection_json(const SelectionResult& sel, const Experiment& e) {
    const ModelScore& best = sel.scores[sel.selected];
    nlohmann::json tie_with = nlohmann::json::array();
    bool tie = false;
    for (std::size_t k = 0; k < sel.scores.size(); ++k) {
        if (k != sel.selected && sel.scores[k].ure == best.ure) {
            tie = true;
            tie_with.push_back(sel.scores[k].model.size());
        }
    }
    nlohmann::json j = nlohmann::json::parse(sel.to_json());
    j["m_hat"] = best.model.size();
    j["tie"] = tie;
    j["tie_with"] = tie_with;
    j["example"] = e.example;
    j["seed"] = e.seed;
    return j;
}

void write_ure_curve_csv(const std::string& path, const SelectionResult& sel) {
    std::string out = "m,ure,gamma_sq,residual_sq\n";
    for (const auto& sc : sel.scores) {
        out += std::to_string(sc.model.size());
        out += ',';
        out += format_double(sc.ure);
        out += ',';
        out += format_double(sc.gamma_sq);
        out += ',';
        out += format_double(sc.residual_sq);
        out += '\n';
    }
    write_file(path, out);
}

}  // namespace

int cmd_select(const ExperimentConfig& config) {
    const Experiment e = resolve(config);
    ensure_dir(e.out_dir);

    bool truth_known = e.data_file.empty();
    SampleSet samples = [&] {
        if (!e.data_file.empty()) return SampleSet::from_csv(e.data_file);
        return simulate(e.make_spec(), e.n);
    }();
    if (e.center) samples = samples.centered();

    const std::vector<DesignMatrix> collection = [&] {
        if (!e.data_file.empty()) {
            // Design points come from the data header, not the grid flag.
            return nested_collection(e.make_basis(), e.M, samples.points());
        }
        return e.make_collection(samples.points());
    }();

    const SelectionResult sel = select_model(samples, collection);

    write_ure_curve_csv(join_path(e.out_dir, "ure_curve.csv"), sel);
    write_file(join_path(e.out_dir, "selected.json"), selection_json(sel, e).dump(2) + "\n");
    write_matrix_csv(join_path(e.out_dir, "sigma_hat.csv"), sel.estimate.sigma_hat.mat());
    if (truth_known) {
        write_matrix_csv(join_path(e.out_dir, "sigma_true.csv"), true_sigma(e.make_spec()).mat());
    }
    return 0;
}

int cmd_risk_curve(const ExperimentConfig& config) {
    const Experiment e = resolve(config);
    ensure_dir(e.out_dir);

    const ProcessSpec spec = e.make_spec();
    const std::vector<DesignMatrix> collection = e.make_collection(spec.points);
    const RiskCurve curve = mc_risk_curve(spec, collection, e.n, e.reps, e.threads);
    curve.write_csv(join_path(e.out_dir, "risk_curve.csv"));

    const int m0 = oracle_model(curve);
    std::size_t best = 0;
    for (std::size_t k = 0; k < curve.models.size(); ++k) {
        if (curve.models[k] == m0) best = k;
    }
    nlohmann::json j{
        {"m0", m0},
        {"min_risk", curve.risk[best]},
        {"std_err", curve.std_err[best]},
        {"reps", curve.reps},
        {"example", e.example},
        {"seed", e.seed},
    };
    write_file(join_path(e.out_dir, "oracle.json"), j.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const ExperimentConfig& config) {
    const Experiment e = resolve(config);
    ensure_dir(e.out_dir);
    const ProcessSpec spec = e.make_spec();
    const SampleSet samples = simulate(spec, e.n);
    samples.to_csv(join_path(e.out_dir, "samples.csv"));
    write_matrix_csv(join_path(e.out_dir, "sigma_true.csv"), true_sigma(spec).mat());
    return 0;
}

int cmd_verify(const ExperimentConfig& config, bool json_to_stdout) {
    const Experiment e = resolve(config);
    ensure_dir(e.out_dir);

    std::vector<VerifyCheck> checks = algebra_suite(e.seed);

    UnbiasednessParams prm;
    prm.seed = e.seed;
    prm.gamma_factor = e.gamma_factor;
    for (auto& c : ure_unbiasedness_checks(prm)) checks.push_back(std::move(c));
    for (auto& c : gamma_unbiasedness_checks(prm)) checks.push_back(std::move(c));

    {
        const ProcessSpec spec = small_gaussian_spec(prm.p, e.seed ^ 0x44454350ull);
        const auto collection = nested_collection(BasisFamily::cosine(), prm.M, spec.points);
        const RiskCurve curve = mc_risk_curve(spec, collection, prm.n, 5000, e.threads);
        checks.push_back(risk_decomposition_check(curve, "small-gaussian"));
    }
    {
        // Reduced second-example configuration for the oracle inequality.
        const DesignPoints pts = DesignPoints::equispaced(10, e.grid);
        const ProcessSpec spec = ProcessSpec::basis_uniform(
            BasisFamily::cosine(), 50, parse_variance_profile("inverse-poly:4"), pts,
            e.seed ^ 0x4f524143ull);
        const auto collection = nested_collection(BasisFamily::cosine(), 8, pts);
        const OracleInequalityReport report =
            verify_oracle_inequality(spec, collection, 50, 500, 1.0, e.threads);
        checks.push_back(VerifyCheck{"oracle-inequality-A1", report.holds,
                                     report.lhs - report.rhs, 3.0 * report.combined_se,
                                     "lhs=" + format_double(report.lhs) +
                                         " rhs=" + format_double(report.rhs) +
                                         " se=" + format_double(report.combined_se)});
    }

    bool all_pass = true;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"value", c.value},
                       {"threshold", c.threshold},
                       {"details", c.details}});
    }
    nlohmann::json j{{"pass", all_pass}, {"checks", arr}, {"seed", e.seed}};
    const std::string text = j.dump(2) + "\n";
    write_file(join_path(e.out_dir, "verify.json"), text);
    if (json_to_stdout) {
        std::cout << text;
    } else {
        for (const auto& c : checks) {
            std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  value="
                      << format_double(c.value) << " threshold=" << format_double(c.threshold)
                      << '\n';
        }
    }
    if (!all_pass) {
        std::cerr << "verification failed:";
        for (const auto& c : checks) {
            if (!c.pass) std::cerr << ' ' << c.name;
        }
        std::cerr << '\n';
        return 1;
    }
    return 0;
}

}  // namespace covsel
