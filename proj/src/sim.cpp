#include "covsel/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "covsel/io.hpp"
#include "covsel/rng.hpp"

namespace covsel {

namespace {

// Disjoint stream-index domains so that the sampling pools used by different
// estimates inside one command never overlap.
constexpr std::uint64_t kDomainSelect = 0x53454c45ull << 32;
constexpr std::uint64_t kDomainPhi = 0x50484920ull << 32;

void run_partitioned(int count, int threads, const std::function<void(int, int)>& chunk) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        chunk(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const int base = count / threads;
    const int extra = count % threads;
    int begin = 0;
    for (int t = 0; t < threads; ++t) {
        const int len = base + (t < extra ? 1 : 0);
        pool.emplace_back(chunk, begin, begin + len);
        begin += len;
    }
    for (auto& th : pool) th.join();
}

void check_collection(const ProcessSpec& spec, const std::vector<DesignMatrix>& collection) {
    if (collection.empty()) {
        throw std::invalid_argument("empty model collection");
    }
    for (const auto& d : collection) {
        if (!(d.points == spec.points)) {
            throw std::invalid_argument("collection design points differ from process points");
        }
    }
}

}  // namespace

ProcessSpec ProcessSpec::basis_gaussian(BasisFamily basis, int m_star,
                                        std::function<double(int)> variance_profile,
                                        DesignPoints points, std::uint64_t seed) {
    if (m_star < 1) throw std::invalid_argument("m_star must be >= 1");
    return ProcessSpec{ProcessKind::basis_gaussian, std::move(basis), m_star,
                       std::move(variance_profile), std::move(points), seed};
}

ProcessSpec ProcessSpec::basis_uniform(BasisFamily basis, int m_star,
                                       std::function<double(int)> variance_profile,
                                       DesignPoints points, std::uint64_t seed) {
    if (m_star < 1) throw std::invalid_argument("m_star must be >= 1");
    return ProcessSpec{ProcessKind::basis_uniform, std::move(basis), m_star,
                       std::move(variance_profile), std::move(points), seed};
}

ProcessSpec ProcessSpec::brownian_bridge(DesignPoints points, std::uint64_t seed) {
    return ProcessSpec{ProcessKind::brownian_bridge, BasisFamily::brownian_bridge_kl(), 0,
                       nullptr, std::move(points), seed};
}

SymMat true_sigma(const ProcessSpec& spec) {
    switch (spec.kind) {
        case ProcessKind::basis_gaussian:
        case ProcessKind::basis_uniform: {
            const DesignMatrix d = design_matrix(spec.basis, spec.m_star, spec.points);
            Vec var(spec.m_star);
            for (int lam = 1; lam <= spec.m_star; ++lam) var(lam - 1) = spec.variance_profile(lam);
            Mat s = d.G * var.asDiagonal() * d.G.transpose();
            s = 0.5 * (s + s.transpose());
            return SymMat(std::move(s));
        }
        case ProcessKind::brownian_bridge: {
            const int p = spec.points.size();
            Mat s(p, p);
            for (int j = 0; j < p; ++j) {
                for (int k = 0; k < p; ++k) {
                    const double lo = std::min(spec.points[j], spec.points[k]);
                    const double hi = std::max(spec.points[j], spec.points[k]);
                    s(j, k) = lo * (1.0 - hi);
                }
            }
            return SymMat(std::move(s));
        }
    }
    throw std::logic_error("unreachable");
}

ProcessSampler::ProcessSampler(const ProcessSpec& spec)
    : seed_(spec.seed), points_(spec.points) {
    switch (spec.kind) {
        case ProcessKind::basis_gaussian:
        case ProcessKind::basis_uniform: {
            const DesignMatrix d = design_matrix(spec.basis, spec.m_star, spec.points);
            Vec sd(spec.m_star);
            for (int lam = 1; lam <= spec.m_star; ++lam) {
                const double v = spec.variance_profile(lam);
                if (!(v >= 0.0)) {
                    throw std::invalid_argument("variance profile must be non-negative");
                }
                sd(lam - 1) = std::sqrt(v);
            }
            factor_ = d.G * sd.asDiagonal();
            uniform_ = spec.kind == ProcessKind::basis_uniform;
            break;
        }
        case ProcessKind::brownian_bridge: {
            const Mat sigma = true_sigma(spec).mat();
            Eigen::SelfAdjointEigenSolver<Mat> eig(sigma);
            if (eig.info() != Eigen::Success) {
                throw std::runtime_error("decomposition failed");
            }
            const Vec& w = eig.eigenvalues();
            const double floor = -1e-10 * std::max(1.0, w.cwiseAbs().maxCoeff());
            if (w.minCoeff() < floor) {
                throw std::runtime_error("invalid process covariance");
            }
            factor_ = eig.eigenvectors() * w.cwiseMax(0.0).cwiseSqrt().asDiagonal();
            break;
        }
    }
}

Mat ProcessSampler::draw(int n, std::uint64_t stream) const {
    if (n < 1) throw std::invalid_argument("draw: need n >= 1");
    Rng rng = Rng::stream(seed_, stream);
    // Draw order is row-major over (replicate, coefficient) so that a sample
    // set is a pure function of its stream.
    Mat z(n, factor_.cols());
    const double half_width = std::sqrt(3.0);
    for (Index i = 0; i < z.rows(); ++i) {
        for (Index j = 0; j < z.cols(); ++j) {
            z(i, j) = uniform_ ? rng.uniform(-half_width, half_width) : rng.normal();
        }
    }
    return z * factor_.transpose();  // rows are x_i^T
}

SampleSet simulate(const ProcessSpec& spec, int n) { return simulate(spec, n, 0); }

SampleSet simulate(const ProcessSpec& spec, int n, std::uint64_t stream) {
    if (n < 3) throw std::invalid_argument("simulate: need n >= 3");
    ProcessSampler sampler(spec);
    return SampleSet(sampler.draw(n, stream), spec.points);
}

RiskCurve mc_risk_curve(const ProcessSpec& spec, const std::vector<DesignMatrix>& collection,
                        int n, int reps, int threads) {
    if (reps < 100) throw std::invalid_argument("reps too small");
    if (n < 3) throw std::invalid_argument("mc_risk_curve: need n >= 3");
    check_collection(spec, collection);

    const ProcessSampler sampler(spec);
    const Mat sigma = true_sigma(spec).mat();
    const int M = static_cast<int>(collection.size());

    // Per-model constants.
    std::vector<Mat> proj(collection.size());
    std::vector<Mat> t_true(collection.size());  // Pi Sigma Pi
    std::vector<double> t_true_sq(collection.size());
    std::vector<double> bias(collection.size());
    for (int k = 0; k < M; ++k) {
        proj[k] = collection[k].projector.mat();
        t_true[k] = proj[k] * sigma * proj[k];
        t_true_sq[k] = t_true[k].squaredNorm();
        bias[k] = (sigma - t_true[k]).squaredNorm();
    }

    // Per-replicate rows; filled independently, reduced in index order.
    Mat risk_rm(reps, M);
    Mat var_rm(reps, M);

    run_partitioned(reps, threads, [&](int lo, int hi) {
        for (int r = lo; r < hi; ++r) {
            const Mat x = sampler.draw(n, static_cast<std::uint64_t>(r));
            const Mat s = x.transpose() * x / static_cast<double>(n);
            for (int k = 0; k < M; ++k) {
                const Mat sh = proj[k] * s * proj[k];
                risk_rm(r, k) = (sigma - sh).squaredNorm();
                // (1/n^2) sum_i ||y_i y_i^T - Pi Sigma Pi||^2, y_i = Pi x_i;
                // its expectation is tr((Pi x Pi) Phi) / n.
                const Mat y = x * proj[k];
                const Mat z = y * t_true[k];
                const Vec row_sq = y.rowwise().squaredNorm();
                double acc = 0.0;
                for (Index i = 0; i < y.rows(); ++i) {
                    acc += row_sq(i) * row_sq(i) - 2.0 * z.row(i).dot(y.row(i));
                }
                acc += static_cast<double>(n) * t_true_sq[k];
                var_rm(r, k) = acc / (static_cast<double>(n) * n);
            }
        }
    });

    RiskCurve curve;
    curve.reps = reps;
    const double nr = static_cast<double>(reps);
    for (int k = 0; k < M; ++k) {
        const double rmean = risk_rm.col(k).mean();
        const double vmean = var_rm.col(k).mean();
        const double rvar = (risk_rm.col(k).array() - rmean).square().sum() / (nr - 1.0);
        const double vvar = (var_rm.col(k).array() - vmean).square().sum() / (nr - 1.0);
        const Eigen::ArrayXd diff = risk_rm.col(k).array() - var_rm.col(k).array();
        const double dvar = (diff - diff.mean()).square().sum() / (nr - 1.0);
        curve.models.push_back(static_cast<int>(collection[static_cast<std::size_t>(k)].model.size()));
        curve.risk.push_back(rmean);
        curve.std_err.push_back(std::sqrt(rvar / nr));
        curve.bias_sq.push_back(bias[static_cast<std::size_t>(k)]);
        curve.variance_term.push_back(vmean);
        curve.var_std_err.push_back(std::sqrt(vvar / nr));
        curve.decomp_std_err.push_back(std::sqrt(dvar / nr));
    }
    return curve;
}

int oracle_model(const RiskCurve& curve) {
    if (curve.models.empty()) throw std::invalid_argument("oracle_model: empty curve");
    std::size_t best = 0;
    for (std::size_t k = 1; k < curve.risk.size(); ++k) {
        if (curve.risk[k] < curve.risk[best]) best = k;
    }
    return curve.models[best];
}

TracePhiEstimate trace_phi(const ProcessSpec& spec, int pool, int threads) {
    if (pool < 10000) throw std::invalid_argument("trace_phi: pool must be >= 10^4");
    const ProcessSampler sampler(spec);
    const Mat sigma = true_sigma(spec).mat();
    const double sigma_sq = sigma.squaredNorm();

    Vec vals(pool);
    run_partitioned(pool, threads, [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j) {
            const Mat x = sampler.draw(1, kDomainPhi + static_cast<std::uint64_t>(j));
            const Vec xi = x.row(0).transpose();
            const double nsq = xi.squaredNorm();
            // ||x x^T - Sigma||^2 = ||x||^4 - 2 x^T Sigma x + ||Sigma||^2
            vals(j) = nsq * nsq - 2.0 * xi.dot(sigma * xi) + sigma_sq;
        }
    });

    const double mean = vals.mean();
    const double var = (vals.array() - mean).square().sum() / (pool - 1.0);
    return TracePhiEstimate{mean, std::sqrt(var / pool), pool};
}

OracleInequalityReport verify_oracle_inequality(const ProcessSpec& spec,
                                                const std::vector<DesignMatrix>& collection,
                                                int n, int reps, double a, int threads) {
    if (reps < 500) throw std::invalid_argument("reps too small");
    if (!(a > 0.0)) throw std::invalid_argument("oracle inequality: A must be > 0");
    check_collection(spec, collection);

    const ProcessSampler sampler(spec);
    const Mat sigma = true_sigma(spec).mat();

    // Selected-estimator risk, fresh data per replicate.
    Vec lhs_vals(reps);
    run_partitioned(reps, threads, [&](int lo, int hi) {
        for (int r = lo; r < hi; ++r) {
            SampleSet xs(sampler.draw(n, kDomainSelect + static_cast<std::uint64_t>(r)), spec.points);
            const SelectionResult sel = select_model(xs, collection);
            lhs_vals(r) = (sel.estimate.sigma_hat.mat() - sigma).squaredNorm();
        }
    });
    const double lhs = lhs_vals.mean();
    const double lhs_var = (lhs_vals.array() - lhs).square().sum() / (reps - 1.0);
    const double lhs_se = std::sqrt(lhs_var / reps);

    // Independent streams for the risk curve and tr(Phi) pool.
    ProcessSpec risk_spec = spec;
    risk_spec.seed = spec.seed ^ 0x9e3779b97f4a7c15ull;
    const RiskCurve curve = mc_risk_curve(risk_spec, collection, n, std::max(reps, 100), threads);
    std::size_t best = 0;
    for (std::size_t k = 1; k < curve.risk.size(); ++k) {
        if (curve.risk[k] < curve.risk[best]) best = k;
    }
    const double inf_risk = curve.risk[best];
    const double inf_risk_se = curve.std_err[best];

    ProcessSpec phi_spec = spec;
    phi_spec.seed = spec.seed ^ 0xc2b2ae3d27d4eb4full;
    const TracePhiEstimate phi = trace_phi(phi_spec, std::max(10000, 20 * reps), threads);

    OracleInequalityReport rep;
    rep.a = a;
    rep.lhs = lhs;
    rep.lhs_se = lhs_se;
    rep.inf_risk = inf_risk;
    rep.inf_risk_se = inf_risk_se;
    rep.trace_phi_value = phi.value;
    rep.trace_phi_se = phi.std_err;
    rep.n = n;
    rep.reps = reps;
    rep.rhs = (1.0 + 1.0 / a) * inf_risk + (4.0 + a) * phi.value / n;
    rep.combined_se = std::sqrt(lhs_se * lhs_se +
                                std::pow((1.0 + 1.0 / a) * inf_risk_se, 2) +
                                std::pow((4.0 + a) / n * phi.std_err, 2));
    rep.holds = rep.lhs <= rep.rhs + 3.0 * rep.combined_se;
    return rep;
}

std::string RiskCurve::to_csv() const {
    std::string out = "m,risk,std_err,bias_sq,variance_term\n";
    for (std::size_t k = 0; k < models.size(); ++k) {
        out += std::to_string(models[k]);
        out += ',';
        out += format_double(risk[k]);
        out += ',';
        out += format_double(std_err[k]);
        out += ',';
        out += format_double(bias_sq[k]);
        out += ',';
        out += format_double(variance_term[k]);
        out += '\n';
    }
    return out;
}

void RiskCurve::write_csv(const std::string& path) const { write_file(path, to_csv()); }

std::string OracleInequalityReport::to_json() const {
    nlohmann::json j{
        {"A", a},
        {"lhs", lhs},
        {"lhs_std_err", lhs_se},
        {"inf_risk", inf_risk},
        {"inf_risk_std_err", inf_risk_se},
        {"trace_phi", trace_phi_value},
        {"trace_phi_std_err", trace_phi_se},
        {"rhs", rhs},
        {"combined_std_err", combined_se},
        {"n", n},
        {"reps", reps},
        {"holds", holds},
    };
    return j.dump(2);
}

}  // namespace covsel
