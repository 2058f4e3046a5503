#include "covsel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covsel/io.hpp"
#include "covsel/rng.hpp"

namespace covsel {

namespace {

Mat random_mat(Rng& rng, Index rows, Index cols) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

Mat random_sym(Rng& rng, Index d) {
    Mat m = random_mat(rng, d, d);
    return 0.5 * (m + m.transpose());
}

VerifyCheck bounded(const std::string& name, double value, double threshold,
                    std::string details = "") {
    return VerifyCheck{name, value <= threshold, value, threshold, std::move(details)};
}

// Reflexive generalized inverse of the PSD matrix B = G^T G built from a
// nonsingular principal submatrix (indices = a maximal independent column
// subset of G). Deliberately different from the Moore-Penrose inverse.
Mat principal_block_ginverse(const Mat& g) {
    Eigen::ColPivHouseholderQR<Mat> qr(g);
    const Index r = qr.rank();
    const auto perm = qr.colsPermutation().indices();
    std::vector<Index> keep(perm.data(), perm.data() + r);
    std::sort(keep.begin(), keep.end());

    const Mat b = g.transpose() * g;
    Mat bjj(r, r);
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < r; ++j) bjj(i, j) = b(keep[static_cast<std::size_t>(i)],
                                                    keep[static_cast<std::size_t>(j)]);
    }
    const Mat bjj_inv = bjj.inverse();
    Mat ginv = Mat::Zero(b.rows(), b.cols());
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < r; ++j) {
            ginv(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]) =
                bjj_inv(i, j);
        }
    }
    return ginv;
}

}  // namespace

std::vector<VerifyCheck> algebra_suite(std::uint64_t seed) {
    Rng rng = Rng::stream(seed, 0xa16e);
    std::vector<VerifyCheck> checks;

    {  // Frobenius norm carried by vec
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const Mat a = random_mat(rng, 2 + trial % 5, 2 + (trial / 5) % 4);
            const double fro = a.norm();
            worst = std::max(worst, std::abs(fro - vec(a).norm()) / fro);
        }
        checks.push_back(bounded("vec-preserves-frobenius", worst, 1e-12));
    }
    {  // vec(ABC) = (C^T kron A) vec(B)
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const Mat a = random_mat(rng, 3, 4);
            const Mat b = random_mat(rng, 4, 5);
            const Mat c = random_mat(rng, 5, 2);
            const Vec lhs = vec(a * b * c);
            const Vec rhs = kron(c.transpose(), a) * vec(b);
            worst = std::max(worst, (lhs - rhs).norm() / lhs.norm());
        }
        checks.push_back(bounded("vec-of-product", worst, 1e-10));
    }
    {  // (A kron B)^T = A^T kron B^T, exactly
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Mat a = random_mat(rng, 3, 2);
            const Mat b = random_mat(rng, 2, 4);
            const Mat lhs = kron(a, b).transpose();
            const Mat rhs = kron(a.transpose(), b.transpose());
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        checks.push_back(bounded("kron-transpose-exact", worst, 0.0));
    }
    {  // (A kron B)(C kron D) = AC kron BD
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const Mat a = random_mat(rng, 3, 3), b = random_mat(rng, 3, 3);
            const Mat c = random_mat(rng, 3, 3), d = random_mat(rng, 3, 3);
            const Mat lhs = kron(a, b) * kron(c, d);
            const Mat rhs = kron(a * c, b * d);
            worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
        }
        checks.push_back(bounded("kron-mixed-product", worst, 1e-12));
    }
    {  // projector laws, including rank-deficient designs
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const Index p = 8;
            const Index q = 1 + trial % 8;
            Mat g = random_mat(rng, p, q);
            if (trial % 3 == 0 && q >= 2) g.col(q - 1) = 2.0 * g.col(0);  // force rank deficiency
            const Projector pr = projector(g);
            const Mat& pi = pr.mat();
            worst = std::max(worst, (pi * pi - pi).norm());
            worst = std::max(worst, (pi - pi.transpose()).norm());
            worst = std::max(worst, (pi * g - g).norm());
            Eigen::ColPivHouseholderQR<Mat> qr(g);
            worst = std::max(worst, std::abs(pi.trace() - static_cast<double>(qr.rank())));
        }
        checks.push_back(bounded("projector-laws", worst, 1e-8));
    }
    {  // pseudo-inverse: reflexive generalized-inverse identities on rank-2 input
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Mat a = random_mat(rng, 6, 2) * random_mat(rng, 4, 2).transpose();
            const Mat m = pseudo_inverse(a);
            worst = std::max(worst, (a * m * a - a).norm() / a.norm());
            worst = std::max(worst, (m * a * m - m).norm() / m.norm());
        }
        checks.push_back(bounded("pseudo-inverse-reflexive", worst, 1e-8));
    }
    {  // projection optimality vs 1000 random competitors in S(G)
        const Mat a = random_sym(rng, 6);
        const Mat g = random_mat(rng, 6, 3);
        const Projector pr = projector(g);
        const double best = (a - project_to_model_space(a, pr).mat()).norm();
        double worst_violation = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const Mat psi = random_sym(rng, 3);
            const double competitor = (a - g * psi * g.transpose()).norm();
            worst_violation = std::max(worst_violation, best - competitor);
        }
        checks.push_back(bounded("projection-optimality", worst_violation, 1e-12,
                                 "best distance " + format_double(best)));
    }
    {  // projector invariance: column-space reparametrization G R
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Mat g = random_mat(rng, 7, 3);
            Mat r = random_mat(rng, 3, 3);
            r += 3.0 * Mat::Identity(3, 3);  // keep it comfortably invertible
            worst = std::max(worst, (projector(g).mat() - projector(g * r).mat()).norm());
        }
        checks.push_back(bounded("projector-reparametrization", worst, 1e-8));
    }
    {  // projector invariance under a different reflexive generalized inverse
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            Mat g = random_mat(rng, 7, 4);
            g.col(3) = g.col(0) - 0.5 * g.col(1);  // rank 3
            const Mat b = g.transpose() * g;
            const Mat ginv = principal_block_ginverse(g);
            worst = std::max(worst, (b * ginv * b - b).norm() / b.norm());
            worst = std::max(worst, (ginv * b * ginv - ginv).norm() / ginv.norm());
            const Mat pi_alt = g * ginv * g.transpose();
            worst = std::max(worst, (pi_alt - projector(g).mat()).norm());
        }
        checks.push_back(bounded("projector-ginverse-invariance", worst, 1e-8));
    }
    {  // PSD preservation of the model-space projection
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Mat half = random_mat(rng, 6, 6);
            const Mat a = half * half.transpose();
            const Mat g = random_mat(rng, 6, 3);
            const SymMat proj = project_to_model_space(a, projector(g));
            Eigen::SelfAdjointEigenSolver<Mat> eig(proj.mat(), Eigen::EigenvaluesOnly);
            worst = std::max(worst, -eig.eigenvalues().minCoeff() / a.norm());
        }
        checks.push_back(bounded("projection-preserves-psd", worst, 1e-8));
    }
    {  // matrix route vs vectorized route: Pi A Pi = unvec((Pi kron Pi) vec(sym A))
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Mat a = random_mat(rng, 5, 5);
            const Projector pr = projector(random_mat(rng, 5, 2));
            const Mat direct = project_to_model_space(a, pr).mat();
            const Mat sym = 0.5 * (a + a.transpose());
            const Mat via_kron = unvec(kron(pr.mat(), pr.mat()) * vec(sym), 5, 5);
            worst = std::max(worst, (direct - via_kron).norm() / (direct.norm() + 1e-300));
        }
        checks.push_back(bounded("projection-kron-route", worst, 1e-10));
    }
    {  // gamma_hat^2: p x p evaluation vs explicit (Pi kron Pi) on vec form
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const int p = 5, n = 8;
            const DesignPoints pts = DesignPoints::equispaced(p);
            const DesignMatrix d = design_matrix(BasisFamily::cosine(), 2 + trial % 3, pts);
            const SampleSet xs(random_mat(rng, n, p), pts);
            const double fast = gamma_hat_sq(xs, d);
            const Mat s = empirical_covariance(xs).mat();
            const Mat pp = kron(d.projector.mat(), d.projector.mat());
            double brute = 0.0;
            for (int i = 0; i < n; ++i) {
                const Vec xi = xs.data().row(i).transpose();
                const Mat outer = xi * xi.transpose();
                brute += (pp * (vec(outer) - vec(s))).squaredNorm();
            }
            brute /= n - 1;
            worst = std::max(worst, std::abs(fast - brute) / brute);
        }
        checks.push_back(bounded("gamma-sq-kron-route", worst, 1e-10));
    }
    {  // Pythagoras across nested models
        double worst = 0.0;
        const int p = 10, n = 12;
        const DesignPoints pts = DesignPoints::equispaced(p);
        const SampleSet xs(random_mat(rng, n, p), pts);
        const Mat s = empirical_covariance(xs).mat();
        for (int m_small = 1; m_small <= 4; ++m_small) {
            const DesignMatrix d_small = design_matrix(BasisFamily::cosine(), m_small, pts);
            const DesignMatrix d_big = design_matrix(BasisFamily::cosine(), m_small + 3, pts);
            const Mat sh_small = sigma_hat(xs, d_small).sigma_hat.mat();
            const Mat sh_big = sigma_hat(xs, d_big).sigma_hat.mat();
            const double lhs = (s - sh_big).squaredNorm() + (sh_big - sh_small).squaredNorm();
            const double rhs = (s - sh_small).squaredNorm();
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        checks.push_back(bounded("nested-pythagoras", worst, 1e-8));
    }
    return checks;
}

ProcessSpec small_gaussian_spec(int p, std::uint64_t seed) {
    return ProcessSpec::basis_gaussian(
        BasisFamily::cosine(), p, [](int lam) { return 1.0 / lam; },
        DesignPoints::equispaced(p), seed);
}

namespace {

struct PooledMoments {
    std::vector<double> mean;
    std::vector<double> se;
};

// Mean and standard error column-wise over per-draw statistics.
PooledMoments reduce(const Mat& values) {
    PooledMoments out;
    const double n = static_cast<double>(values.rows());
    for (Index k = 0; k < values.cols(); ++k) {
        const double m = values.col(k).mean();
        const double var = (values.col(k).array() - m).square().sum() / (n - 1.0);
        out.mean.push_back(m);
        out.se.push_back(std::sqrt(var / n));
    }
    return out;
}

}  // namespace

std::vector<VerifyCheck> ure_unbiasedness_checks(const UnbiasednessParams& prm) {
    const ProcessSpec spec = small_gaussian_spec(prm.p, prm.seed);
    const std::vector<DesignMatrix> collection =
        nested_collection(BasisFamily::cosine(), prm.M, spec.points);
    const Mat sigma = true_sigma(spec).mat();
    const int M = static_cast<int>(collection.size());
    const ProcessSampler sampler(spec);

    // Mean URE over `sets` independent SampleSets.
    Mat ure_vals(prm.sets, M);
    for (int r = 0; r < prm.sets; ++r) {
        const SampleSet xs(sampler.draw(prm.n, static_cast<std::uint64_t>(r)), spec.points);
        for (int k = 0; k < M; ++k) {
            const ModelScore sc = ure_score(xs, collection[static_cast<std::size_t>(k)]);
            ure_vals(r, k) =
                sc.residual_sq + 2.0 * prm.gamma_factor * sc.gamma_sq / static_cast<double>(prm.n);
        }
    }
    const PooledMoments ure = reduce(ure_vals);

    // Brute-force risk pool: fresh SampleSets, exact Sigma.
    ProcessSpec risk_spec = spec;
    risk_spec.seed = spec.seed ^ 0x52495348u;
    const ProcessSampler risk_sampler(risk_spec);
    Mat risk_vals(prm.risk_pool, M);
    for (int r = 0; r < prm.risk_pool; ++r) {
        const Mat x = risk_sampler.draw(prm.n, static_cast<std::uint64_t>(r));
        const Mat s = x.transpose() * x / static_cast<double>(prm.n);
        for (int k = 0; k < M; ++k) {
            const Mat& pi = collection[static_cast<std::size_t>(k)].projector.mat();
            risk_vals(r, k) = (sigma - pi * s * pi).squaredNorm();
        }
    }
    const PooledMoments risk = reduce(risk_vals);

    ProcessSpec phi_spec = spec;
    phi_spec.seed = spec.seed ^ 0x50484921u;
    const TracePhiEstimate phi = trace_phi(phi_spec, prm.phi_pool);

    std::vector<VerifyCheck> checks;
    for (int k = 0; k < M; ++k) {
        const double target = risk.mean[static_cast<std::size_t>(k)] + phi.value / prm.n;
        const double gap = std::abs(ure.mean[static_cast<std::size_t>(k)] - target);
        const double se = std::sqrt(std::pow(ure.se[static_cast<std::size_t>(k)], 2) +
                                    std::pow(risk.se[static_cast<std::size_t>(k)], 2) +
                                    std::pow(phi.std_err / prm.n, 2));
        std::ostringstream details;
        details << "m=" << (k + 1) << " mean_ure=" << format_double(ure.mean[static_cast<std::size_t>(k)])
                << " risk+trPhi/n=" << format_double(target) << " se=" << format_double(se);
        checks.push_back(bounded("ure-unbiasedness-m" + std::to_string(k + 1),
                                 se > 0.0 ? gap / se : 0.0, 3.0, details.str()));
    }
    return checks;
}

std::vector<VerifyCheck> gamma_unbiasedness_checks(const UnbiasednessParams& prm) {
    const ProcessSpec spec = small_gaussian_spec(prm.p, prm.seed);
    const std::vector<DesignMatrix> collection =
        nested_collection(BasisFamily::cosine(), prm.M, spec.points);
    const int M = static_cast<int>(collection.size());
    const int p = prm.p;
    const int psq = p * p;
    const ProcessSampler sampler(spec);

    // Mean gamma^2 over `sets` independent SampleSets.
    Mat gamma_vals(prm.sets, M);
    for (int r = 0; r < prm.sets; ++r) {
        const SampleSet xs(sampler.draw(prm.n, static_cast<std::uint64_t>(r)), spec.points);
        for (int k = 0; k < M; ++k) {
            gamma_vals(r, k) =
                prm.gamma_factor * gamma_hat_sq(xs, collection[static_cast<std::size_t>(k)]);
        }
    }
    const PooledMoments gamma = reduce(gamma_vals);

    // Materialize Phi-hat = Var(vec(x x^T)) from a large single-draw pool,
    // tracking per-draw ||Pi x x^T Pi||^2 to get a standard error per model.
    ProcessSpec phi_spec = spec;
    phi_spec.seed = spec.seed ^ 0x4b524f4eu;
    const ProcessSampler phi_sampler(phi_spec);
    Mat w_outer_sum = Mat::Zero(psq, psq);
    Vec w_sum = Vec::Zero(psq);
    Mat proj_sq(prm.phi_kron_pool, M);
    std::vector<Mat> pis;
    for (const auto& d : collection) pis.push_back(d.projector.mat());
    for (int j = 0; j < prm.phi_kron_pool; ++j) {
        const Mat x = phi_sampler.draw(1, static_cast<std::uint64_t>(j));
        const Vec xi = x.row(0).transpose();
        const Mat outer = xi * xi.transpose();
        const Vec w = vec(outer);
        w_outer_sum.noalias() += w * w.transpose();
        w_sum += w;
        for (int k = 0; k < M; ++k) {
            const Mat piopi = pis[static_cast<std::size_t>(k)] * outer * pis[static_cast<std::size_t>(k)];
            proj_sq(j, k) = piopi.squaredNorm();
        }
    }
    const double pool = static_cast<double>(prm.phi_kron_pool);
    const Vec w_mean = w_sum / pool;
    const Mat phi_hat = w_outer_sum / pool - w_mean * w_mean.transpose();

    std::vector<VerifyCheck> checks;
    for (int k = 0; k < M; ++k) {
        const Mat pp = kron(pis[static_cast<std::size_t>(k)], pis[static_cast<std::size_t>(k)]);
        const double target = (pp * phi_hat).trace();
        const PooledMoments ps = reduce(proj_sq.col(k));
        const double gap = std::abs(gamma.mean[static_cast<std::size_t>(k)] - target);
        const double se = std::sqrt(std::pow(gamma.se[static_cast<std::size_t>(k)], 2) +
                                    std::pow(ps.se[0], 2));
        std::ostringstream details;
        details << "m=" << (k + 1)
                << " mean_gamma_sq=" << format_double(gamma.mean[static_cast<std::size_t>(k)])
                << " tr((PixPi)Phi_hat)=" << format_double(target) << " se=" << format_double(se);
        checks.push_back(bounded("gamma-sq-unbiasedness-m" + std::to_string(k + 1),
                                 se > 0.0 ? gap / se : 0.0, 3.0, details.str()));
    }
    return checks;
}

VerifyCheck risk_decomposition_check(const RiskCurve& curve, const std::string& label) {
    double worst = 0.0;
    int worst_m = curve.models.empty() ? 0 : curve.models.front();
    for (std::size_t k = 0; k < curve.models.size(); ++k) {
        const double gap = std::abs(curve.risk[k] - curve.bias_sq[k] - curve.variance_term[k]);
        const double z = curve.std_err[k] > 0.0 ? gap / curve.std_err[k] : 0.0;
        if (z > worst) {
            worst = z;
            worst_m = curve.models[k];
        }
    }
    VerifyCheck check{"risk-decomposition-" + label, worst <= 3.0, worst, 3.0,
                      "worst model m=" + std::to_string(worst_m)};
    return check;
}

}  // namespace covsel
