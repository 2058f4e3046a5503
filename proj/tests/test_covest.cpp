#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "covsel/covest.hpp"
#include "covsel/io.hpp"
#include "covsel/rng.hpp"
#include "covsel/sim.hpp"

using namespace covsel;

namespace {

Mat random_mat(Rng& rng, Index rows, Index cols) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

// Custom basis whose design matrix at `pts` is exactly `g` (table rows are
// basis functions, columns the design points).
BasisFamily tabulated(const Mat& g, const DesignPoints& pts) {
    return BasisFamily::custom(g.transpose(), pts);
}

double gamma_brute_force(const SampleSet& x, const DesignMatrix& d) {
    const Mat s = empirical_covariance(x).mat();
    const Mat& pi = d.projector.mat();
    const Mat sh = pi * s * pi;
    double acc = 0.0;
    for (int i = 0; i < x.n(); ++i) {
        const Vec y = pi * x.data().row(i).transpose();
        acc += (y * y.transpose() - sh).squaredNorm();
    }
    return acc / (x.n() - 1);
}

}  // namespace

TEST_CASE("empirical covariance") {
    SUBCASE("point mass along e1") {
        Mat data = Mat::Zero(3, 2);
        data.col(0).setOnes();
        const DesignPoints pts = DesignPoints::equispaced(2);
        const SymMat s = empirical_covariance(SampleSet(data, pts));
        Mat expected(2, 2);
        expected << 1, 0, 0, 0;
        CHECK((s.mat() - expected).norm() == 0.0);
    }
    SUBCASE("quadratic homogeneity") {
        Rng rng(21);
        const DesignPoints pts = DesignPoints::equispaced(4);
        const SampleSet x(random_mat(rng, 6, 4), pts);
        const Mat s1 = empirical_covariance(x).mat();
        const Mat s3 = empirical_covariance(x.scaled(3.0)).mat();
        CHECK((s3 - 9.0 * s1).norm() <= 1e-12 * s1.norm());
    }
    SUBCASE("concentrates at rate tr(Phi)/n") {
        // X ~ N(0, [[2,1],[1,2]]) via a tabulated factor basis.
        const DesignPoints pts = DesignPoints::equispaced(2);
        Mat sigma(2, 2);
        sigma << 2, 1, 1, 2;
        const Mat factor = Eigen::LLT<Mat>(sigma).matrixL();
        const ProcessSpec spec = ProcessSpec::basis_gaussian(
            tabulated(factor, pts), 2, [](int) { return 1.0; }, pts, 98765);
        CHECK((true_sigma(spec).mat() - sigma).norm() <= 1e-12);

        const int n = 100000;
        const SampleSet x = simulate(spec, n);
        const Mat s = empirical_covariance(x).mat();
        const TracePhiEstimate phi = trace_phi(spec, 20000);
        CHECK((s - sigma).norm() <= 5.0 * std::sqrt(phi.value / n));
    }
}

TEST_CASE("sigma_hat") {
    const DesignPoints pts = DesignPoints::equispaced(4);
    Rng rng(22);
    const SampleSet x(random_mat(rng, 8, 4), pts);
    const Mat s = empirical_covariance(x).mat();

    SUBCASE("full model returns S") {
        const DesignMatrix full = design_matrix(tabulated(Mat::Identity(4, 4), pts), 4, pts);
        const CovarianceEstimate est = sigma_hat(x, full);
        CHECK((est.sigma_hat.mat() - s).norm() <= 1e-12 * s.norm());
        CHECK(est.projector_rank == 4);
    }
    SUBCASE("zero design gives the zero estimate") {
        const DesignMatrix zero = design_matrix(tabulated(Mat::Zero(4, 1), pts), 1, pts);
        const CovarianceEstimate est = sigma_hat(x, zero);
        CHECK(est.sigma_hat.mat().isZero(0.0));
        CHECK(est.projector_rank == 0);
    }
    SUBCASE("re-projection onto a nested model matches the direct estimate") {
        const DesignPoints pts10 = DesignPoints::equispaced(10);
        Rng rng10(23);
        const SampleSet x10(random_mat(rng10, 12, 10), pts10);
        const DesignMatrix big = design_matrix(BasisFamily::cosine(), 6, pts10);
        const DesignMatrix small = design_matrix(BasisFamily::cosine(), 2, pts10);
        const Mat direct = sigma_hat(x10, small).sigma_hat.mat();
        const Mat reproj =
            project_to_model_space(sigma_hat(x10, big).sigma_hat.mat(), small.projector).mat();
        CHECK((direct - reproj).norm() <= 1e-8);
    }
    SUBCASE("estimates live in the model space and stay PSD") {
        const DesignMatrix d = design_matrix(BasisFamily::cosine(), 3, pts);
        const CovarianceEstimate est = sigma_hat(x, d);
        const Mat& pi = d.projector.mat();
        CHECK((pi * est.sigma_hat.mat() * pi - est.sigma_hat.mat()).norm() <= 1e-8);
        Eigen::SelfAdjointEigenSolver<Mat> eig(est.sigma_hat.mat(), Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * est.sigma_hat.mat().norm());
    }
    SUBCASE("mismatched design points are rejected") {
        const DesignMatrix other =
            design_matrix(BasisFamily::cosine(), 2, DesignPoints::equispaced(4, GridConvention::left));
        CHECK_THROWS_AS(sigma_hat(x, other), std::invalid_argument);
    }
}

TEST_CASE("gamma_hat_sq") {
    const DesignPoints pts = DesignPoints::equispaced(5);
    const DesignMatrix d = design_matrix(BasisFamily::cosine(), 3, pts);

    SUBCASE("identical replicates give zero dispersion") {
        Rng rng(24);
        Mat data(4, 5);
        const Mat row = random_mat(rng, 1, 5);
        for (int i = 0; i < 4; ++i) data.row(i) = row;
        const SampleSet x(data, pts);
        const double scale4 = std::pow(row.norm(), 4);
        CHECK(std::abs(gamma_hat_sq(x, d)) <= 1e-12 * scale4);
    }
    SUBCASE("quartic homogeneity") {
        Rng rng(25);
        const SampleSet x(random_mat(rng, 9, 5), pts);
        const double g1 = gamma_hat_sq(x, d);
        const double g2 = gamma_hat_sq(x.scaled(2.0), d);
        CHECK(g2 == doctest::Approx(16.0 * g1).epsilon(1e-10));
        CHECK(g1 >= 0.0);
    }
    SUBCASE("matches the brute-force outer-product evaluation") {
        Rng rng(26);
        const SampleSet x(random_mat(rng, 7, 5), pts);
        const double fast = gamma_hat_sq(x, d);
        CHECK(fast == doctest::Approx(gamma_brute_force(x, d)).epsilon(1e-10));
    }
}

TEST_CASE("ure_score") {
    const DesignPoints pts = DesignPoints::equispaced(4);
    Rng rng(27);
    const SampleSet x(random_mat(rng, 10, 4), pts);

    SUBCASE("full model has zero residual") {
        const DesignMatrix full = design_matrix(tabulated(Mat::Identity(4, 4), pts), 4, pts);
        const ModelScore sc = ure_score(x, full);
        CHECK(sc.residual_sq <= 1e-20);
        CHECK(sc.ure == doctest::Approx(2.0 * sc.gamma_sq / 10.0).epsilon(1e-12));
    }
    SUBCASE("score identity holds exactly") {
        const DesignMatrix d = design_matrix(BasisFamily::cosine(), 2, pts);
        const ModelScore sc = ure_score(x, d);
        CHECK(sc.ure == sc.residual_sq + 2.0 * sc.gamma_sq / 10.0);
        CHECK(sc.gamma_sq >= 0.0);
    }
}

TEST_CASE("select_model") {
    const DesignPoints pts = DesignPoints::equispaced(6);
    Rng rng(28);
    const SampleSet x(random_mat(rng, 12, 6), pts);

    SUBCASE("singleton collection") {
        std::vector<DesignMatrix> coll{design_matrix(BasisFamily::cosine(), 2, pts)};
        const SelectionResult r = select_model(x, coll);
        CHECK(r.selected == 0);
        CHECK(r.scores.size() == 1);
    }
    SUBCASE("duplicated model ties break to the first occurrence") {
        std::vector<DesignMatrix> coll{design_matrix(BasisFamily::cosine(), 3, pts),
                                       design_matrix(BasisFamily::cosine(), 3, pts)};
        const SelectionResult r = select_model(x, coll);
        CHECK(r.scores[0].ure == r.scores[1].ure);
        CHECK(r.selected == 0);
    }
    SUBCASE("empty collection is rejected") {
        CHECK_THROWS_AS(select_model(x, {}), std::invalid_argument);
    }
    SUBCASE("scale invariance of the selection") {
        const auto coll = nested_collection(BasisFamily::cosine(), 5, pts);
        const SelectionResult r1 = select_model(x, coll);
        const SelectionResult r2 = select_model(x.scaled(3.5), coll);
        CHECK(r1.selected == r2.selected);
        for (std::size_t k = 0; k < coll.size(); ++k) {
            const double c4 = std::pow(3.5, 4);
            CHECK(r2.scores[k].ure == doctest::Approx(c4 * r1.scores[k].ure).epsilon(1e-9));
        }
    }
    SUBCASE("scores are invariant under design reparametrization G -> G R") {
        const DesignMatrix d = design_matrix(BasisFamily::cosine(), 3, pts);
        Rng rr(29);
        Mat r = random_mat(rr, 3, 3);
        r += 3.0 * Mat::Identity(3, 3);
        const DesignMatrix d_re = design_matrix(tabulated(d.G * r, pts), 3, pts);
        const ModelScore a = ure_score(x, d);
        const ModelScore b = ure_score(x, d_re);
        CHECK(b.ure == doctest::Approx(a.ure).epsilon(1e-8));
        CHECK(b.gamma_sq == doctest::Approx(a.gamma_sq).epsilon(1e-8));
        CHECK(b.residual_sq == doctest::Approx(a.residual_sq).epsilon(1e-8));
    }
    SUBCASE("selection JSON is well-formed") {
        const auto coll = nested_collection(BasisFamily::cosine(), 4, pts);
        const SelectionResult r = select_model(x, coll);
        const std::string js = r.to_json();
        CHECK(js.find("\"selected\"") != std::string::npos);
        CHECK(js.find("\"scores\"") != std::string::npos);
        CHECK(js.find("\"gamma_sq\"") != std::string::npos);
    }
}

TEST_CASE("pythagoras across nested models") {
    const DesignPoints pts = DesignPoints::equispaced(10);
    Rng rng(30);
    const SampleSet x(random_mat(rng, 15, 10), pts);
    const Mat s = empirical_covariance(x).mat();
    const DesignMatrix small = design_matrix(BasisFamily::cosine(), 3, pts);
    const DesignMatrix big = design_matrix(BasisFamily::cosine(), 7, pts);
    const Mat sh_s = sigma_hat(x, small).sigma_hat.mat();
    const Mat sh_b = sigma_hat(x, big).sigma_hat.mat();
    const double lhs = (s - sh_b).squaredNorm() + (sh_b - sh_s).squaredNorm();
    CHECK(lhs == doctest::Approx((s - sh_s).squaredNorm()).epsilon(1e-8));
}

TEST_CASE("mean URE minus realized risk is constant across models") {
    // 10-model collection at p = 4: differences of (URE - ||Sigma - Sigma_hat||^2)
    // across models should vanish in expectation.
    const int p = 4, n = 10, reps = 10000, M = 10;
    const DesignPoints pts = DesignPoints::equispaced(p);
    const ProcessSpec spec = ProcessSpec::basis_gaussian(
        BasisFamily::cosine(), p, [](int lam) { return 1.0 / lam; }, pts, 3141);
    const Mat sigma = true_sigma(spec).mat();
    const auto coll = nested_collection(BasisFamily::cosine(), M, pts);
    const ProcessSampler sampler(spec);

    Mat d_rm(reps, M);  // per-replicate URE(m) - realized squared error(m)
    for (int r = 0; r < reps; ++r) {
        const SampleSet x(sampler.draw(n, static_cast<std::uint64_t>(r)), pts);
        for (int k = 0; k < M; ++k) {
            const ModelScore sc = ure_score(x, coll[static_cast<std::size_t>(k)]);
            const Mat& pi = coll[static_cast<std::size_t>(k)].projector.mat();
            const Mat sh = pi * empirical_covariance(x).mat() * pi;
            d_rm(r, k) = sc.ure - (sigma - sh).squaredNorm();
        }
    }
    for (int k = 1; k < M; ++k) {
        const Eigen::ArrayXd delta = d_rm.col(k).array() - d_rm.col(0).array();
        const double mean = delta.mean();
        const double se = std::sqrt((delta - mean).square().sum() / (reps - 1.0) / reps);
        CHECK(std::abs(mean) <= 3.0 * se);
    }
}

TEST_CASE("SampleSet CSV round trip") {
    const DesignPoints pts = DesignPoints::equispaced(3);
    Rng rng(31);
    const SampleSet x(random_mat(rng, 5, 3), pts);
    const std::string path =
        (std::filesystem::temp_directory_path() / "covsel_samples.csv").string();
    x.to_csv(path);
    const SampleSet back = SampleSet::from_csv(path);
    CHECK(back.data() == x.data());
    CHECK(back.points() == x.points());
    std::filesystem::remove(path);
}

TEST_CASE("SampleSet validation") {
    const DesignPoints pts = DesignPoints::equispaced(3);
    CHECK_THROWS_AS(SampleSet(Mat::Zero(2, 3), pts), std::invalid_argument);  // n < 3
    CHECK_THROWS_AS(SampleSet(Mat::Zero(3, 2), pts), std::invalid_argument);  // width mismatch
    Mat bad = Mat::Zero(3, 3);
    bad(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(SampleSet(bad, pts), std::invalid_argument);

    SUBCASE("centering removes the empirical mean") {
        Rng rng(32);
        const SampleSet x(random_mat(rng, 6, 3), pts);
        const SampleSet c = x.centered();
        CHECK(c.data().colwise().mean().norm() <= 1e-14);
    }
}
