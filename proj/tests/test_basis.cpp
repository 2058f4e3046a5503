#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "covsel/basis.hpp"
#include "covsel/io.hpp"

using namespace covsel;

namespace {
constexpr double kPi = std::numbers::pi;

// Composite Simpson integral of g_a * g_b on [0,1].
double simpson_inner(const BasisFamily& basis, int a, int b, int intervals) {
    const double h = 1.0 / intervals;
    double acc = basis.eval(a, 0.0) * basis.eval(b, 0.0) + basis.eval(a, 1.0) * basis.eval(b, 1.0);
    for (int k = 1; k < intervals; ++k) {
        const double t = k * h;
        acc += (k % 2 == 1 ? 4.0 : 2.0) * basis.eval(a, t) * basis.eval(b, t);
    }
    return acc * h / 3.0;
}
}  // namespace

TEST_CASE("equispaced design points") {
    const DesignPoints p2 = DesignPoints::equispaced(2);
    CHECK(p2[0] == 0.0);
    CHECK(p2[1] == 1.0);

    const DesignPoints p3 = DesignPoints::equispaced(3);
    CHECK(p3[0] == 0.0);
    CHECK(p3[1] == 0.5);
    CHECK(p3[2] == 1.0);

    const DesignPoints p35 = DesignPoints::equispaced(35);
    CHECK(p35[0] == 0.0);
    CHECK(p35[34] == 1.0);
    for (int j = 1; j < 35; ++j) {
        CHECK(p35[j] - p35[j - 1] == doctest::Approx(1.0 / 34).epsilon(1e-14));
    }

    const DesignPoints interior = DesignPoints::equispaced(4, GridConvention::interior);
    CHECK(interior[0] == doctest::Approx(0.2));
    CHECK(interior[3] == doctest::Approx(0.8));

    const DesignPoints left = DesignPoints::equispaced(4, GridConvention::left);
    CHECK(left[0] == 0.0);
    CHECK(left[3] == doctest::Approx(0.75));

    CHECK_THROWS_AS(DesignPoints::equispaced(1), std::invalid_argument);
    CHECK_THROWS_AS(DesignPoints({0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(DesignPoints({-0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("basis evaluation") {
    const BasisFamily fourier = BasisFamily::fourier_scaled(4);
    CHECK(fourier.eval(1, 0.7) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fourier.eval(2, 0.25) ==
          doctest::Approx(std::sqrt(2.0 / 4.0) * std::cos(2 * kPi * 0.25)).epsilon(1e-14));
    CHECK(fourier.eval(3, 0.25) ==
          doctest::Approx(std::sqrt(2.0 / 4.0) * std::sin(2 * kPi * 0.25)).epsilon(1e-14));
    CHECK(fourier.eval(5, 0.1) ==
          doctest::Approx(std::sqrt(0.5) * std::sin(2 * kPi * 2 * 0.1)).epsilon(1e-14));

    const BasisFamily cosine = BasisFamily::cosine();
    CHECK(cosine.eval(2, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));

    const BasisFamily bb = BasisFamily::brownian_bridge_kl();
    CHECK(bb.eval(1, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    CHECK_THROWS_WITH_AS(cosine.eval(0, 0.5), "indices start at 1", std::invalid_argument);
}

TEST_CASE("design matrix construction") {
    const DesignPoints pts = DesignPoints::equispaced(3);
    const DesignMatrix d = design_matrix(BasisFamily::cosine(), 1, pts);
    REQUIRE(d.G.rows() == 3);
    REQUIRE(d.G.cols() == 1);
    for (int j = 0; j < 3; ++j) {
        CHECK(d.G(j, 0) == std::cos(kPi * pts[j]));
    }
    CHECK(d.model == std::vector<int>{1});

    SUBCASE("entries always match a fresh evaluation") {
        const DesignMatrix d6 = design_matrix(BasisFamily::fourier_scaled(6), 5,
                                              DesignPoints::equispaced(6, GridConvention::left));
        for (int j = 0; j < 6; ++j) {
            for (int k = 0; k < 5; ++k) {
                CHECK(d6.G(j, k) == eval_basis(d6.basis, d6.model[static_cast<std::size_t>(k)],
                                               d6.points[j]));
            }
        }
    }
    SUBCASE("arbitrary index subsets are allowed") {
        const DesignMatrix dsub = design_matrix(BasisFamily::cosine(), {2, 5, 9}, pts);
        CHECK(dsub.G.cols() == 3);
        CHECK(dsub.G(1, 2) == std::cos(9 * kPi * 0.5));
        CHECK_THROWS_AS(design_matrix(BasisFamily::cosine(), {3, 2}, pts), std::invalid_argument);
    }
}

TEST_CASE("fourier design on the left grid spans R^p at m = p") {
    const int p = 8;
    const DesignPoints pts = DesignPoints::equispaced(p, GridConvention::left);
    const DesignMatrix d = design_matrix(BasisFamily::fourier_scaled(p), p, pts);
    Eigen::ColPivHouseholderQR<Mat> qr(d.G);
    REQUIRE(qr.rank() == p);
    CHECK((d.projector.mat() - Mat::Identity(p, p)).norm() <= 1e-8);
}

TEST_CASE("fourier design on the left grid is discretely orthonormal") {
    const int p = 35;
    const DesignPoints pts = DesignPoints::equispaced(p, GridConvention::left);
    const DesignMatrix d = design_matrix(BasisFamily::fourier_scaled(p), p - 1, pts);
    const Mat gram = d.G.transpose() * d.G;
    CHECK((gram - Mat::Identity(p - 1, p - 1)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("nested models have nested projectors") {
    const DesignPoints pts = DesignPoints::equispaced(10);
    const DesignMatrix small = design_matrix(BasisFamily::cosine(), 3, pts);
    const DesignMatrix big = design_matrix(BasisFamily::cosine(), 7, pts);
    const Mat prod = small.projector.mat() * big.projector.mat();
    CHECK((prod - small.projector.mat()).norm() <= 1e-8);

    const auto collection = nested_collection(BasisFamily::cosine(), 4, pts);
    REQUIRE(collection.size() == 4);
    for (int m = 1; m <= 4; ++m) {
        CHECK(collection[static_cast<std::size_t>(m - 1)].model.size() ==
              static_cast<std::size_t>(m));
    }
}

TEST_CASE("brownian bridge eigenfunctions are L2-orthonormal (quadrature oracle)") {
    const BasisFamily bb = BasisFamily::brownian_bridge_kl();
    for (int a = 1; a <= 10; ++a) {
        for (int b = a; b <= 10; ++b) {
            const double integral = simpson_inner(bb, a, b, 10000);
            CHECK(std::abs(integral - (a == b ? 1.0 : 0.0)) <= 1e-6);
        }
    }
}

TEST_CASE("custom basis from CSV") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "covsel_custom_basis.csv").string();
    write_file(path,
               "lambda,0,0.5,1\n"
               "1,1,1,1\n"
               "2,-1,0,1\n");
    const BasisFamily custom = BasisFamily::custom_from_csv(path);
    CHECK(custom.max_index() == 2);
    CHECK(custom.eval(1, 0.5) == 1.0);
    CHECK(custom.eval(2, 0.0) == -1.0);
    CHECK_THROWS_AS(custom.eval(2, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(custom.eval(3, 0.0), std::invalid_argument);

    const DesignPoints pts({0.0, 0.5, 1.0});
    const DesignMatrix d = design_matrix(custom, 2, pts);
    Mat expected(3, 2);
    expected << 1, -1, 1, 0, 1, 1;
    CHECK(d.G == expected);
    std::filesystem::remove(path);
}
