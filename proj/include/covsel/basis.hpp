#pragma once

#include <string>
#include <vector>

#include "covsel/matrix.hpp"

namespace covsel {

/// Placement of p equispaced design points in [0, 1].
enum class GridConvention {
    endpoint,  // t_j = (j-1)/(p-1), includes 0 and 1 (default)
    interior,  // t_j = j/(p+1)
    left,      // t_j = (j-1)/p
};

GridConvention grid_convention_from_string(const std::string& name);
std::string to_string(GridConvention g);

/// Strictly increasing observation points in [0, 1].
class DesignPoints {
public:
    explicit DesignPoints(std::vector<double> pts);

    static DesignPoints equispaced(int p, GridConvention grid = GridConvention::endpoint);

    int size() const { return static_cast<int>(pts_.size()); }
    double operator[](int j) const { return pts_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& values() const { return pts_; }

    bool operator==(const DesignPoints& other) const { return pts_ == other.pts_; }

private:
    std::vector<double> pts_;
};

enum class BasisKind { fourier_scaled, cosine, brownian_bridge_kl, custom };

/// A countable function family (g_lambda), lambda = 1, 2, ...
///
/// fourier_scaled carries the 1/sqrt(p) normalization of its reference
/// experiment, so it needs the intended p as `p_scale`. A custom family is a
/// table of precomputed values at fixed points and can only be evaluated
/// there.
class BasisFamily {
public:
    static BasisFamily fourier_scaled(int p_scale);
    static BasisFamily cosine();
    static BasisFamily brownian_bridge_kl();
    /// `table` is |Lambda| x p: row lambda-1 holds g_lambda at each point.
    static BasisFamily custom(Mat table, DesignPoints points);

    /// Load a custom family from CSV with header "lambda,t1,t2,...".
    static BasisFamily custom_from_csv(const std::string& path);

    BasisKind kind() const { return kind_; }
    int p_scale() const { return p_scale_; }
    int max_index() const;  // largest valid lambda; 0 = unbounded

    /// g_lambda(t). Throws "indices start at 1" for lambda < 1.
    double eval(int lambda, double t) const;

private:
    BasisFamily(BasisKind k, int p_scale) : kind_(k), p_scale_(p_scale) {}

    BasisKind kind_;
    int p_scale_ = 0;
    Mat table_;                       // custom only
    std::vector<double> table_pts_;  // custom only
};

/// Free-function form of BasisFamily::eval.
double eval_basis(const BasisFamily& basis, int lambda, double t);

/// Design matrix G with (G)_{j,lambda} = g_lambda(t_j) for lambda in `model`,
/// together with the cached projector onto its column space.
struct DesignMatrix {
    Mat G;                    // p x |model|
    std::vector<int> model;   // basis indices, ordered
    BasisFamily basis;
    DesignPoints points;
    Projector projector;
};

/// Model {1, ..., m_size}.
DesignMatrix design_matrix(const BasisFamily& basis, int m_size, const DesignPoints& points);

/// Arbitrary finite index set (ascending, indices >= 1).
DesignMatrix design_matrix(const BasisFamily& basis, std::vector<int> model,
                           const DesignPoints& points);

/// The nested collection {1}, {1,2}, ..., {1..M}.
std::vector<DesignMatrix> nested_collection(const BasisFamily& basis, int M,
                                            const DesignPoints& points);

}  // namespace covsel
