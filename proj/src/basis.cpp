#include "covsel/basis.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace covsel {

namespace {
constexpr double kPi = std::numbers::pi;
}

GridConvention grid_convention_from_string(const std::string& name) {
    if (name == "endpoint") return GridConvention::endpoint;
    if (name == "interior") return GridConvention::interior;
    if (name == "left") return GridConvention::left;
    throw std::invalid_argument("unknown grid convention: " + name);
}

std::string to_string(GridConvention g) {
    switch (g) {
        case GridConvention::endpoint: return "endpoint";
        case GridConvention::interior: return "interior";
        case GridConvention::left: return "left";
    }
    throw std::logic_error("unreachable");
}

DesignPoints::DesignPoints(std::vector<double> pts) : pts_(std::move(pts)) {
    if (pts_.empty()) {
        throw std::invalid_argument("DesignPoints: need at least one point");
    }
    for (std::size_t j = 0; j < pts_.size(); ++j) {
        if (!std::isfinite(pts_[j]) || pts_[j] < 0.0 || pts_[j] > 1.0) {
            throw std::invalid_argument("DesignPoints: points must lie in [0, 1]");
        }
        if (j > 0 && pts_[j] <= pts_[j - 1]) {
            throw std::invalid_argument("DesignPoints: points must be strictly increasing");
        }
    }
}

DesignPoints DesignPoints::equispaced(int p, GridConvention grid) {
    if (p < 2) {
        throw std::invalid_argument("equispaced_points: p must be at least 2");
    }
    std::vector<double> pts(static_cast<std::size_t>(p));
    for (int j = 1; j <= p; ++j) {
        double t = 0.0;
        switch (grid) {
            case GridConvention::endpoint: t = static_cast<double>(j - 1) / (p - 1); break;
            case GridConvention::interior: t = static_cast<double>(j) / (p + 1); break;
            case GridConvention::left: t = static_cast<double>(j - 1) / p; break;
        }
        pts[static_cast<std::size_t>(j - 1)] = t;
    }
    return DesignPoints(std::move(pts));
}

BasisFamily BasisFamily::fourier_scaled(int p_scale) {
    if (p_scale < 1) {
        throw std::invalid_argument("fourier_scaled: p_scale must be >= 1");
    }
    return BasisFamily(BasisKind::fourier_scaled, p_scale);
}

BasisFamily BasisFamily::cosine() { return BasisFamily(BasisKind::cosine, 0); }

BasisFamily BasisFamily::brownian_bridge_kl() {
    return BasisFamily(BasisKind::brownian_bridge_kl, 0);
}

BasisFamily BasisFamily::custom(Mat table, DesignPoints points) {
    if (table.rows() < 1 || table.cols() != points.size()) {
        throw std::invalid_argument("custom basis: table must be |Lambda| x p");
    }
    BasisFamily b(BasisKind::custom, 0);
    b.table_ = std::move(table);
    b.table_pts_ = points.values();
    return b;
}

BasisFamily BasisFamily::custom_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open basis file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty basis file: " + path);
    }
    std::vector<double> pts;
    {
        std::stringstream header(line);
        std::string cell;
        std::getline(header, cell, ',');  // "lambda"
        while (std::getline(header, cell, ',')) pts.push_back(std::stod(cell));
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const int lambda = std::stoi(cell);
        if (lambda != static_cast<int>(rows.size()) + 1) {
            throw std::runtime_error("custom basis rows must list lambda = 1, 2, ... in order");
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != pts.size()) {
            throw std::runtime_error("custom basis row width does not match header");
        }
        rows.push_back(std::move(row));
    }
    Mat table(static_cast<Index>(rows.size()), static_cast<Index>(pts.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            table(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return custom(std::move(table), DesignPoints(std::move(pts)));
}

int BasisFamily::max_index() const {
    return kind_ == BasisKind::custom ? static_cast<int>(table_.rows()) : 0;
}

double BasisFamily::eval(int lambda, double t) const {
    if (lambda < 1) {
        throw std::invalid_argument("indices start at 1");
    }
    switch (kind_) {
        case BasisKind::fourier_scaled: {
            const double scale = 1.0 / std::sqrt(static_cast<double>(p_scale_));
            if (lambda == 1) return scale;
            if (lambda % 2 == 0) {
                return std::sqrt(2.0) * scale * std::cos(2.0 * kPi * (lambda / 2) * t);
            }
            return std::sqrt(2.0) * scale * std::sin(2.0 * kPi * ((lambda - 1) / 2) * t);
        }
        case BasisKind::cosine:
            return std::cos(lambda * kPi * t);
        case BasisKind::brownian_bridge_kl:
            return std::sqrt(2.0) * std::sin(lambda * kPi * t);
        case BasisKind::custom: {
            if (lambda > static_cast<int>(table_.rows())) {
                throw std::invalid_argument("custom basis: index beyond table");
            }
            for (std::size_t j = 0; j < table_pts_.size(); ++j) {
                if (std::abs(table_pts_[j] - t) <= 1e-12) {
                    return table_(lambda - 1, static_cast<Index>(j));
                }
            }
            throw std::invalid_argument("custom basis: t is not a tabulated design point");
        }
    }
    throw std::logic_error("unreachable");
}

double eval_basis(const BasisFamily& basis, int lambda, double t) {
    return basis.eval(lambda, t);
}

DesignMatrix design_matrix(const BasisFamily& basis, int m_size, const DesignPoints& points) {
    if (m_size < 1) {
        throw std::invalid_argument("design_matrix: m_size must be >= 1");
    }
    std::vector<int> model(static_cast<std::size_t>(m_size));
    for (int i = 0; i < m_size; ++i) model[static_cast<std::size_t>(i)] = i + 1;
    return design_matrix(basis, std::move(model), points);
}

DesignMatrix design_matrix(const BasisFamily& basis, std::vector<int> model,
                           const DesignPoints& points) {
    if (model.empty()) {
        throw std::invalid_argument("design_matrix: empty model");
    }
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (model[i] < 1) throw std::invalid_argument("indices start at 1");
        if (i > 0 && model[i] <= model[i - 1]) {
            throw std::invalid_argument("design_matrix: model indices must be ascending");
        }
    }
    const int p = points.size();
    Mat g(p, static_cast<Index>(model.size()));
    for (std::size_t k = 0; k < model.size(); ++k) {
        for (int j = 0; j < p; ++j) {
            g(j, static_cast<Index>(k)) = basis.eval(model[k], points[j]);
        }
    }
    Projector proj = projector(g);
    return DesignMatrix{std::move(g), std::move(model), basis, points, std::move(proj)};
}

std::vector<DesignMatrix> nested_collection(const BasisFamily& basis, int M,
                                            const DesignPoints& points) {
    if (M < 1) {
        throw std::invalid_argument("nested_collection: M must be >= 1");
    }
    std::vector<DesignMatrix> out;
    out.reserve(static_cast<std::size_t>(M));
    for (int m = 1; m <= M; ++m) out.push_back(design_matrix(basis, m, points));
    return out;
}

}  // namespace covsel
