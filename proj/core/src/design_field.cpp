#include "varibc/design_field.hpp"

#include "varibc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varibc {

void ProjectionParams::validate() const {
    if (!(b > 1.0)) throw ConfigValidationError("b", "must be > 1");
    if (!(P >= 1.0)) throw ConfigValidationError("P", "must be >= 1");
    if (!(Q >= 1.0)) throw ConfigValidationError("Q", "must be >= 1");
    if (!(r > 0.0)) throw ConfigValidationError("r", "must be > 0");
    if (!(r_min > 0.0)) throw ConfigValidationError("r_min", "must be > 0");
    if (!(E_min < E0) || !(E_min > 0.0)) throw ConfigValidationError("E_min", "must satisfy 0 < E_min < E0");
    if (!(p_simp >= 1.0)) throw ConfigValidationError("p_simp", "must be >= 1");
    if (!(beta > 0.0)) throw ConfigValidationError("beta", "must be > 0");
    if (!(t_s > 0.0)) throw ConfigValidationError("t_s", "must be > 0");
    if (!(E_s > 0.0)) throw ConfigValidationError("E_s", "must be > 0");
}

SparseRowMatrix build_filter_matrix(const MeshModel& mesh, double r_min) {
    const auto& design = mesh.designable_elements();
    const int n = static_cast<int>(design.size());
    SparseRowMatrix W(n, n);
    if (n == 0) return W;

    // bucket centroids on a grid of cell size r_min
    Point lo = mesh.centroid(design[0]), hi = lo;
    for (int e : design) {
        lo = lo.cwiseMin(mesh.centroid(e));
        hi = hi.cwiseMax(mesh.centroid(e));
    }
    const double cell = r_min;
    const int nx = static_cast<int>((hi.x() - lo.x()) / cell) + 1;
    const int ny = static_cast<int>((hi.y() - lo.y()) / cell) + 1;
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nx) * ny);
    auto cell_of = [&](const Point& p) {
        const int i = std::min(nx - 1, static_cast<int>((p.x() - lo.x()) / cell));
        const int j = std::min(ny - 1, static_cast<int>((p.y() - lo.y()) / cell));
        return std::pair{i, j};
    };
    for (int k = 0; k < n; ++k) {
        auto [i, j] = cell_of(mesh.centroid(design[k]));
        buckets[static_cast<std::size_t>(j) * nx + i].push_back(k);
    }

    std::vector<Eigen::Triplet<double>> trips;
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < n; ++k) {
        const Point& c = mesh.centroid(design[k]);
        auto [ci, cj] = cell_of(c);
        row.clear();
        double sum = 0.0;
        for (int j = std::max(0, cj - 1); j <= std::min(ny - 1, cj + 1); ++j) {
            for (int i = std::max(0, ci - 1); i <= std::min(nx - 1, ci + 1); ++i) {
                for (int m : buckets[static_cast<std::size_t>(j) * nx + i]) {
                    const double w = std::max(0.0, r_min - (mesh.centroid(design[m]) - c).norm());
                    if (w > 0.0) {
                        row.emplace_back(m, w);
                        sum += w;
                    }
                }
            }
        }
        std::sort(row.begin(), row.end());
        for (auto [m, w] : row) trips.emplace_back(k, m, w / sum);
    }
    W.setFromTriplets(trips.begin(), trips.end());
    return W;
}

double smooth_min_distance(const std::vector<Point>& points, const Point& query, double Q,
                           std::vector<Point>* grad) {
    if (points.empty()) throw Error("smooth_min_distance: empty point list");
    const std::size_t n = points.size();
    std::vector<double> dist(n);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = (query - points[i]).norm();
        dmin = std::min(dmin, dist[i]);
    }
    if (grad) grad->assign(n, Point::Zero());
    if (dmin == 0.0) return 0.0;
    // scaled by the true minimum so no term overflows
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::pow(dmin / dist[i], Q);
    const double d = dmin * std::pow(s, -1.0 / Q);
    if (grad) {
        for (std::size_t i = 0; i < n; ++i) {
            const double dd_ddi = std::pow(d / dist[i], Q + 1.0);
            (*grad)[i] = dd_ddi * (points[i] - query) / dist[i];
        }
    }
    return d;
}

double super_gaussian(double d, double A, double b, double r, double P) {
    const double x = d * d / (r * r);
    return A * std::pow(b, -std::pow(x, P));
}

double super_gaussian_slope(double d, double A, double b, double r, double P) {
    if (d == 0.0) return 0.0;
    const double x = d * d / (r * r);
    const double g = A * std::pow(b, -std::pow(x, P));
    return -g * std::log(b) * P * std::pow(x, P - 1.0) * 2.0 * d / (r * r);
}

double simp_modulus(double rho_bar, const ProjectionParams& p) {
    return p.E_min + std::pow(rho_bar, p.p_simp) * (p.E0 - p.E_min);
}

double simp_modulus_slope(double rho_bar, const ProjectionParams& p) {
    if (rho_bar <= 0.0) return p.p_simp == 1.0 ? (p.E0 - p.E_min) : 0.0;
    return p.p_simp * std::pow(rho_bar, p.p_simp - 1.0) * (p.E0 - p.E_min);
}

double energy_interpolation_factor(double rho_bar, const ProjectionParams& p) {
    const double num = std::tanh(p.beta * p.rho0) + std::tanh(p.beta * (std::pow(rho_bar, p.p_simp) - p.rho0));
    const double den = std::tanh(p.beta * p.rho0) + std::tanh(p.beta * (1.0 - p.rho0));
    return num / den;
}

double energy_interpolation_slope(double rho_bar, const ProjectionParams& p) {
    const double den = std::tanh(p.beta * p.rho0) + std::tanh(p.beta * (1.0 - p.rho0));
    const double dpow = rho_bar <= 0.0 ? (p.p_simp == 1.0 ? 1.0 : 0.0)
                                       : p.p_simp * std::pow(rho_bar, p.p_simp - 1.0);
    const double t = std::tanh(p.beta * (std::pow(rho_bar, p.p_simp) - p.rho0));
    return p.beta * (1.0 - t * t) * dpow / den;
}

FieldModel::FieldModel(const MeshModel& mesh, ProjectionParams params, const Point& initial_load)
    : mesh_(&mesh), params_(params) {
    params_.validate();
    filter_ = build_filter_matrix(mesh, params_.r_min);
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double d = (mesh.centroid(e) - initial_load).norm();
        sum += super_gaussian(d, 1.0, params_.b, params_.r, params_.P) * mesh.volume(e);
    }
    if (!(sum > 0.0)) throw Error("initial load point projects onto no element");
    load_amplitude_ = 1.0 / sum;
}

Eigen::VectorXd FieldModel::support_stiffness(const std::vector<Point>& supports) const {
    const auto& m = *mesh_;
    const auto& p = params_;
    Eigen::VectorXd k = Eigen::VectorXd::Zero(m.num_elements());
    if (supports.empty()) return k;
    const double coef = p.G_s() / p.t_s;
    for (int e = 0; e < m.num_elements(); ++e) {
        const double d = smooth_min_distance(supports, m.centroid(e), p.Q);
        k[e] = coef * m.area(e) * super_gaussian(d, 1.0, p.b, p.r, p.P);
    }
    return k;
}

Eigen::VectorXd FieldModel::load_magnitude(const Point& load) const {
    const auto& m = *mesh_;
    Eigen::VectorXd f(m.num_elements());
    for (int e = 0; e < m.num_elements(); ++e)
        f[e] = super_gaussian((m.centroid(e) - load).norm(), load_amplitude_, params_.b, params_.r, params_.P);
    return f;
}

namespace {

// Smooth maximum (a^Q + c^Q)^(1/Q) and its partials, scaled against overflow.
struct SmoothMax {
    double value, da, dc;
};

SmoothMax smooth_max(double a, double c, double Q) {
    const double m = std::max(a, c);
    if (m <= 0.0) return {0.0, a >= c ? 1.0 : 0.0, a >= c ? 0.0 : 1.0};
    const double sa = a / m, sc = c / m;
    const double s = std::pow(sa, Q) + std::pow(sc, Q);
    const double scale = std::pow(s, 1.0 / Q - 1.0);
    return {m * std::pow(s, 1.0 / Q), std::pow(sa, Q - 1.0) * scale, std::pow(sc, Q - 1.0) * scale};
}

}  // namespace

FieldState FieldModel::evaluate(const DesignVector& design) const {
    const auto& m = *mesh_;
    const auto& p = params_;
    const int ne = m.num_elements();
    if (design.rho.size() != m.num_designable()) throw Error("density vector length mismatch");

    FieldState s;
    s.load_amplitude = load_amplitude_;
    const Eigen::VectorXd filtered = filter_ * design.rho;
    const std::vector<Point> bc = design.bc_points();

    s.rho_filtered.resize(ne);
    s.rho_projected.resize(ne);
    s.rho_physical.resize(ne);
    for (int e = 0; e < ne; ++e) {
        const double d = smooth_min_distance(bc, m.centroid(e), p.Q);
        s.rho_projected[e] = super_gaussian(d, 1.0, p.b, p.r, p.P);
        switch (m.tag(e)) {
            case ElementTag::solid:
                s.rho_filtered[e] = 1.0;
                s.rho_physical[e] = 1.0;
                break;
            case ElementTag::void_:
                s.rho_filtered[e] = 0.0;
                s.rho_physical[e] = 0.0;
                break;
            case ElementTag::designable: {
                const double rt = filtered[m.designable_index(e)];
                s.rho_filtered[e] = rt;
                s.rho_physical[e] = std::min(1.0, smooth_max(rt, s.rho_projected[e], p.Q).value);
                break;
            }
        }
    }

    s.modulus.resize(ne);
    s.gamma.resize(ne);
    s.dmodulus.resize(ne);
    s.dgamma.resize(ne);
    for (int e = 0; e < ne; ++e) {
        const double r = s.rho_physical[e];
        s.modulus[e] = simp_modulus(r, p);
        s.dmodulus[e] = simp_modulus_slope(r, p);
        s.gamma[e] = energy_interpolation_factor(r, p);
        s.dgamma[e] = energy_interpolation_slope(r, p);
    }
    s.spring = support_stiffness(design.supports);
    s.load = load_magnitude(design.load);
    return s;
}

FieldJacobians FieldModel::partials(const DesignVector& design, const FieldState& s) const {
    const auto& m = *mesh_;
    const auto& p = params_;
    const int ne = m.num_elements();
    const DesignLayout layout = design.layout();
    const int nz = layout.size();
    const int ns = layout.num_supports;
    const std::vector<Point> bc = design.bc_points();

    std::vector<Eigen::Triplet<double>> t_rho, t_k, t_f;
    std::vector<Point> grad;
    const double kcoef = p.G_s() / p.t_s;

    for (int e = 0; e < ne; ++e) {
        const Point& c = m.centroid(e);

        // physical density: filter chain and projection chain
        if (m.tag(e) == ElementTag::designable) {
            const double rt = s.rho_filtered[e];
            const double rp = s.rho_projected[e];
            const SmoothMax sm = smooth_max(rt, rp, p.Q);
            if (sm.value < 1.0) {
                const int row = m.designable_index(e);
                if (sm.da != 0.0)
                    for (SparseRowMatrix::InnerIterator it(filter_, row); it; ++it)
                        t_rho.emplace_back(e, layout.rho(static_cast<int>(it.col())), sm.da * it.value());
                if (sm.dc != 0.0) {
                    const double d = smooth_min_distance(bc, c, p.Q, &grad);
                    const double slope = sm.dc * super_gaussian_slope(d, 1.0, p.b, p.r, p.P);
                    if (slope != 0.0) {
                        for (int i = 0; i < ns; ++i) {
                            t_rho.emplace_back(e, layout.xs(i), slope * grad[i].x());
                            t_rho.emplace_back(e, layout.ys(i), slope * grad[i].y());
                        }
                        t_rho.emplace_back(e, layout.xf(), slope * grad[ns].x());
                        t_rho.emplace_back(e, layout.yf(), slope * grad[ns].y());
                    }
                }
            }
        }

        if (ns > 0) {
            const double d = smooth_min_distance(design.supports, c, p.Q, &grad);
            const double slope = kcoef * m.area(e) * super_gaussian_slope(d, 1.0, p.b, p.r, p.P);
            if (slope != 0.0) {
                for (int i = 0; i < ns; ++i) {
                    t_k.emplace_back(e, layout.xs(i), slope * grad[i].x());
                    t_k.emplace_back(e, layout.ys(i), slope * grad[i].y());
                }
            }
        }

        {
            const Point diff = design.load - c;
            const double d = diff.norm();
            if (d > 0.0) {
                const double slope = super_gaussian_slope(d, load_amplitude_, p.b, p.r, p.P);
                if (slope != 0.0) {
                    t_f.emplace_back(e, layout.xf(), slope * diff.x() / d);
                    t_f.emplace_back(e, layout.yf(), slope * diff.y() / d);
                }
            }
        }
    }

    FieldJacobians J;
    J.rho_physical.resize(ne, nz);
    J.rho_physical.setFromTriplets(t_rho.begin(), t_rho.end());
    J.spring.resize(ne, nz);
    J.spring.setFromTriplets(t_k.begin(), t_k.end());
    J.load.resize(ne, nz);
    J.load.setFromTriplets(t_f.begin(), t_f.end());
    J.modulus = s.dmodulus.asDiagonal() * J.rho_physical;
    J.gamma = s.dgamma.asDiagonal() * J.rho_physical;
    return J;
}

double volume_fraction(const Eigen::VectorXd& rho_physical, const MeshModel& mesh) {
    double num = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) num += rho_physical[e] * mesh.volume(e);
    return num / mesh.total_volume();
}

}  // namespace varibc
