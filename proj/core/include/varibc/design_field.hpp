#pragma once

#include "varibc/design.hpp"
#include "varibc/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace varibc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Parameters of the density filter, super-Gaussian projections and SIMP /
/// energy interpolation. Defaults are the common values used for every
/// problem family; geometric radii and beta are problem specific.
struct ProjectionParams {
    double b = 2.0;         // super-Gaussian base
    double P = 4.0;         // super-Gaussian exponent
    double Q = 12.0;        // smooth min/max exponent
    double r = 2.5e-3;      // projection radius [m]
    double r_min = 3e-3;    // filter radius [m]
    double E_s = 2000e6;    // support material modulus [Pa]
    double nu_s = 0.3;
    double t_s = 0.01;      // support thickness [m]
    double E0 = 10e6;       // design material modulus [Pa]
    double E_min = 10e6 * 1e-9;
    double p_simp = 3.0;
    double beta = 500.0;
    double rho0 = 0.0;

    double G_s() const { return E_s / (2.0 * (1.0 + nu_s)); }
    /// Throws ConfigValidationError on out-of-range values.
    void validate() const;
};

/// Row-normalized density filter over the designable elements only.
SparseRowMatrix build_filter_matrix(const MeshModel& mesh, double r_min);

/// p-norm smoothed minimum of the distances from `query` to `points`.
/// Returns 0 when the query coincides with a point. If `grad` is non-null it
/// receives d(distance)/d(point_i) for each point (zero in the coincident case).
double smooth_min_distance(const std::vector<Point>& points, const Point& query, double Q,
                           std::vector<Point>* grad = nullptr);

/// A * b^(-(d^2/r^2)^P).
double super_gaussian(double d, double A, double b, double r, double P);
/// Derivative of super_gaussian with respect to d.
double super_gaussian_slope(double d, double A, double b, double r, double P);

double simp_modulus(double rho_bar, const ProjectionParams& params);
double simp_modulus_slope(double rho_bar, const ProjectionParams& params);

/// Smoothed Heaviside blend between linear and nonlinear kinematics,
/// normalized so that gamma(0) = 0 and gamma(1) = 1 for rho0 = 0.
double energy_interpolation_factor(double rho_bar, const ProjectionParams& params);
double energy_interpolation_slope(double rho_bar, const ProjectionParams& params);

/// Per-element physical quantities derived from a design vector.
struct FieldState {
    Eigen::VectorXd rho_filtered;   // filtered density (fixed elements: their forced value)
    Eigen::VectorXd rho_projected;  // movable solid regions around BC points
    Eigen::VectorXd rho_physical;   // smooth max, clamped, fixed tags applied
    Eigen::VectorXd modulus;        // E_e [Pa]
    Eigen::VectorXd gamma;
    Eigen::VectorXd spring;         // k_e^s [N/m]
    Eigen::VectorXd load;           // f_e [N/m^3]
    double load_amplitude = 0.0;    // A_f [N/m^3]

    Eigen::VectorXd dmodulus;       // dE/drho_bar
    Eigen::VectorXd dgamma;         // dgamma/drho_bar
};

/// Jacobians of the element fields with respect to the flat design vector
/// (rows: elements, columns: design entries).
struct FieldJacobians {
    SparseMatrix rho_physical;
    SparseMatrix modulus;
    SparseMatrix gamma;
    SparseMatrix spring;
    SparseMatrix load;
};

/// Evaluates design fields for a fixed mesh. The filter matrix and the load
/// amplitude A_f are computed once at construction (A_f from the initial
/// load position) and stay constant afterward.
class FieldModel {
public:
    FieldModel(const MeshModel& mesh, ProjectionParams params, const Point& initial_load);

    const MeshModel& mesh() const { return *mesh_; }
    const ProjectionParams& params() const { return params_; }
    const SparseRowMatrix& filter() const { return filter_; }
    double load_amplitude() const { return load_amplitude_; }

    FieldState evaluate(const DesignVector& design) const;
    FieldJacobians partials(const DesignVector& design, const FieldState& state) const;

    /// Support spring constants alone (smooth-min distance to supports).
    Eigen::VectorXd support_stiffness(const std::vector<Point>& supports) const;
    /// Body-force magnitudes alone (plain distance to the load point).
    Eigen::VectorXd load_magnitude(const Point& load) const;

private:
    const MeshModel* mesh_;
    ProjectionParams params_;
    SparseRowMatrix filter_;
    double load_amplitude_ = 0.0;
};

/// Sum of rho_bar * V_e over the total volume.
double volume_fraction(const Eigen::VectorXd& rho_physical, const MeshModel& mesh);

}  // namespace varibc
