#pragma once

#include "varibc/design_field.hpp"
#include "varibc/element.hpp"
#include "varibc/material.hpp"
#include "varibc/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <utility>
#include <vector>

namespace varibc {

/// Linear spring from one DOF to ground.
struct OutputSpring {
    int dof = -1;
    double stiffness = 0.0;  // N/m
};

/// Assembled global quantities at one displacement state.
struct GlobalSystem {
    Eigen::VectorXd F_int;        // element forces + support springs + output springs [N]
    SparseMatrix K_T;             // dF_int/dU [N/m]
    Eigen::VectorXd F_ext_x;      // reference load vectors [N per unit lambda]
    Eigen::VectorXd F_ext_y;
    Eigen::VectorXd F_counter;    // constant nodal loads [N]
    Eigen::VectorXd support_diag; // diagonal of the support spring matrix [N/m]

    /// R = lambda_x F_x + lambda_y F_y + F_counter - F_int
    Eigen::VectorXd residual(double lambda_x, double lambda_y) const;
};

/// Diagonal of the node-lumped support matrix: each node receives k_e/3 from
/// every incident element on both of its DOFs.
Eigen::VectorXd assemble_support_diagonal(const Eigen::VectorXd& spring, const MeshModel& mesh);
SparseMatrix assemble_support_matrix(const Eigen::VectorXd& spring, const MeshModel& mesh);

/// Reference load vectors: f_e V_e / 3 to each node of element e, on the x
/// DOFs for the first vector and on the y DOFs for the second.
std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_external_refs(const Eigen::VectorXd& load,
                                                                   const MeshModel& mesh);

/// Global assembly for a fixed mesh. The sparsity pattern of K_T is built
/// once at construction; every assembly fills values in element order, so
/// results are bitwise reproducible.
class Assembler {
public:
    Assembler(const MeshModel& mesh, MaterialParams material, std::vector<OutputSpring> outputs = {});

    const MeshModel& mesh() const { return *mesh_; }
    const MaterialParams& material() const { return material_; }
    const std::vector<OutputSpring>& output_springs() const { return outputs_; }
    int num_dofs() const { return mesh_->num_dofs(); }

    ElementGeometry element_geometry(int e) const;
    Vector6 element_displacement(int e, const Eigen::VectorXd& U) const;

    /// Full system at U. Throws NonPositiveJacobian naming the element.
    GlobalSystem assemble(const Eigen::VectorXd& U, const FieldState& fields,
                          const Eigen::VectorXd& counter) const;
    /// Refreshes F_int and K_T of an existing system in place.
    void update(const Eigen::VectorXd& U, const FieldState& fields, GlobalSystem& system) const;
    Eigen::VectorXd internal_force(const Eigen::VectorXd& U, const FieldState& fields) const;
    /// Small-strain stiffness with the same springs (the gamma = 0 limit of K_T).
    SparseMatrix linear_stiffness(const FieldState& fields) const;
    /// Total stored energy of elements and springs; F_int is its gradient.
    double energy(const Eigen::VectorXd& U, const FieldState& fields) const;

    /// dR/dzeta as a sparse (n_dofs x |zeta|) matrix.
    SparseMatrix residual_design_partials(const Eigen::VectorXd& U, double lambda_x, double lambda_y,
                                          const FieldState& fields, const FieldJacobians& jac) const;
    /// psi^T dR/dzeta without forming the matrix.
    Eigen::VectorXd residual_design_vjp(const Eigen::VectorXd& psi, const Eigen::VectorXd& U,
                                        double lambda_x, double lambda_y, const FieldState& fields,
                                        const FieldJacobians& jac) const;

private:
    std::array<int, 6> dofs(int e) const;
    void fill(const Eigen::VectorXd& U, const FieldState& fields, bool nonlinear,
              Eigen::VectorXd* F, SparseMatrix& K) const;

    const MeshModel* mesh_;
    MaterialParams material_;
    std::vector<OutputSpring> outputs_;
    SparseMatrix pattern_;
    std::vector<int> element_slots_;  // 36 value indices per element, row-major 6x6
    std::vector<int> diagonal_slots_;
};

}  // namespace varibc
