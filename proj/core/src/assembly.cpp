#include "varibc/assembly.hpp"

#include "varibc/errors.hpp"

#include <algorithm>
#include <tuple>

namespace varibc {

Eigen::VectorXd GlobalSystem::residual(double lambda_x, double lambda_y) const {
    return lambda_x * F_ext_x + lambda_y * F_ext_y + F_counter - F_int;
}

Eigen::VectorXd assemble_support_diagonal(const Eigen::VectorXd& spring, const MeshModel& mesh) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(mesh.num_dofs());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double k = spring[e] / 3.0;
        if (k == 0.0) continue;
        for (int n : mesh.triangle(e)) {
            d[2 * n] += k;
            d[2 * n + 1] += k;
        }
    }
    return d;
}

SparseMatrix assemble_support_matrix(const Eigen::VectorXd& spring, const MeshModel& mesh) {
    const Eigen::VectorXd d = assemble_support_diagonal(spring, mesh);
    SparseMatrix K(d.size(), d.size());
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] != 0.0) t.emplace_back(i, i, d[i]);
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_external_refs(const Eigen::VectorXd& load,
                                                                   const MeshModel& mesh) {
    Eigen::VectorXd fx = Eigen::VectorXd::Zero(mesh.num_dofs());
    Eigen::VectorXd fy = Eigen::VectorXd::Zero(mesh.num_dofs());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double share = load[e] * mesh.volume(e) / 3.0;
        if (share == 0.0) continue;
        for (int n : mesh.triangle(e)) {
            fx[2 * n] += share;
            fy[2 * n + 1] += share;
        }
    }
    return {fx, fy};
}

Assembler::Assembler(const MeshModel& mesh, MaterialParams material, std::vector<OutputSpring> outputs)
    : mesh_(&mesh), material_(material), outputs_(std::move(outputs)) {
    const int n = mesh.num_dofs();
    for (const auto& s : outputs_)
        if (s.dof < 0 || s.dof >= n) throw Error("output spring DOF out of range");

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(36 * mesh.num_elements() + n);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto d = dofs(e);
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) t.emplace_back(d[a], d[b], 1.0);
    }
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
    pattern_.resize(n, n);
    pattern_.setFromTriplets(t.begin(), t.end());
    pattern_.makeCompressed();

    auto slot = [&](int row, int col) {
        const int* begin = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[col];
        const int* end = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[col + 1];
        const int* it = std::lower_bound(begin, end, row);
        return static_cast<int>(it - pattern_.innerIndexPtr());
    };
    element_slots_.resize(36 * static_cast<size_t>(mesh.num_elements()));
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto d = dofs(e);
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) element_slots_[36 * e + 6 * a + b] = slot(d[a], d[b]);
    }
    diagonal_slots_.resize(n);
    for (int i = 0; i < n; ++i) diagonal_slots_[i] = slot(i, i);
}

std::array<int, 6> Assembler::dofs(int e) const {
    const auto& t = mesh_->triangle(e);
    return {2 * t[0], 2 * t[0] + 1, 2 * t[1], 2 * t[1] + 1, 2 * t[2], 2 * t[2] + 1};
}

ElementGeometry Assembler::element_geometry(int e) const {
    return {mesh_->shape_gradients(e), mesh_->volume(e), e};
}

Vector6 Assembler::element_displacement(int e, const Eigen::VectorXd& U) const {
    const auto d = dofs(e);
    Vector6 u;
    for (int a = 0; a < 6; ++a) u[a] = U[d[a]];
    return u;
}

void Assembler::fill(const Eigen::VectorXd& U, const FieldState& fields, bool nonlinear,
                     Eigen::VectorXd* F, SparseMatrix& K) const {
    const int n = num_dofs();
    if (K.rows() != n || K.nonZeros() != pattern_.nonZeros()) K = pattern_;
    double* values = K.valuePtr();
    std::fill(values, values + K.nonZeros(), 0.0);
    if (F) F->setZero(n);

    for (int e = 0; e < mesh_->num_elements(); ++e) {
        const ElementGeometry geo = element_geometry(e);
        const auto d = dofs(e);
        const double E = fields.modulus[e];
        Matrix6 k;
        if (nonlinear) {
            const ElementResponse r = element_response(geo, element_displacement(e, U), E,
                                                       fields.gamma[e], material_);
            k = r.tangent;
            if (F)
                for (int a = 0; a < 6; ++a) (*F)[d[a]] += r.force[a];
        } else {
            k = varibc::linear_stiffness(geo, E, material_);
        }
        const int* s = &element_slots_[36 * e];
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) values[s[6 * a + b]] += k(a, b);
    }

    const Eigen::VectorXd ks = assemble_support_diagonal(fields.spring, *mesh_);
    for (int i = 0; i < n; ++i) {
        values[diagonal_slots_[i]] += ks[i];
        if (F) (*F)[i] += ks[i] * U[i];
    }
    for (const auto& s : outputs_) {
        values[diagonal_slots_[s.dof]] += s.stiffness;
        if (F) (*F)[s.dof] += s.stiffness * U[s.dof];
    }
}

GlobalSystem Assembler::assemble(const Eigen::VectorXd& U, const FieldState& fields,
                                 const Eigen::VectorXd& counter) const {
    GlobalSystem sys;
    update(U, fields, sys);
    std::tie(sys.F_ext_x, sys.F_ext_y) = assemble_external_refs(fields.load, *mesh_);
    sys.F_counter = counter.size() == 0 ? Eigen::VectorXd::Zero(num_dofs()) : counter;
    if (sys.F_counter.size() != num_dofs()) throw Error("counter force length mismatch");
    sys.support_diag = assemble_support_diagonal(fields.spring, *mesh_);
    return sys;
}

void Assembler::update(const Eigen::VectorXd& U, const FieldState& fields, GlobalSystem& system) const {
    if (U.size() != num_dofs()) throw Error("displacement vector length mismatch");
    fill(U, fields, true, &system.F_int, system.K_T);
}

Eigen::VectorXd Assembler::internal_force(const Eigen::VectorXd& U, const FieldState& fields) const {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(num_dofs());
    for (int e = 0; e < mesh_->num_elements(); ++e) {
        const auto d = dofs(e);
        const Vector6 f = element_internal_force(element_geometry(e), element_displacement(e, U),
                                                 fields.modulus[e], fields.gamma[e], material_);
        for (int a = 0; a < 6; ++a) F[d[a]] += f[a];
    }
    const Eigen::VectorXd ks = assemble_support_diagonal(fields.spring, *mesh_);
    F += ks.cwiseProduct(U);
    for (const auto& s : outputs_) F[s.dof] += s.stiffness * U[s.dof];
    return F;
}

SparseMatrix Assembler::linear_stiffness(const FieldState& fields) const {
    SparseMatrix K;
    fill(Eigen::VectorXd::Zero(num_dofs()), fields, false, nullptr, K);
    return K;
}

double Assembler::energy(const Eigen::VectorXd& U, const FieldState& fields) const {
    double w = 0.0;
    for (int e = 0; e < mesh_->num_elements(); ++e)
        w += element_energy(element_geometry(e), element_displacement(e, U), fields.modulus[e],
                            fields.gamma[e], material_);
    const Eigen::VectorXd ks = assemble_support_diagonal(fields.spring, *mesh_);
    w += 0.5 * U.dot(ks.cwiseProduct(U));
    for (const auto& s : outputs_) w += 0.5 * s.stiffness * U[s.dof] * U[s.dof];
    return w;
}

SparseMatrix Assembler::residual_design_partials(const Eigen::VectorXd& U, double lambda_x,
                                                 double lambda_y, const FieldState& fields,
                                                 const FieldJacobians& jac) const {
    const int n = num_dofs();
    const int ne = mesh_->num_elements();
    // element-field sensitivity of R, one column per element and field
    std::vector<Eigen::Triplet<double>> tE, tg, tk, tf;
    for (int e = 0; e < ne; ++e) {
        const auto d = dofs(e);
        const ElementForcePartials p = element_force_partials(
            element_geometry(e), element_displacement(e, U), fields.modulus[e], fields.gamma[e], material_);
        const double vol3 = mesh_->volume(e) / 3.0;
        for (int a = 0; a < 6; ++a) {
            tE.emplace_back(d[a], e, -p.dmodulus[a]);
            tg.emplace_back(d[a], e, -p.dgamma[a]);
            tk.emplace_back(d[a], e, -U[d[a]] / 3.0);
            tf.emplace_back(d[a], e, vol3 * (a % 2 == 0 ? lambda_x : lambda_y));
        }
    }
    SparseMatrix GE(n, ne), Gg(n, ne), Gk(n, ne), Gf(n, ne);
    GE.setFromTriplets(tE.begin(), tE.end());
    Gg.setFromTriplets(tg.begin(), tg.end());
    Gk.setFromTriplets(tk.begin(), tk.end());
    Gf.setFromTriplets(tf.begin(), tf.end());
    SparseMatrix out = GE * jac.modulus;
    out += Gg * jac.gamma;
    out += Gk * jac.spring;
    out += Gf * jac.load;
    return out;
}

Eigen::VectorXd Assembler::residual_design_vjp(const Eigen::VectorXd& psi, const Eigen::VectorXd& U,
                                               double lambda_x, double lambda_y,
                                               const FieldState& fields,
                                               const FieldJacobians& jac) const {
    const int ne = mesh_->num_elements();
    Eigen::VectorXd wE(ne), wg(ne), wk(ne), wf(ne);
    for (int e = 0; e < ne; ++e) {
        const auto d = dofs(e);
        Vector6 pe;
        for (int a = 0; a < 6; ++a) pe[a] = psi[d[a]];
        const ElementForcePartials p = element_force_partials(
            element_geometry(e), element_displacement(e, U), fields.modulus[e], fields.gamma[e], material_);
        wE[e] = -pe.dot(p.dmodulus);
        wg[e] = -pe.dot(p.dgamma);
        double su = 0.0, sf = 0.0;
        for (int a = 0; a < 6; ++a) {
            su += pe[a] * U[d[a]];
            sf += pe[a] * (a % 2 == 0 ? lambda_x : lambda_y);
        }
        wk[e] = -su / 3.0;
        wf[e] = sf * mesh_->volume(e) / 3.0;
    }
    Eigen::VectorXd g = jac.modulus.transpose() * wE;
    g += jac.gamma.transpose() * wg;
    g += jac.spring.transpose() * wk;
    g += jac.load.transpose() * wf;
    return g;
}

}  // namespace varibc
