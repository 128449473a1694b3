#include "varibc/evaluation.hpp"

#include "varibc/errors.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <memory>
#include <thread>

namespace varibc {

std::vector<const EquilibriumPath*> Evaluation::path_pointers() const {
    std::vector<const EquilibriumPath*> p;
    for (const auto& path : paths) p.push_back(&path);
    return p;
}

double Evaluation::max_violation(const ProblemSpec& spec) const {
    double worst = -1e300;
    for (size_t k = 0; k < spec.constraints.size() && k < constraints.size(); ++k) {
        const auto& c = spec.constraints[k];
        const double g = (c.upper ? constraints[k] - c.bound : c.bound - constraints[k]) / c.scale();
        worst = std::max(worst, g);
    }
    return spec.constraints.empty() ? 0.0 : worst;
}

bool Evaluation::feasible(const ProblemSpec& spec) const {
    return !failed && max_violation(spec) <= 0.0;
}

Evaluator::Evaluator(const ProblemSpec& spec, const MeshModel& mesh, int threads)
    : spec_(&spec),
      mesh_(&mesh),
      field_(mesh, spec.projection, spec.initial_design(mesh).load),
      bound_(spec, mesh),
      assembler_(mesh, MaterialParams::from_poisson(spec.nu, spec.variant), bound_.springs),
      threads_(std::max(1, threads)) {}

Actuation Evaluator::actuation(const DesignVector& design) const {
    return {design.load, design.theta, spec_->stroke};
}

SolverConfig Evaluator::solver_config(int steps) const {
    SolverConfig c = spec_->solver;
    if (steps > 0) c.steps = steps;
    c.trace = nullptr;
    return c;
}

Evaluation Evaluator::solve(const DesignVector& design, int steps) const {
    Evaluation ev;
    ev.design = design;
    ev.fields = field_.evaluate(design);
    const int nc = spec_->num_load_cases();
    ev.paths.resize(nc);
    const Actuation act = actuation(design);
    const SolverConfig cfg = solver_config(steps);

    std::vector<std::exception_ptr> errors(nc);
    auto run = [&](int i) {
        try {
            ev.paths[i] = solve_equilibrium_path(assembler_, ev.fields, bound_.counters[i], act, cfg);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const int workers = std::min(threads_, nc);
    if (workers <= 1) {
        for (int i = 0; i < nc; ++i) run(i);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int i = w; i < nc; i += workers) run(i);
            });
        for (auto& t : pool) t.join();
    }

    for (int i = 0; i < nc; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const PathFailed& e) {
            ev.failed = true;
            ev.fraction_reached = std::min(ev.fraction_reached, e.fraction_reached);
            ev.failure = "load case " + std::to_string(i + 1) + ": " + e.what();
        } catch (const PointOutsideDomain& e) {
            ev.failed = true;
            ev.fraction_reached = 0.0;
            ev.failure = e.what();
        }
        break;
    }
    return ev;
}

double Evaluator::quantity(const QuantityRef& q, const Evaluation& ev) const {
    return evaluate_quantity(q, bound_, ev.path_pointers(), ev.fields, ev.design.theta).value;
}

Evaluation Evaluator::evaluate(const DesignVector& design, bool gradients) const {
    Evaluation ev = solve(design);
    if (ev.failed) return ev;
    ev.objective = quantity(spec_->objective.quantity, ev);
    for (const auto& c : spec_->constraints) ev.constraints.push_back(quantity(c.quantity, ev));
    if (gradients) {
        std::vector<QuantityRef> qs{spec_->objective.quantity};
        for (const auto& c : spec_->constraints) qs.push_back(c.quantity);
        auto g = this->gradients(qs, ev);
        ev.objective_gradient = std::move(g.front());
        ev.constraint_gradients.assign(std::make_move_iterator(g.begin() + 1), std::make_move_iterator(g.end()));
    }
    return ev;
}

std::vector<Eigen::VectorXd> Evaluator::gradients(const std::vector<QuantityRef>& qs, const Evaluation& ev) const {
    if (ev.failed) throw Error("gradients requested for a failed evaluation");
    const FieldJacobians jac = field_.partials(ev.design, ev.fields);
    const DesignLayout layout = ev.design.layout();
    const Actuation act = actuation(ev.design);
    const auto paths = ev.path_pointers();

    std::map<std::pair<int, int>, std::unique_ptr<StateAdjoint>> adjoints;
    auto adjoint_at = [&](int load_case, int step) -> const StateAdjoint& {
        auto& slot = adjoints[{load_case, step}];
        if (!slot)
            slot = std::make_unique<StateAdjoint>(assembler_, ev.fields, jac, ev.design, act,
                                                  bound_.counters[load_case],
                                                  ev.paths[load_case].states[step - 1]);
        return *slot;
    };

    // explicit volume-fraction partial, shared by every vf quantity
    Eigen::VectorXd dvf;
    std::vector<Eigen::VectorXd> out;
    for (const auto& q : qs) {
        const QuantityEvaluation qe = evaluate_quantity(q, bound_, paths, ev.fields, ev.design.theta);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(layout.size());
        if (qe.has_explicit_rho) {
            if (dvf.size() == 0) {
                Eigen::VectorXd w(mesh_->num_elements());
                for (int e = 0; e < mesh_->num_elements(); ++e) w[e] = mesh_->volume(e) / mesh_->total_volume();
                dvf = jac.rho_physical.transpose() * w;
            }
            g += q.factor * dvf;
        }
        for (const auto& t : qe.terms) {
            const StateAdjoint& adj = adjoint_at(t.load_case, t.step);
            const Multipliers m = adj.solve_multipliers(t.dU, t.dlambda);
            g += adj.implicit_gradient(m);
            g[layout.theta()] += t.dtheta;
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace varibc
