#include "varibc/optimizer.hpp"

#include "varibc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace varibc {

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::converged: return "converged";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::repeated_failure: return "repeated_failure";
    }
    return "unknown";
}

bool convergence_check(const std::vector<IterationRecord>& history, double tol) {
    if (history.empty()) throw Error("convergence check needs at least one iteration");
    const IterationRecord& r = history.back();
    return r.iteration > 0 && !r.failed && r.feasible && r.mean_drho < tol;
}

bool detect_oscillation(const std::vector<IterationRecord>& history, int window) {
    if (window < 3 || static_cast<int>(history.size()) < window) return false;
    std::vector<double> diffs;
    for (size_t k = history.size() - window + 1; k < history.size(); ++k) {
        const double a = history[k - 1].objective, b = history[k].objective;
        if (!std::isfinite(a) || !std::isfinite(b)) return false;
        diffs.push_back(b - a);
    }
    int changes = 0;
    for (size_t k = 1; k < diffs.size(); ++k)
        if (diffs[k] * diffs[k - 1] < 0.0) ++changes;
    return 4 * changes >= 3 * static_cast<int>(diffs.size() - 1);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_history_header(std::ostream& os, const ProblemSpec& spec) {
    os << "iteration,objective,max_violation,mean_drho,max_drho,feasible,failed,solver_iterations,bisections,"
          "oscillating,mma_fallback";
    for (const auto& c : spec.constraints) os << ',' << c.label();
    for (size_t i = 0; i < spec.supports.size(); ++i) os << ",xs" << i + 1 << ",ys" << i + 1;
    os << ",xf,yf,theta\n";
}

void write_history_row(std::ostream& os, const IterationRecord& r) {
    os << r.iteration << ',' << fmt(r.objective) << ',' << fmt(r.max_violation) << ',' << fmt(r.mean_drho) << ','
       << fmt(r.max_drho) << ',' << int(r.feasible) << ',' << int(r.failed) << ',' << r.solver_iterations << ','
       << r.bisections << ',' << int(r.oscillating) << ',' << int(r.mma_fallback);
    for (double c : r.constraints) os << ',' << fmt(c);
    for (const auto& s : r.supports) os << ',' << fmt(s.x()) << ',' << fmt(s.y());
    os << ',' << fmt(r.load.x()) << ',' << fmt(r.load.y()) << ',' << fmt(r.theta) << '\n';
    os.flush();
}

DesignBox design_box(const ProblemSpec& spec, const DesignLayout& l) {
    DesignBox b;
    const int n = l.size();
    b.lower.resize(n);
    b.upper.resize(n);
    b.move.resize(n);
    b.active.assign(n, true);
    for (int j = 0; j < l.num_rho; ++j) {
        b.lower[j] = 0.0;
        b.upper[j] = 1.0;
        b.move[j] = spec.move.rho;
    }
    const auto& B = spec.bounds;
    for (int i = 0; i < l.num_supports; ++i) {
        b.lower[l.xs(i)] = B.support_min.x();
        b.upper[l.xs(i)] = B.support_max.x();
        b.lower[l.ys(i)] = B.support_min.y();
        b.upper[l.ys(i)] = B.support_max.y();
        b.move[l.xs(i)] = b.move[l.ys(i)] = spec.move.support;
        const bool fixed = spec.fixed_bcs || (i < static_cast<int>(spec.support_fixed.size()) && spec.support_fixed[i]);
        b.active[l.xs(i)] = b.active[l.ys(i)] = !fixed;
    }
    b.lower[l.xf()] = B.load_min.x();
    b.upper[l.xf()] = B.load_max.x();
    b.lower[l.yf()] = B.load_min.y();
    b.upper[l.yf()] = B.load_max.y();
    b.move[l.xf()] = b.move[l.yf()] = spec.move.load;
    b.lower[l.theta()] = B.theta_min;
    b.upper[l.theta()] = B.theta_max;
    b.move[l.theta()] = spec.move.theta;
    b.active[l.xf()] = b.active[l.yf()] = b.active[l.theta()] = !spec.fixed_bcs;
    for (int k = 0; k < n; ++k)
        if (b.active[k] && !(b.upper[k] > b.lower[k]))
            throw ConfigValidationError("bounds", "empty bound interval for design entry " + std::to_string(k));
    return b;
}

namespace {

IterationRecord make_record(int iteration, const DesignVector& d, const DesignVector* prev) {
    IterationRecord r;
    r.iteration = iteration;
    r.supports = d.supports;
    r.load = d.load;
    r.theta = d.theta;
    if (prev && d.rho.size() > 0) {
        const Eigen::VectorXd diff = (d.rho - prev->rho).cwiseAbs();
        r.mean_drho = diff.mean();
        r.max_drho = diff.maxCoeff();
    } else if (prev == nullptr) {
        r.mean_drho = r.max_drho = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

// Pulls the load point of `cand` back along the segment from `from` until it
// lies in the mesh.
void keep_load_inside(const MeshModel& mesh, const Point& from, Eigen::VectorXd& cand, const DesignLayout& l) {
    const Point to(cand[l.xf()], cand[l.yf()]);
    if (mesh.try_locate(to)) return;
    double t = 1.0;
    Point p = from;
    for (int k = 0; k < 40; ++k) {
        t *= 0.5;
        const Point q = from + t * (to - from);
        if (mesh.try_locate(q)) {
            p = q;
            break;
        }
    }
    cand[l.xf()] = p.x();
    cand[l.yf()] = p.y();
}

}  // namespace

OptimizationResult run_optimization(const Evaluator& evaluator, const OptimizerConfig& config,
                                    std::ostream* history, const IterationCallback& callback) {
    if (config.max_iterations < 0) throw ConfigValidationError("max_iterations", "must be non-negative");
    const ProblemSpec& spec = evaluator.spec();
    const MeshModel& mesh = evaluator.mesh();

    DesignVector design = spec.initial_design(mesh);
    const DesignLayout layout = design.layout();
    const DesignBox box = design_box(spec, layout);
    Eigen::VectorXd x = design.flatten();
    for (int k = 0; k < layout.size(); ++k)
        if (box.active[k]) x[k] = std::clamp(x[k], box.lower[k], box.upper[k]);

    std::vector<int> active;
    for (int k = 0; k < layout.size(); ++k)
        if (box.active[k]) active.push_back(k);
    const int na = static_cast<int>(active.size());
    const int m = static_cast<int>(spec.constraints.size());
    Eigen::VectorXd range(na), lo(na), hi(na), mv(na);
    for (int i = 0; i < na; ++i) {
        const int k = active[i];
        range[i] = box.upper[k] - box.lower[k];
        lo[i] = 0.0;
        hi[i] = 1.0;
        mv[i] = box.move[k] / range[i];
    }
    Mma mma(na, m, config.mma);

    if (history) write_history_header(*history, spec);

    OptimizationResult result;
    Eigen::VectorXd last_good;
    DesignVector prev_design;
    bool have_prev = false;
    double obj_scale = 0.0;
    int failures = 0;
    int updates = 0;
    bool fallback = false;
    const double sign = spec.objective.maximize ? -1.0 : 1.0;

    for (int iteration = 0;; ++iteration) {
        design = DesignVector::unflatten(x, layout);
        Evaluation ev = evaluator.evaluate(design, true);
        IterationRecord rec = make_record(iteration, design, have_prev ? &prev_design : nullptr);
        rec.mma_fallback = fallback;
        for (const auto& p : ev.paths) {
            rec.solver_iterations += p.total_iterations;
            rec.bisections += p.total_bisections;
        }
        if (ev.failed) {
            rec.failed = true;
            rec.objective = std::numeric_limits<double>::quiet_NaN();
            rec.max_violation = std::numeric_limits<double>::infinity();
        } else {
            rec.objective = ev.objective;
            rec.constraints = ev.constraints;
            rec.max_violation = ev.max_violation(spec);
            rec.feasible = ev.feasible(spec);
        }
        result.history.push_back(rec);
        result.history.back().oscillating = detect_oscillation(result.history, config.oscillation_window);
        if (history) write_history_row(*history, result.history.back());
        if (callback) callback(result.history.back(), ev);
        prev_design = design;
        have_prev = true;

        if (ev.failed) {
            ++failures;
            if (failures > config.max_consecutive_failures || last_good.size() == 0) {
                result.reason = StopReason::repeated_failure;
                result.message = ev.failure;
                if (last_good.size() == 0) {
                    result.design = design;
                    result.evaluation = std::move(ev);
                }
                return result;
            }
            // retreat halfway towards the last successful iterate
            x = 0.5 * (x + last_good);
            fallback = false;
            continue;
        }
        failures = 0;
        last_good = x;
        result.design = design;
        result.evaluation = ev;

        if (convergence_check(result.history, config.density_change_tol)) {
            result.reason = StopReason::converged;
            return result;
        }
        if (updates >= config.max_iterations) {
            result.reason = StopReason::max_iterations;
            return result;
        }

        if (iteration == 0) obj_scale = std::abs(ev.objective) > 0.0 ? std::abs(ev.objective) : 1.0;
        Eigen::VectorXd xa(na), df0(na), fval(m);
        Eigen::MatrixXd dfdx(m, na);
        for (int i = 0; i < na; ++i) {
            const int k = active[i];
            xa[i] = (x[k] - box.lower[k]) / range[i];
            df0[i] = sign * ev.objective_gradient[k] / obj_scale * range[i];
        }
        for (int c = 0; c < m; ++c) {
            const auto& cs = spec.constraints[c];
            const double s = (cs.upper ? 1.0 : -1.0) / cs.scale();
            fval[c] = s * (ev.constraints[c] - cs.bound);
            for (int i = 0; i < na; ++i) dfdx(c, i) = s * ev.constraint_gradients[c][active[i]] * range[i];
        }
        const Eigen::VectorXd xn = mma.update(xa, df0, fval, dfdx, lo, hi, mv);
        fallback = mma.used_fallback();
        ++updates;

        Eigen::VectorXd next = x;
        for (int i = 0; i < na; ++i) {
            const int k = active[i];
            next[k] = box.lower[k] + xn[i] * range[i];
            if (xn[i] == xa[i]) next[k] = x[k];  // no round-off drift on untouched entries
        }
        if (spec.clamp_load_to_domain && box.active[layout.xf()])
            keep_load_inside(mesh, Point(x[layout.xf()], x[layout.yf()]), next, layout);
        x = next;
    }
}

}  // namespace varibc
