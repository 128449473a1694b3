#pragma once

#include <Eigen/Core>

#include <string>

namespace varibc {

/// Method of Moving Asymptotes with the standard parameter set
/// (asymptote init 0.5, adaptation 1.2 / 0.7, albefa 0.1) for problems
///   min f0(x)  s.t.  f_i(x) <= 0,  xmin <= x <= xmax,
/// written with a0 = 1, a_i = 0, c_i = 1000, d_i = 1.
struct MmaSettings {
    double asyinit = 0.5;
    double asyincr = 1.2;
    double asydecr = 0.7;
    double albefa = 0.1;
    double raa0 = 1e-5;
    double a0 = 1.0;
    double c = 1000.0;
    double d = 1.0;
    double epsimin = 1e-7;
};

class Mma {
public:
    Mma(int n, int m, MmaSettings settings = {});

    int num_variables() const { return n_; }
    int num_constraints() const { return m_; }
    int iteration() const { return iter_; }
    const Eigen::VectorXd& low() const { return low_; }
    const Eigen::VectorXd& upp() const { return upp_; }

    /// One MMA step from x. `dfdx` is m x n; `move` is the per-variable
    /// move limit in the same units as x. Returns the new iterate, which
    /// satisfies xmin <= x_new <= xmax and |x_new - x| <= move.
    Eigen::VectorXd update(const Eigen::VectorXd& x, const Eigen::VectorXd& df0dx,
                           const Eigen::VectorXd& fval, const Eigen::MatrixXd& dfdx,
                           const Eigen::VectorXd& xmin, const Eigen::VectorXd& xmax,
                           const Eigen::VectorXd& move);

    /// True when the last update fell back to a steepest-descent step.
    bool used_fallback() const { return fallback_; }
    const std::string& fallback_reason() const { return reason_; }

private:
    int n_, m_;
    MmaSettings s_;
    int iter_ = 0;
    Eigen::VectorXd low_, upp_, xold1_, xold2_;
    bool fallback_ = false;
    std::string reason_;
};

}  // namespace varibc
