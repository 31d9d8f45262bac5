#include "actirehab/optimize.hpp"

#include <cmath>
#include <limits>

#include "actirehab/error.hpp"

namespace actirehab {

namespace {

struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Eigen::VectorXd clamp(const Eigen::VectorXd& x) const {
        return x.cwiseMax(lo).cwiseMin(hi);
    }
    // Gradient components that can still decrease f without leaving the box.
    Eigen::VectorXd projected(const Eigen::VectorXd& x, const Eigen::VectorXd& g) const {
        Eigen::VectorXd pg = g;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if ((x(i) <= lo(i) && g(i) > 0.0) || (x(i) >= hi(i) && g(i) < 0.0)) pg(i) = 0.0;
        }
        return pg;
    }
};

}  // namespace

BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options) {
    const auto dim = x0.size();
    const double inf = std::numeric_limits<double>::infinity();
    Box box{options.lower.size() == dim ? options.lower : Eigen::VectorXd::Constant(dim, -inf),
            options.upper.size() == dim ? options.upper : Eigen::VectorXd::Constant(dim, inf)};

    BfgsResult res;
    res.x = box.clamp(x0);
    Eigen::VectorXd g(dim);
    res.value = f(res.x, &g);
    if (!std::isfinite(res.value) || !g.allFinite()) {
        throw OptimFailure("objective is not finite at the starting point");
    }
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);
    bool scaled = false;

    for (int it = 0; it < options.max_iterations; ++it) {
        Eigen::VectorXd pg = box.projected(res.x, g);
        if (pg.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            res.converged = true;
            res.iterations = it;
            res.gradient = g;
            return res;
        }
        Eigen::VectorXd dir = -h_inv * g;
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (pg(i) == 0.0) dir(i) = 0.0;  // pinned at a bound
        }
        if (dir.dot(pg) >= 0.0) {
            h_inv.setIdentity();
            scaled = false;
            dir = -pg;
        }

        double step = 1.0;
        Eigen::VectorXd x_new;
        Eigen::VectorXd g_new(dim);
        double f_new = inf;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = box.clamp(res.x + step * dir);
            f_new = f(x_new, &g_new);
            if (std::isfinite(f_new) && g_new.allFinite() &&
                f_new <= res.value + 1e-4 * g.dot(x_new - res.x)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!(h_inv.isIdentity())) {
                // Retry from steepest descent before giving up.
                h_inv.setIdentity();
                scaled = false;
                continue;
            }
            res.iterations = it;
            res.gradient = g;
            res.converged = false;
            return res;
        }

        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                h_inv *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
            h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) +
                    rho * s * s.transpose();
        }
        res.x = x_new;
        res.value = f_new;
        g = g_new;
        if (s.lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + res.x.lpNorm<Eigen::Infinity>())) {
            res.iterations = it + 1;
            res.gradient = g;
            res.converged = box.projected(res.x, g).lpNorm<Eigen::Infinity>() <
                            options.gradient_tolerance;
            return res;
        }
    }
    res.iterations = options.max_iterations;
    res.gradient = g;
    res.converged = box.projected(res.x, g).lpNorm<Eigen::Infinity>() < options.gradient_tolerance;
    return res;
}

}  // namespace actirehab
