#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "actirehab/error.hpp"
#include "actirehab/optimize.hpp"

using namespace actirehab;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double a = 1.0 - x(0);
    const double b = x(1) - x(0) * x(0);
    if (g) {
        g->resize(2);
        (*g)(0) = -2.0 * a - 400.0 * x(0) * b;
        (*g)(1) = 200.0 * b;
    }
    return a * a + 100.0 * b * b;
}

}  // namespace

TEST(Bfgs, Rosenbrock) {
    BfgsOptions opt;
    opt.max_iterations = 2000;
    opt.gradient_tolerance = 1e-8;
    const auto r = minimize_bfgs(rosenbrock, Eigen::Vector2d(-1.2, 1.0), opt);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x(0), 1.0, 1e-6);
    EXPECT_NEAR(r.x(1), 1.0, 1e-6);
    EXPECT_LT(r.value, 1e-12);
}

TEST(Bfgs, QuadraticMatchesLinearSolve) {
    Eigen::Matrix3d a;
    a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    const Eigen::Vector3d b(1, -2, 0.5);
    const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        if (g) *g = a * x - b;
        return 0.5 * x.dot(a * x) - b.dot(x);
    };
    BfgsOptions opt;
    opt.gradient_tolerance = 1e-10;
    const auto r = minimize_bfgs(f, Eigen::Vector3d::Zero(), opt);
    const Eigen::Vector3d expected = a.ldlt().solve(b);
    EXPECT_LT((r.x - expected).norm(), 1e-8);
}

TEST(Bfgs, ActiveBoundHolds) {
    // Unconstrained minimum at (3, -3); the box clips both coordinates.
    const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        if (g) *g = Eigen::Vector2d(2 * (x(0) - 3), 2 * (x(1) + 3));
        return (x(0) - 3) * (x(0) - 3) + (x(1) + 3) * (x(1) + 3);
    };
    BfgsOptions opt;
    opt.lower = Eigen::Vector2d(-1, -1);
    opt.upper = Eigen::Vector2d(1, 1);
    const auto r = minimize_bfgs(f, Eigen::Vector2d(0, 0), opt);
    EXPECT_TRUE(r.converged);
    EXPECT_DOUBLE_EQ(r.x(0), 1.0);
    EXPECT_DOUBLE_EQ(r.x(1), -1.0);
}

TEST(Bfgs, StartOutsideBoxIsProjected) {
    const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        if (g) *g = 2 * x;
        return x.squaredNorm();
    };
    BfgsOptions opt;
    opt.lower = Eigen::Vector2d(0.5, -2);
    opt.upper = Eigen::Vector2d(2, 2);
    const auto r = minimize_bfgs(f, Eigen::Vector2d(10, 10), opt);
    EXPECT_NEAR(r.x(0), 0.5, 1e-12);
    EXPECT_NEAR(r.x(1), 0.0, 1e-6);
}

TEST(Bfgs, NonFiniteStartThrows) {
    const Objective f = [](const Eigen::VectorXd&, Eigen::VectorXd* g) {
        if (g) *g = Eigen::VectorXd::Zero(1);
        return std::numeric_limits<double>::infinity();
    };
    EXPECT_THROW(minimize_bfgs(f, Eigen::VectorXd::Zero(1), {}), OptimFailure);
}

TEST(Bfgs, IterationCapReported) {
    BfgsOptions opt;
    opt.max_iterations = 3;
    opt.gradient_tolerance = 1e-14;
    const auto r = minimize_bfgs(rosenbrock, Eigen::Vector2d(-1.2, 1.0), opt);
    EXPECT_FALSE(r.converged);
    EXPECT_LE(r.iterations, 3);
}
