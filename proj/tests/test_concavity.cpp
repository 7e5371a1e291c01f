#include <cmath>
#include <vector>

#include "doctest.h"

#include "ilpp/concavity.hpp"
#include "ilpp/euler_lagrange.hpp"
#include "ilpp/variational.hpp"

using namespace ilpp;

namespace {

AlphaField preset(const char* name, std::vector<double> p, const RectangleDomain& q) {
    return make_preset(name, p, q);
}

AlphaField quartic(const RectangleDomain& q) {
    // alpha_yy = -2 + 36 y^2 changes sign at |y| = 1/sqrt(18)
    AlphaField::Analytic a;
    a.name = "quartic";
    a.value = [](double, double y) { return 2 - y * y + 3 * y * y * y * y; };
    a.dx = [](double, double) { return 0.0; };
    a.dy = [](double, double y) { return -2 * y + 12 * y * y * y; };
    a.dyy = [](double, double y) { return -2 + 36 * y * y; };
    return AlphaField::analytic(q, a);
}

}  // namespace

TEST_CASE("condition on the reference fields") {
    const RectangleDomain q(1.0, 0.0);
    const auto good = check_condition(preset("parabolic", {2.0, -1.0}, q));
    CHECK(good.satisfied);
    CHECK(good.violations.empty());
    // -alpha alpha_yy - alpha_y^2/2 = 2(2 - y^2) - 2y^2 >= 4 - 4/4 = 3 on |y| <= 1/2.
    CHECK(good.margins.at(kCurvatureBalance).min_margin == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(good.margins.at(kCurvatureSign).min_margin == doctest::Approx(2.0));

    const auto flat = check_condition(preset("constant", {1.0}, q));
    CHECK_FALSE(flat.satisfied);
    CHECK(flat.margins.at(kCurvatureSign).min_margin == 0.0);

    const auto convex = check_condition(preset("parabolic", {2.0, 1.0}, q));
    CHECK_FALSE(convex.satisfied);
    CHECK(convex.min_margin < 0.0);
}

TEST_CASE("Hessian test on a column") {
    const RectangleDomain q(1.0, 0.0);
    const auto good = hessian_eigen_check(preset("parabolic", {2.0, -1.0}, q), 0.5);
    CHECK(good.satisfied);
    CHECK(good.margins.at(kHessianTrace).min_margin > 0.0);
    CHECK(good.margins.at(kHessianDet).min_margin > 0.0);

    const auto flat = hessian_eigen_check(preset("constant", {1.0}, q), 0.5);
    CHECK_FALSE(flat.satisfied);
    CHECK(flat.margins.at(kHessianDet).min_margin == 0.0);
    CHECK(flat.margins.at(kHessianTrace).min_margin > 0.0);
}

TEST_CASE("gamma curvature ratio supremum") {
    const auto r = gamma_ratio_sup();
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(r.value <= 0.25);
    CHECK(r.w == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-3));
}

TEST_CASE("condition implies pointwise concavity and a unique maximizer") {
    struct Case {
        double l;
        double b;
        std::vector<double> params;
    };
    const std::vector<Case> cases{{1.0, 0.0, {2.0, -1.0}}, {1.0, 0.3, {3.0, -2.0}}, {2.0, 0.5, {5.0, -1.0}},
                                  {1.0, -0.4, {1.2, -0.5}}};
    for (const auto& c : cases) {
        const RectangleDomain q(c.l, c.b);
        const auto f = preset("parabolic", c.params, q);
        const auto report = check_condition(f, 64);
        REQUIRE(report.satisfied);
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            REQUIRE(hessian_eigen_check(f, t * c.l, 64).satisfied);
        }
        const auto bvp = solve_bvp(f, q);
        REQUIRE(bvp.roots.size() == 1);
        const double g0 = functional_eval(bvp.roots[0].as_path(q), f);
        const double dp = variational_dp(f, DiscretizedPathSpace::counts(50, 1500)).g_star;
        CHECK(std::abs(g0 - dp) <= 2e-3 * c.l);
    }
}

TEST_CASE("reports are deterministic and violations persist under nested refinement") {
    const RectangleDomain q(1.0, 0.0);
    const auto f = quartic(q);
    const auto a = check_condition(f, 17);
    const auto again = check_condition(f, 17);
    REQUIRE(a.violations.size() == again.violations.size());
    CHECK_FALSE(a.satisfied);
    const auto fine = check_condition(f, 33);
    for (const auto& v : a.violations) {
        bool found = false;
        for (const auto& u : fine.violations) {
            if (u.inequality == v.inequality && std::abs(u.x - v.x) < 1e-12 && std::abs(u.y - v.y) < 1e-12) {
                found = true;
                break;
            }
        }
        REQUIRE(found);
    }
    CHECK(fine.violations.size() > a.violations.size());
}
