#include <doctest.h>

#include "bva/ellipticity.hpp"
#include "bva/operator.hpp"

#include <cmath>

using namespace bva;

TEST_CASE("gradient is R-elliptic with kappa1 = 1") {
    for (int n : {2, 3})
        for (int N : {1, 2}) {
            const RealEllipticity r = check_r_elliptic(builtin("gradient", n, N));
            CHECK(r.elliptic);
            CHECK(r.kappa1 == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(r.kappa2 == doctest::Approx(1.0).epsilon(1e-8));
        }
}

TEST_CASE("deviatoric symmetric gradient in the plane is R- but not C-elliptic") {
    const Operator op = builtin("devsymgrad", 2);
    CHECK(check_r_elliptic(op).elliptic);
    const ComplexEllipticity c = check_c_elliptic(op);
    CHECK_FALSE(c.elliptic);
    REQUIRE(c.witness.has_value());
    CHECK((op.symbol(c.witness->xi) * c.witness->eta).norm() < 1e-10);
    CHECK(c.witness->xi.norm() == doctest::Approx(1.0));
    CHECK(c.witness->eta.norm() == doctest::Approx(1.0));
    // The witness direction is (1, +-i)/sqrt 2 up to a phase.
    const Complex ratio = c.witness->xi[1] / c.witness->xi[0];
    CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-6);
    CHECK(std::abs(ratio.real()) < 1e-6);
}

TEST_CASE("d1only fails R-ellipticity at xi = e2") {
    const RealEllipticity r = check_r_elliptic(builtin("d1only", 2));
    CHECK_FALSE(r.elliptic);
    REQUIRE(r.witness.has_value());
    CHECK(std::abs(r.witness->xi[0]) < 1e-8);
    CHECK(std::abs(std::abs(r.witness->xi[1]) - 1.0) < 1e-8);
}

TEST_CASE("C-ellipticity of symmetric gradients") {
    CHECK(check_c_elliptic(builtin("symgrad", 2)).elliptic);
    CHECK(check_c_elliptic(builtin("symgrad", 3)).elliptic);
    CHECK(check_c_elliptic(builtin("devsymgrad", 3)).elliptic);
}

TEST_CASE("cancelling") {
    CHECK(check_cancelling(builtin("gradient", 2, 1)).cancelling);
    CHECK(check_cancelling(builtin("gradient", 3, 1)).cancelling);
    const EllipticityReport r = classify(builtin("remark25", 3));
    CHECK(r.cancelling);
    CHECK_FALSE(r.c_elliptic);
    CHECK(r.r_elliptic);
    // One frequency direction only: the single range survives.
    CHECK_FALSE(check_cancelling(builtin("gradient", 1, 1)).cancelling);
    CHECK_FALSE(check_cancelling(builtin("gradient", 1, 2)).cancelling);
}
