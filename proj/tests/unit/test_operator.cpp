#include <doctest.h>

#include "bva/error.hpp"
#include "bva/operator.hpp"

#include <random>
#include <sstream>

using namespace bva;

TEST_CASE("gradient symbol has norm |xi||eta|") {
    const Operator op = builtin("gradient", 2, 1);
    const Eigen::Vector2d xi(1.0, 2.0);
    Eigen::VectorXd eta(1);
    eta << 1.0;
    const Eigen::VectorXd s = op.symbol(Eigen::VectorXd(xi)) * eta;
    CHECK(s[0] == doctest::Approx(1.0));
    CHECK(s[1] == doctest::Approx(2.0));
    CHECK(s.squaredNorm() == doctest::Approx(5.0));
}

TEST_CASE("symbol at zero is the zero matrix") {
    for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{{"gradient", 3}, {"symgrad", 2}, {"remark25", 3}}) {
        const Operator op = builtin(name, n);
        CHECK(op.symbol(Eigen::VectorXd(Eigen::VectorXd::Zero(n))).isZero(0.0));
    }
}

TEST_CASE("deviatoric symmetric gradient annihilates (1, i) x (1, -i)") {
    const Operator op = builtin("devsymgrad", 2);
    Eigen::VectorXcd xi(2), eta(2);
    xi << 1.0, Complex(0.0, 1.0);
    eta << 1.0, Complex(0.0, -1.0);
    CHECK((op.symbol(xi) * eta).norm() < 1e-14);
}

TEST_CASE("pairing of the symmetric gradient symmetrises") {
    const Operator op = builtin("symgrad", 2);
    const Eigen::VectorXd p = op.pairing(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0));
    REQUIRE(p.size() == 4);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.5));
    CHECK(p[3] == 0.0);
    CHECK(op.pairing(Eigen::Vector2d::Zero(), Eigen::Vector2d(0.3, 0.7)).isZero(0.0));
}

TEST_CASE("gradient pairing is the tensor product v_j z_k") {
    const Operator op = builtin("gradient", 3, 2);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(2), z(3);
    for (auto& x : v) x = normal(rng);
    for (auto& x : z) x = normal(rng);
    const Eigen::VectorXd p = op.pairing(v, z);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 3; ++k) CHECK(p[j * 3 + k] == doctest::Approx(v[j] * z[k]));
}

TEST_CASE("adjoint is an involution and transposes coefficients") {
    for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{{"gradient", 2}, {"symgrad", 2}, {"remark25", 3}}) {
        const Operator op = builtin(name, n);
        CHECK(op.adjoint().adjoint() == op);
        const Operator adj = op.adjoint();
        CHECK(adj.N() == op.K());
        CHECK(adj.K() == op.N());
        for (int a = 0; a < n; ++a) CHECK(adj.coeff(a) == op.coeff(a).transpose());
    }
    const Operator g = builtin("gradient", 2, 1).adjoint();
    CHECK(g.coeff(0) == Eigen::RowVector2d(1.0, 0.0));
    CHECK(g.coeff(1) == Eigen::RowVector2d(0.0, 1.0));
}

TEST_CASE("catalog operators") {
    const Operator s = builtin("symgrad", 2);
    CHECK(s.n() == 2);
    CHECK(s.N() == 2);
    CHECK(s.K() == 4);

    const Operator d = builtin("devsymgrad", 2);
    // div u = 1 for u = (x1, 0): deviatoric part is diag(1/2, -1/2).
    Eigen::VectorXd e1(2);
    e1 << 1.0, 0.0;
    const Eigen::VectorXd Du = d.coeff(0) * e1;
    CHECK(Du[0] == doctest::Approx(0.5));
    CHECK(Du[3] == doctest::Approx(-0.5));
    CHECK(Du[1] == 0.0);

    const Operator r = builtin("remark25", 3);
    CHECK(r.n() == 3);
    CHECK(r.N() == 2);
    CHECK(r.K() == 6);
    CHECK(r.coeff(2)(2, 0) == 1.0);
    CHECK(r.coeff(2)(5, 1) == 1.0);

    CHECK_THROWS_AS(builtin("symgrad", 2, 3), DimensionError);
    CHECK_THROWS_AS(builtin("remark25", 2), DimensionError);
    CHECK_THROWS_AS(builtin("nabla", 2), Error);
}

TEST_CASE("operator text round trip") {
    const std::string text = "n=2\nN=1\nK=2\nA1:\n1\n0\nA2:\n0\n1\n";
    std::istringstream in(text);
    const Operator op = parse_operator(in);
    CHECK(op.n() == 2);
    CHECK(op.N() == 1);
    CHECK(op.K() == 2);
    CHECK(op == builtin("gradient", 2, 1));

    std::istringstream again(format_operator(builtin("symgrad", 3)));
    CHECK(parse_operator(again) == builtin("symgrad", 3));
    CHECK(load_operator("builtin:symgrad,3") == builtin("symgrad", 3));
}

TEST_CASE("missing row in a coefficient block reports its line") {
    std::istringstream in("n=2\nN=1\nK=2\nA1:\n1\n0\nA2:\n0\n");
    try {
        parse_operator(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
    }
}

TEST_CASE("effective range dimensions") {
    CHECK(cone_and_range(builtin("gradient", 2, 1), 32).range_dimension() == 2);
    CHECK(cone_and_range(builtin("symgrad", 2), 32).range_dimension() == 3);
    CHECK(cone_and_range(builtin("devsymgrad", 2), 32).range_dimension() == 2);
    CHECK(cone_and_range(builtin("symgrad", 2), 32).max_generator_residual() < 1e-12);
}
