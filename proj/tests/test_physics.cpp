#include "doctest.h"

#include <cmath>

#include "pinnverse/physics.hpp"

using namespace pinnverse;

TEST_CASE("parameter names per model") {
    ModelSpec m;
    m.kind = ModelKind::Heat;
    CHECK(m.parameter_names() == std::vector<std::string>{"D"});
    CHECK(m.channels() == 1);
    m.kind = ModelKind::Adr;
    CHECK(m.parameter_names() == std::vector<std::string>{"V", "D"});
    m.kind = ModelKind::MobileImmobile;
    CHECK(m.parameter_names() == std::vector<std::string>{"V", "D", "lambda"});
    CHECK(m.channels() == 2);
}

TEST_CASE("kind/bc names round trip") {
    for (const auto kind : {ModelKind::Heat, ModelKind::Adr, ModelKind::MobileImmobile})
        CHECK(model_kind_from_string(to_string(kind)) == kind);
    for (const auto kind : {LeftBc::Kind::Dirichlet, LeftBc::Kind::Pulse, LeftBc::Kind::Ramp})
        CHECK(left_bc_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(model_kind_from_string("laplace"), config_error);
    CHECK_THROWS_AS(left_bc_kind_from_string("step"), config_error);
}

TEST_CASE("heat residual") {
    const JetChannel jet{.u = 0.3, .u_x = -0.1, .u_t = 3.0, .u_xx = 2.0};
    CHECK(residual_heat(jet, 0.5) == doctest::Approx(3.0 - 1.0).epsilon(1e-15));
    CHECK(residual_heat(jet, 1.5) == 0.0); // 3.0 - 1.5 * 2.0 is exact
}

TEST_CASE("advection-dispersion-reaction residual") {
    const JetChannel jet{.u = 0.4, .u_x = 1.2, .u_t = -0.3, .u_xx = 0.8};
    Reaction linear{.kind = Reaction::Kind::Linear, .sigma0 = 0.3};
    // 2(-0.3) + 1.5(1.2) - 0.25(0.8) - 0.3(0.4)
    const double expected = -0.6 + 1.8 - 0.2 - 0.12;
    CHECK(residual_adr(jet, 1.5, 0.25, 2.0, linear) == doctest::Approx(expected).epsilon(1e-14));

    Reaction none;
    CHECK(residual_adr(jet, 1.5, 0.25, 2.0, none) ==
          doctest::Approx(expected + 0.12).epsilon(1e-14));
}

TEST_CASE("mobile-immobile residual pair") {
    const JetChannel ju{.u = 0.6, .u_x = 0.5, .u_t = 0.2, .u_xx = -0.4};
    const JetChannel jv{.u = 0.1, .u_x = 0.0, .u_t = 0.05, .u_xx = 0.0};
    const auto [ru, rv] = residual_mi(ju, jv, 1.0, 0.1, 10.0, 0.3, 0.1);
    // 0.3(0.2) + 1(0.5) - 0.1(-0.4) - 10(0.1 - 0.6)
    CHECK(ru == doctest::Approx(0.06 + 0.5 + 0.04 + 5.0).epsilon(1e-14));
    // 0.1(0.05) + 10(0.1 - 0.6)
    CHECK(rv == doctest::Approx(0.005 - 5.0).epsilon(1e-14));
}

TEST_CASE("exchange term couples the channels with opposite signs") {
    const JetChannel ju{.u = 0.6, .u_x = 0.0, .u_t = 0.0, .u_xx = 0.0};
    const JetChannel jv{.u = 0.1, .u_x = 0.0, .u_t = 0.0, .u_xx = 0.0};
    const auto [ru, rv] = residual_mi(ju, jv, 0.0, 0.0, 7.0, 0.3, 0.1);
    CHECK(ru == doctest::Approx(-rv).epsilon(1e-15));
}

TEST_CASE("boundary profiles") {
    LeftBc bc;
    SUBCASE("constant dirichlet") {
        bc.kind = LeftBc::Kind::Dirichlet;
        bc.value = 1.0;
        CHECK(bc.g(0.0) == 1.0);
        CHECK(bc.g(0.7) == 1.0);
    }
    SUBCASE("smoothed pulse") {
        bc.kind = LeftBc::Kind::Pulse;
        bc.value = 1.0;
        bc.duration = 0.01;
        bc.eps = 0.002;
        CHECK(bc.g(0.01) == doctest::Approx(0.5).epsilon(1e-15));
        // frozen: (1 - tanh(-5))/2 and (1 - tanh(2.5))/2
        CHECK(bc.g(0.0) == doctest::Approx(0.9999546021312975).epsilon(1e-14));
        CHECK(bc.g(0.015) == doctest::Approx(0.0066928509242848433).epsilon(1e-13));
        CHECK(bc.g(1.0) < 1e-10);
    }
    SUBCASE("smooth ramp") {
        bc.kind = LeftBc::Kind::Ramp;
        bc.value = 1.0;
        bc.t0 = 0.2;
        bc.width = 0.05;
        CHECK(bc.g(0.2) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(bc.g(0.0) < 1e-3);
        CHECK(bc.g(1.0) > 1.0 - 1e-6);
        CHECK(bc.g(0.25) > bc.g(0.2));
    }
}

TEST_CASE("boundary mismatch at tagged points") {
    ModelSpec m;
    m.left.value = 1.0;

    std::vector<JetChannel> left{{.u = 0.8, .u_x = 0.3, .u_t = 0.0, .u_xx = 0.0}};
    const Vector dl = boundary_mismatch(0.0, 0.5, left, m);
    CHECK(dl.size() == 1);
    CHECK(dl[0] == doctest::Approx(-0.2).epsilon(1e-14));

    std::vector<JetChannel> right{{.u = 0.2, .u_x = 0.3, .u_t = 0.0, .u_xx = 0.0}};
    const Vector dr = boundary_mismatch(1.0, 0.5, right, m);
    CHECK(dr[0] == doctest::Approx(0.3).epsilon(1e-15));

    CHECK_THROWS_AS(boundary_mismatch(0.5, 0.5, left, m), contract_violation);
}

TEST_CASE("model validation") {
    ModelSpec m;
    CHECK_NOTHROW(m.validate());
    m.horizon = 0.0;
    CHECK_THROWS_AS(m.validate(), config_error);
    m.horizon = 1.0;

    m.kind = ModelKind::Adr;
    m.beta = 0.0;
    CHECK_THROWS_AS(m.validate(), config_error);
    m.beta = 1.0;

    m.kind = ModelKind::MobileImmobile;
    m.beta1 = -0.1;
    CHECK_THROWS_AS(m.validate(), config_error);
    m.beta1 = 0.1;
    CHECK_NOTHROW(m.validate());

    m.left.kind = LeftBc::Kind::Pulse;
    m.left.eps = 0.0;
    CHECK_THROWS_AS(m.validate(), config_error);
}
