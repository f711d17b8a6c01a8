#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spatialqt/config.hpp"
#include "spatialqt/error.hpp"
#include "spatialqt/state.hpp"
#include "test_support.hpp"

using namespace spatialqt;
using namespace testing_support;

TEST(State, ArmPhaseUsesPumpWavenumber) {
    const auto c = default_config();
    // 2 pi / 413 nm * (0.18 mm)^2 / (8 * 0.2 m)
    EXPECT_NEAR(arm_phase(c.geometry, c.optics), 0.30807385586050035, 1e-14);
}

TEST(State, CoefficientsFollowPumpAtSlitMidpoints) {
    const auto c = default_config();
    const double w = 0.3e-3;
    const auto pump = PumpProfile::broad(w);
    const auto s = generate_pure_state(pump, c.geometry, c.optics);

    // Hand-built: ++ and -- sample the pump at +/- d/2 with no phase, +- and -+ at 0 with phase phi.
    const double phi = 2.0 * std::numbers::pi / c.optics.lambda_pump * c.geometry.d * c.geometry.d / (8 * c.geometry.z_a);
    const double edge = std::exp(-std::pow(c.geometry.d / 2, 2) / (w * w));
    Eigen::Vector4cd v(edge, std::polar(1.0, phi), std::polar(1.0, phi), edge);
    v.normalize();
    v *= std::polar(1.0, -phi);  // canonical phase: the largest (+-) coefficient real
    for (int i = 0; i < 4; ++i) EXPECT_LT(std::abs(s[i] - v(i)), 1e-12) << i;
}

TEST(State, FocusedPumpIsMaximallyEntangled) {
    const auto c = default_config();
    const auto s = generate_pure_state(c.arm1.profile(), c.geometry, c.optics);
    // Edge samples are exp(-(d / 2w)^2) ~ 1.6e-9 of the centre.
    const double edge = std::exp(-std::pow(c.geometry.d / (2 * c.arm1.width), 2)) / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(s[0]), edge, 1e-20);
    EXPECT_NEAR(std::abs(s[3]), edge, 1e-20);
    EXPECT_NEAR(s[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_LT(std::abs(s[1] - s[2]), 1e-15);
}

TEST(State, BroadPumpCarriesArmPhaseOnCrossTerms) {
    const auto c = default_config();
    const auto s = generate_pure_state(c.arm2.profile(), c.geometry, c.optics);
    const double phi = arm_phase(c.geometry, c.optics);
    EXPECT_NEAR(std::arg(s[1] / s[0]), phi, 1e-12);
    EXPECT_NEAR(std::arg(s[2] / s[3]), phi, 1e-12);
    EXPECT_NEAR(std::norm(s[0]), 0.25, 1e-3);
    // Not a product state: c++ c-- != c+- c-+ because of the phase.
    EXPECT_GT(std::abs(s[0] * s[3] - s[1] * s[2]), 0.1);
}

TEST(State, CustomPumpAndDegeneratePump) {
    const auto c = default_config();
    const auto odd = PumpProfile::from_function([](double x) { return Complex(x > 0 ? 1.0 : 0.0, 0.0); });
    const auto s = generate_pure_state(odd, c.geometry, c.optics);
    EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-15);
    const auto zero = PumpProfile::from_function([](double) { return Complex(0.0, 0.0); });
    EXPECT_THROW(generate_pure_state(zero, c.geometry, c.optics), DegeneratePumpError);
}

TEST(State, PureStateValidation) {
    EXPECT_THROW(PureState2Q({1.0, 1.0, 0.0, 0.0}), ValidationError);
    EXPECT_THROW(PureState2Q::normalized({0.0, 0.0, 0.0, 0.0}), ValidationError);
    const auto s = PureState2Q::normalized({Complex(0, 2), 0.0, 0.0, 1.0});
    EXPECT_NEAR(std::abs(s[0]), 2 / std::sqrt(5.0), 1e-15);
    const auto canon = s.with_canonical_phase();
    EXPECT_NEAR(canon[0].imag(), 0.0, 1e-15);
    EXPECT_GT(canon[0].real(), 0.0);
    EXPECT_EQ(canon.with_canonical_phase(), canon);
}

TEST(State, DensityMatrixInvariants) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const DensityMatrix rho(random_density(rng));
        EXPECT_TRUE(rho.is_physical());
        const auto ev = rho.eigenvalues();
        EXPECT_GE(ev[0], ev[1]);
        EXPECT_NEAR(ev[0] + ev[1] + ev[2] + ev[3], 1.0, 1e-12);
    }
    Eigen::Matrix4cd bad = Eigen::Matrix4cd::Identity() / 4.0;
    bad(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix{bad}, ValidationError);
    EXPECT_THROW(DensityMatrix{Eigen::Matrix4cd::Identity()}, ValidationError);

    const DensityMatrix measured(experimental_rho(), 1e-9);
    EXPECT_FALSE(measured.is_physical());
    const auto ev = measured.eigenvalues();
    EXPECT_NEAR(ev[0], 0.9439, 1e-4);
    EXPECT_NEAR(ev[3], -0.1380, 1e-4);
}

TEST(State, MixtureWeightsAndLimits) {
    const auto c = default_config();
    const auto a = generate_pure_state(c.arm1.profile(), c.geometry, c.optics);
    const auto b = generate_pure_state(c.arm2.profile(), c.geometry, c.optics);
    const std::array<PureState2Q, 2> states{a, b};

    const std::array<double, 2> pure{1.0, 0.0};
    EXPECT_LT(frobenius_distance(mix_states(pure, states), DensityMatrix::projector(a)), 1e-15);

    const std::array<double, 2> w{0.87, 0.13};
    const auto rho = mix_states(w, states);
    EXPECT_TRUE(rho.is_physical());
    const auto ev = rho.eigenvalues();
    EXPECT_NEAR(ev[0], 0.93996, 1e-5);
    EXPECT_NEAR(ev[1], 0.06004, 1e-5);
    // Non-orthogonal components: the spectrum does not reveal the weights.
    EXPECT_NEAR(std::norm(a.vector().dot(b.vector())), 0.50101, 1e-5);

    const std::array<double, 2> negative{1.2, -0.2};
    EXPECT_THROW(mix_states(negative, states), ValidationError);
    const std::array<double, 2> unnormalized{0.5, 0.4};
    EXPECT_THROW(mix_states(unnormalized, states), ValidationError);
}
