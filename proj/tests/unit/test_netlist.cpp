#include "imtosc/netlist.hpp"
#include "imtosc/rng.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

using namespace imtosc;
using Catch::Matchers::WithinAbs;

namespace {

const DeviceParams kDR{0.7, 0.3, 10.0, 0.0, 1.0};

DeviceParams dd_device(double g_dm, double c_int) { return {0.7, 0.3, g_dm, 0.0, c_int}; }

StateVector states(std::initializer_list<int> bits) {
    StateVector s;
    for (int b : bits) s.push_back(state_from_bit(b));
    return s;
}

/// Random mix of D-R and D-D oscillators with a connected chain of couplings.
NetworkSpec random_network(std::uint64_t seed) {
    CounterRng r(seed);
    const auto n = static_cast<std::size_t>(2 + r.uniform() * 4);
    std::vector<OscillatorSpec> oscs;
    for (std::size_t i = 0; i < n; ++i) {
        if (r.uniform() < 0.5) {
            oscs.push_back(OscillatorSpec::dr({0.7, 0.3, r.uniform(5, 15), r.uniform(0, 0.1), r.uniform(0.2, 1)},
                                              r.uniform(0.5, 2), r.uniform(0, 2)));
        } else {
            oscs.push_back(OscillatorSpec::dd(dd_device(r.uniform(0.5, 2), r.uniform(0.2, 1)),
                                              dd_device(r.uniform(0.5, 2), r.uniform(0.2, 1))));
        }
    }
    std::vector<CouplingSpec> cps;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cps.push_back({i, i + 1, r.uniform() < 0.3 ? 0.0 : r.uniform(0.01, 0.5), r.uniform() < 0.5 ? 0.0 : r.uniform(0.01, 0.5)});
        if (cps.back().c_c == 0.0 && cps.back().g_c == 0.0) cps.back().c_c = 0.1;
    }
    return NetworkSpec(std::move(oscs), std::move(cps));
}

}  // namespace

TEST_CASE("single D-R oscillator assembles to scalar stamps") {
    const NetworkSpec net({OscillatorSpec::dr(kDR, 1.0, 1.0)}, {});
    const auto m = assemble(net, states({0}));
    CHECK(m.C(0, 0) == 1.0);
    CHECK(m.G(0, 0) == 11.0);
    CHECK(m.P(0) == 10.0);
    const auto i = assemble(net, states({1}));
    CHECK(i.G(0, 0) == 1.0);
    CHECK(i.P(0) == 0.0);
}

TEST_CASE("c_lump defaults to the summed internal capacitances") {
    const auto dd = OscillatorSpec::dd(dd_device(1, 0.25), dd_device(1, 0.5));
    CHECK(dd.c_lump() == 0.75);
    CHECK(OscillatorSpec::dr(kDR, 1.0).c_lump() == 1.0);
    CHECK(OscillatorSpec::dr(kDR, 1.0, 2.5).c_lump() == 2.5);
}

TEST_CASE("capacitive ring of three D-R oscillators, all insulating") {
    const double c = 1.0, cc = 0.2;
    const auto o = OscillatorSpec::dr(kDR, 1.0, c);
    const NetworkSpec net({o, o, o}, {{0, 1, cc, 0}, {1, 2, cc, 0}, {0, 2, cc, 0}});
    const auto m = assemble(net, states({1, 1, 1}));
    Matrix C_expected(3, 3);
    C_expected << c + 2 * cc, -cc, -cc, -cc, c + 2 * cc, -cc, -cc, -cc, c + 2 * cc;
    CHECK((m.C - C_expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.G - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.P.isZero());
}

TEST_CASE("two D-D oscillators normalise to the textbook F, A(s), P(s)") {
    // alpha = c / c_c, beta_ij = g_ijdm / g_c; conduction bit 0 means the top device conducts.
    const double c_c = 0.3, g_c = 0.4;
    const double c1 = 0.9, c2 = 1.3;
    const double g11 = 1.1, g12 = 0.7, g21 = 1.9, g22 = 0.6;
    const auto o1 = OscillatorSpec::dd(dd_device(g11, 0.5), dd_device(g12, 0.5), c1);
    const auto o2 = OscillatorSpec::dd(dd_device(g21, 0.5), dd_device(g22, 0.5), c2);
    const NetworkSpec net({o1, o2}, {{0, 1, c_c, g_c}});
    const double a1 = c1 / c_c, a2 = c2 / c_c;
    const double b11 = g11 / g_c, b12 = g12 / g_c, b21 = g21 / g_c, b22 = g22 / g_c;
    Matrix F(2, 2);
    F << 1 + a1, -1, -1, 1 + a2;
    struct Case {
        int s1, s2;
        double d1, d2, p1, p2;
    };
    for (const Case& k : {Case{0, 0, b11, b21, b11, b21}, Case{1, 0, b12, b21, 0, b21}, Case{0, 1, b11, b22, b11, 0},
                          Case{1, 1, b12, b22, 0, 0}}) {
        const auto m = assemble(net, states({k.s1, k.s2}));
        Matrix A(2, 2);
        A << -k.d1 - 1, 1, 1, -k.d2 - 1;
        Vector P(2);
        P << k.p1, k.p2;
        CHECK((m.C / c_c - F).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((-m.G / g_c - A).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((m.P / g_c - P).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("assembled matrices are symmetric, C positive definite, G positive semidefinite") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto net = random_network(seed);
        for (std::uint64_t code = 0; code < (1u << net.size()); ++code) {
            StateVector s;
            for (std::size_t i = 0; i < net.size(); ++i) s.push_back(state_from_bit(static_cast<int>((code >> i) & 1u)));
            const auto m = assemble(net, s);
            REQUIRE((m.C - m.C.transpose()).cwiseAbs().maxCoeff() == 0.0);
            REQUIRE((m.G - m.G.transpose()).cwiseAbs().maxCoeff() == 0.0);
            Eigen::SelfAdjointEigenSolver<Matrix> ec(m.C), eg(m.G);
            REQUIRE(ec.eigenvalues().minCoeff() > 0.0);
            REQUIRE(eg.eigenvalues().minCoeff() >= -1e-12);
            for (Eigen::Index i = 0; i < m.C.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.C.cols(); ++j) {
                    if (i == j) continue;
                    REQUIRE(m.C(i, j) <= 0.0);
                    REQUIRE(m.G(i, j) <= 0.0);
                }
            }
        }
    }
}

TEST_CASE("fixed point solves G x = P") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto net = random_network(seed);
        const auto m = assemble(net, StateVector(net.size(), ConductionState::Metallic));
        if (Eigen::FullPivLU<Matrix>(m.G).rank() < m.G.rows()) continue;
        const Vector x = fixed_point(m);
        CHECK((m.G * x - m.P).cwiseAbs().maxCoeff() <= 1e-12 * (1 + m.P.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("fixed point of a floating node is reported as singular") {
    LinearSystem sys{Matrix::Identity(1, 1), Matrix::Zero(1, 1), Vector::Zero(1), {ConductionState::Metallic}};
    CHECK_THROWS_AS(fixed_point(sys), SingularSystemError);
}

TEST_CASE("flow matrix equals -C^-1 G") {
    const auto net = random_network(3);
    const auto m = assemble(net, StateVector(net.size(), ConductionState::Insulating));
    const Matrix expected = -m.C.inverse() * m.G;
    CHECK((flow_matrix(m) - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("assemble rejects a state vector of the wrong length") {
    const NetworkSpec net({OscillatorSpec::dr(kDR, 1.0)}, {});
    CHECK_THROWS_AS(assemble(net, states({0, 1})), std::invalid_argument);
}

TEST_CASE("network validation") {
    const auto o = OscillatorSpec::dr(kDR, 1.0);
    CHECK_THROWS_AS(NetworkSpec({o, o}, {{0, 0, 0.1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(NetworkSpec({o, o}, {{0, 2, 0.1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(NetworkSpec({o, o}, {{0, 1, 0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(NetworkSpec({o, o}, {{0, 1, -0.1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(NetworkSpec({o, o}, {{0, 1, 0.1, 0}, {1, 0, 0.1, 0}}), std::invalid_argument);
    CHECK_NOTHROW(NetworkSpec({o, o}, {{0, 1, 0.1, 0.2}}));
}

TEST_CASE("D-D stacks need symmetric thresholds") {
    CHECK_THROWS_AS(OscillatorSpec::dd({0.8, 0.3, 1, 0, 1}, {0.8, 0.3, 1, 0, 1}), std::invalid_argument);
    CHECK_NOTHROW(OscillatorSpec::dd({0.7, 0.3, 1, 0, 1}, {0.7, 0.3, 2, 0, 1}));
}

TEST_CASE("validate_oscillation accepts an oscillating D-R and rejects a stuck one") {
    CHECK(validate_oscillation(OscillatorSpec::dr(kDR, 1.0)).ok);
    // g_dm / (g_dm + g_s) = 0.5 < 0.7: the node never reaches the upper threshold.
    const auto stuck = validate_oscillation(OscillatorSpec::dr(kDR, 10.0));
    CHECK_FALSE(stuck.ok);
    CHECK_FALSE(stuck.diagnostic.empty());
}

TEST_CASE("operating band and guards of a D-R oscillator") {
    const auto o = OscillatorSpec::dr(kDR, 1.0);
    CHECK_THAT(o.operating_band().lo, WithinAbs(0.3, 1e-15));
    CHECK_THAT(o.operating_band().hi, WithinAbs(0.7, 1e-15));
    const Guard up = o.guard(ConductionState::Metallic);
    CHECK(up.rising);
    CHECK(up.transition == Transition::ToInsulating);
    const Guard down = o.guard(ConductionState::Insulating);
    CHECK_FALSE(down.rising);
    CHECK(down.transition == Transition::ToMetallic);
}

TEST_CASE("gs_from_vgs is a rectified linear transistor model") {
    CHECK(gs_from_vgs(2.0, 1.5, 0.5) == 2.25);
    CHECK(gs_from_vgs(0.2, 1.5, 0.5) == 0.0);
    CHECK_THROWS_AS(gs_from_vgs(1.0, 0.0, 0.0), std::invalid_argument);
}
