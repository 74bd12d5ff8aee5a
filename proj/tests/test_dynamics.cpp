// test_dynamics.cpp - Fock-space propagation and the dephasing oracle

#include "bathkit/dynamics.hpp"
#include "bathkit/error.hpp"
#include "bathkit/units.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace bathkit;

namespace {

BathModel toy_bath(std::vector<BathMode> modes) {
    BathModel b;
    b.modes = std::move(modes);
    return b;
}

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

DiscreteModel dephasing_qubit(std::vector<BathMode> modes, double splitting = 100.0) {
    SystemSpec s;
    s.h_s = mat2(splitting / 2, 0.0, 0.0, -splitting / 2);
    s.couplings = {{"bath", mat2(1.0, 0.0, 0.0, -1.0)}};
    return build_model(s, {{"bath", toy_bath(std::move(modes))}});
}

ComplexVector plus_state() {
    ComplexVector psi(2);
    psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return psi;
}

double max_coherence_error(const PropagationResult& r, const std::vector<double>& gamma) {
    double worst = 0.0;
    for (std::size_t i = 0; i < r.times.size(); ++i)
        worst = std::max(worst, std::abs(std::abs(r.coherence[i]) / 0.5 - std::exp(-gamma[i])));
    return worst;
}

} // namespace

TEST_CASE("dephasing prefactor against brute-force propagation, one mode, cap 20") {
    const DiscreteModel m = dephasing_qubit({{100.0, 1.0, 30.0}});
    PropagationOptions opt;
    opt.t_max_fs = 400.0;
    opt.dt_fs = 1.0;
    const auto r = propagate(m, FockTruncation::uniform(m, 20), plus_state(), opt);
    const auto gamma = dephasing_gamma(m, r.times);
    CHECK(max_coherence_error(r, gamma) <= 1e-6);
    // Gamma reaches 8 g^2 / w^2 at half period; a prefactor other than 4 would not.
    double peak = 0.0;
    for (double g : gamma) peak = std::max(peak, g);
    CHECK(peak == doctest::Approx(8.0 * 900.0 / 1e4).epsilon(1e-3));
}

TEST_CASE("dephasing gamma closed form") {
    const DiscreteModel m = dephasing_qubit({{150.0, 1.0, 12.0}});
    const double period = 1.0 / (units::speed_of_light_cm_per_fs * 150.0);
    const auto g = dephasing_gamma(m, {0.0, period / 2, period, 1.5 * period});
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(8.0 * 144.0 / (150.0 * 150.0)));
    CHECK(g[2] == doctest::Approx(0.0).scale(1.0));
    CHECK(g[3] == doctest::Approx(g[1]));
    CHECK(is_pure_dephasing(m));
    CHECK_THROWS_AS(dephasing_gamma(dephasing_qubit({{0.0, 1.0, 1.0}}), {1.0}), InputError);
}

TEST_CASE("two-mode pure dephasing with a negative frequency") {
    const DiscreteModel m = dephasing_qubit({{-80.0, 1.0, 15.0}, {210.0, 1.0, 40.0}});
    PropagationOptions opt;
    opt.t_max_fs = 500.0;
    const auto r = propagate(m, FockTruncation::uniform(m, 14), plus_state(), opt);
    CHECK(max_coherence_error(r, dephasing_gamma(m, r.times)) <= 1e-6);
    for (double n : r.norm) CHECK(std::abs(n - 1.0) <= 1e-8);
}

TEST_CASE("decoupled limit reproduces rabi oscillations") {
    SystemSpec s;
    const double delta = 40.0, v = 25.0;
    s.h_s = mat2(delta, v, v, -delta);
    s.couplings = {{"bath", mat2(1.0, 0.0, 0.0, 0.0)}};
    const DiscreteModel m = build_model(s, {{"bath", toy_bath({{90.0, 1.0, 0.0}, {-60.0, 1.0, 0.0}})}});
    ComplexVector psi(2);
    psi << 1.0, 0.0;
    PropagationOptions opt;
    opt.t_max_fs = 600.0;
    const auto r = propagate(m, FockTruncation::uniform(m, 2), psi, opt);
    const double rabi = std::hypot(delta, v);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        const double sn = std::sin(units::angular_frequency(rabi) * r.times[i]);
        const double p1 = 1.0 - v * v / (rabi * rabi) * sn * sn;
        CHECK(std::abs(r.populations[0][i] - p1) <= 1e-9);
        CHECK(std::abs(r.populations[1][i] - (1 - p1)) <= 1e-9);
    }
}

TEST_CASE("resonant single mode conserves norm and energy over 1000 fs") {
    SystemSpec s;
    s.h_s = mat2(50.0, 0.0, 0.0, -50.0);
    s.couplings = {{"bath", mat2(0.0, 1.0, 1.0, 0.0)}};
    const DiscreteModel m = build_model(s, {{"bath", toy_bath({{100.0, 1.0, 10.0}})}});
    ComplexVector psi(2);
    psi << 1.0, 0.0;
    PropagationOptions opt;
    opt.t_max_fs = 1000.0;
    opt.dt_fs = 1.0;
    opt.tol = 1e-10;
    const auto r = propagate(m, FockTruncation::uniform(m, 10), psi, opt);
    CHECK(r.times.size() == 1001);
    const double e0 = r.energy.front();
    CHECK(e0 == doctest::Approx(50.0));
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        CHECK(std::abs(r.norm[i] - 1.0) <= 1e-8);
        CHECK(std::abs(r.energy[i] - e0) <= 1e-6 * std::abs(e0) + 1e-6);
        CHECK(r.populations[0][i] + r.populations[1][i] == doctest::Approx(r.norm[i] * r.norm[i]));
    }
    // Exchange with the resonant mode actually happens.
    CHECK(*std::min_element(r.populations[0].begin(), r.populations[0].end()) < 0.5);
}

TEST_CASE("lanczos step matches the dense exponential") {
    SystemSpec s;
    s.h_s = mat2(30.0, Complex(5.0, 2.0), Complex(5.0, -2.0), -10.0);
    s.couplings = {{"a", mat2(1.0, 0.0, 0.0, 0.0)}, {"b", mat2(0.0, 0.5, 0.5, 0.0)}};
    const DiscreteModel m = build_model(s, {{"a", toy_bath({{70.0, 1.0, 9.0}, {-20.0, 1.0, 4.0}})},
                                            {"b", toy_bath({{130.0, 1.0, 20.0}})}});
    const FockHamiltonian h(m, FockTruncation::uniform(m, 4));
    const ComplexMatrix dense = h.dense();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(dense);
    const double tau = 2.0;
    const Eigen::VectorXcd phase = (-Complex(0, 1) * units::angular_frequency(1.0) * tau * eig.eigenvalues().array()).exp();
    const ComplexMatrix u = eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();

    ComplexVector psi = ComplexVector::Zero(h.dimension());
    psi(0) = 0.6;
    psi(h.bath_dim()) = Complex(0.0, 0.8);
    const ComplexVector expected = u * psi;
    ComplexVector out;
    h.apply(psi, out);
    CHECK((out - dense * psi).norm() <= 1e-12 * dense.norm());
    const double est = lanczos_step(h, psi, tau, 30);
    CHECK(est <= 1e-10);
    CHECK((psi - expected).norm() <= 1e-10);
}

TEST_CASE("truncation rules and caps") {
    const DiscreteModel m = dephasing_qubit({{100.0, 1.0, 10.0}, {50.0, 1.0, 60.0}, {-30.0, 1.0, 1.0}});
    const auto t = FockTruncation::adaptive(m);
    CHECK(t.caps == std::vector<int>{4, 10, 4});  // ceil(8 (g/w)^2) + 3, capped at 10
    CHECK(t.dimension(2) == 2 * 5 * 11 * 5);
    CHECK_THROWS_AS(t.dimension(2, 100), ResourceError);
    CHECK_THROWS_AS(FockTruncation::uniform(m, 0), InputError);
    PropagationOptions opt;
    opt.max_dimension = 100;
    CHECK_THROWS_AS(propagate(m, t, plus_state(), opt), ResourceError);
}

TEST_CASE("step refinement exhausted raises a convergence error") {
    const DiscreteModel m = dephasing_qubit({{100.0, 1.0, 60.0}});
    PropagationOptions opt;
    opt.t_max_fs = 200.0;
    opt.dt_fs = 100.0;
    opt.krylov_dim = 3;
    opt.tol = 1e-14;
    CHECK_THROWS_AS(propagate(m, FockTruncation::uniform(m, 12), plus_state(), opt), ConvergenceError);
}

TEST_CASE("propagate input checks") {
    const DiscreteModel m = dephasing_qubit({{100.0, 1.0, 5.0}});
    ComplexVector bad(2);
    bad << 1.0, 1.0;
    CHECK_THROWS_AS(propagate(m, FockTruncation::uniform(m, 2), bad, {}), InputError);
    CHECK_THROWS_AS(propagate(m, FockTruncation::uniform(m, 2), ComplexVector::Ones(3) / std::sqrt(3.0), {}),
                    InputError);
}

TEST_CASE("convergence study on a pure-dephasing qubit") {
    const NoiseKernel nk(surrogate_spectral_density(), Temperature::kelvin(300.0));
    SystemSpec s;
    s.h_s = mat2(50.0, 0.0, 0.0, -50.0);
    s.couplings = {{"env", mat2(1.0, 0.0, 0.0, -1.0)}};
    const FdrGrid grid(300.0, 500.0, 300, 3000);
    const auto rep = convergence_study(nk, s, {1.0, 1e-1, 1e-2, 1e-3}, grid);
    CHECK(rep.observable == "dephasing_gamma");
    REQUIRE(rep.distances.size() == 3);
    CHECK(rep.distances[0] > 0.0);
    CHECK(rep.distances[2] < rep.distances[0]);
    CHECK(rep.monotone);
    CHECK(rep.series.size() == 4);
    CHECK(rep.times.size() == 300);
    CHECK_THROWS_AS(convergence_study(nk, s, {}, grid), InputError);
}

TEST_CASE("convergence study by propagation") {
    const NoiseKernel nk(SpectralDensity::debye(4.0, 80.0), Temperature::kelvin(77.0));
    SystemSpec s;
    s.h_s = mat2(60.0, 30.0, 30.0, -60.0);
    s.couplings = {{"env", mat2(1.0, 0.0, 0.0, 0.0)}};
    const FdrGrid grid(60.0, 500.0, 61, 1000);
    ConvergenceOptions opt;
    opt.propagation.t_max_fs = 60.0;
    opt.propagation.dt_fs = 1.0;
    const auto rep = convergence_study(nk, s, {0.3, 0.1}, grid, opt);
    CHECK(rep.observable == "population_0");
    REQUIRE(rep.series.size() == 2);
    CHECK(rep.series[0].front() == doctest::Approx(1.0));
    CHECK(rep.distances.size() == 1);
}
