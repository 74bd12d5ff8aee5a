// test_csv.cpp - CSV writers

#include "bathkit/csv.hpp"

#include <doctest.h>

#include <sstream>

using namespace bathkit;

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 6.02214076e23}) {
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.0) == "0");
    CHECK(io::format_double(-0.0) == "0");
}

TEST_CASE("spectral csv layout") {
    const NoiseKernel nk(SpectralDensity::debye(35.0, 106.1), Temperature::zero());
    std::ostringstream out;
    io::write_spectral_csv(out, nk, {-10.0, 106.1}, {"note"});
    const std::string text = out.str();
    CHECK(text.rfind("# note\nomega_cm1,J_cm1,S_beta_cm1\n-10,", 0) == 0);
    CHECK(text.back() == '\n');
    CHECK(text.find('\r') == std::string::npos);
    std::istringstream in(text);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) rows += line[0] != '#';
    CHECK(rows == 3);
}

TEST_CASE("bcf and propagation csv headers") {
    std::ostringstream bcf;
    io::write_bcf_csv(bcf, {0.0}, {Complex(1.0, 0.0)}, {Complex(1.0, 0.0)});
    CHECK(bcf.str() == "t_fs,re_C,im_C,re_C_ref,im_C_ref\n0,1,0,1,0\n");
    CHECK_THROWS(io::write_bcf_csv(bcf, {0.0, 1.0}, {Complex{}}, {Complex{}}));

    PropagationResult r;
    r.times = {0.0};
    r.populations = {{1.0}, {0.0}};
    r.coherence = {Complex(0.5, -0.25)};
    r.norm = {1.0};
    r.energy = {50.0};
    std::ostringstream prop;
    io::write_propagation_csv(prop, r);
    CHECK(prop.str() == "t_fs,pop_1,pop_2,re_coh,im_coh,norm,energy_cm1\n0,1,0,0.5,-0.25,1,50\n");
}
