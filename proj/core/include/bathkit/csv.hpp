// csv.hpp - CSV writers for plot-ready series
//
// Dialect: comma separated, '.' decimal, one header row, LF line endings.
// Optional leading comment lines start with "# ". Values use 17 significant digits.

#pragma once

#include "bathkit/discretize.hpp"
#include "bathkit/dynamics.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace bathkit::io {

std::string format_double(double value);

void write_comments(std::ostream& out, const std::vector<std::string>& comments);

// omega_cm1,J_cm1,S_beta_cm1
void write_spectral_csv(std::ostream& out, const NoiseKernel& kernel, const std::vector<double>& omegas,
                        const std::vector<std::string>& comments = {});

// t_fs,re_C,im_C,re_C_ref,im_C_ref
void write_bcf_csv(std::ostream& out, const std::vector<double>& times, const std::vector<Complex>& model,
                   const std::vector<Complex>& reference, const std::vector<std::string>& comments = {});

// t_fs,pop_1..pop_d,re_coh,im_coh,norm,energy_cm1
void write_propagation_csv(std::ostream& out, const PropagationResult& result,
                           const std::vector<std::string>& comments = {});

// t_fs,<label_0>,<label_1>,...
void write_series_csv(std::ostream& out, const std::vector<double>& times,
                      const std::vector<std::string>& labels,
                      const std::vector<std::vector<double>>& series,
                      const std::vector<std::string>& comments = {});

} // namespace bathkit::io
