#include "bathkit/csv.hpp"

#include "bathkit/error.hpp"

#include <cstdio>

namespace bathkit::io {

std::string format_double(double value) {
    if (value == 0.0) return "0";  // also folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
}

void write_spectral_csv(std::ostream& out, const NoiseKernel& kernel, const std::vector<double>& omegas,
                        const std::vector<std::string>& comments) {
    write_comments(out, comments);
    out << "omega_cm1,J_cm1,S_beta_cm1\n";
    for (double w : omegas) {
        out << format_double(w) << ',' << format_double(kernel.spectral_density().eval(w)) << ','
            << format_double(kernel.eval(w)) << '\n';
    }
}

void write_bcf_csv(std::ostream& out, const std::vector<double>& times, const std::vector<Complex>& model,
                   const std::vector<Complex>& reference, const std::vector<std::string>& comments) {
    if (model.size() != times.size() || reference.size() != times.size())
        throw InputError("write_bcf_csv: series lengths differ");
    write_comments(out, comments);
    out << "t_fs,re_C,im_C,re_C_ref,im_C_ref\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]) << ',' << format_double(model[i].real()) << ','
            << format_double(model[i].imag()) << ',' << format_double(reference[i].real()) << ','
            << format_double(reference[i].imag()) << '\n';
    }
}

void write_propagation_csv(std::ostream& out, const PropagationResult& result,
                           const std::vector<std::string>& comments) {
    write_comments(out, comments);
    out << "t_fs";
    for (std::size_t s = 0; s < result.populations.size(); ++s) out << ",pop_" << s + 1;
    out << ",re_coh,im_coh,norm,energy_cm1\n";
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        out << format_double(result.times[i]);
        for (const auto& pop : result.populations) out << ',' << format_double(pop[i]);
        const Complex coh = result.coherence.empty() ? Complex{} : result.coherence[i];
        out << ',' << format_double(coh.real()) << ',' << format_double(coh.imag()) << ','
            << format_double(result.norm[i]) << ',' << format_double(result.energy[i]) << '\n';
    }
}

void write_series_csv(std::ostream& out, const std::vector<double>& times,
                      const std::vector<std::string>& labels,
                      const std::vector<std::vector<double>>& series,
                      const std::vector<std::string>& comments) {
    if (labels.size() != series.size()) throw InputError("write_series_csv: label count mismatch");
    write_comments(out, comments);
    out << "t_fs";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]);
        for (const auto& s : series) out << ',' << format_double(s.at(i));
        out << '\n';
    }
}

} // namespace bathkit::io
