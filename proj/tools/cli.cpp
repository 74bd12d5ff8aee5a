// cli.cpp - subcommand implementations for the bathkit tool

#include "cli.hpp"

#include "bathkit/bathkit.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace bathkit::cli {
namespace {

using ojson = nlohmann::ordered_json;

struct InputFile {
    std::string path;
    std::string bytes;
    std::string sha256;
};

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

InputFile read_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    InputFile f{path, ss.str(), {}};
    f.sha256 = sha256_hex(f.bytes);
    return f;
}

// Everything an artifact needs to be regenerated.
class Metadata {
public:
    explicit Metadata(std::string command) : command_(std::move(command)) {}

    ojson& config() { return config_; }
    void add_input(const std::string& role, const InputFile& f) {
        inputs_.push_back({{"role", role}, {"path", f.path}, {"sha256", f.sha256}});
    }

    ojson json() const {
        ojson m;
        m["tool"] = "bathkit";
        m["tool_version"] = tool_version;
        m["command"] = command_;
        m["config"] = config_;
        m["inputs"] = inputs_.is_null() ? ojson::array() : inputs_;
        return m;
    }

    std::vector<std::string> csv_comments() const {
        std::vector<std::string> lines;
        lines.push_back("tool: bathkit " + std::string(tool_version));
        lines.push_back("command: " + command_);
        lines.push_back("config: " + config_.dump());
        for (const auto& in : inputs_)
            lines.push_back("input: " + in["role"].get<std::string>() + " " + in["path"].get<std::string>() +
                            " sha256=" + in["sha256"].get<std::string>());
        return lines;
    }

private:
    std::string command_;
    ojson config_ = ojson::object();
    ojson inputs_ = ojson::array();
};

// Writes to stdout when path is empty. Files are written through a temporary
// sibling and renamed, so a failed run never leaves a partial artifact.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InputError("cannot write '" + path + "'");
        f << content;
        if (!f.flush()) throw InputError("write failed for '" + path + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw InputError("cannot write '" + path + "'");
    }
}

bool looks_like_json(const std::string& bytes) {
    for (char c : bytes) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{';
    }
    return false;
}

SpectralDensity parse_sd(const InputFile& f) {
    if (looks_like_json(f.bytes)) return io::spectral_density_from_json(f.bytes);
    std::istringstream in(f.bytes);
    try {
        return load_tabulated(in);
    } catch (const InputError& e) {
        throw InputError(f.path + ": " + e.what());
    }
}

// --temp-k / --zero-temp handling shared by the subcommands.
struct TemperatureFlags {
    std::optional<double> kelvin;
    bool zero{false};

    void add(CLI::App& app) {
        auto* t = app.add_option("--temp-k", kelvin, "Bath temperature in K");
        auto* z = app.add_flag("--zero-temp", zero, "Zero-temperature bath");
        t->excludes(z);
    }
    Temperature resolve() const { return kelvin ? Temperature::kelvin(*kelvin) : Temperature::zero(); }
};

ojson temperature_json(const Temperature& t) {
    if (t.is_zero()) return "zero";
    return t.in_kelvin();
}

struct GridFlags {
    double t_max_fs{1000.0};
    double omega_max_cm1{500.0};
    Eigen::Index n_time{FdrGrid::default_n_time};
    Eigen::Index n_freq{FdrGrid::default_n_freq};

    void add(CLI::App& app) {
        app.add_option("--t-max-fs", t_max_fs, "Time window T in fs")->capture_default_str();
        app.add_option("--omega-max-cm1", omega_max_cm1, "Frequency window half-width in cm^-1")
            ->capture_default_str();
        app.add_option("--n-time", n_time, "Time samples")->capture_default_str();
        app.add_option("--n-freq", n_freq, "Frequency samples (even)")->capture_default_str();
    }
    FdrGrid grid() const { return FdrGrid(t_max_fs, omega_max_cm1, n_time, n_freq); }
    void echo(ojson& c) const {
        c["t_max_fs"] = t_max_fs;
        c["omega_max_cm1"] = omega_max_cm1;
        c["n_time"] = n_time;
        c["n_freq"] = n_freq;
    }
};

// Fixed solver settings, echoed so artifacts are self-describing.
ojson solver_json(const DiscretizeOptions& o) {
    ojson j;
    j["quadrature_initial_points"] = o.quadrature.initial_points;
    j["quadrature_rel_tol"] = o.quadrature.rel_tol;
    j["quadrature_max_points"] = o.quadrature.max_points;
    j["nnls_kappa"] = o.nnls.kappa;
    return j;
}

void stamp_diagnostics(std::ostream& err, const BathDiagnostics& d) {
    err << "M = " << d.mode_count << ", r = " << d.id_rank << '\n'
        << "id_error_estimate = " << d.id_error_estimate << '\n'
        << "nnls_residual = " << d.nnls_residual << ", nnls_iterations = " << d.nnls_iterations
        << (d.nnls_converged ? "" : " (not converged)") << '\n'
        << "max_abs_error = " << d.errors.max_abs_error << ", mean_abs_error = " << d.errors.mean_abs_error
        << ", rel_error = " << d.errors.rel_error << '\n';
}

std::string with_metadata(const std::string& json_text, const Metadata& meta) {
    ojson doc = ojson::parse(json_text);
    doc["metadata"] = meta.json();
    return doc.dump(2) + '\n';
}

// ---- eval-sd ------------------------------------------------------------

struct EvalSdArgs {
    std::string sd;
    TemperatureFlags temp;
    double omega_min{-500.0};
    double omega_max{500.0};
    long n{1001};
    std::string out;
};

int eval_sd(const EvalSdArgs& a, std::ostream& out, std::ostream&) {
    if (a.n < 1) throw InputError("--n must be >= 1");
    if (!std::isfinite(a.omega_min) || !std::isfinite(a.omega_max) || a.omega_max < a.omega_min)
        throw InputError("--omega-min/--omega-max must be finite with omega-min <= omega-max");
    if (a.n == 1 && a.omega_min != a.omega_max) throw InputError("--n 1 needs omega-min == omega-max");
    const InputFile f = read_input(a.sd);
    const NoiseKernel kernel(parse_sd(f), a.temp.resolve());

    std::vector<double> omegas(static_cast<std::size_t>(a.n));
    for (long i = 0; i < a.n; ++i) {
        omegas[static_cast<std::size_t>(i)] =
            a.n == 1 ? a.omega_min
                     : a.omega_min + (a.omega_max - a.omega_min) * static_cast<double>(i) / static_cast<double>(a.n - 1);
    }
    Metadata meta("eval-sd");
    meta.config()["sd"] = a.sd;
    meta.config()["temperature_K"] = temperature_json(kernel.temperature());
    meta.config()["omega_min_cm1"] = a.omega_min;
    meta.config()["omega_max_cm1"] = a.omega_max;
    meta.config()["n"] = a.n;
    meta.add_input("sd", f);

    std::ostringstream csv;
    io::write_spectral_csv(csv, kernel, omegas, meta.csv_comments());
    emit(a.out, csv.str(), out);
    return exit_ok;
}

// ---- discretize ---------------------------------------------------------

struct DiscretizeArgs {
    std::string sd;
    TemperatureFlags temp;
    GridFlags grid;
    double tol{1e-2};
    double memory_cap_mib{4096.0};
    std::optional<int> nnls_max_iterations;
    std::string out;
};

int discretize(const DiscretizeArgs& a, std::ostream& out, std::ostream& err) {
    if (!a.temp.kelvin && !a.temp.zero) throw InputError("one of --temp-k or --zero-temp is required");
    if (!(a.memory_cap_mib > 0.0)) throw InputError("--memory-cap-mib must be positive");
    const InputFile f = read_input(a.sd);
    const NoiseKernel kernel(parse_sd(f), a.temp.resolve());
    const FdrGrid grid = a.grid.grid();

    DiscretizeOptions opts;
    opts.assemble.memory_cap_bytes = static_cast<std::uint64_t>(a.memory_cap_mib * 1024.0 * 1024.0);
    if (a.nnls_max_iterations) {
        if (*a.nnls_max_iterations < 1) throw InputError("--nnls-max-iterations must be >= 1");
        opts.nnls.max_iterations = a.nnls_max_iterations;
    }

    Metadata meta("discretize");
    meta.config()["sd"] = a.sd;
    meta.config()["temperature_K"] = temperature_json(kernel.temperature());
    a.grid.echo(meta.config());
    meta.config()["tol"] = a.tol;
    meta.config()["memory_cap_mib"] = a.memory_cap_mib;
    if (a.nnls_max_iterations) meta.config()["nnls_max_iterations"] = *a.nnls_max_iterations;
    else meta.config()["nnls_max_iterations"] = "3n";
    meta.config()["solver"] = solver_json(opts);
    meta.add_input("sd", f);

    BathModel bath;
    try {
        bath = discretize_bath(kernel, grid, a.tol, opts);
    } catch (const NnlsNotConverged& e) {
        stamp_diagnostics(err, e.partial());
        throw;
    }
    stamp_diagnostics(err, bath.diagnostics);
    emit(a.out, with_metadata(io::bath_to_json(bath), meta), out);
    return exit_ok;
}

// ---- reconstruct --------------------------------------------------------

struct ReconstructArgs {
    std::string model;
    std::string bath_label;
    std::optional<Eigen::Index> n_time;
    std::string out;
};

int reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err) {
    const InputFile f = read_input(a.model);
    BathModel bath;
    {
        const auto doc = ojson::parse(f.bytes, nullptr, false);
        if (doc.is_discarded()) throw InputError(a.model + ": malformed JSON");
        const bool is_model = doc.is_object() && doc.value("schema", std::string{}) == io::model_schema;
        if (is_model) {
            const DiscreteModel m = io::model_from_json(f.bytes);
            if (!a.bath_label.empty()) {
                bath = m.bath(a.bath_label);
            } else {
                if (m.baths().empty()) throw InputError(a.model + ": model has no baths");
                bath = m.baths().front().bath;
            }
        } else {
            if (!a.bath_label.empty()) throw InputError("--bath applies to bathkit-model/1 files only");
            bath = io::bath_from_json(f.bytes);
        }
    }
    if (!bath.spectral_density) throw InputError(a.model + ": bath carries no spectral_density; no oracle");
    if (!bath.grid) throw InputError(a.model + ": bath carries no grid window");
    const Eigen::Index n_time = a.n_time.value_or(bath.grid->n_time());
    if (n_time < 2) throw InputError("--n-time must be >= 2");

    const FdrGrid window(bath.grid->t_max(), bath.grid->omega_max(), n_time, bath.grid->n_freq());
    const std::vector<double> times = window.times();
    const NoiseKernel kernel(*bath.spectral_density, bath.temperature);
    const auto model = reconstruct_bcf(bath, times);
    const auto ref = reference_bcf(kernel, times, bath.grid->omega_max());
    const BcfErrors e = compare_bcf(model, ref);
    err << "max_abs_error = " << e.max_abs_error << ", mean_abs_error = " << e.mean_abs_error
        << ", rel_error = " << e.rel_error << '\n';

    Metadata meta("reconstruct");
    meta.config()["model"] = a.model;
    if (!a.bath_label.empty()) meta.config()["bath"] = a.bath_label;
    meta.config()["n_time"] = n_time;
    meta.config()["t_max_fs"] = window.t_max();
    meta.config()["omega_max_cm1"] = window.omega_max();
    meta.config()["solver"] = solver_json(DiscretizeOptions{});
    meta.add_input("model", f);

    std::ostringstream csv;
    io::write_bcf_csv(csv, times, model, ref, meta.csv_comments());
    emit(a.out, csv.str(), out);
    return exit_ok;
}

// ---- build-model --------------------------------------------------------

struct BuildModelArgs {
    std::string system;
    std::vector<std::string> baths;  // label=path
    std::string out;
};

int build_model_cmd(const BuildModelArgs& a, std::ostream& out, std::ostream& err) {
    const InputFile sys_file = read_input(a.system);
    SystemSpec system = io::system_from_json(sys_file.bytes);

    Metadata meta("build-model");
    meta.config()["system"] = a.system;
    meta.add_input("system", sys_file);
    ojson bath_cfg = ojson::array();
    std::vector<LabeledBath> baths;
    for (const auto& spec : a.baths) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
            throw InputError("--bath expects label=path, got '" + spec + "'");
        const std::string label = spec.substr(0, eq);
        const InputFile bf = read_input(spec.substr(eq + 1));
        baths.push_back({label, io::bath_from_json(bf.bytes)});
        bath_cfg.push_back({{"label", label}, {"path", bf.path}});
        meta.add_input("bath:" + label, bf);
    }
    meta.config()["baths"] = bath_cfg;

    const DiscreteModel model = build_model(std::move(system), std::move(baths));
    err << "system dim = " << model.system().dim() << ", couplings = " << model.system().couplings.size()
        << ", total modes = " << model.total_modes() << '\n';
    emit(a.out, with_metadata(io::model_to_json(model), meta), out);
    return exit_ok;
}

// ---- propagate ----------------------------------------------------------

struct PropagateArgs {
    std::string model;
    std::string caps{"adaptive"};
    Eigen::Index initial_site{1};
    double t_max_fs{1000.0};
    double dt_fs{1.0};
    int krylov_dim{30};
    double tol{1e-10};
    Eigen::Index max_dim{default_max_dimension};
    Eigen::Index coherence_row{1};
    Eigen::Index coherence_col{2};
    std::string out;
};

FockTruncation parse_caps(const std::string& caps, const DiscreteModel& model) {
    if (caps == "adaptive") return FockTruncation::adaptive(model);
    std::size_t used = 0;
    int cap = 0;
    try {
        cap = std::stoi(caps, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != caps.size() || cap < 0) throw InputError("--caps must be 'adaptive' or a non-negative integer");
    return FockTruncation::uniform(model, cap);
}

int propagate_cmd(const PropagateArgs& a, std::ostream& out, std::ostream& err) {
    const InputFile f = read_input(a.model);
    const DiscreteModel model = io::model_from_json(f.bytes);
    const Eigen::Index d = model.system().dim();
    if (a.initial_site < 1 || a.initial_site > d) throw InputError("--initial-site must be in [1, dim]");
    if (a.coherence_row < 1 || a.coherence_row > d || a.coherence_col < 1 || a.coherence_col > d)
        throw InputError("--coherence indices must be in [1, dim]");
    const FockTruncation trunc = parse_caps(a.caps, model);

    PropagationOptions opts;
    opts.t_max_fs = a.t_max_fs;
    opts.dt_fs = a.dt_fs;
    opts.krylov_dim = a.krylov_dim;
    opts.tol = a.tol;
    opts.max_dimension = a.max_dim;
    opts.coherence_row = a.coherence_row - 1;
    opts.coherence_col = a.coherence_col - 1;
    ComplexVector psi0 = ComplexVector::Zero(d);
    psi0(a.initial_site - 1) = 1.0;

    Metadata meta("propagate");
    meta.config()["model"] = a.model;
    meta.config()["caps"] = trunc.caps;
    meta.config()["initial_site"] = a.initial_site;
    meta.config()["t_max_fs"] = a.t_max_fs;
    meta.config()["dt_fs"] = a.dt_fs;
    meta.config()["krylov_dim"] = a.krylov_dim;
    meta.config()["tol"] = a.tol;
    meta.config()["max_dim"] = a.max_dim;
    meta.config()["coherence"] = {a.coherence_row, a.coherence_col};
    meta.add_input("model", f);

    const Eigen::Index dim = trunc.dimension(d, a.max_dim);
    err << "Fock dimension = " << dim << '\n';
    const PropagationResult r = propagate(model, trunc, psi0, opts);
    err << "step halvings used = " << r.max_halvings << '\n';

    std::ostringstream csv;
    io::write_propagation_csv(csv, r, meta.csv_comments());
    emit(a.out, csv.str(), out);
    return exit_ok;
}

// ---- validate -----------------------------------------------------------

struct ValidateArgs {
    std::string sd;
    TemperatureFlags temp;
    std::string system;
    std::vector<double> tol_sweep;
    GridFlags grid;
    double slack{0.2};
    double dt_fs{1.0};
    int krylov_dim{30};
    double prop_tol{1e-10};
    Eigen::Index max_dim{default_max_dimension};
    std::string out;
    std::string series_out;
};

int validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    if (a.tol_sweep.empty()) throw InputError("--tol-sweep must list at least one tolerance");
    for (double t : a.tol_sweep)
        if (!(t > 0.0) || !std::isfinite(t)) throw InputError("--tol-sweep entries must be positive");
    if (!(a.slack >= 0.0)) throw InputError("--slack must be non-negative");
    const InputFile sd_file = read_input(a.sd);
    const InputFile sys_file = read_input(a.system);
    const NoiseKernel kernel(parse_sd(sd_file), a.temp.resolve());
    const SystemSpec system = io::system_from_json(sys_file.bytes);
    const FdrGrid grid = a.grid.grid();

    ConvergenceOptions opts;
    opts.slack = a.slack;
    opts.propagation.t_max_fs = a.grid.t_max_fs;
    opts.propagation.dt_fs = a.dt_fs;
    opts.propagation.krylov_dim = a.krylov_dim;
    opts.propagation.tol = a.prop_tol;
    opts.propagation.max_dimension = a.max_dim;

    Metadata meta("validate");
    meta.config()["sd"] = a.sd;
    meta.config()["temperature_K"] = temperature_json(kernel.temperature());
    meta.config()["system"] = a.system;
    meta.config()["tol_sweep"] = a.tol_sweep;
    a.grid.echo(meta.config());
    meta.config()["slack"] = a.slack;
    meta.config()["dt_fs"] = a.dt_fs;
    meta.config()["krylov_dim"] = a.krylov_dim;
    meta.config()["prop_tol"] = a.prop_tol;
    meta.config()["max_dim"] = a.max_dim;
    meta.config()["fock_caps"] = "adaptive";
    meta.config()["initial_site"] = 1;
    meta.config()["solver"] = solver_json(opts.discretize);
    meta.add_input("sd", sd_file);
    meta.add_input("system", sys_file);

    const ConvergenceReport rep = convergence_study(kernel, system, a.tol_sweep, grid, opts);

    ojson report;
    report["observable"] = rep.observable;
    report["tols"] = rep.tols;
    report["mode_counts"] = rep.mode_counts;
    report["id_ranks"] = rep.id_ranks;
    report["bcf_rel_errors"] = rep.bcf_rel_errors;
    report["distances"] = rep.distances;
    report["slack"] = a.slack;
    report["monotone"] = rep.monotone;
    report["metadata"] = meta.json();

    std::vector<std::string> labels;
    for (double t : rep.tols) labels.push_back(rep.observable + "@tol=" + io::format_double(t));
    std::ostringstream csv;
    io::write_series_csv(csv, rep.times, labels, rep.series, meta.csv_comments());

    for (std::size_t i = 0; i < rep.tols.size(); ++i) {
        err << "tol = " << rep.tols[i] << ": M = " << rep.mode_counts[i] << ", r = " << rep.id_ranks[i]
            << ", rel_error = " << rep.bcf_rel_errors[i];
        if (i > 0) err << ", distance = " << rep.distances[i - 1];
        err << '\n';
    }
    err << (rep.monotone ? "converging within slack\n" : "NOT converging within slack\n");

    // Both artifacts are staged before either is written.
    const std::string report_text = report.dump(2) + '\n';
    if (!a.series_out.empty()) emit(a.series_out, csv.str(), out);
    emit(a.out, report_text, out);
    return rep.monotone ? exit_ok : exit_validation;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"bathkit - discrete harmonic bath models from spectral densities", "bathkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("bathkit ") + tool_version);

    EvalSdArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval-sd", "Tabulate J(w) and S_beta(w)");
    eval_cmd->add_option("--sd", eval_args.sd, "Spectral density (JSON or two-column CSV)")->required();
    eval_args.temp.add(*eval_cmd);
    eval_cmd->add_option("--omega-min", eval_args.omega_min, "Lowest frequency, cm^-1")->capture_default_str();
    eval_cmd->add_option("--omega-max", eval_args.omega_max, "Highest frequency, cm^-1")->capture_default_str();
    eval_cmd->add_option("--n", eval_args.n, "Number of rows")->capture_default_str();
    eval_cmd->add_option("--out", eval_args.out, "Output CSV (default stdout)");

    DiscretizeArgs disc_args;
    auto* disc_cmd = app.add_subcommand("discretize", "Fit a discrete bath model to C(t)");
    disc_cmd->add_option("--sd", disc_args.sd, "Spectral density (JSON or two-column CSV)")->required();
    disc_args.temp.add(*disc_cmd);
    disc_args.grid.add(*disc_cmd);
    disc_cmd->add_option("--tol", disc_args.tol, "ID tolerance")->capture_default_str();
    disc_cmd->add_option("--memory-cap-mib", disc_args.memory_cap_mib, "FDR matrix memory cap")
        ->capture_default_str();
    disc_cmd->add_option("--nnls-max-iterations", disc_args.nnls_max_iterations,
                         "NNLS iteration cap (default 3 x rank)");
    disc_cmd->add_option("--out", disc_args.out, "Output bath JSON (default stdout)");

    ReconstructArgs rec_args;
    auto* rec_cmd = app.add_subcommand("reconstruct", "Compare a model BCF with the quadrature reference");
    rec_cmd->add_option("--model", rec_args.model, "Bath JSON (or model JSON with --bath)")->required();
    rec_cmd->add_option("--bath", rec_args.bath_label, "Bath label inside a model JSON");
    rec_cmd->add_option("--n-time", rec_args.n_time, "Time samples on [0, T] (default: model grid)");
    rec_cmd->add_option("--out", rec_args.out, "Output CSV (default stdout)");

    BuildModelArgs build_args;
    auto* build_cmd = app.add_subcommand("build-model", "Bind baths to a system Hamiltonian");
    build_cmd->add_option("--system", build_args.system, "System JSON")->required();
    build_cmd->add_option("--bath", build_args.baths, "label=bath.json (repeatable)");
    build_cmd->add_option("--out", build_args.out, "Output model JSON (default stdout)");

    PropagateArgs prop_args;
    auto* prop_cmd = app.add_subcommand("propagate", "Exact Fock-space propagation of a model");
    prop_cmd->add_option("--model", prop_args.model, "Model JSON")->required();
    prop_cmd->add_option("--caps", prop_args.caps, "'adaptive' or a uniform occupation cap")->capture_default_str();
    prop_cmd->add_option("--initial-site", prop_args.initial_site, "Initially excited site (1-based)")
        ->capture_default_str();
    prop_cmd->add_option("--t-max-fs", prop_args.t_max_fs, "Propagation time, fs")->capture_default_str();
    prop_cmd->add_option("--dt-fs", prop_args.dt_fs, "Step, fs")->capture_default_str();
    prop_cmd->add_option("--krylov-dim", prop_args.krylov_dim, "Lanczos subspace size")->capture_default_str();
    prop_cmd->add_option("--tol", prop_args.tol, "Per-step error tolerance")->capture_default_str();
    prop_cmd->add_option("--max-dim", prop_args.max_dim, "Fock dimension cap")->capture_default_str();
    prop_cmd->add_option("--coherence-row", prop_args.coherence_row, "Recorded coherence row (1-based)")
        ->capture_default_str();
    prop_cmd->add_option("--coherence-col", prop_args.coherence_col, "Recorded coherence column (1-based)")
        ->capture_default_str();
    prop_cmd->add_option("--out", prop_args.out, "Output CSV (default stdout)");

    ValidateArgs val_args;
    auto* val_cmd = app.add_subcommand("validate", "Tolerance sweep convergence study");
    val_cmd->add_option("--sd", val_args.sd, "Spectral density (JSON or two-column CSV)")->required();
    val_args.temp.add(*val_cmd);
    val_cmd->add_option("--system", val_args.system, "System JSON")->required();
    val_cmd->add_option("--tol-sweep", val_args.tol_sweep, "Comma-separated ID tolerances")
        ->required()
        ->delimiter(',');
    val_args.grid.add(*val_cmd);
    val_cmd->add_option("--slack", val_args.slack, "Allowed growth of successive distances")->capture_default_str();
    val_cmd->add_option("--dt-fs", val_args.dt_fs, "Propagation step, fs")->capture_default_str();
    val_cmd->add_option("--krylov-dim", val_args.krylov_dim, "Lanczos subspace size")->capture_default_str();
    val_cmd->add_option("--prop-tol", val_args.prop_tol, "Per-step error tolerance")->capture_default_str();
    val_cmd->add_option("--max-dim", val_args.max_dim, "Fock dimension cap")->capture_default_str();
    val_cmd->add_option("--out", val_args.out, "Report JSON (default stdout)");
    val_cmd->add_option("--series-out", val_args.series_out, "Observable series CSV");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << "bathkit " << tool_version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        if (eval_cmd->parsed()) return eval_sd(eval_args, out, err);
        if (disc_cmd->parsed()) return discretize(disc_args, out, err);
        if (rec_cmd->parsed()) return reconstruct(rec_args, out, err);
        if (build_cmd->parsed()) return build_model_cmd(build_args, out, err);
        if (prop_cmd->parsed()) return propagate_cmd(prop_args, out, err);
        if (val_cmd->parsed()) return validate(val_args, out, err);
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_nonconvergence;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_resource;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
    return exit_config;
}

} // namespace bathkit::cli
