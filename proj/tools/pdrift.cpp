#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "pdrift/experiment.hpp"
#include "pdrift/io.hpp"
#include "pdrift/local_time.hpp"
#include "pdrift/posterior.hpp"
#include "pdrift/sde.hpp"

namespace {

// Exit codes: 0 success, 2 config/validation error, 3 numerical failure,
// 4 partial experiment (some rows failed).
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPartial = 4;

/// `--drift` accepts a registry name (zero, sin, rough) or a file holding a
/// JSON array of basis coefficients.
pdrift::DriftSpec parse_drift(const std::string& arg, int p) {
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg);
        nlohmann::json j = nlohmann::json::parse(in);
        if (j.is_array()) return pdrift::DriftSpec(pdrift::FourierCoeffs(j.get<std::vector<double>>()));
        pdrift::DriftDescriptor d = pdrift::drift_from_json(j);
        return d.make(p);
    }
    pdrift::DriftDescriptor d;
    d.name = arg;
    return d.make(p);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian drift estimation for periodic one-dimensional diffusions"};
    app.require_subcommand(1);

    // simulate
    std::string sim_drift = "zero", sim_out;
    double sim_t = 1000.0, sim_dt = 1e-3;
    std::uint64_t sim_seed = 1;
    auto* sim = app.add_subcommand("simulate", "Euler-Maruyama sample path");
    sim->add_option("--drift", sim_drift, "drift name or coefficient file");
    sim->add_option("--T", sim_t, "horizon")->required();
    sim->add_option("--dt", sim_dt, "time step");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "output CSV")->required();

    // localtime
    std::string lt_path, lt_out;
    std::size_t lt_grid = 256;
    auto* ltc = app.add_subcommand("localtime", "periodic local time and crossing field");
    ltc->add_option("--path", lt_path, "path CSV")->required();
    ltc->add_option("--grid", lt_grid, "grid size M");
    ltc->add_option("--out", lt_out, "output CSV")->required();

    // posterior
    std::string post_path, post_out;
    int post_p = 2;
    double post_eta = 1.0, post_kappa = 1.0;
    std::size_t post_n = 64, post_grid = 256;
    auto* pc = app.add_subcommand("posterior", "Galerkin posterior from a path");
    pc->add_option("--path", post_path, "path CSV")->required();
    pc->add_option("--p", post_p, "prior order");
    pc->add_option("--eta", post_eta, "prior scale");
    pc->add_option("--kappa", post_kappa, "prior shift");
    pc->add_option("--nbasis", post_n, "Galerkin truncation N");
    pc->add_option("--grid", post_grid, "local-time grid M");
    pc->add_option("--out", post_out, "output JSON")->required();

    // experiment
    std::string exp_kind, exp_config, exp_outdir;
    auto* ec = app.add_subcommand("experiment", "run an experiment batch");
    ec->add_option("kind", exp_kind, "contraction|lln|fluctuation|coverage")->required();
    ec->add_option("--config", exp_config, "JSON config file")->required();
    ec->add_option("--out-dir", exp_outdir, "output directory (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;  // 0 covers --help
    }

    try {
        if (*sim) {
            pdrift::DriftSpec drift = parse_drift(sim_drift, 2);
            pdrift::SamplePath path;
            try {
                path = pdrift::simulate(drift, sim_t, sim_dt, sim_seed);
            } catch (const std::runtime_error& e) {
                std::cerr << "numerical failure: " << e.what() << '\n';
                return kExitNumerical;
            }
            pdrift::write_path_csv(path, sim_out);
        } else if (*ltc) {
            pdrift::SamplePath path = pdrift::read_path_csv(lt_path);
            pdrift::write_field_csv(pdrift::estimate_local_time(path, lt_grid),
                                    pdrift::chi_field(path, lt_grid), lt_out);
        } else if (*pc) {
            pdrift::PriorSpec spec(post_p, post_eta, post_kappa, post_n);
            pdrift::SamplePath path = pdrift::read_path_csv(post_path);
            const auto lt = pdrift::estimate_local_time(path, post_grid);
            const auto chi = pdrift::chi_field(path, post_grid);
            pdrift::PosteriorGaussian post;
            try {
                post = pdrift::compute_posterior(spec, lt, chi);
            } catch (const std::runtime_error& e) {
                std::cerr << "numerical failure: " << e.what() << '\n';
                return kExitNumerical;
            }
            pdrift::write_posterior_json(post, post_out);
        } else if (*ec) {
            pdrift::ExperimentConfig cfg = pdrift::load_config(exp_config);
            if (!exp_outdir.empty()) cfg.output_dir = exp_outdir;
            pdrift::ExperimentResult res;
            if (exp_kind == "contraction") res = pdrift::run_contraction(cfg);
            else if (exp_kind == "lln") res = pdrift::run_lln(cfg);
            else if (exp_kind == "fluctuation") res = pdrift::run_fluctuation(cfg);
            else if (exp_kind == "coverage") res = pdrift::run_coverage(cfg);
            else throw pdrift::ConfigError("unknown experiment kind: " + exp_kind);
            if (res.failures > 0) {
                std::cerr << res.failures << " row(s) failed\n";
                return kExitPartial;
            }
        }
    } catch (const pdrift::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        // remaining failures are unreadable/unwritable files or malformed
        // inputs: validation problems, not numerical ones
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
