#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pdrift/experiment.hpp"
#include "pdrift/io.hpp"
#include "pdrift/local_time.hpp"
#include "pdrift/posterior.hpp"
#include "pdrift/sde.hpp"

using namespace pdrift;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("path CSV round trip is bit exact") {
    const SamplePath path = simulate(DriftSpec::sine(0.7), 2.0, 1e-3, 5);
    const auto file = temp_file("pdrift_test_path.csv");
    write_path_csv(path, file.string());

    CHECK(slurp(file).rfind("t,x\n", 0) == 0);

    const SamplePath back = read_path_csv(file.string());
    REQUIRE(back.x.size() == path.x.size());
    CHECK(back.dt == path.dt);
    for (std::size_t i = 0; i < path.x.size(); ++i) CHECK(back.x[i] == path.x[i]);

    // writing the reread path reproduces the file byte for byte
    const auto file2 = temp_file("pdrift_test_path2.csv");
    write_path_csv(back, file2.string());
    CHECK(slurp(file) == slurp(file2));

    std::filesystem::remove(file);
    std::filesystem::remove(file2);
}

TEST_CASE("read_path_csv rejects malformed files") {
    const auto file = temp_file("pdrift_test_bad.csv");
    {
        std::ofstream out(file);
        out << "a,b\n0,0\n1,1\n";
    }
    CHECK_THROWS_AS(read_path_csv(file.string()), std::runtime_error);
    {
        std::ofstream out(file);
        out << "t,x\n0,0\n";
    }
    CHECK_THROWS_AS(read_path_csv(file.string()), std::runtime_error);
    CHECK_THROWS_AS(read_path_csv("/nonexistent/nowhere.csv"), std::runtime_error);
    std::filesystem::remove(file);
}

TEST_CASE("field CSV layout") {
    const SamplePath path = simulate(DriftSpec::sine(0.7), 3.0, 1e-3, 2);
    const LocalTimeField lt = estimate_local_time(path, 16);
    const ChiField chi = chi_field(path, 16);
    const auto file = temp_file("pdrift_test_field.csv");
    write_field_csv(lt, chi, file.string());

    std::ifstream in(file);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "x,L,chi");
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 16);
    std::filesystem::remove(file);
}

TEST_CASE("stationary CSV layout carries the mass comment") {
    const StationaryLaw law = stationary_density(DriftSpec::sine(), 16);
    const auto file = temp_file("pdrift_test_stat.csv");
    write_stationary_csv(law, file.string());

    const std::string text = slurp(file);
    CHECK(text.rfind("x,rho,s_prime\n", 0) == 0);
    CHECK(text.find("# m_mass=") != std::string::npos);
    std::filesystem::remove(file);
}

TEST_CASE("posterior JSON round trip is bit exact") {
    const SamplePath path = simulate(DriftSpec::sine(0.7), 10.0, 1e-3, 9);
    const PosteriorGaussian post = compute_posterior(
        PriorSpec(2, 0.3, 1.5, 6), estimate_local_time(path, 32), chi_field(path, 32));

    const auto file = temp_file("pdrift_test_post.json");
    write_posterior_json(post, file.string());
    const PosteriorGaussian back = read_posterior_json(file.string());

    CHECK(back.spec.p == post.spec.p);
    CHECK(back.spec.eta == post.spec.eta);
    CHECK(back.spec.kappa == post.spec.kappa);
    CHECK(back.spec.N == post.spec.N);
    CHECK(back.horizon == post.horizon);
    REQUIRE(back.mean.size() == post.mean.size());
    for (std::size_t k = 0; k < post.mean.size(); ++k)
        CHECK(back.mean.c[k] == post.mean.c[k]);
    REQUIRE(back.precision.rows() == post.precision.rows());
    for (Eigen::Index i = 0; i < post.precision.rows(); ++i)
        for (Eigen::Index j = 0; j < post.precision.cols(); ++j)
            CHECK(back.precision(i, j) == post.precision(i, j));

    const auto file2 = temp_file("pdrift_test_post2.json");
    write_posterior_json(back, file2.string());
    CHECK(slurp(file) == slurp(file2));
    std::filesystem::remove(file);
    std::filesystem::remove(file2);
}

TEST_CASE("experiment config round trip and validation") {
    ExperimentConfig cfg;
    cfg.drift.name = "sin";
    cfg.drift.amplitude = 0.8;
    cfg.prior = PriorSpec(2, 0.5, 1.0, 32);
    cfg.T_grid = {100.0, 400.0};
    cfg.dt = 1e-3;
    cfg.M = 128;
    cfg.replicates = 7;
    cfg.seed = 99;

    const ExperimentConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.drift.name == cfg.drift.name);
    CHECK(back.drift.amplitude == cfg.drift.amplitude);
    CHECK(back.prior.eta == cfg.prior.eta);
    CHECK(back.T_grid == cfg.T_grid);
    CHECK(back.dt == cfg.dt);
    CHECK(back.M == cfg.M);
    CHECK(back.replicates == cfg.replicates);
    CHECK(back.seed == cfg.seed);

    ExperimentConfig bad = cfg;
    bad.M = 100;  // not a power of two
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.T_grid = {};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.replicates = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}
