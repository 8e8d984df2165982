#ifndef PDRIFT_IO_HPP
#define PDRIFT_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdrift/fourier.hpp"
#include "pdrift/local_time.hpp"
#include "pdrift/posterior.hpp"
#include "pdrift/sde.hpp"

namespace pdrift {

/// All floating point is serialized with 17 significant digits so that files
/// read back bit-exactly.
inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_path_csv(const SamplePath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    out << "t,x\n";
    for (std::size_t i = 0; i < path.x.size(); ++i)
        out << fmt17(static_cast<double>(i) * path.dt) << ',' << fmt17(path.x[i]) << '\n';
}

inline SamplePath read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open: " + file);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,x", 0) != 0)
        throw std::runtime_error("bad path file header: " + file);
    SamplePath path;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("bad path row: " + line);
        times.push_back(std::stod(line.substr(0, comma)));
        path.x.push_back(std::stod(line.substr(comma + 1)));
    }
    if (times.size() < 2) throw std::runtime_error("path file too short: " + file);
    path.dt = times[1] - times[0];
    if (path.dt <= 0.0) throw std::runtime_error("non-increasing time column: " + file);
    return path;
}

inline void write_field_csv(const LocalTimeField& lt, const ChiField& chi,
                            const std::string& file) {
    if (lt.M != chi.M) throw std::invalid_argument("write_field_csv: grid mismatch");
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    out << "x,L,chi\n";
    for (std::size_t j = 0; j < lt.M; ++j)
        out << fmt17(static_cast<double>(j) / static_cast<double>(lt.M)) << ','
            << fmt17(lt.values[j]) << ',' << chi.values[j] << '\n';
}

inline void write_stationary_csv(const StationaryLaw& law, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    out << "x,rho,s_prime\n";
    for (std::size_t j = 0; j < law.M; ++j)
        out << fmt17(static_cast<double>(j) / static_cast<double>(law.M)) << ','
            << fmt17(law.rho[j]) << ',' << fmt17(law.s_prime[j]) << '\n';
    out << "# m_mass=" << fmt17(law.m_mass) << '\n';
}

/// Posterior JSON: {p, eta, kappa, N, T, mean:[...], precision:[[...]]}.
/// Written by hand so every float carries 17 significant digits.
inline void write_posterior_json(const PosteriorGaussian& post, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    out << "{\n";
    out << "  \"p\": " << post.spec.p << ",\n";
    out << "  \"eta\": " << fmt17(post.spec.eta) << ",\n";
    out << "  \"kappa\": " << fmt17(post.spec.kappa) << ",\n";
    out << "  \"N\": " << post.spec.N << ",\n";
    out << "  \"T\": " << fmt17(post.horizon) << ",\n";
    out << "  \"mean\": [";
    for (std::size_t k = 0; k < post.mean.size(); ++k)
        out << (k ? ", " : "") << fmt17(post.mean.c[k]);
    out << "],\n  \"precision\": [";
    for (Eigen::Index i = 0; i < post.precision.rows(); ++i) {
        out << (i ? ",\n    [" : "\n    [");
        for (Eigen::Index j = 0; j < post.precision.cols(); ++j)
            out << (j ? ", " : "") << fmt17(post.precision(i, j));
        out << ']';
    }
    out << "\n  ]\n}\n";
}

inline PosteriorGaussian read_posterior_json(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open: " + file);
    nlohmann::json doc = nlohmann::json::parse(in);
    PosteriorGaussian post;
    post.spec = PriorSpec(doc.at("p").get<int>(), doc.at("eta").get<double>(),
                          doc.at("kappa").get<double>(), doc.at("N").get<std::size_t>());
    post.horizon = doc.at("T").get<double>();
    post.mean = FourierCoeffs(doc.at("mean").get<std::vector<double>>());
    const auto& rows = doc.at("precision");
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    post.precision.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = rows[static_cast<std::size_t>(i)].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != n)
            throw std::runtime_error("posterior precision not square: " + file);
        for (Eigen::Index j = 0; j < n; ++j) post.precision(i, j) = row[static_cast<std::size_t>(j)];
    }
    return post;
}

}  // namespace pdrift

#endif
