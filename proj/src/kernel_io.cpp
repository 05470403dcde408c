#include "udw/kernel_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "udw/csv.hpp"
#include "udw/errors.hpp"

namespace udw {

namespace fs = std::filesystem;
using nlohmann::json;

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << csv::format(m(i, j));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.filename().string(), "cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        for (const auto& f : csv::split(line)) row.push_back(csv::parse_double(f, path.filename().string()));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ConfigError(path.filename().string(), "ragged rows");
        }
        rows.push_back(std::move(row));
    }
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

fs::path write_kernel_matrix(const KernelMatrix& k, const fs::path& dir, const std::string& stem) {
    fs::create_directories(dir);
    json files;
    auto put = [&](const std::string& name, const Eigen::MatrixXd& m) {
        const std::string file = stem + "_" + name + ".csv";
        write_matrix_csv(dir / file, m);
        files[name] = file;
    };
    put("H", k.H);
    put("E", k.E);
    put("GR", k.GR);
    put("Delta", k.Delta);
    put("Wdiag", k.Wdiag);

    json env;
    env["format"] = "udw-kernel-matrix";
    env["version"] = 1;
    env["n"] = k.n;
    env["lambda"] = k.lambda;
    if (k.state) {
        env["state"] = {{"tag", to_string(k.state->tag)}};
        if (k.state->tag == StateTag::thermal) env["state"]["beta"] = k.state->beta;
        if (k.state->tag == StateTag::coherent || k.state->tag == StateTag::one_particle)
            env["state"]["delta"] = k.state->delta;
    } else {
        env["state"] = nullptr;
    }
    env["files"] = files;
    env["warnings"] = k.warnings;

    const fs::path path = dir / (stem + ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << env.dump(2) << '\n';
    return path;
}

KernelMatrix read_kernel_matrix(const fs::path& json_path, double tol) {
    std::ifstream in(json_path);
    if (!in) throw ConfigError("kernel_matrix", "cannot open " + json_path.string());
    json env;
    try {
        env = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("kernel_matrix", std::string("invalid JSON: ") + e.what());
    }
    auto require = [&](const char* key) -> const json& {
        if (!env.contains(key)) throw ConfigError(key, "missing");
        return env.at(key);
    };
    const auto& jn = require("n");
    const auto& jl = require("lambda");
    const auto& jf = require("files");
    if (!jn.is_number_unsigned()) throw ConfigError("n", "must be a non-negative integer");
    if (!jl.is_number() || !(jl.get<double>() > 0.0)) throw ConfigError("lambda", "must be a positive number");
    if (!jf.is_object()) throw ConfigError("files", "must be an object");
    const auto n = jn.get<std::size_t>();
    const fs::path base = json_path.parent_path();

    auto load = [&](const std::string& name, bool required) -> std::optional<Eigen::MatrixXd> {
        if (!jf.contains(name)) {
            if (required) throw ConfigError("files." + name, "missing");
            return std::nullopt;
        }
        Eigen::MatrixXd m = read_matrix_csv(base / jf.at(name).get<std::string>());
        return m;
    };
    const auto sz = static_cast<Eigen::Index>(n);
    auto square = [&](const std::string& name, const Eigen::MatrixXd& m) {
        if (m.rows() != sz || m.cols() != sz) {
            throw ConfigError("files." + name, "expected " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
        }
    };

    Eigen::MatrixXd H = *load("H", true);
    Eigen::MatrixXd GR = *load("GR", true);
    square("H", H);
    square("GR", GR);
    KernelMatrix k = KernelMatrix::from_parts(std::move(H), std::move(GR), jl.get<double>());

    double scale = 1.0;
    if (n > 0) scale = std::max({1.0, k.H.cwiseAbs().maxCoeff(), k.GR.cwiseAbs().maxCoeff()});
    auto compare = [&](const std::string& name, const Eigen::MatrixXd& derived) {
        auto m = load(name, false);
        if (!m) return;
        if (m->rows() != derived.rows() || m->cols() != derived.cols()) {
            throw ConfigError("files." + name, "wrong shape");
        }
        const double err = n ? (*m - derived).cwiseAbs().maxCoeff() : 0.0;
        if (err > tol * scale) {
            throw ConsistencyError("kernel matrix " + name + " disagrees with H/GR-derived value by " +
                                   std::to_string(err));
        }
    };
    compare("E", k.E);
    compare("Delta", k.Delta);
    if (jf.contains("Wdiag")) {
        Eigen::MatrixXd w = *load("Wdiag", false);
        if (w.cols() == 1 && w.rows() == sz) {
            compare("Wdiag", k.Wdiag);
        } else {
            throw ConfigError("files.Wdiag", "expected a column of " + std::to_string(n) + " values");
        }
    }

    if (env.contains("state") && !env["state"].is_null()) {
        const auto& js = env["state"];
        if (!js.is_object() || !js.contains("tag")) throw ConfigError("state", "expected object with 'tag'");
        FieldState st;
        st.tag = state_tag_from_string(js["tag"].get<std::string>());
        st.beta = js.value("beta", 0.0);
        st.delta = js.value("delta", 0.0);
        try {
            validate(st);
        } catch (const DomainError& e) {
            throw ConfigError("state", e.what());
        }
        k.state = st;
    }
    if (env.contains("warnings")) k.warnings = env["warnings"].get<std::vector<std::string>>();
    k.check_invariants(tol * scale);
    return k;
}

}  // namespace udw
