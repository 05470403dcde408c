#include "udw/tomography.hpp"

#include <cmath>
#include <limits>

#include "udw/csv.hpp"
#include "udw/errors.hpp"

namespace udw {

namespace {

constexpr double dephasing_floor = 1e-300;
constexpr double dephasing_flag = 1e-6;

double spacelike_part(const CorrelationRecord& rec) {
    if (!(std::abs(rec.zz) >= dephasing_floor)) {
        throw DephasingError("pair (" + std::to_string(rec.i) + "," + std::to_string(rec.j) +
                             "): <ZZ> vanishes; fully dephasing regime");
    }
    const double ratio = rec.yy / rec.zz;
    if (!(std::abs(ratio) < 1.0)) {
        throw NoiseDominatedError("pair (" + std::to_string(rec.i) + "," + std::to_string(rec.j) +
                                      "): |yy/zz| = " + std::to_string(std::abs(ratio)) + " >= 1",
                                  ratio);
    }
    return 0.5 * std::atanh(ratio);
}

}  // namespace

const char* to_string(Regime r) { return r == Regime::spacelike ? "spacelike" : "causal"; }

std::vector<CausalTerm> causal_terms(const CorrelationRecord& rec) {
    std::vector<CausalTerm> out;
    const std::size_t n = rec.yx_ik.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (k == rec.i || k == rec.j) continue;
        out.push_back({k, rec.yx_ik[k], rec.zi, rec.xy_kj[k], rec.zj});
    }
    return out;
}

double reconstruct_spacelike(const CorrelationRecord& rec) { return spacelike_part(rec); }

double causal_correction(const std::vector<CausalTerm>& terms) {
    double c = 0.0;
    for (const auto& t : terms) {
        if (t.zi == 0.0 || t.zj == 0.0) {
            throw DephasingError("causal_correction: <Z> vanishes for k = " + std::to_string(t.k));
        }
        const double x = (t.yx_ik / t.zi) * (t.xy_kj / t.zj);
        if (!(std::abs(x) < 1.0)) {
            throw NearSingularTangentError("causal_correction: tangent product " + std::to_string(x) +
                                               " outside (-1, 1) at k = " + std::to_string(t.k),
                                           t.k);
        }
        c += 0.5 * std::atanh(x);
    }
    return c;
}

double reconstruct_general(const CorrelationRecord& rec, double correction) {
    return spacelike_part(rec) - correction;
}

double reconstruct_general(const CorrelationRecord& rec) {
    return reconstruct_general(rec, causal_correction(causal_terms(rec)));
}

std::complex<double> assemble_wightman(double H, double E) { return {0.5 * H, 0.5 * E}; }

ReconstructionResult reconstruct_pair(const CorrelationRecord& rec, double E_ij, std::optional<double> H_true) {
    ReconstructionResult r;
    r.i = rec.i;
    r.j = rec.j;
    r.H_true = H_true;
    const auto terms = causal_terms(rec);
    bool causal = false;
    for (const auto& t : terms) causal = causal || (t.yx_ik * t.xy_kj != 0.0);
    r.regime = causal ? Regime::causal : Regime::spacelike;
    if (std::abs(rec.zz) < dephasing_flag) r.flags.push_back("dephasing_dominated");
    try {
        r.C_ij = causal_correction(terms);
        r.H_reconstructed = reconstruct_general(rec, r.C_ij);
    } catch (const NoiseDominatedError&) {
        r.flags.push_back("noise_dominated");
        r.H_reconstructed = std::numeric_limits<double>::quiet_NaN();
    } catch (const NearSingularTangentError& e) {
        r.flags.push_back("near_singular_tangent_k" + std::to_string(e.k()));
        r.H_reconstructed = std::numeric_limits<double>::quiet_NaN();
    } catch (const DephasingError&) {
        r.flags.push_back("dephased");
        r.H_reconstructed = std::numeric_limits<double>::quiet_NaN();
    }
    r.W = assemble_wightman(r.H_reconstructed, E_ij);
    return r;
}

std::vector<ReconstructionResult> reconstruct_all(const ObservableTable& table, const Eigen::MatrixXd& E,
                                                  const std::optional<Eigen::MatrixXd>& H_true) {
    const auto sz = static_cast<Eigen::Index>(table.n);
    if (E.rows() != sz || E.cols() != sz) throw DomainError("reconstruct_all: E has the wrong size");
    if (H_true && (H_true->rows() != sz || H_true->cols() != sz))
        throw DomainError("reconstruct_all: H_true has the wrong size");
    std::vector<ReconstructionResult> out;
    for (std::size_t i = 0; i < table.n; ++i) {
        for (std::size_t j = i + 1; j < table.n; ++j) {
            std::optional<double> ht;
            if (H_true) ht = (*H_true)(i, j);
            out.push_back(reconstruct_pair(table.record(i, j), E(i, j), ht));
        }
    }
    return out;
}

double max_abs_error(const std::vector<ReconstructionResult>& results) {
    double m = 0.0;
    for (const auto& r : results) {
        if (!r.H_true) continue;
        const double e = std::abs(r.H_reconstructed - *r.H_true);
        m = std::isnan(e) ? std::numeric_limits<double>::infinity() : std::max(m, e);
    }
    return m;
}

double rms_error(const std::vector<ReconstructionResult>& results) {
    double s = 0.0;
    std::size_t count = 0;
    for (const auto& r : results) {
        if (!r.H_true) continue;
        const double e = r.H_reconstructed - *r.H_true;
        if (std::isnan(e)) return std::numeric_limits<double>::infinity();
        s += e * e;
        ++count;
    }
    return count ? std::sqrt(s / static_cast<double>(count)) : 0.0;
}

void write_reconstruction_csv(const std::filesystem::path& path, const std::vector<ReconstructionResult>& results,
                              std::optional<double> max_error) {
    csv::Writer w(path, {"i", "j", "regime", "H_reconstructed", "H_true_if_known", "C_ij", "Re_W", "Im_W", "flags"});
    for (const auto& r : results) {
        std::string flags;
        for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
        w.row({std::to_string(r.i), std::to_string(r.j), to_string(r.regime), csv::format(r.H_reconstructed),
               r.H_true ? csv::format(*r.H_true) : "", csv::format(r.C_ij), csv::format(r.W.real()),
               csv::format(r.W.imag()), flags});
    }
    if (max_error) w.row({"summary", "", "", csv::format(*max_error), "", "", "", "", "max_abs_error"});
}

}  // namespace udw
