#include "udw/detector.hpp"

#include <array>
#include <cmath>
#include <random>

#include "udw/csv.hpp"
#include "udw/errors.hpp"
#include "udw/parallel.hpp"

namespace udw {

using cd = std::complex<double>;

namespace {

// mu value of qubit q (0-based) in basis index b.
inline double mu_of(std::size_t b, std::size_t q, std::size_t n) { return ((b >> (n - 1 - q)) & 1U) ? -1.0 : 1.0; }

// Single-qubit Pauli matrices in the mu-basis (+, -).
std::array<std::array<cd, 2>, 2> pauli_mu(Axis a) {
    const cd i(0.0, 1.0);
    switch (a) {
        case Axis::I: return {{{1.0, 0.0}, {0.0, 1.0}}};
        case Axis::X: return {{{1.0, 0.0}, {0.0, -1.0}}};
        case Axis::Y: return {{{0.0, i}, {-i, 0.0}}};
        case Axis::Z: return {{{0.0, 1.0}, {1.0, 0.0}}};
    }
    return {};
}

void check_pair(const KernelMatrix& k, std::size_t i, std::size_t j) {
    if (i >= k.n || j >= k.n) throw DomainError("detector index out of range");
    if (i == j) throw DomainError("pauli_ev_closed: i and j must differ");
}

}  // namespace

DensityMatrixDiagnostics DensityMatrix::diagnostics() const {
    DensityMatrixDiagnostics d;
    d.hermiticity_error = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    d.trace_error = std::abs(entries.trace() - cd(1.0, 0.0));
    const Eigen::MatrixXcd herm = 0.5 * (entries + entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

void DensityMatrix::check_invariants() const {
    const auto d = diagnostics();
    if (d.hermiticity_error > 1e-12)
        throw ConsistencyError("density matrix not Hermitian: " + std::to_string(d.hermiticity_error));
    if (d.trace_error > 1e-12) throw ConsistencyError("density matrix trace off by " + std::to_string(d.trace_error));
    if (d.min_eigenvalue < -1e-10)
        throw ConsistencyError("density matrix has negative eigenvalue " + std::to_string(d.min_eigenvalue) +
                               " (kernel input is not a valid state)");
}

DensityMatrix density_matrix(const KernelMatrix& k, unsigned threads) {
    if (k.n > max_qubits) {
        throw CapacityError("density_matrix: " + std::to_string(k.n) + " detectors exceed the limit of " +
                            std::to_string(max_qubits));
    }
    k.check_invariants(1e-12 * std::max(1.0, k.H.cwiseAbs().maxCoeff()));
    const std::size_t n = k.n;
    const std::size_t dim = std::size_t{1} << n;
    const double norm = 1.0 / static_cast<double>(dim);

    // Per basis index: mu vector, mu^T Delta' mu / 2 with Delta' the off-diagonal part.
    std::vector<Eigen::VectorXd> mus(dim, Eigen::VectorXd(static_cast<Eigen::Index>(n)));
    std::vector<double> quad_delta(dim);
    Eigen::MatrixXd delta_off = k.Delta;
    delta_off.diagonal().setZero();
    for (std::size_t b = 0; b < dim; ++b) {
        for (std::size_t q = 0; q < n; ++q) mus[b](static_cast<Eigen::Index>(q)) = mu_of(b, q, n);
        quad_delta[b] = 0.5 * mus[b].dot(delta_off * mus[b]);
    }
    // W = (H + iE)/2
    const Eigen::MatrixXcd W = 0.5 * (k.H.cast<cd>() + cd(0.0, 1.0) * k.E.cast<cd>());

    DensityMatrix rho;
    rho.n_qubits = n;
    rho.entries.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    parallel_for(dim, threads, [&](std::size_t row) {
        const Eigen::VectorXd& mu = mus[row];
        // sum_{ij} mu'_i mu_j E_ij = mu'^T (E mu)
        const Eigen::VectorXd e_mu = k.E * mu;
        for (std::size_t col = 0; col < dim; ++col) {
            const Eigen::VectorXd& mup = mus[col];
            const double phase = 0.5 * (quad_delta[col] - quad_delta[row]) + 0.5 * mup.dot(e_mu);
            const Eigen::VectorXd d = mu - mup;
            const cd damp = -0.5 * d.cast<cd>().dot(W * d.cast<cd>());
            rho.entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                norm * std::exp(cd(0.0, phase) + damp);
        }
    });
    rho.check_invariants();
    return rho;
}

double pauli_ev_oracle(const DensityMatrix& rho, const std::vector<PauliLabel>& ops) {
    const std::size_t n = rho.n_qubits;
    std::vector<Axis> axes(n, Axis::I);
    std::vector<bool> seen(n, false);
    for (const auto& op : ops) {
        if (op.qubit < 1 || op.qubit > n) throw DomainError("pauli_ev_oracle: qubit index out of range");
        if (seen[op.qubit - 1]) throw DomainError("pauli_ev_oracle: labels must reference distinct qubits");
        seen[op.qubit - 1] = true;
        axes[op.qubit - 1] = op.axis;
    }
    // Each factor is diagonal (I, X) or anti-diagonal (Y, Z) in the mu-basis, so
    // the tensor product has one nonzero per column: O_{b^m, b}.
    std::size_t flip = 0;
    for (std::size_t q = 0; q < n; ++q) {
        if (axes[q] == Axis::Y || axes[q] == Axis::Z) flip |= std::size_t{1} << (n - 1 - q);
    }
    const std::size_t dim = std::size_t{1} << n;
    cd total = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
        const std::size_t bp = b ^ flip;
        cd o = 1.0;
        for (std::size_t q = 0; q < n; ++q) {
            if (axes[q] == Axis::I) continue;
            const std::size_t shift = n - 1 - q;
            o *= pauli_mu(axes[q])[(bp >> shift) & 1U][(b >> shift) & 1U];
        }
        total += rho.entries(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(bp)) * o;
    }
    if (std::abs(total.imag()) > 1e-12) {
        throw ConsistencyError("pauli_ev_oracle: expectation value has imaginary part " +
                               std::to_string(total.imag()));
    }
    return total.real();
}

const char* to_string(CorrelatorKind kind) {
    switch (kind) {
        case CorrelatorKind::ZZ: return "ZZ";
        case CorrelatorKind::YY: return "YY";
        case CorrelatorKind::Zi: return "Zi";
        case CorrelatorKind::Zj: return "Zj";
        case CorrelatorKind::YiXj: return "YiXj";
        case CorrelatorKind::XiYj: return "XiYj";
    }
    return "?";
}

namespace {

double z_single(const KernelMatrix& k, std::size_t i) {
    double p = std::exp(-k.H(i, i));
    for (std::size_t m = 0; m < k.n; ++m)
        if (m != i) p *= std::cos(2.0 * k.GR(i, m));
    return p;
}

// <Y_a X_b>
double yx(const KernelMatrix& k, std::size_t a, std::size_t b) {
    double p = -std::exp(-k.H(a, a)) * std::sin(2.0 * k.GR(a, b));
    for (std::size_t m = 0; m < k.n; ++m)
        if (m != a && m != b) p *= std::cos(2.0 * k.GR(a, m));
    return p;
}

}  // namespace

double pauli_ev_closed(const KernelMatrix& k, std::size_t i, std::size_t j, CorrelatorKind kind) {
    check_pair(k, i, j);
    switch (kind) {
        case CorrelatorKind::Zi: return z_single(k, i);
        case CorrelatorKind::Zj: return z_single(k, j);
        case CorrelatorKind::YiXj: return yx(k, i, j);
        case CorrelatorKind::XiYj: return yx(k, j, i);
        case CorrelatorKind::ZZ:
        case CorrelatorKind::YY: {
            double minus = 1.0;
            double plus = 1.0;
            for (std::size_t m = 0; m < k.n; ++m) {
                if (m == i || m == j) continue;
                minus *= std::cos(2.0 * k.GR(i, m) - 2.0 * k.GR(j, m));
                plus *= std::cos(2.0 * k.GR(i, m) + 2.0 * k.GR(j, m));
            }
            const double pref = 0.5 * std::exp(-(k.H(i, i) + k.H(j, j)));
            const double a = std::exp(2.0 * k.H(i, j)) * minus;
            const double b = std::exp(-2.0 * k.H(i, j)) * plus;
            return kind == CorrelatorKind::ZZ ? pref * (a + b) : pref * (a - b);
        }
    }
    return 0.0;
}

double sample_correlator(double exact_ev, std::uint64_t shots, std::uint64_t seed) {
    if (!std::isfinite(exact_ev) || std::abs(exact_ev) > 1.0 + 1e-12) {
        throw DomainError("sample_correlator: |exact_ev| must be <= 1, got " + std::to_string(exact_ev));
    }
    if (shots < 1) throw DomainError("sample_correlator: shots must be >= 1");
    const double p = std::clamp(0.5 * (1.0 + exact_ev), 0.0, 1.0);
    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::uint64_t> draw(shots, p);
    const std::uint64_t plus = draw(rng);
    return (2.0 * static_cast<double>(plus) - static_cast<double>(shots)) / static_cast<double>(shots);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

KernelMatrix random_kernels(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("random_kernels: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> g(-0.3, 0.3);
    std::uniform_real_distribution<double> a(-1.0, 1.0);
    const auto sz = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd GR = Eigen::MatrixXd::Zero(sz, sz);
    for (Eigen::Index i = 0; i < sz; ++i)
        for (Eigen::Index j = 0; j < i; ++j) GR(i, j) = g(rng);
    Eigen::MatrixXd A(sz, sz);
    for (Eigen::Index i = 0; i < sz; ++i)
        for (Eigen::Index j = 0; j < sz; ++j) A(i, j) = a(rng);
    Eigen::MatrixXd H = A * A.transpose() / static_cast<double>(n);
    H = 0.5 * (H + H.transpose());

    const Eigen::MatrixXd E = GR - GR.transpose();
    const Eigen::MatrixXcd iE = cd(0.0, 1.0) * E.cast<cd>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(iE, Eigen::EigenvaluesOnly);
    const double boost = es.eigenvalues().cwiseAbs().maxCoeff() + 0.05;
    H.diagonal().array() += boost;
    return KernelMatrix::from_parts(std::move(H), std::move(GR), 1.0);
}

CorrelationRecord ObservableTable::record(std::size_t i, std::size_t j) const {
    if (i >= n || j >= n || i == j) throw DomainError("ObservableTable::record: invalid pair");
    CorrelationRecord r;
    r.i = i;
    r.j = j;
    r.zz = zz(i, j);
    r.yy = yy(i, j);
    r.zi = z(i);
    r.zj = z(j);
    r.yx_ik.assign(n, 0.0);
    r.xy_kj.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        r.yx_ik[k] = yx(i, k);
        // X_k and Y_j act on different qubits, so <X_k Y_j> = <Y_j X_k>.
        r.xy_kj[k] = yx(j, k);
    }
    r.shots = shots;
    return r;
}

ObservableTable exact_observables(const KernelMatrix& k) {
    ObservableTable t;
    t.n = k.n;
    const auto sz = static_cast<Eigen::Index>(k.n);
    t.z.resize(sz);
    t.zz = Eigen::MatrixXd::Zero(sz, sz);
    t.yy = Eigen::MatrixXd::Zero(sz, sz);
    t.yx = Eigen::MatrixXd::Zero(sz, sz);
    for (std::size_t i = 0; i < k.n; ++i) {
        t.z(i) = z_single(k, i);
        for (std::size_t j = 0; j < k.n; ++j) {
            if (i == j) continue;
            t.zz(i, j) = pauli_ev_closed(k, i, j, CorrelatorKind::ZZ);
            t.yy(i, j) = pauli_ev_closed(k, i, j, CorrelatorKind::YY);
            t.yx(i, j) = yx(k, i, j);
        }
    }
    return t;
}

namespace {

// Stable enumeration of the distinct observables; the index feeds derive_seed.
std::uint64_t observable_index(int family, std::size_t i, std::size_t j, std::size_t n) {
    return static_cast<std::uint64_t>(family) * n * n + i * n + j;
}

}  // namespace

ObservableTable sample_observables(const ObservableTable& exact, std::uint64_t shots, std::uint64_t seed) {
    ObservableTable t = exact;
    t.shots = shots;
    t.seed = seed;
    const std::size_t n = exact.n;
    auto s = [&](double v, int family, std::size_t i, std::size_t j) {
        return sample_correlator(v, shots, derive_seed(seed, observable_index(family, i, j, n)));
    };
    for (std::size_t i = 0; i < n; ++i) {
        t.z(i) = s(exact.z(i), 0, i, i);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            t.yx(i, j) = s(exact.yx(i, j), 3, i, j);
            if (j < i) continue;
            t.zz(i, j) = t.zz(j, i) = s(exact.zz(i, j), 1, i, j);
            t.yy(i, j) = t.yy(j, i) = s(exact.yy(i, j), 2, i, j);
        }
    }
    return t;
}

void write_correlations_csv(const std::filesystem::path& path, const ObservableTable& exact,
                            const ObservableTable& sampled) {
    if (exact.n != sampled.n) throw DomainError("write_correlations_csv: table sizes differ");
    const std::size_t n = exact.n;
    csv::Writer w(path, {"i", "j", "kind", "exact", "sampled", "shots", "seed"});
    const std::string shots = sampled.shots ? std::to_string(*sampled.shots) : "exact";
    auto seed_of = [&](int family, std::size_t i, std::size_t j) {
        return sampled.shots ? std::to_string(derive_seed(sampled.seed, observable_index(family, i, j, n))) : "";
    };
    for (std::size_t i = 0; i < n; ++i) {
        w.row({std::to_string(i), std::to_string(i), "Zi", csv::format(exact.z(i)), csv::format(sampled.z(i)), shots,
               seed_of(0, i, i)});
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            w.row({std::to_string(i), std::to_string(j), "ZZ", csv::format(exact.zz(i, j)),
                   csv::format(sampled.zz(i, j)), shots, seed_of(1, i, j)});
            w.row({std::to_string(i), std::to_string(j), "YY", csv::format(exact.yy(i, j)),
                   csv::format(sampled.yy(i, j)), shots, seed_of(2, i, j)});
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            w.row({std::to_string(i), std::to_string(j), "YiXj", csv::format(exact.yx(i, j)),
                   csv::format(sampled.yx(i, j)), shots, seed_of(3, i, j)});
        }
    }
}

}  // namespace udw
