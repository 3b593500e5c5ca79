#include "spinchain/laplace.hpp"

#include <cmath>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain {
namespace {

constexpr cplx kI{0.0, 1.0};

void check_dims(const ChainSpec& chain, std::span<const cplx> c0) {
    if (chain.n_sites < 2) fail(ErrorKind::DimensionError, "chain needs at least 2 sites");
    if (c0.size() != static_cast<std::size_t>(chain.n_sites)) {
        fail(ErrorKind::DimensionError, "initial amplitudes do not match the chain length");
    }
}

[[noreturn]] void singular(cplx s, const char* what) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at s=" << s;
    fail(ErrorKind::SingularPoint, os.str());
}

cplx checked_denominator(cplx den, cplx s) {
    if (!std::isfinite(den.real()) || !std::isfinite(den.imag())) singular(s, "F_1 denominator overflowed");
    if (std::abs(den) < kSingularDenominator) singular(s, "F_1 denominator vanishes");
    return den;
}

// c_i(0) with 1-based index.
inline cplx c_at(std::span<const cplx> c0, int i) { return c0[static_cast<std::size_t>(i - 1)]; }

}  // namespace

ASequence a_sequence(double k, cplx s, int n_max) {
    if (n_max < 2) fail(ErrorKind::DimensionError, "A sequence needs n_max >= 2");
    ASequence seq{k, s, std::vector<cplx>(static_cast<std::size_t>(n_max) + 1)};
    const cplx iks = kI * k * s;
    seq.values[0] = 0.0;
    seq.values[1] = 1.0;
    for (std::size_t m = 2; m < seq.values.size(); ++m) {
        seq.values[m] = iks * seq.values[m - 1] - seq.values[m - 2];
    }
    return seq;
}

LaplaceState::LaplaceState(ChainSpec chain, Kernel left, Kernel right, InitialState init)
    : chain_(chain),
      left_(std::move(left)),
      right_(std::move(right)),
      init_(std::move(init)),
      same_reservoirs_(left_.spec() == right_.spec() && left_.omega_eg() == right_.omega_eg()) {
    check_dims(chain_, init_.amplitudes);
}

LaplaceState::LaplaceState(const ValidatedConfig& cfg)
    : LaplaceState(cfg.chain, Kernel(cfg.left, cfg.chain.omega_eg), Kernel(cfg.right, cfg.chain.omega_eg),
                   cfg.initial) {}

LaplaceState::KernelPair LaplaceState::kernels_at(cplx s) const {
    const cplx b1 = left_.laplace_kernel(s);
    const cplx b2 = same_reservoirs_ ? b1 : right_.laplace_kernel(s);
    return {b1, b2};
}

double LaplaceState::spectral_extent() const noexcept {
    return chain_.coupling + std::max(left_.spectral_extent(), right_.spectral_extent());
}

bool LaplaceState::meromorphic() const noexcept {
    return left_.kind() == ReservoirKind::Lorentzian && right_.kind() == ReservoirKind::Lorentzian;
}

cplx f1(const ChainSpec& chain, std::span<const cplx> c0, cplx b1, cplx b2, cplx s) {
    check_dims(chain, c0);
    const int n = chain.n_sites;
    const double k = chain.k();
    const ASequence a = a_sequence(k, s, n);
    const cplx ik = kI * k;
    const cplx sb2 = s + b2;

    cplx num = ik * c_at(c0, n) - k * k * sb2 * a[1] * c_at(c0, n - 1);
    for (int m = 1; m <= n - 2; ++m) {
        num += ik * (ik * sb2 * a[n - m] - a[n - 1 - m]) * c_at(c0, m);
    }
    const cplx den = ik * sb2 * a[n] - (1.0 + k * k * b1 * sb2) * a[n - 1] - ik * b1 * a[n - 2];
    return num / checked_denominator(den, s);
}

cplx f1(const LaplaceState& state, cplx s) {
    const auto [b1, b2] = state.kernels_at(s);
    return f1(state.chain(), state.initial().amplitudes, b1, b2, s);
}

double closing_residual(const ChainSpec& chain, std::span<const cplx> c0, cplx b2, cplx s,
                        std::span<const cplx> f) {
    const int n = chain.n_sites;
    const double half_j = 0.5 * chain.coupling;
    const cplx fn = f[static_cast<std::size_t>(n - 1)];
    const cplx fn1 = f[static_cast<std::size_t>(n - 2)];
    const cplx cn = c_at(c0, n);
    const cplx res = (s + b2) * fn - cn + kI * half_j * fn1;
    const double scale = std::abs(s + b2) * std::abs(fn) + std::abs(cn) + half_j * std::abs(fn1);
    return scale > 0.0 ? std::abs(res) / scale : std::abs(res);
}

void f_all_recursive(const ChainSpec& chain, std::span<const cplx> c0, cplx b1, cplx b2, cplx s,
                     std::span<cplx> out) {
    check_dims(chain, c0);
    const int n = chain.n_sites;
    if (out.size() != static_cast<std::size_t>(n)) fail(ErrorKind::DimensionError, "output span size mismatch");
    const double k = chain.k();
    const cplx ik = kI * k;
    const ASequence a = a_sequence(k, s, n);
    const cplx first = f1(chain, c0, b1, b2, s);
    out[0] = first;
    for (int i = 2; i <= n; ++i) {
        cplx source = 0.0;
        for (int m = 1; m <= i - 1; ++m) source += a[i - m] * c_at(c0, m);
        out[static_cast<std::size_t>(i - 1)] = a[i] * first + a[i - 1] * ik * b1 * first - ik * source;
    }
    const double residual = closing_residual(chain, c0, b2, s, out);
    if (!(residual <= kClosingResidualTolerance)) {
        std::ostringstream os;
        os.precision(6);
        os << "last-site equation residual " << residual << " at s=" << s
           << " (forward recursion lost precision)";
        fail(ErrorKind::ConsistencyError, os.str());
    }
}

std::vector<cplx> f_all_recursive(const LaplaceState& state, cplx s) {
    std::vector<cplx> out(static_cast<std::size_t>(state.n_sites()));
    const auto [b1, b2] = state.kernels_at(s);
    f_all_recursive(state.chain(), state.initial().amplitudes, b1, b2, s, out);
    return out;
}

namespace {

struct TwoSided {
    std::vector<cplx> p;  // p[i] = P_i, i = 1..N
    std::vector<cplx> q;  // q[j] = Q_j, j = 1..N
    cplx den;
};

TwoSided two_sided_factors(const ChainSpec& chain, cplx b1, cplx b2, cplx s) {
    const int n = chain.n_sites;
    const double k = chain.k();
    const cplx ik = kI * k;
    const ASequence a = a_sequence(k, s, n);
    TwoSided f{std::vector<cplx>(static_cast<std::size_t>(n) + 1),
               std::vector<cplx>(static_cast<std::size_t>(n) + 1), 0.0};
    for (int i = 1; i <= n; ++i) {
        f.p[static_cast<std::size_t>(i)] = a[i] + ik * b1 * a[i - 1];
        f.q[static_cast<std::size_t>(i)] = a[n + 1 - i] + ik * b2 * a[n - i];
    }
    const cplx sb2 = s + b2;
    f.den = checked_denominator(ik * sb2 * a[n] - (1.0 + k * k * b1 * sb2) * a[n - 1] - ik * b1 * a[n - 2], s);
    return f;
}

}  // namespace

void f_all(const ChainSpec& chain, std::span<const cplx> c0, cplx b1, cplx b2, cplx s,
           std::span<cplx> out) {
    check_dims(chain, c0);
    const int n = chain.n_sites;
    if (out.size() != static_cast<std::size_t>(n)) fail(ErrorKind::DimensionError, "output span size mismatch");
    const TwoSided f = two_sided_factors(chain, b1, b2, s);
    const cplx scale = kI * chain.k() / f.den;

    // suffix[i] = sum_{j>=i} Q_j c_j; the prefix sum runs alongside.
    std::vector<cplx> suffix(static_cast<std::size_t>(n) + 2, 0.0);
    for (int j = n; j >= 1; --j) {
        suffix[static_cast<std::size_t>(j)] = suffix[static_cast<std::size_t>(j) + 1] + f.q[static_cast<std::size_t>(j)] * c_at(c0, j);
    }
    cplx prefix = 0.0;  // sum_{j<i} P_j c_j
    for (int i = 1; i <= n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        out[ui - 1] = scale * (f.p[ui] * suffix[ui] + f.q[ui] * prefix);
        prefix += f.p[ui] * c_at(c0, i);
    }
    const double residual = closing_residual(chain, c0, b2, s, out);
    if (!(residual <= kClosingResidualTolerance)) {
        std::ostringstream os;
        os.precision(6);
        os << "last-site equation residual " << residual << " at s=" << s;
        fail(ErrorKind::ConsistencyError, os.str());
    }
}

std::vector<cplx> f_all(const LaplaceState& state, cplx s) {
    std::vector<cplx> out(static_cast<std::size_t>(state.n_sites()));
    const auto [b1, b2] = state.kernels_at(s);
    f_all(state.chain(), state.initial().amplitudes, b1, b2, s, out);
    return out;
}

cplx f_site(const LaplaceState& state, cplx s, int site) {
    const int n = state.n_sites();
    if (site < 1 || site > n) fail(ErrorKind::DimensionError, "site index out of range");
    const auto [b1, b2] = state.kernels_at(s);
    const auto c0 = std::span<const cplx>(state.initial().amplitudes);
    const TwoSided f = two_sided_factors(state.chain(), b1, b2, s);
    cplx acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const auto us = static_cast<std::size_t>(site);
        acc += (j >= site ? f.p[us] * f.q[uj] : f.p[uj] * f.q[us]) * c_at(c0, j);
    }
    return kI * state.chain().k() / f.den * acc;
}

}  // namespace spinchain
