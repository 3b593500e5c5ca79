#pragma once

// Laplace-space solution of the chain equations
//
//   s F_1 = c_1(0) - i J/2 F_2 - B_1 F_1
//   s F_i = c_i(0) - i J/2 (F_{i-1} + F_{i+1}),     i = 2..N-1
//   s F_N = c_N(0) - i J/2 F_{N-1} - B_2 F_N
//
// through the polynomial sequence A_m(s) (A_0 = 0, A_1 = 1,
// A_{m+2} = (iks) A_{m+1} - A_m, k = 2/J).

#include <complex>
#include <span>
#include <vector>

#include "spinchain/kernels.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

inline constexpr double kSingularDenominator = 1e-300;
inline constexpr double kClosingResidualTolerance = 1e-9;

struct ASequence {
    double k = 0.0;
    cplx s;
    std::vector<cplx> values;  // values[m] = A_m(s), m = 0..n_max

    cplx operator[](int m) const { return values[static_cast<std::size_t>(m)]; }
    int n_max() const noexcept { return static_cast<int>(values.size()) - 1; }
};

// Three-term recursion; exact polynomial arithmetic in s.
ASequence a_sequence(double k, cplx s, int n_max);

class LaplaceState {
public:
    LaplaceState(ChainSpec chain, Kernel left, Kernel right, InitialState init);
    explicit LaplaceState(const ValidatedConfig& cfg);

    const ChainSpec& chain() const noexcept { return chain_; }
    const Kernel& left() const noexcept { return left_; }
    const Kernel& right() const noexcept { return right_; }
    const InitialState& initial() const noexcept { return init_; }
    int n_sites() const noexcept { return chain_.n_sites; }

    struct KernelPair {
        cplx b1;
        cplx b2;
    };
    // B_1(s), B_2(s); evaluated once when both reservoirs are identical.
    KernelPair kernels_at(cplx s) const;

    // Frequency span (from the rotating frame) holding the singularities of F_i.
    double spectral_extent() const noexcept;

    // True when every F_i is meromorphic (both reservoirs Lorentzian).
    bool meromorphic() const noexcept;

private:
    ChainSpec chain_;
    Kernel left_;
    Kernel right_;
    InitialState init_;
    bool same_reservoirs_;
};

// Closed-form F_1(s). Throws SingularPoint when the denominator vanishes.
cplx f1(const LaplaceState& state, cplx s);
cplx f1(const ChainSpec& chain, std::span<const cplx> c0, cplx b1, cplx b2, cplx s);

// Every F_i, written through the same sequence as
//   F_i = (ik / D) [ P_i sum_{j>=i} Q_j c_j + Q_i sum_{j<i} P_j c_j ]
// with P_i = A_i + ik B_1 A_{i-1} (the coefficient of F_1 in the forward
// recursion below), Q_j = A_{N+1-j} + ik B_2 A_{N-j} (its mirror image) and
// D the F_1 denominator; at i = 1 this is the closed-form F_1. Every term is
// a product, so no digits are lost at large |s|. The last-site equation is
// checked at s (ConsistencyError above 1e-9 relative).
std::vector<cplx> f_all(const LaplaceState& state, cplx s);
void f_all(const ChainSpec& chain, std::span<const cplx> c0, cplx b1, cplx b2, cplx s,
           std::span<cplx> out);

// The forward recursion from F_1,
//   F_i = A_i F_1 + A_{i-1} (ik) B_1 F_1 - (ik) sum_{n<i} A_{i-n} c_n(0),
// followed by the same last-site check. The recursion carries the growing
// solution of the three-term recurrence, so rounding in F_1 is amplified by
// roughly rho^(2(i-1)), rho the larger root of x^2 - iks x + 1; the check
// reports that as ConsistencyError.
std::vector<cplx> f_all_recursive(const LaplaceState& state, cplx s);
void f_all_recursive(const ChainSpec& chain, std::span<const cplx> c0, cplx b1, cplx b2, cplx s,
                     std::span<cplx> out);

// Single site (1-based) of f_all.
cplx f_site(const LaplaceState& state, cplx s, int site);

// Relative residual of the last-site equation for a computed F.
double closing_residual(const ChainSpec& chain, std::span<const cplx> c0, cplx b2, cplx s,
                        std::span<const cplx> f);

}  // namespace spinchain
