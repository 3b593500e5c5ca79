#include "spinchain/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Extra series terms beyond the last spectral feature, t * bandwidth / pi.
constexpr int kTermMargin = 32;
// The error estimate compares Euler averages of depth m and m - kEstimateLag.
constexpr int kEstimateLag = 8;
constexpr double kRetryShiftFactor = 1.5;
constexpr double kTruncationShare = 0.1;
// Talbot is used only where r pi / 2 clears the spectrum by this factor.
constexpr double kTalbotClearance = 2.0;
constexpr double kInitialValueProbe = 1e15;

struct PointValue {
    std::vector<cplx> f;
    double error = 0.0;
    int terms = 0;
};

// C(m, j) / 2^m, j = 0..m.
std::vector<double> binomial_weights(int m) {
    std::vector<double> w(static_cast<std::size_t>(m) + 1);
    w[0] = std::ldexp(1.0, -m);
    for (int j = 0; j < m; ++j) {
        w[static_cast<std::size_t>(j) + 1] = w[static_cast<std::size_t>(j)] * (m - j) / (j + 1.0);
    }
    return w;
}

class Engine {
public:
    Engine(std::size_t dim, const LaplaceEvaluator& eval, double bandwidth, const InversionPlan& plan)
        : dim_(dim), eval_(eval), bandwidth_(bandwidth), plan_(plan),
          w_full_(binomial_weights(plan.euler_depth)),
          w_lag_(binomial_weights(plan.euler_depth - kEstimateLag)),
          buf_(dim), buf2_(dim) {}

    std::size_t evaluations() const noexcept { return evaluations_; }

    PointValue fourier_euler(double t, double shift) {
        const double a = shift / t;
        const double h = kPi / t;
        const int m = plan_.euler_depth;
        const int cap = plan_.n_terms - m;
        const double want = std::ceil(t * bandwidth_ / kPi) + kTermMargin;
        int n = static_cast<int>(std::min<double>(cap, want));

        // partial_[k * dim + c]: partial sum through term k.
        partial_.assign(dim_, 0.0);
        evaluate(cplx(a, 0.0), buf_);
        std::copy(buf_.begin(), buf_.end(), partial_.begin());
        double magnitude = max_abs(buf_);
        int have = 0;

        const double prefactor = std::exp(shift) / (2.0 * t);
        const double e2 = std::exp(-2.0 * shift);
        const double alias = e2 / (1.0 - e2);

        PointValue out;
        out.f.assign(dim_, 0.0);
        while (true) {
            const int upto = n + m;
            partial_.resize(static_cast<std::size_t>(upto + 1) * dim_);
            for (int k = have + 1; k <= upto; ++k) {
                const double y = k * h;
                evaluate(cplx(a, y), buf_);
                evaluate(cplx(a, -y), buf2_);
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                const cplx* prev = partial_.data() + static_cast<std::size_t>(k - 1) * dim_;
                cplx* cur = partial_.data() + static_cast<std::size_t>(k) * dim_;
                double mag = 0.0;
                for (std::size_t c = 0; c < dim_; ++c) {
                    const cplx term = sign * (buf_[c] + buf2_[c]);
                    cur[c] = prev[c] + term;
                    mag = std::max(mag, std::abs(term));
                }
                magnitude += mag;
            }
            have = upto;

            double spread = 0.0;
            for (std::size_t c = 0; c < dim_; ++c) {
                cplx full = 0.0, lag = 0.0;
                for (int j = 0; j <= m; ++j) {
                    const cplx sj = partial_[static_cast<std::size_t>(n + j) * dim_ + c];
                    full += w_full_[static_cast<std::size_t>(j)] * sj;
                    if (j <= m - kEstimateLag) lag += w_lag_[static_cast<std::size_t>(j)] * sj;
                }
                out.f[c] = prefactor * full;
                spread = std::max(spread, std::abs(full - lag));
            }
            const double truncation = prefactor * spread;
            out.error = truncation + prefactor * 4.0 * kEps * magnitude + alias;
            out.terms = upto;
            // Only the truncation part shrinks with n; rounding and aliasing
            // are fixed by the contour shift.
            if (truncation <= kTruncationShare * plan_.target_tol || n >= cap) break;
            n = std::min(cap, 2 * n);
        }
        return out;
    }

    // Returns false when the contour cannot enclose the spectrum at this t.
    bool talbot(double t, PointValue& out) {
        const int m = plan_.talbot_nodes;
        const double r = 2.0 * m / (5.0 * t);
        if (r * kPi / 2.0 < kTalbotClearance * bandwidth_) return false;
        const std::vector<cplx> fine = talbot_sum(t, m);
        const double magnitude = magnitude_;
        const std::vector<cplx> coarse = talbot_sum(t, m - kEstimateLag);
        double spread = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) spread = std::max(spread, std::abs(fine[c] - coarse[c]));
        out.f = fine;
        out.error = spread + 4.0 * kEps * magnitude;
        out.terms = 2 * m;
        return true;
    }

private:
    void evaluate(cplx s, std::vector<cplx>& dst) {
        ++evaluations_;
        eval_(s, dst);
    }

    static double max_abs(const std::vector<cplx>& v) {
        double m = 0.0;
        for (const cplx& x : v) m = std::max(m, std::abs(x));
        return m;
    }

    std::vector<cplx> talbot_sum(double t, int m) {
        const double r = 2.0 * m / (5.0 * t);
        std::vector<cplx> acc(dim_, 0.0);
        evaluate(cplx(r, 0.0), buf_);
        const double er = std::exp(r * t);
        magnitude_ = er * max_abs(buf_);
        for (std::size_t c = 0; c < dim_; ++c) acc[c] = er * buf_[c];
        for (int k = 1; k < m; ++k) {
            const double theta = k * kPi / m;
            const double cot = std::cos(theta) / std::sin(theta);
            const double sigma = theta + (theta * cot - 1.0) * cot;
            const cplx s = r * theta * cplx(cot, 1.0);
            const cplx e_up = std::exp(s * t);
            const cplx e_dn = std::exp(std::conj(s) * t);
            evaluate(s, buf_);
            evaluate(std::conj(s), buf2_);
            for (std::size_t c = 0; c < dim_; ++c) {
                acc[c] += e_up * buf_[c] * cplx(1.0, sigma) + e_dn * buf2_[c] * cplx(1.0, -sigma);
            }
            magnitude_ += std::abs(e_up) * (1.0 + std::abs(sigma)) * (max_abs(buf_) + max_abs(buf2_));
        }
        for (auto& x : acc) x *= r / (2.0 * m);
        magnitude_ *= r / (2.0 * m);
        return acc;
    }

    std::size_t dim_;
    const LaplaceEvaluator& eval_;
    double bandwidth_;
    const InversionPlan& plan_;
    std::vector<double> w_full_;
    std::vector<double> w_lag_;
    std::vector<cplx> buf_, buf2_;
    std::vector<cplx> partial_;
    double magnitude_ = 0.0;
    std::size_t evaluations_ = 0;
};

bool is_contour_failure(const Error& e) {
    return e.kind() == ErrorKind::SingularPoint || e.kind() == ErrorKind::ConsistencyError;
}

}  // namespace

std::string to_string(InversionMethod m) {
    return m == InversionMethod::FourierEuler ? "fourier-euler" : "fixed-talbot";
}

InversionMethod inversion_method_from_string(std::string_view name) {
    if (name == "fourier-euler") return InversionMethod::FourierEuler;
    if (name == "fixed-talbot") return InversionMethod::FixedTalbot;
    fail(ErrorKind::ParamError, "unknown inversion method '" + std::string(name) + "'");
}

void InversionPlan::validate() const {
    if (!(contour_shift > 0.0) || !std::isfinite(contour_shift)) {
        fail(ErrorKind::ParamError, "contour_shift must be positive");
    }
    if (n_terms < 32) fail(ErrorKind::ParamError, "n_terms must be at least 32");
    if (euler_depth <= kEstimateLag || euler_depth >= n_terms) {
        fail(ErrorKind::ParamError, "euler_depth must exceed 8 and stay below n_terms");
    }
    if (!(target_tol >= 1e-12)) fail(ErrorKind::ParamError, "target_tol must be at least 1e-12");
    if (talbot_nodes <= kEstimateLag + 1) fail(ErrorKind::ParamError, "talbot_nodes must exceed 9");
}

InversionResult invert_function(std::size_t dim, const LaplaceEvaluator& eval, double bandwidth,
                                bool meromorphic, const InversionPlan& plan, const TimeGrid& grid,
                                std::span<const cplx> at_zero) {
    plan.validate();
    if (grid.empty()) fail(ErrorKind::DimensionError, "time grid is empty");
    if (dim == 0) fail(ErrorKind::DimensionError, "evaluator has no components");
    if (!at_zero.empty() && at_zero.size() != dim) {
        fail(ErrorKind::DimensionError, "initial values do not match the evaluator dimension");
    }
    if (plan.method == InversionMethod::FixedTalbot && !meromorphic) {
        fail(ErrorKind::KindError, "fixed Talbot inversion requires meromorphic transforms (Lorentzian reservoirs)");
    }

    InversionResult result{Trajectory(grid, dim, Provenance::LaplaceInversion), {}};
    auto& traj = result.trajectory;
    auto& diag = result.diagnostics;
    traj.error_estimate.assign(grid.size(), 0.0);
    Engine engine(dim, eval, bandwidth, plan);

    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
        const double t = grid[ti];
        if (t == 0.0) {
            if (!at_zero.empty()) {
                for (std::size_t c = 0; c < dim; ++c) traj.amplitude(ti, c) = at_zero[c];
            } else {
                std::vector<cplx> probe(dim);
                eval(cplx(kInitialValueProbe, 0.0), probe);
                for (std::size_t c = 0; c < dim; ++c) traj.amplitude(ti, c) = kInitialValueProbe * probe[c];
            }
            continue;
        }

        PointValue point;
        double shift = plan.contour_shift;
        for (int attempt = 0;; ++attempt) {
            try {
                bool done = false;
                if (plan.method == InversionMethod::FixedTalbot) {
                    done = engine.talbot(t, point);
                    if (!done) ++diag.talbot_fallbacks;
                }
                if (!done) point = engine.fourier_euler(t, shift);
                break;
            } catch (const Error& e) {
                if (!is_contour_failure(e)) throw;
                if (attempt > 0) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "inversion failed at t=" << t << " after a contour shift retry: " << e.what();
                    fail(ErrorKind::ContourError, os.str());
                }
                ++diag.contour_retries;
                shift *= kRetryShiftFactor;
            }
        }
        for (std::size_t c = 0; c < dim; ++c) traj.amplitude(ti, c) = point.f[c];
        traj.error_estimate[ti] = point.error;
        diag.max_error = std::max(diag.max_error, point.error);
        diag.max_terms_used = std::max(diag.max_terms_used, point.terms);
        if (!(point.error <= plan.target_tol)) ++diag.points_over_tolerance;
    }
    diag.evaluations = engine.evaluations();
    return result;
}

InversionResult invert(const LaplaceState& state, const InversionPlan& plan, const TimeGrid& grid) {
    const auto c0 = std::span<const cplx>(state.initial().amplitudes);
    const LaplaceEvaluator eval = [&state, c0](cplx s, std::span<cplx> out) {
        const auto [b1, b2] = state.kernels_at(s);
        f_all(state.chain(), c0, b1, b2, s, out);
    };
    return invert_function(static_cast<std::size_t>(state.n_sites()), eval, state.spectral_extent(),
                           state.meromorphic(), plan, grid, c0);
}

}  // namespace spinchain
