#include "spinchain/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "spinchain/errors.hpp"

namespace spinchain {
namespace {

constexpr cplx kI{0.0, 1.0};

// History tiling: future steps per block and past steps per chunk.
constexpr int kBlock = 256;
constexpr int kChunk = 4096;

// Kernel samples R(k dt), k = 0..m, stored reversed and split into real and
// imaginary parts so the convolution is a unit-stride dot product:
// R(k dt) = rev[m - k].
struct KernelTable {
    std::vector<double> re, im;
    int m = 0;

    KernelTable(const Kernel& kernel, double dt, int steps) : re(steps + 1), im(steps + 1), m(steps) {
        for (int k = 0; k <= steps; ++k) {
            const cplx r = kernel.memory_kernel(k * dt);
            re[static_cast<std::size_t>(steps - k)] = r.real();
            im[static_cast<std::size_t>(steps - k)] = r.imag();
        }
    }
    cplx at(int k) const {
        const auto i = static_cast<std::size_t>(m - k);
        return {re[i], im[i]};
    }
};

struct History {
    std::vector<double> re, im;
    explicit History(int steps) : re(steps + 1, 0.0), im(steps + 1, 0.0) {}
    void set(int j, cplx c) {
        re[static_cast<std::size_t>(j)] = c.real();
        im[static_cast<std::size_t>(j)] = c.imag();
    }
};

// sum_{j in [j0, j1)} R((step - j) dt) c_j
cplx convolve(const KernelTable& r, const History& h, int step, int j0, int j1) {
    const double* rr = r.re.data() + (r.m - step);
    const double* ri = r.im.data() + (r.m - step);
    const double* cr = h.re.data();
    const double* ci = h.im.data();
    double sr = 0.0, si = 0.0;
#pragma omp simd reduction(+ : sr, si)
    for (int j = j0; j < j1; ++j) {
        sr += rr[j] * cr[j] - ri[j] * ci[j];
        si += rr[j] * ci[j] + ri[j] * cr[j];
    }
    return {sr, si};
}

// Accumulates sum_{j=1}^{m-1} R_{m-j} c_j for the steps of one block: the
// part with j before the block in cache-sized chunks up front, the part
// inside the block as the block is stepped.
class MemorySum {
public:
    MemorySum(const KernelTable& r, const History& h) : r_(r), h_(h) {}

    void start_block(int b0, int b1) {
        b0_ = b0;
        far_.assign(static_cast<std::size_t>(b1 - b0), cplx(0.0));
        for (int j0 = 1; j0 < b0; j0 += kChunk) {
            const int j1 = std::min(b0, j0 + kChunk);
            for (int m = b0; m < b1; ++m) far_[static_cast<std::size_t>(m - b0)] += convolve(r_, h_, m, j0, j1);
        }
    }

    // Requires c_j stored for j < m.
    cplx at(int m) const {
        return far_[static_cast<std::size_t>(m - b0_)] + convolve(r_, h_, m, std::max(1, b0_), m);
    }

private:
    const KernelTable& r_;
    const History& h_;
    int b0_ = 1;
    std::vector<cplx> far_;
};

// -i J/2 (c_{i-1} + c_{i+1})
void hopping(double half_j, const std::vector<cplx>& c, std::vector<cplx>& out) {
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        if (i > 0) s += c[i - 1];
        if (i + 1 < n) s += c[i + 1];
        out[i] = -kI * half_j * s;
    }
}

int lattice_index(double t, double dt) {
    const double x = t / dt;
    const double r = std::round(x);
    if (std::abs(x - r) > kLatticeTolerance * std::max(1.0, x)) {
        std::ostringstream os;
        os.precision(17);
        os << "grid time " << t << " is not a multiple of dt=" << dt;
        fail(ErrorKind::StepError, os.str());
    }
    return static_cast<int>(r);
}

}  // namespace

std::string to_string(VolterraScheme s) {
    return s == VolterraScheme::PredictorCorrector2 ? "predictor-corrector" : "trapezoid";
}

VolterraScheme volterra_scheme_from_string(std::string_view name) {
    if (name == "predictor-corrector") return VolterraScheme::PredictorCorrector2;
    if (name == "trapezoid") return VolterraScheme::Trapezoid;
    fail(ErrorKind::ParamError, "unknown Volterra scheme '" + std::string(name) + "'");
}

double lattice_step(const TimeGrid& grid, double target) {
    if (!(target > 0.0)) fail(ErrorKind::StepError, "dt must be positive");
    if (grid.size() < 2) return target;
    const double spacing = grid[1] - grid[0];
    return spacing / std::ceil(spacing / target * (1.0 - 1e-12));
}

Trajectory solve_volterra(const ChainSpec& chain, const Kernel& left, const Kernel& right,
                          const InitialState& init, const VolterraConfig& cfg, const TimeGrid& grid) {
    const int n = chain.n_sites;
    if (n < 2 || init.size() != static_cast<std::size_t>(n)) {
        fail(ErrorKind::DimensionError, "initial state does not match the chain");
    }
    const double dt = cfg.dt;
    if (!(dt > 0.0) || dt > kMaxStepTimesCoupling / chain.coupling) {
        std::ostringstream os;
        os << "dt=" << dt << " outside (0, " << kMaxStepTimesCoupling / chain.coupling << "]";
        fail(ErrorKind::StepError, os.str());
    }
    if (grid.empty()) fail(ErrorKind::DimensionError, "time grid is empty");

    std::vector<int> out_steps(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out_steps[i] = lattice_index(grid[i], dt);
    const int steps = out_steps.back();

    const KernelTable r1(left, dt, steps);
    const bool same = left.spec() == right.spec();
    const KernelTable r2 = same ? r1 : KernelTable(right, dt, steps);
    History h1(steps), h2(steps);
    MemorySum mem1(r1, h1), mem2(r2, h2);

    const std::size_t un = static_cast<std::size_t>(n);
    const std::size_t last = un - 1;
    const double half_j = 0.5 * chain.coupling;
    std::vector<cplx> c = init.amplitudes;
    const cplx c1_0 = c[0], cn_0 = c[last];
    h1.set(0, c1_0);
    h2.set(0, cn_0);

    Trajectory traj(grid, un, Provenance::VolterraOracle);
    std::size_t next_out = 0;
    auto record = [&](int step) {
        while (next_out < out_steps.size() && out_steps[next_out] == step) {
            std::copy(c.begin(), c.end(), traj.amplitudes.begin() + static_cast<std::ptrdiff_t>(next_out * un));
            ++next_out;
        }
    };
    record(0);

    // Implicit trapezoid: (1 - dt/2 H + dt^2/4 R_0 E) c_{n+1} = rhs, E the edge projector.
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    if (cfg.scheme == VolterraScheme::Trapezoid) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
        for (int i = 0; i + 1 < n; ++i) {
            a(i, i + 1) += 0.5 * dt * kI * half_j;
            a(i + 1, i) += 0.5 * dt * kI * half_j;
        }
        a(0, 0) += 0.25 * dt * dt * r1.at(0);
        a(n - 1, n - 1) += 0.25 * dt * dt * r2.at(0);
        lu.compute(a);
    }

    std::vector<cplx> f(un), fp(un), cp(un);
    Eigen::VectorXcd rhs(n);
    cplx mem_1 = 0.0, mem_n = 0.0;  // convolution integrals at the current step
    for (int b0 = 1; b0 <= steps; b0 += kBlock) {
        const int b1 = std::min(steps + 1, b0 + kBlock);
        mem1.start_block(b0, b1);
        mem2.start_block(b0, b1);
        for (int m = b0; m < b1; ++m) {
            hopping(half_j, c, f);
            f[0] -= mem_1;
            f[last] -= mem_n;
            // Known part of the convolution at step m: every sample but c_m.
            const cplx known1 = dt * (0.5 * r1.at(m) * c1_0 + mem1.at(m));
            const cplx known_n = dt * (0.5 * r2.at(m) * cn_0 + mem2.at(m));
            const cplx w1 = 0.5 * dt * r1.at(0), wn = 0.5 * dt * r2.at(0);

            if (cfg.scheme == VolterraScheme::PredictorCorrector2) {
                for (std::size_t i = 0; i < un; ++i) cp[i] = c[i] + dt * f[i];
                hopping(half_j, cp, fp);
                fp[0] -= known1 + w1 * cp[0];
                fp[last] -= known_n + wn * cp[last];
                for (std::size_t i = 0; i < un; ++i) c[i] += 0.5 * dt * (f[i] + fp[i]);
            } else {
                for (std::size_t i = 0; i < un; ++i) rhs(static_cast<Eigen::Index>(i)) = c[i] + 0.5 * dt * f[i];
                rhs(0) -= 0.5 * dt * known1;
                rhs(n - 1) -= 0.5 * dt * known_n;
                const Eigen::VectorXcd next = lu.solve(rhs);
                for (std::size_t i = 0; i < un; ++i) c[i] = next(static_cast<Eigen::Index>(i));
            }
            mem_1 = known1 + w1 * c[0];
            mem_n = known_n + wn * c[last];
            h1.set(m, c[0]);
            h2.set(m, c[last]);
            record(m);
        }
    }
    return traj;
}

Trajectory solve_volterra(const LaplaceState& state, const VolterraConfig& cfg, const TimeGrid& grid) {
    return solve_volterra(state.chain(), state.left(), state.right(), state.initial(), cfg, grid);
}

PseudomodeSystem PseudomodeSystem::from(const ChainSpec& chain, const ReservoirSpec& left,
                                        const ReservoirSpec& right, const InitialState& init) {
    const auto* l = std::get_if<LorentzianParams>(&left.params);
    const auto* r = std::get_if<LorentzianParams>(&right.params);
    if (!l || !r) fail(ErrorKind::KindError, "pseudomode oracle requires Lorentzian reservoirs on both edges");
    if (init.size() != static_cast<std::size_t>(chain.n_sites)) {
        fail(ErrorKind::DimensionError, "initial state does not match the chain");
    }
    return {chain, init, left.g, right.g, cplx(0.5 * l->gamma, l->delta_c), cplx(0.5 * r->gamma, r->delta_c)};
}

PseudomodeSystem PseudomodeSystem::from(const LaplaceState& state) {
    return from(state.chain(), state.left().spec(), state.right().spec(), state.initial());
}

Trajectory solve_pseudomode(const PseudomodeSystem& sys, const TimeGrid& grid) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<cplx>;
    if (grid.empty()) fail(ErrorKind::DimensionError, "time grid is empty");

    const std::size_t n = static_cast<std::size_t>(sys.chain.n_sites);
    const double half_j = 0.5 * sys.chain.coupling;
    // Layout: c_1..c_N, b_left, b_right.
    auto rhs = [&](const State& x, State& dx, double /*t*/) {
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            if (i > 0) s += x[i - 1];
            if (i + 1 < n) s += x[i + 1];
            dx[i] = -kI * half_j * s;
        }
        dx[0] -= kI * sys.g_left * x[n];
        dx[n - 1] -= kI * sys.g_right * x[n + 1];
        dx[n] = -kI * sys.g_left * x[0] - sys.decay_left * x[n];
        dx[n + 1] = -kI * sys.g_right * x[n - 1] - sys.decay_right * x[n + 1];
    };

    State x(n + 2, 0.0);
    std::copy(sys.initial.amplitudes.begin(), sys.initial.amplitudes.end(), x.begin());

    std::vector<double> times(grid.values().begin(), grid.values().end());
    const bool prepend = times.front() > 0.0;
    if (prepend) times.insert(times.begin(), 0.0);

    Trajectory traj(grid, n, Provenance::PseudomodeOracle);
    std::size_t idx = 0;
    auto observe = [&](const State& s, double /*t*/) {
        if (prepend && idx == 0) {
            ++idx;
            return;
        }
        const std::size_t row = prepend ? idx - 1 : idx;
        std::copy(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n),
                  traj.amplitudes.begin() + static_cast<std::ptrdiff_t>(row * n));
        ++idx;
    };
    if (times.size() == 1) {
        observe(x, times.front());
        return traj;
    }
    auto stepper = odeint::make_dense_output(kPseudomodeAbsTol, kPseudomodeRelTol, odeint::runge_kutta_dopri5<State>());
    const double dt0 = std::min(1e-3, 0.1 / sys.chain.coupling);
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observe);
    return traj;
}

}  // namespace spinchain
