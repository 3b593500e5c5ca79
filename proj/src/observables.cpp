#include "spinchain/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinchain/errors.hpp"

namespace spinchain {

std::string ObservableSeries::label() const {
    switch (kind) {
        case SeriesKind::SitePopulation: return "P_" + std::to_string(site);
        case SeriesKind::Channel: return "P_channel";
        case SeriesKind::Total: return "P_total";
        case SeriesKind::Fidelity: return "fidelity";
    }
    return "unknown";
}

Populations populations(const Trajectory& traj) {
    const std::size_t nt = traj.grid.size();
    const std::size_t n = traj.n_sites;
    Populations out;
    out.sites.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.sites[i] = {SeriesKind::SitePopulation, static_cast<int>(i + 1), traj.grid, std::vector<double>(nt)};
    }
    out.channel = {SeriesKind::Channel, 0, traj.grid, std::vector<double>(nt, 0.0)};
    out.total = {SeriesKind::Total, 0, traj.grid, std::vector<double>(nt, 0.0)};
    for (std::size_t ti = 0; ti < nt; ++ti) {
        double channel = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::norm(traj.amplitude(ti, i));
            out.sites[i].values[ti] = p;
            if (i > 0 && i + 1 < n) channel += p;
        }
        out.channel.values[ti] = channel;
        out.total.values[ti] = out.sites[0].values[ti] + channel + (n > 1 ? out.sites[n - 1].values[ti] : 0.0);
    }
    return out;
}

double fidelity_from_amplitude(double abs_cn) noexcept {
    return 0.5 + abs_cn * abs_cn / 6.0 + abs_cn / 3.0;
}

ObservableSeries fidelity(const Trajectory& traj) {
    ObservableSeries out{SeriesKind::Fidelity, 0, traj.grid, std::vector<double>(traj.grid.size())};
    const std::size_t last = traj.n_sites - 1;
    for (std::size_t ti = 0; ti < traj.grid.size(); ++ti) {
        out.values[ti] = fidelity_from_amplitude(std::abs(traj.amplitude(ti, last)));
    }
    return out;
}

Peak refined_maximum(const TimeGrid& grid, std::span<const double> values) {
    if (values.empty() || values.size() != grid.size()) {
        fail(ErrorKind::DimensionError, "series and grid sizes differ or are empty");
    }
    const auto it = std::max_element(values.begin(), values.end());
    const std::size_t k = static_cast<std::size_t>(it - values.begin());
    Peak best{*it, grid[k]};
    if (k == 0 || k + 1 == values.size()) return best;

    const double t0 = grid[k - 1], t1 = grid[k], t2 = grid[k + 1];
    const double y0 = values[k - 1], y1 = values[k], y2 = values[k + 1];
    // Parabola through the three samples, in divided differences.
    const double d01 = (y1 - y0) / (t1 - t0);
    const double d12 = (y2 - y1) / (t2 - t1);
    const double curv = (d12 - d01) / (t2 - t0);
    if (!(curv < 0.0)) return best;
    const double tv = 0.5 * (t0 + t1) - d01 / (2.0 * curv);
    if (tv <= t0 || tv >= t2) return best;
    const double yv = y1 + d01 * (tv - t1) + curv * (tv - t0) * (tv - t1);
    if (yv > best.value) best = {yv, tv};
    return best;
}

FidelityPeak max_fidelity(const LaplaceState& state, double horizon, const InversionPlan& plan) {
    if (!(horizon > 0.0)) fail(ErrorKind::ParamError, "fidelity horizon must be positive");
    const auto points = static_cast<std::size_t>(std::ceil(horizon * kSweepSamplesPerUnitTime)) + 1;
    const TimeGrid grid = TimeGrid::uniform(horizon, points);
    const InversionResult res = invert(state, plan, grid);
    const ObservableSeries fid = fidelity(res.trajectory);

    const auto it = std::max_element(fid.values.begin(), fid.values.end());
    FidelityPeak best{state.n_sites(), *it, grid[static_cast<std::size_t>(it - fid.values.begin())]};
    const Peak guess = refined_maximum(grid, fid.values);
    if (guess.time != best.argmax_t) {
        const InversionResult at = invert(state, plan, TimeGrid({guess.time}));
        const double f = fidelity_from_amplitude(std::abs(at.trajectory.amplitude(0, state.initial().size() - 1)));
        if (f > best.max_fidelity) {
            best.max_fidelity = f;
            best.argmax_t = guess.time;
        }
    }
    return best;
}

std::vector<FidelityPeak> max_fidelity_sweep(const ChainSpec& chain, const ReservoirSpec& left,
                                             const ReservoirSpec& right, std::span<const int> n_values,
                                             std::optional<double> horizon, const InversionPlan& plan) {
    std::vector<FidelityPeak> out;
    out.reserve(n_values.size());
    for (const int n : n_values) {
        ChainSpec c = chain;
        c.n_sites = n;
        const ValidatedConfig cfg = validate(c, left, right, InitialState::localized(n, 1));
        const LaplaceState state(cfg);
        const double h = horizon.value_or(4.0 * n / chain.coupling);
        out.push_back(max_fidelity(state, h, plan));
    }
    return out;
}

double dominant_frequency(const TimeGrid& grid, std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 4 || n != grid.size()) fail(ErrorKind::DimensionError, "dominant frequency needs at least 4 samples");
    const double span = grid.back() - grid[0];
    if (!(span > 0.0)) fail(ErrorKind::DimensionError, "dominant frequency needs a nonzero time span");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);

    const double w_min = 2.0 * std::numbers::pi / span;
    const double w_max = std::numbers::pi * static_cast<double>(n - 1) / span;
    const std::size_t scan = 8 * n;
    auto power = [&](double w) {
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = values[k] - mean;
            re += x * std::cos(w * grid[k]);
            im -= x * std::sin(w * grid[k]);
        }
        return re * re + im * im;
    };
    std::vector<double> w(scan), p(scan);
    for (std::size_t i = 0; i < scan; ++i) {
        w[i] = w_min + (w_max - w_min) * static_cast<double>(i) / static_cast<double>(scan - 1);
        p[i] = power(w[i]);
    }
    const std::size_t k = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    if (k == 0 || k + 1 == scan) return w[k];
    const double denom = p[k - 1] - 2.0 * p[k] + p[k + 1];
    if (denom >= 0.0) return w[k];
    const double shift = 0.5 * (p[k - 1] - p[k + 1]) / denom;
    return w[k] + shift * (w[k + 1] - w[k]);
}

}  // namespace spinchain
