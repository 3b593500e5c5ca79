#pragma once

// Reductions over trajectories: populations, channel population, average
// transfer fidelity F = 1/2 + |c_N|^2/6 + |c_N|/3, and sweep summaries.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spinchain/inversion.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

enum class SeriesKind { SitePopulation, Channel, Total, Fidelity };

struct ObservableSeries {
    SeriesKind kind = SeriesKind::Total;
    int site = 0;  // 1-based, SitePopulation only
    TimeGrid grid;
    std::vector<double> values;

    std::string label() const;  // "P_3", "P_channel", "P_total", "fidelity"
};

struct Populations {
    std::vector<ObservableSeries> sites;
    ObservableSeries channel;  // sites 2..N-1
    ObservableSeries total;
};

Populations populations(const Trajectory& traj);

double fidelity_from_amplitude(double abs_cn) noexcept;
ObservableSeries fidelity(const Trajectory& traj);

struct Peak {
    double value = 0.0;
    double time = 0.0;
};

// Discrete maximum refined by the vertex of the parabola through the
// neighbouring samples (kept only if it lies between them).
Peak refined_maximum(const TimeGrid& grid, std::span<const double> values);

struct FidelityPeak {
    int n_sites = 0;
    double max_fidelity = 0.0;
    double argmax_t = 0.0;
};

inline constexpr double kSweepSamplesPerUnitTime = 10.0;

// Horizon 4N/J by default. Each chain starts from the first-site state; the
// refined time is re-evaluated by a single-point inversion.
std::vector<FidelityPeak> max_fidelity_sweep(const ChainSpec& chain, const ReservoirSpec& left,
                                             const ReservoirSpec& right, std::span<const int> n_values,
                                             std::optional<double> horizon, const InversionPlan& plan);

// Maximum of F over a chain's trajectory on [0, horizon], refined as above.
FidelityPeak max_fidelity(const LaplaceState& state, double horizon, const InversionPlan& plan);

// Frequency (rad per unit time) of the strongest periodogram peak of the
// mean-removed series, scanned up to the grid's Nyquist frequency.
double dominant_frequency(const TimeGrid& grid, std::span<const double> values);

}  // namespace spinchain
