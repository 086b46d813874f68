#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "plausible/contact_trace.hpp"
#include "plausible/forces.hpp"
#include "plausible/mobility_trace.hpp"

namespace plausible {

// Closed sample-time window [begin, end].
struct TimeWindow {
    double begin = 0.0;
    double end = kInfinity;

    [[nodiscard]] bool contains(double t) const { return t >= begin - 1e-9 && t <= end + 1e-9; }
};

// Synthetic runs are scored on the first 90% of their duration by default:
// anticipation degrades as the end of the trace approaches.
inline constexpr double kDefaultWindowFraction = 0.9;
inline TimeWindow default_window(double duration) { return {0.0, kDefaultWindowFraction * duration}; }

struct AccuracySeries {
    std::vector<double> times;
    std::vector<std::optional<double>> correlation;  // absent where either side has zero variance
    std::vector<double> mde;
    std::optional<double> aggregate_correlation;  // pooled over every (time, pair) sample
    double mean_mde = 0.0;
};

// Pearson correlation of pairwise distances over pairs of non-reference nodes.
// Throws std::invalid_argument with fewer than 2 such pairs or misaligned traces.
AccuracySeries pairwise_correlation(const MobilityTrace& original, const MobilityTrace& inferred,
                                    std::span<const NodeId> references, TimeWindow window = {});

// Mean over non-reference nodes of the distance between inferred and original
// positions. Throws std::invalid_argument when every node is a reference.
AccuracySeries mean_distance_error(const MobilityTrace& original, const MobilityTrace& inferred,
                                   std::span<const NodeId> references, TimeWindow window = {});

// Both of the above in one pass.
AccuracySeries evaluate_mobility(const MobilityTrace& original, const MobilityTrace& inferred,
                                 std::span<const NodeId> references, TimeWindow window = {});

struct ContactDiffSeries {
    std::vector<double> times;
    std::vector<std::size_t> connected;
    std::vector<std::size_t> added;
    std::vector<std::size_t> missed;
    std::vector<std::optional<double>> added_pct;  // absent where nothing is connected
    std::vector<std::optional<double>> missed_pct;
    std::optional<double> mean_added_pct;
    std::optional<double> mean_missed_pct;
};

// Compares the trace's connectivity with range-based connectivity in the
// inferred mobility at each of its sample times inside the window and before
// the end of the trace.
ContactDiffSeries contact_diff(const ContactTrace& original, const MobilityTrace& inferred, double range,
                               TimeWindow window = {});

struct IctSample {
    double time;      // end of the earlier contact
    double duration;  // gap until the same pair's next contact
};

struct IctDistribution {
    std::vector<IctSample> samples;                 // ordered by time
    std::vector<std::pair<double, double>> cdf;     // (duration, fraction <= duration), durations ascending
};

IctDistribution ict_distribution(const ContactTrace& trace);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

enum class ViolationKind { Speed, InContact, NotInContact };

struct Violation {
    ViolationKind kind;
    NodeId a;  // the node, for speed violations
    NodeId b;  // equal to a for speed violations
    double time;
    double magnitude;  // excess over the un-slackened bound, meters
};

struct ConstraintReport {
    std::vector<Violation> violations;
    double slack = 0.0;
    [[nodiscard]] bool empty() const { return violations.empty(); }
    [[nodiscard]] std::size_t count(ViolationKind k) const;
};

// Checks the maximum-speed, in-contact and not-in-contact bands at every
// sample. Link boundaries at the edges of the observation window are treated
// as absent, relaxing the corresponding side of the band.
ConstraintReport check_constraints(const MobilityTrace& mobility, const ContactTrace& trace, double range,
                                   double v_max, double slack);

// Sample mean and the half-width of the two-sided 90% Student-t interval.
struct MeanInterval {
    double mean = 0.0;
    double half_width = 0.0;
    std::size_t n = 0;
};
MeanInterval mean_ci90(std::span<const double> values);

}  // namespace plausible
