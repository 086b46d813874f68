#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plausible/contact_trace.hpp"
#include "plausible/engine.hpp"
#include "plausible/evaluation.hpp"
#include "plausible/extract.hpp"
#include "plausible/mobility_trace.hpp"
#include "plausible/rwp.hpp"

namespace plausible {

// One synthetic scenario: RWP ground truth, contact extraction, optional
// randomization or event deletion, inference and scoring.
struct Scenario {
    RwpConfig mobility;  // seed is ignored; each run derives its own
    SamplingConfig sampling;
    bool randomize = false;
    double delete_fraction = 0.0;  // drop this share of events to mimic a lossy trace
    std::size_t reference_count = 0;  // nodes 0..count-1 are references
    bool known_initial = true;
    InferenceConfig inference;  // space, references, ground truth and initials are filled per run
    std::optional<TimeWindow> window;  // default: first 90% of the duration
};

struct RunArtifacts {
    std::uint64_t seed = 0;
    MobilityTrace original;
    ContactTrace trace;
    MobilityTrace inferred;
    std::vector<NodeId> references;
    AccuracySeries accuracy;
    ContactDiffSeries contacts;
};

// Runs the full pipeline for one seed. Every random draw derives from seed.
RunArtifacts run_pipeline(const Scenario& scenario, std::uint64_t seed);

// Removes round(fraction * events) events chosen uniformly without replacement.
ContactTrace delete_events(const ContactTrace& trace, double fraction, std::uint64_t seed);

// Scalar metrics of one run, keyed by name.
std::map<std::string, double> run_metrics(const RunArtifacts& run);

struct ExperimentSpec {
    Scenario scenario;
    std::size_t runs = 20;
    std::uint64_t base_seed = 1;  // run k uses base_seed + k
};

struct ExperimentResult {
    std::vector<std::uint64_t> seeds;
    std::vector<std::map<std::string, double>> per_run;
    std::map<std::string, MeanInterval> summary;
    // Run-averaged time series (times from the first run).
    std::vector<double> times;
    std::vector<double> mean_correlation;  // NaN where no run has a value
    std::vector<double> mean_mde;
};

// Runs may execute in parallel; results are ordered by run index and do not
// depend on the thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace plausible
