#include "plausible/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "plausible/rng.hpp"

namespace plausible {

ContactTrace delete_events(const ContactTrace& trace, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("deletion fraction must lie in [0, 1]");
    const std::size_t n = trace.events.size();
    const auto drop = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    // Partial Fisher-Yates: the first `drop` slots are the deleted events.
    for (std::size_t k = 0; k < drop; ++k) std::swap(order[k], order[k + rng.below(n - k)]);
    std::vector<char> keep(n, 1);
    for (std::size_t k = 0; k < drop; ++k) keep[order[k]] = 0;
    ContactTrace out = trace;
    out.events.clear();
    for (std::size_t k = 0; k < n; ++k)
        if (keep[k]) out.events.push_back(trace.events[k]);
    return out;
}

RunArtifacts run_pipeline(const Scenario& scenario, std::uint64_t seed) {
    RwpConfig mob = scenario.mobility;
    mob.seed = derive_seed(seed, Stream::Mobility);
    auto original = std::make_shared<const MobilityTrace>(rwp_generate(mob));

    SamplingConfig sampling = scenario.sampling;
    sampling.seed = derive_seed(seed, Stream::ScanPhases);
    ContactTrace trace = extract_contacts(*original, sampling);
    if (scenario.randomize) trace = randomize_trace(trace, derive_seed(seed, Stream::Randomize));
    if (scenario.delete_fraction > 0.0)
        trace = delete_events(trace, scenario.delete_fraction, derive_seed(seed, Stream::EventDeletion));

    if (scenario.reference_count > mob.n_nodes) throw std::invalid_argument("more reference nodes than nodes");
    std::vector<NodeId> refs(scenario.reference_count);
    std::iota(refs.begin(), refs.end(), NodeId{0});

    InferenceConfig cfg = scenario.inference;
    cfg.space = mob.space;
    cfg.params.r = sampling.range;
    cfg.params.v_max = mob.v_max;
    cfg.reference_nodes = refs;
    cfg.ground_truth = original;
    if (scenario.known_initial) {
        const auto first = original->sample(0);
        cfg.initial = KnownPositions{{first.begin(), first.end()}};
    } else {
        cfg.initial = RandomPositions{derive_seed(seed, Stream::InitialPositions)};
    }
    MobilityTrace inferred = infer(trace, cfg);

    const TimeWindow window = scenario.window.value_or(default_window(mob.duration));
    AccuracySeries accuracy = evaluate_mobility(*original, inferred, refs, window);
    ContactDiffSeries contacts = contact_diff(trace, inferred, sampling.range, window);
    return RunArtifacts{seed, *original, std::move(trace), std::move(inferred), refs, std::move(accuracy),
                        std::move(contacts)};
}

std::map<std::string, double> run_metrics(const RunArtifacts& run) {
    std::map<std::string, double> m;
    const double nan = std::nan("");
    m["aggregate_correlation"] = run.accuracy.aggregate_correlation.value_or(nan);
    m["mean_mde"] = run.accuracy.mean_mde;
    m["final_mde"] = run.accuracy.mde.empty() ? nan : run.accuracy.mde.back();
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& c : run.accuracy.correlation)
        if (c) {
            sum += *c;
            ++defined;
        }
    m["mean_correlation"] = defined ? sum / static_cast<double>(defined) : nan;
    m["added_pct"] = run.contacts.mean_added_pct.value_or(nan);
    m["missed_pct"] = run.contacts.mean_missed_pct.value_or(nan);
    m["events"] = static_cast<double>(run.trace.events.size());
    return m;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.runs < 1) throw std::invalid_argument("an experiment needs at least one run");
    const auto runs = static_cast<std::ptrdiff_t>(spec.runs);
    std::vector<std::map<std::string, double>> per_run(spec.runs);
    std::vector<AccuracySeries> series(spec.runs);

    Scenario scenario = spec.scenario;
    // Parallelism is across runs; keep each run's force loop serial.
    scenario.inference.kernel = ForceKernel::Serial;

    // Exceptions may not cross the parallel region; the first failing run's is rethrown.
    std::vector<std::exception_ptr> failure(spec.runs);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < runs; ++k) {
        const auto u = static_cast<std::size_t>(k);
        try {
            RunArtifacts run = run_pipeline(scenario, spec.base_seed + u);
            per_run[u] = run_metrics(run);
            series[u] = std::move(run.accuracy);
        } catch (...) {
            failure[u] = std::current_exception();
        }
    }
    for (const auto& f : failure)
        if (f) std::rethrow_exception(f);

    ExperimentResult out;
    for (std::size_t k = 0; k < spec.runs; ++k) out.seeds.push_back(spec.base_seed + k);
    out.per_run = per_run;
    for (const auto& [key, unused] : per_run.front()) {
        std::vector<double> values;
        for (const auto& m : per_run)
            if (std::isfinite(m.at(key))) values.push_back(m.at(key));
        out.summary[key] = mean_ci90(values);
    }
    out.times = series.front().times;
    const std::size_t T = out.times.size();
    out.mean_correlation.assign(T, 0.0);
    out.mean_mde.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double c = 0.0, e = 0.0;
        std::size_t nc = 0;
        for (const auto& s : series) {
            if (s.correlation[t]) {
                c += *s.correlation[t];
                ++nc;
            }
            e += s.mde[t];
        }
        out.mean_correlation[t] = nc ? c / static_cast<double>(nc) : std::nan("");
        out.mean_mde[t] = e / static_cast<double>(series.size());
    }
    return out;
}

}  // namespace plausible
