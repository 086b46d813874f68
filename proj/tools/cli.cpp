#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "plausible/contact_trace.hpp"
#include "plausible/engine.hpp"
#include "plausible/evaluation.hpp"
#include "plausible/extract.hpp"
#include "plausible/frames.hpp"
#include "plausible/mobility_trace.hpp"
#include "plausible/pipeline.hpp"
#include "plausible/rng.hpp"
#include "plausible/rwp.hpp"

namespace plausible::cli {

namespace fs = std::filesystem;

namespace {

// Bad flag values or combinations the parser cannot catch on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable, missing or inconsistent input.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Summary = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) { return std::isfinite(v) ? format_number(v) : std::string("nan"); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string("nan"); }

// Runs f, reporting invalid parameters as usage errors.
template <class F>
auto checked_params(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

// ---------- files ----------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "': check the path and permissions");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ContactTrace load_contacts(const std::string& path, std::ostream& err) {
    std::istringstream in(read_file(path));
    try {
        ParsedContactTrace parsed = parse_contact_trace(in);
        if (parsed.merged) err << "warning: " << path << ": merged " << parsed.merged << " overlapping contact(s)\n";
        return std::move(parsed.trace);
    } catch (const ParseError& e) {
        throw DataError(path + ": " + e.what() + " (expected '<a> <b> <t_up> <t_down>' contact lines)");
    }
}

MobilityTrace load_mobility(const std::string& path) {
    std::istringstream in(read_file(path));
    try {
        return parse_mobility_trace(in);
    } catch (const ParseError& e) {
        throw DataError(path + ": " + e.what() + " (expected '#space' and '#dt' headers and '<t> <id> <x> <y>' lines)");
    }
}

std::optional<fs::path> env_output_dir() {
    const char* dir = std::getenv(kOutputDirEnv);
    if (!dir || !*dir) return std::nullopt;
    return fs::path(dir);
}

// Explicit path, else <env dir>/<default_name>, else the fallback stream.
class Output {
public:
    Output(const std::string& path, const std::string& default_name, std::ostream& fallback) : stream_(&fallback) {
        fs::path target;
        if (!path.empty())
            target = path;
        else if (auto dir = env_output_dir())
            target = *dir / default_name;
        if (target.empty()) return;
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        file_ = std::make_unique<std::ofstream>(target);
        if (!*file_) throw DataError("cannot write '" + target.string() + "'");
        stream_ = file_.get();
    }
    std::ostream& stream() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

// Flag value, else the environment directory, else fallback (may be empty: no files).
std::optional<fs::path> output_dir(const std::string& flag, const std::string& fallback) {
    fs::path dir;
    if (!flag.empty())
        dir = flag;
    else if (auto env = env_output_dir())
        dir = *env;
    else
        dir = fallback;
    if (dir.empty()) return std::nullopt;
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    return out;
}

void write_series(const fs::path& p, const std::string& name, const std::vector<double>& times,
                  const std::function<std::optional<double>(std::size_t)>& value) {
    auto out = open_out(p);
    out << "# t " << name << '\n';
    for (std::size_t k = 0; k < times.size(); ++k)
        if (auto v = value(k); v && std::isfinite(*v)) out << format_number(times[k]) << ' ' << format_number(*v) << '\n';
}

void emit_summary(const Summary& summary, std::ostream& out, const std::optional<fs::path>& dir) {
    for (const auto& [k, v] : summary) out << k << '=' << v << '\n';
    if (!dir) return;
    auto file = open_out(*dir / "summary.txt");
    for (const auto& [k, v] : summary) file << k << '=' << v << '\n';
}

// ---------- flag parsing helpers ----------

std::pair<double, double> parse_extent(const std::string& text) {
    const auto x = text.find('x');
    try {
        if (x != std::string::npos) {
            std::size_t used_w = 0, used_h = 0;
            const double w = std::stod(text.substr(0, x), &used_w);
            const double h = std::stod(text.substr(x + 1), &used_h);
            if (used_w == x && used_h == text.size() - x - 1 && w > 0 && h > 0) return {w, h};
        }
    } catch (const std::exception&) {
    }
    throw UsageError("torus size '" + text + "' must look like 1000x1000");
}

// torus:WxH | plane | corridor:HW:HEAD:TAIL[:STIFFNESS]
SpaceSpec parse_space(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    try {
        if (parts.size() == 2 && parts[0] == "torus") {
            const auto [w, h] = parse_extent(parts[1]);
            return SpaceSpec::torus(w, h);
        }
        if (parts.size() == 1 && parts[0] == "plane") return SpaceSpec::plane();
        if ((parts.size() == 4 || parts.size() == 5) && parts[0] == "corridor") {
            const double stiffness = parts.size() == 5 ? std::stod(parts[4]) : std::nan("");
            return SpaceSpec::corridor(std::stod(parts[1]), static_cast<NodeId>(std::stoul(parts[2])),
                                       static_cast<NodeId>(std::stoul(parts[3])), stiffness);
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
    }
    throw UsageError("space '" + text + "' must be torus:WxH, plane or corridor:HALF_WIDTH:HEAD:TAIL[:STIFFNESS]");
}

std::vector<NodeId> parse_ids(const std::string& text) {
    std::vector<NodeId> ids;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            ids.push_back(static_cast<NodeId>(v));
        } catch (const std::exception&) {
            throw UsageError("reference id list '" + text + "' must be comma-separated node ids");
        }
    }
    return ids;
}

std::vector<NodeId> first_ids(std::size_t count) {
    std::vector<NodeId> ids(count);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    return ids;
}

// Reads `key=value` lines and turns them into `--key=value` tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::vector<std::string> tokens;
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t line_no = 0;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        tokens.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
    return tokens;
}

// Force-model flags shared by infer and experiment. NaN leaves the default.
struct ForceFlags {
    double K = ForceParams{}.K;
    double G = std::nan("");
    double alpha = ForceParams{}.alpha;
    double eps0 = ForceParams{}.eps0;
    double tau = ForceParams{}.tau;
    double d_max = std::nan("");
    double drag = std::nan("");
    bool attraction_cutoff = false;
    double relax_until = 0.0;
    double relax_factor = InferenceConfig{}.relax_speed_factor;
    double dt = 0.0;

    void add(CLI::App* app) {
        app->add_option("--K", K, "spring rigidity")->capture_default_str();
        app->add_option("--G", G, "repulsion intensity (default: calibrated for equilibrium at 0.75 r)");
        app->add_option("--alpha", alpha, "repulsion decay exponent")->capture_default_str();
        app->add_option("--eps0", eps0, "repulsion softening")->capture_default_str();
        app->add_option("--tau", tau, "anticipation scale in meters")->capture_default_str();
        app->add_option("--d-max", d_max, "interaction cutoff (default: 2 r)");
        app->add_option("--drag", drag, "drag coefficient (default: 1 on a plane, else 0)");
        app->add_flag("--attraction-cutoff", attraction_cutoff, "also cut anticipated attraction at d-max");
        app->add_option("--relax-until", relax_until, "relax the speed cap before this time")->capture_default_str();
        app->add_option("--relax-factor", relax_factor, "speed cap multiplier while relaxed")->capture_default_str();
        app->add_option("--dt", dt, "integration step (default: 1 s or the sampling period if shorter)");
    }
    void apply(InferenceConfig& cfg) const {
        cfg.params.K = K;
        cfg.params.G = G;
        cfg.params.alpha = alpha;
        cfg.params.eps0 = eps0;
        cfg.params.tau = tau;
        cfg.params.d_max = d_max;
        cfg.params.D = drag;
        cfg.params.attraction_cutoff = attraction_cutoff;
        cfg.speed_relax_until = relax_until;
        cfg.relax_speed_factor = relax_factor;
        cfg.dt = dt;
    }
};

// ---------- subcommands ----------

struct GenerateCmd {
    RwpConfig rwp;
    std::string torus = "1000x1000";
    std::uint64_t seed = 1;
    std::string output;

    void add(CLI::App* app) {
        app->add_option("--nodes", rwp.n_nodes, "number of nodes")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--torus", torus, "torus size WxH in meters")->capture_default_str();
        app->add_option("--vmin", rwp.v_min, "minimum speed")->capture_default_str();
        app->add_option("--vmax", rwp.v_max, "maximum speed")->capture_default_str();
        app->add_option("--pause", rwp.pause, "pause at each waypoint")->capture_default_str();
        app->add_option("--duration", rwp.duration, "length of the trace in seconds")->capture_default_str();
        app->add_option("--dt", rwp.timestep, "sampling step")->capture_default_str();
        app->add_option("--seed", seed, "run seed")->capture_default_str();
        app->add_option("-o,--output", output, "output mobility file");
    }
    int run(std::ostream& out, std::ostream&) {
        const auto [w, h] = parse_extent(torus);
        rwp.space = SpaceSpec::torus(w, h);
        rwp.seed = derive_seed(seed, Stream::Mobility);
        checked_params([&] {
            rwp.validate();
            return 0;
        });
        const MobilityTrace m = rwp_generate(rwp);
        Output o(output, "mobility.txt", out);
        write_mobility_trace(o.stream(), m);
        return kExitOk;
    }
};

struct ExtractCmd {
    std::string mobility;
    std::string mode = "sync";
    SamplingConfig sampling;
    std::uint64_t seed = 1;
    std::string output;

    void add(CLI::App* app) {
        app->add_option("-m,--mobility", mobility, "input mobility file")->required();
        app->add_option("--mode", mode, "sync or async")->capture_default_str()->check(CLI::IsMember({"sync", "async"}));
        app->add_option("--period", sampling.period, "sampling period T")->capture_default_str();
        app->add_option("--range", sampling.range, "transmission range r")->capture_default_str();
        app->add_option("--seed", seed, "run seed (scan phases)")->capture_default_str();
        app->add_option("-o,--output", output, "output contact file");
    }
    int run(std::ostream& out, std::ostream&) {
        if (!(sampling.period > 0.0) || !(sampling.range > 0.0)) throw UsageError("--period and --range must be > 0");
        sampling.mode = mode == "async" ? SamplingMode::Asynchronous : SamplingMode::Synchronous;
        sampling.seed = derive_seed(seed, Stream::ScanPhases);
        const MobilityTrace m = load_mobility(mobility);
        ContactTrace trace;
        try {
            trace = extract_contacts(m, sampling);
        } catch (const std::invalid_argument& e) {
            throw DataError(mobility + ": " + e.what());
        }
        Output o(output, "contacts.txt", out);
        write_contact_trace(o.stream(), trace);
        return kExitOk;
    }
};

struct RandomizeCmd {
    std::string contacts;
    std::uint64_t seed = 1;
    std::string output;

    void add(CLI::App* app) {
        app->add_option("-c,--contacts", contacts, "input contact file")->required();
        app->add_option("--seed", seed, "run seed")->capture_default_str();
        app->add_option("-o,--output", output, "output contact file");
    }
    int run(std::ostream& out, std::ostream& err) {
        const ContactTrace trace = load_contacts(contacts, err);
        if (!(trace.sampling_period > 0.0))
            throw DataError(contacts + ": randomizing needs a '#period=' header with a positive sampling period");
        const ContactTrace shifted = randomize_trace(trace, derive_seed(seed, Stream::Randomize));
        Output o(output, "contacts-randomized.txt", out);
        write_contact_trace(o.stream(), shifted);
        return kExitOk;
    }
};

struct InferCmd {
    std::string contacts;
    std::string mobility;
    std::size_t references = 0;
    std::string reference_ids;
    std::string init;
    std::string space;
    std::string anchors = "none";
    std::string kernel = "omp";
    double range = 100.0;
    double v_max = 10.0;
    std::uint64_t seed = 1;
    ForceFlags force;
    std::string output;

    void add(CLI::App* app) {
        app->add_option("-c,--contacts", contacts, "input contact file")->required();
        app->add_option("-m,--mobility", mobility, "ground-truth mobility for reference nodes and known initials");
        app->add_option("--references", references, "use nodes 0..N-1 as reference nodes")->capture_default_str();
        app->add_option("--reference-ids", reference_ids, "comma-separated reference node ids");
        app->add_option("--init", init, "known or random (default: known with --mobility)")
            ->check(CLI::IsMember({"known", "random"}));
        app->add_option("--space", space, "torus:WxH, plane or corridor:HW:HEAD:TAIL[:STIFFNESS]");
        app->add_option("--anchors", anchors, "none or head-tail")->capture_default_str()->check(CLI::IsMember({"none", "head-tail"}));
        app->add_option("--kernel", kernel, "serial or omp force loop")->capture_default_str()->check(CLI::IsMember({"serial", "omp"}));
        app->add_option("--range", range, "transmission range r")->capture_default_str();
        app->add_option("--vmax", v_max, "maximum speed")->capture_default_str();
        app->add_option("--seed", seed, "run seed (random initial positions)")->capture_default_str();
        force.add(app);
        app->add_option("-o,--output", output, "output mobility file");
    }
    int run(std::ostream& out, std::ostream& err) {
        if (references && !reference_ids.empty()) throw UsageError("use either --references or --reference-ids");
        const std::vector<NodeId> refs = reference_ids.empty() ? first_ids(references) : parse_ids(reference_ids);
        const std::string init_mode = init.empty() ? (mobility.empty() ? "random" : "known") : init;
        if (mobility.empty() && (!refs.empty() || init_mode == "known"))
            throw UsageError("reference nodes and --init known need --mobility");

        InferenceConfig cfg;
        force.apply(cfg);
        cfg.params.r = range;
        cfg.params.v_max = v_max;
        cfg.anchors = anchors == "head-tail" ? AnchorPolicy::HeadTail : AnchorPolicy::None;
        cfg.kernel = kernel == "serial" ? ForceKernel::Serial : ForceKernel::OpenMP;
        cfg.reference_nodes = refs;
        if (!space.empty()) cfg.space = parse_space(space);
        checked_params([&] {
            static_cast<void>(cfg.params.resolve(cfg.space));
            return 0;
        });

        const ContactTrace trace = load_contacts(contacts, err);
        if (!mobility.empty()) {
            auto truth = std::make_shared<const MobilityTrace>(load_mobility(mobility));
            if (space.empty()) cfg.space = truth->space();
            if (init_mode == "known") {
                const auto first = truth->sample(0);
                cfg.initial = KnownPositions{{first.begin(), first.end()}};
            }
            cfg.ground_truth = std::move(truth);
        }
        if (init_mode == "random") cfg.initial = RandomPositions{derive_seed(seed, Stream::InitialPositions)};

        MobilityTrace inferred(cfg.space, 0, 1.0);
        try {
            inferred = infer(trace, cfg);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
        Output o(output, "inferred.txt", out);
        write_mobility_trace(o.stream(), inferred);
        return kExitOk;
    }
};

struct WindowFlags {
    double begin = 0.0;
    double end = std::nan("");

    void add(CLI::App* app) {
        app->add_option("--begin", begin, "start of the scoring window")->capture_default_str();
        app->add_option("--end", end, "end of the scoring window (default: 90% of the duration)");
    }
    TimeWindow window(double duration) const {
        return {begin, std::isnan(end) ? default_window(duration).end : end};
    }
};

struct EvalMobilityCmd {
    std::string original;
    std::string inferred;
    std::size_t references = 0;
    std::string reference_ids;
    WindowFlags window;
    std::string out_dir;

    void add(CLI::App* app) {
        app->add_option("--original", original, "ground-truth mobility file")->required();
        app->add_option("--inferred", inferred, "inferred mobility file")->required();
        app->add_option("--references", references, "nodes 0..N-1 were references")->capture_default_str();
        app->add_option("--reference-ids", reference_ids, "comma-separated reference node ids");
        window.add(app);
        app->add_option("--out-dir", out_dir, "directory for series and summary files");
    }
    int run(std::ostream& out, std::ostream&) {
        if (references && !reference_ids.empty()) throw UsageError("use either --references or --reference-ids");
        const std::vector<NodeId> refs = reference_ids.empty() ? first_ids(references) : parse_ids(reference_ids);
        const MobilityTrace a = load_mobility(original);
        const MobilityTrace b = load_mobility(inferred);
        AccuracySeries acc;
        try {
            acc = evaluate_mobility(a, b, refs, window.window(a.end_time() - a.time(0)));
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
        const auto dir = output_dir(out_dir, "");
        if (dir) {
            write_series(*dir / "correlation.txt", "correlation", acc.times, [&](std::size_t k) { return acc.correlation[k]; });
            write_series(*dir / "mde.txt", "mde", acc.times, [&](std::size_t k) { return std::optional(acc.mde[k]); });
        }
        emit_summary({{"samples", std::to_string(acc.times.size())},
                      {"aggregate_correlation", num(acc.aggregate_correlation)},
                      {"mean_mde", num(acc.mean_mde)},
                      {"final_mde", num(acc.mde.empty() ? std::nan("") : acc.mde.back())}},
                     out, dir);
        return kExitOk;
    }
};

struct EvalContactsCmd {
    std::string contacts;
    std::string inferred;
    double range = 100.0;
    WindowFlags window;
    std::string out_dir;

    void add(CLI::App* app) {
        app->add_option("-c,--contacts", contacts, "observed contact file")->required();
        app->add_option("--inferred", inferred, "inferred mobility file")->required();
        app->add_option("--range", range, "transmission range r")->capture_default_str();
        window.add(app);
        app->add_option("--out-dir", out_dir, "directory for series and summary files");
    }
    int run(std::ostream& out, std::ostream& err) {
        const ContactTrace trace = load_contacts(contacts, err);
        const MobilityTrace m = load_mobility(inferred);
        ContactDiffSeries diff;
        try {
            diff = contact_diff(trace, m, range, window.window(trace.duration));
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
        const auto dir = output_dir(out_dir, "");
        if (dir) {
            write_series(*dir / "added_pct.txt", "added_pct", diff.times, [&](std::size_t k) { return diff.added_pct[k]; });
            write_series(*dir / "missed_pct.txt", "missed_pct", diff.times, [&](std::size_t k) { return diff.missed_pct[k]; });
        }
        emit_summary({{"samples", std::to_string(diff.times.size())},
                      {"mean_added_pct", num(diff.mean_added_pct)},
                      {"mean_missed_pct", num(diff.mean_missed_pct)}},
                     out, dir);
        return kExitOk;
    }
};

struct IctCmd {
    std::string contacts;
    std::string compare;
    std::string mobility;
    double range = 100.0;
    std::string mode = "async";
    double period = 0.0;
    std::uint64_t seed = 1;
    std::string out_dir;

    void add(CLI::App* app) {
        app->add_option("-c,--contacts", contacts, "contact file")->required();
        app->add_option("--compare", compare, "second contact file to compare against");
        app->add_option("-m,--mobility", mobility, "mobility file to compare against, sampled like the contact file");
        app->add_option("--range", range, "transmission range for --mobility")->capture_default_str();
        app->add_option("--mode", mode, "sampling of --mobility: sync or async")->capture_default_str()->check(CLI::IsMember({"sync", "async"}));
        app->add_option("--period", period, "sampling period for --mobility (default: the contact file's period)");
        app->add_option("--seed", seed, "scan phase seed for --mobility")->capture_default_str();
        app->add_option("--out-dir", out_dir, "directory for the CDF and summary files");
    }
    static std::vector<double> durations(const IctDistribution& d) {
        std::vector<double> v;
        for (const auto& s : d.samples) v.push_back(s.duration);
        return v;
    }
    int run(std::ostream& out, std::ostream& err) {
        if (!compare.empty() && !mobility.empty()) throw UsageError("use either --compare or --mobility");
        const ContactTrace trace = load_contacts(contacts, err);
        const IctDistribution ict = ict_distribution(trace);
        std::optional<IctDistribution> other;
        if (!compare.empty()) other = ict_distribution(load_contacts(compare, err));
        if (!mobility.empty()) {
            // Observe the mobility through the same kind of scanning that produced the trace.
            const MobilityTrace m = load_mobility(mobility);
            SamplingConfig s;
            s.mode = mode == "async" ? SamplingMode::Asynchronous : SamplingMode::Synchronous;
            s.period = period > 0.0 ? period : trace.sampling_period > 0.0 ? trace.sampling_period : m.timestep();
            s.range = range;
            s.seed = derive_seed(seed, Stream::ScanPhases);
            try {
                other = ict_distribution(extract_contacts(m, s));
            } catch (const std::invalid_argument& e) {
                throw DataError(mobility + ": " + e.what());
            }
        }
        const auto dir = output_dir(out_dir, "");
        if (dir) {
            auto f = open_out(*dir / "ict_cdf.txt");
            f << "# duration fraction\n";
            for (const auto& [d, p] : ict.cdf) f << format_number(d) << ' ' << format_number(p) << '\n';
        }
        std::vector<double> d = durations(ict);
        std::sort(d.begin(), d.end());
        const double mean = d.empty() ? std::nan("") : std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
        const double median = d.empty() ? std::nan("") : d[(d.size() - 1) / 2];
        Summary summary{{"samples", std::to_string(d.size())}, {"mean", num(mean)}, {"median", num(median)}};
        if (other) {
            summary.emplace_back("compare_samples", std::to_string(other->samples.size()));
            summary.emplace_back("ks", num(ks_statistic(durations(ict), durations(*other))));
        }
        emit_summary(summary, out, dir);
        return kExitOk;
    }
};

struct CheckCmd {
    std::string mobility;
    std::string contacts;
    double range = 100.0;
    double v_max = 10.0;
    double slack = std::nan("");
    std::string output;

    void add(CLI::App* app) {
        app->add_option("-m,--mobility", mobility, "mobility file")->required();
        app->add_option("-c,--contacts", contacts, "contact file")->required();
        app->add_option("--range", range, "transmission range r")->capture_default_str();
        app->add_option("--vmax", v_max, "maximum speed")->capture_default_str();
        app->add_option("--slack", slack, "tolerance in meters (default: 2 vmax T, T the trace period or else the mobility timestep)");
        app->add_option("-o,--output", output, "file listing each violation");
    }
    int run(std::ostream& out, std::ostream& err) {
        if (!std::isnan(slack) && !(slack >= 0.0)) throw UsageError("--slack must be >= 0");
        const MobilityTrace m = load_mobility(mobility);
        const ContactTrace trace = load_contacts(contacts, err);
        // Event times are quantized by the sampling period (or, for an exact
        // trace, by the mobility timestep); positions may move that far
        // between the true and the recorded event.
        if (std::isnan(slack))
            slack = 2.0 * v_max * (trace.sampling_period > 0.0 ? trace.sampling_period : m.timestep());
        ConstraintReport report;
        try {
            report = check_constraints(m, trace, range, v_max, slack);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
        if (!output.empty() || env_output_dir()) {
            Output o(output, "violations.txt", out);
            o.stream() << "# kind a b t magnitude\n";
            for (const auto& v : report.violations) {
                const char* kind = v.kind == ViolationKind::Speed       ? "speed"
                                   : v.kind == ViolationKind::InContact ? "in-contact"
                                                                        : "not-in-contact";
                o.stream() << kind << ' ' << v.a << ' ' << v.b << ' ' << format_number(v.time) << ' '
                           << format_number(v.magnitude) << '\n';
            }
        }
        emit_summary({{"speed", std::to_string(report.count(ViolationKind::Speed))},
                      {"in_contact", std::to_string(report.count(ViolationKind::InContact))},
                      {"not_in_contact", std::to_string(report.count(ViolationKind::NotInContact))},
                      {"total", std::to_string(report.violations.size())},
                      {"slack", num(report.slack)}},
                     out, std::nullopt);
        return kExitOk;
    }
};

struct ExperimentCmd {
    ExperimentSpec spec;
    std::string torus = "1000x1000";
    std::size_t references = 0;
    double reference_fraction = std::nan("");
    std::string mode = "sync";
    std::string init = "known";
    ForceFlags force;
    std::string out_dir;

    void add(CLI::App* app) {
        Scenario& s = spec.scenario;
        app->add_option("--runs", spec.runs, "number of seeded runs")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--base-seed", spec.base_seed, "run k uses base-seed + k")->capture_default_str();
        app->add_option("--nodes", s.mobility.n_nodes, "number of nodes")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--torus", torus, "torus size WxH")->capture_default_str();
        app->add_option("--vmin", s.mobility.v_min, "minimum speed")->capture_default_str();
        app->add_option("--vmax", s.mobility.v_max, "maximum speed")->capture_default_str();
        app->add_option("--pause", s.mobility.pause, "pause at each waypoint")->capture_default_str();
        app->add_option("--duration", s.mobility.duration, "length of each run")->capture_default_str();
        app->add_option("--step", s.mobility.timestep, "mobility sampling step")->capture_default_str();
        app->add_option("--references", references, "nodes 0..N-1 are references")->capture_default_str();
        app->add_option("--reference-fraction", reference_fraction, "share of nodes used as references");
        app->add_option("--mode", mode, "sync or async")->capture_default_str()->check(CLI::IsMember({"sync", "async"}));
        app->add_option("--period", s.sampling.period, "sampling period T")->capture_default_str();
        app->add_option("--range", s.sampling.range, "transmission range r")->capture_default_str();
        app->add_flag("--randomize", s.randomize, "randomize the extracted event times");
        app->add_option("--delete-fraction", s.delete_fraction, "drop this share of events")->capture_default_str();
        app->add_option("--init", init, "known or random initial positions")->capture_default_str()->check(CLI::IsMember({"known", "random"}));
        force.add(app);
        app->add_option("--out-dir", out_dir, "directory for per-run, series and summary files");
    }
    int run(std::ostream& out, std::ostream&) {
        Scenario& s = spec.scenario;
        const auto [w, h] = parse_extent(torus);
        s.mobility.space = SpaceSpec::torus(w, h);
        if (!std::isnan(reference_fraction)) {
            if (references) throw UsageError("use either --references or --reference-fraction");
            if (!(reference_fraction >= 0.0 && reference_fraction <= 1.0)) throw UsageError("--reference-fraction must lie in [0, 1]");
            references = static_cast<std::size_t>(std::llround(reference_fraction * static_cast<double>(s.mobility.n_nodes)));
        }
        if (references > s.mobility.n_nodes) throw UsageError("more reference nodes than nodes");
        s.reference_count = references;
        s.sampling.mode = mode == "async" ? SamplingMode::Asynchronous : SamplingMode::Synchronous;
        s.known_initial = init == "known";
        force.apply(s.inference);
        checked_params([&] {
            s.mobility.validate();
            ForceParams p = s.inference.params;
            p.r = s.sampling.range;
            p.v_max = s.mobility.v_max;
            static_cast<void>(p.resolve(s.mobility.space));
            if (!(s.delete_fraction >= 0.0 && s.delete_fraction <= 1.0))
                throw std::invalid_argument("--delete-fraction must lie in [0, 1]");
            return 0;
        });

        const ExperimentResult result = run_experiment(spec);
        const auto dir = output_dir(out_dir, "experiment");
        const auto& keys = result.per_run.front();
        {
            auto f = open_out(*dir / "runs.txt");
            f << "# seed";
            for (const auto& [k, unused] : keys) f << ' ' << k;
            f << '\n';
            for (std::size_t r = 0; r < result.per_run.size(); ++r) {
                f << result.seeds[r];
                for (const auto& [k, unused] : keys) f << ' ' << num(result.per_run[r].at(k));
                f << '\n';
            }
        }
        write_series(*dir / "correlation.txt", "correlation", result.times,
                     [&](std::size_t k) { return std::optional(result.mean_correlation[k]); });
        write_series(*dir / "mde.txt", "mde", result.times, [&](std::size_t k) { return std::optional(result.mean_mde[k]); });

        Summary summary{{"runs", std::to_string(spec.runs)}, {"base_seed", std::to_string(spec.base_seed)}};
        for (const auto& [k, ci] : result.summary) {
            summary.emplace_back(k + ".mean", num(ci.n ? ci.mean : std::nan("")));
            summary.emplace_back(k + ".ci90", num(ci.n > 1 ? ci.half_width : std::nan("")));
            summary.emplace_back(k + ".n", std::to_string(ci.n));
        }
        emit_summary(summary, out, dir);
        return kExitOk;
    }
};

struct FramesCmd {
    std::string mobility;
    std::string contacts;
    double stride = 0.0;
    double range = 100.0;
    std::string out_dir;

    void add(CLI::App* app) {
        app->add_option("-m,--mobility", mobility, "mobility file")->required();
        app->add_option("--stride", stride, "seconds between frames (default: the timestep)");
        app->add_option("-c,--contacts", contacts, "take contact pairs from this trace instead of --range");
        app->add_option("--range", range, "contact range when no trace is given")->capture_default_str();
        app->add_option("--out-dir", out_dir, "directory for frame files");
    }
    int run(std::ostream& out, std::ostream& err) {
        const MobilityTrace m = load_mobility(mobility);
        std::optional<ContactTrace> trace;
        if (!contacts.empty()) trace = load_contacts(contacts, err);
        std::vector<Frame> frames;
        try {
            frames = export_frames(m, stride > 0.0 ? stride : m.timestep(), range, trace ? &*trace : nullptr);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        const auto dir = output_dir(out_dir, "frames");
        for (std::size_t k = 0; k < frames.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%06zu.txt", k);
            auto f = open_out(*dir / name);
            write_frame(f, frames[k]);
        }
        emit_summary({{"frames", std::to_string(frames.size())}, {"directory", dir->string()}}, out, std::nullopt);
        return kExitOk;
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Infers plausible node mobility from contact traces", "plausible"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough(false);

    GenerateCmd generate;
    ExtractCmd extract;
    RandomizeCmd randomize;
    InferCmd infer_cmd;
    EvalMobilityCmd eval_mobility;
    EvalContactsCmd eval_contacts;
    IctCmd ict;
    CheckCmd check;
    ExperimentCmd experiment;
    FramesCmd frames;

    std::vector<std::pair<CLI::App*, std::function<int()>>> commands;
    const auto add = [&](auto& cmd, const char* name, const char* description) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", "file of key=value lines; flags override it");
        cmd.add(sub);
        commands.emplace_back(sub, [&cmd, &out, &err] { return cmd.run(out, err); });
    };
    add(generate, "generate", "random waypoint mobility on a torus");
    add(extract, "extract", "contact trace from a mobility trace");
    add(randomize, "randomize", "shift event times back by up to 0.8 of the sampling period");
    add(infer_cmd, "infer", "plausible mobility from a contact trace");
    add(eval_mobility, "eval-mobility", "pairwise distance correlation and mean distance error");
    add(eval_contacts, "eval-contacts", "added and missed contacts of an inferred mobility");
    add(ict, "ict", "inter-contact time distribution");
    add(check, "check", "speed and contact constraint violations");
    add(experiment, "experiment", "seeded multi-run synthetic experiment");
    add(frames, "frames", "per-stride position and contact frames");

    try {
        // Config file lines become flags placed before the command line, so
        // later (explicit) flags win.
        std::vector<std::string> argv;
        std::vector<std::string> config;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                config = config_tokens(args[++i]);
            } else if (args[i].rfind("--config=", 0) == 0) {
                config = config_tokens(args[i].substr(9));
            } else {
                argv.push_back(args[i]);
            }
        }
        if (!argv.empty() && !argv[0].empty() && argv[0][0] != '-') {
            std::string names;
            bool known = false;
            for (const auto& [sub, unused] : commands) {
                known = known || sub->get_name() == argv[0];
                names += (names.empty() ? "" : ", ") + sub->get_name();
            }
            if (!known) throw UsageError("unknown subcommand '" + argv[0] + "'; expected one of " + names);
        }
        if (!config.empty()) {
            if (argv.empty() || argv[0].empty() || argv[0][0] == '-')
                throw UsageError("--config must follow a subcommand");
            argv.insert(argv.begin() + 1, config.begin(), config.end());
        }
        std::reverse(argv.begin(), argv.end());
        try {
            app.parse(argv);
        } catch (const CLI::CallForHelp& e) {
            app.exit(e, out, err);
            return kExitOk;
        } catch (const CLI::CallForAllHelp& e) {
            app.exit(e, out, err);
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << " (run with --help for usage)\n";
            return kExitUsage;
        }
        for (auto& [sub, action] : commands)
            if (sub->parsed()) return action();
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << " (run with --help for usage)\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace plausible::cli
