#include "plausible/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "plausible/link_timeline.hpp"

namespace plausible {

namespace {

struct Alignment {
    std::vector<double> times;
    std::vector<std::size_t> original_index;
    std::vector<std::size_t> inferred_index;
};

Alignment align(const MobilityTrace& original, const MobilityTrace& inferred, TimeWindow window) {
    if (original.n_nodes() != inferred.n_nodes()) throw std::invalid_argument("traces have different node counts");
    Alignment a;
    for (std::size_t k = 0; k < original.n_samples(); ++k) {
        const double t = original.time(k);
        if (!window.contains(t)) continue;
        const auto j = inferred.index_of(t);
        if (!j) throw std::invalid_argument("inferred trace has no sample at t=" + format_number(t));
        a.times.push_back(t);
        a.original_index.push_back(k);
        a.inferred_index.push_back(*j);
    }
    return a;
}

std::vector<char> reference_mask(std::size_t n, std::span<const NodeId> refs) {
    std::vector<char> mask(n, 0);
    for (NodeId r : refs) {
        if (r >= n) throw std::invalid_argument("reference node id out of range");
        mask[r] = 1;
    }
    return mask;
}

// Sums needed for a Pearson correlation, kept per time so the pooled value
// can be reduced in a fixed order.
struct Moments {
    std::size_t n = 0;
    double sx = 0, sy = 0;
    double sxx = 0, syy = 0, sxy = 0;  // centered on the pooled means
};

std::optional<double> pearson(double sxx, double syy, double sxy) {
    if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void fill_correlation(const MobilityTrace& original, const MobilityTrace& inferred, const std::vector<char>& is_ref,
                      const Alignment& al, AccuracySeries& out) {
    const std::size_t n = original.n_nodes();
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (!is_ref[i] && !is_ref[j]) pairs.emplace_back(i, j);
    if (pairs.size() < 2) throw std::invalid_argument("pairwise correlation needs at least 2 non-reference pairs");

    const SpaceSpec& space = original.space();
    const auto T = static_cast<std::ptrdiff_t>(al.times.size());
    std::vector<Moments> per_time(al.times.size());
    out.correlation.assign(al.times.size(), std::nullopt);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < T; ++k) {
        const auto u = static_cast<std::size_t>(k);
        const auto po = original.sample(al.original_index[u]);
        const auto pi = inferred.sample(al.inferred_index[u]);
        Moments m;
        m.n = pairs.size();
        for (const auto& [i, j] : pairs) {
            m.sx += space.distance(po[i], po[j]);
            m.sy += space.distance(pi[i], pi[j]);
        }
        const double mx = m.sx / static_cast<double>(m.n);
        const double my = m.sy / static_cast<double>(m.n);
        double sxx = 0, syy = 0, sxy = 0;
        for (const auto& [i, j] : pairs) {
            const double dx = space.distance(po[i], po[j]) - mx;
            const double dy = space.distance(pi[i], pi[j]) - my;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        out.correlation[u] = pearson(sxx, syy, sxy);
        // Store the within-time centered sums; the pooled value adds the
        // between-time part below.
        m.sxx = sxx;
        m.syy = syy;
        m.sxy = sxy;
        per_time[u] = m;
    }

    double total_n = 0, sx = 0, sy = 0;
    for (const auto& m : per_time) {
        total_n += static_cast<double>(m.n);
        sx += m.sx;
        sy += m.sy;
    }
    if (total_n == 0) return;
    const double gx = sx / total_n;
    const double gy = sy / total_n;
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& m : per_time) {
        const double nk = static_cast<double>(m.n);
        const double dx = m.sx / nk - gx;
        const double dy = m.sy / nk - gy;
        sxx += m.sxx + nk * dx * dx;
        syy += m.syy + nk * dy * dy;
        sxy += m.sxy + nk * dx * dy;
    }
    out.aggregate_correlation = pearson(sxx, syy, sxy);
}

void fill_mde(const MobilityTrace& original, const MobilityTrace& inferred, const std::vector<char>& is_ref,
              const Alignment& al, AccuracySeries& out) {
    const std::size_t n = original.n_nodes();
    std::size_t free_nodes = 0;
    for (char r : is_ref) free_nodes += r ? 0 : 1;
    if (free_nodes == 0) throw std::invalid_argument("mean distance error is undefined when every node is a reference");
    const SpaceSpec& space = original.space();
    out.mde.assign(al.times.size(), 0.0);
    const auto T = static_cast<std::ptrdiff_t>(al.times.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < T; ++k) {
        const auto u = static_cast<std::size_t>(k);
        const auto po = original.sample(al.original_index[u]);
        const auto pi = inferred.sample(al.inferred_index[u]);
        double sum = 0.0;
        for (NodeId i = 0; i < n; ++i)
            if (!is_ref[i]) sum += space.distance(po[i], pi[i]);
        out.mde[u] = sum / static_cast<double>(free_nodes);
    }
    double total = 0.0;
    for (double v : out.mde) total += v;
    out.mean_mde = out.mde.empty() ? 0.0 : total / static_cast<double>(out.mde.size());
}

}  // namespace

AccuracySeries pairwise_correlation(const MobilityTrace& original, const MobilityTrace& inferred,
                                    std::span<const NodeId> references, TimeWindow window) {
    const auto al = align(original, inferred, window);
    AccuracySeries out;
    out.times = al.times;
    fill_correlation(original, inferred, reference_mask(original.n_nodes(), references), al, out);
    return out;
}

AccuracySeries mean_distance_error(const MobilityTrace& original, const MobilityTrace& inferred,
                                   std::span<const NodeId> references, TimeWindow window) {
    const auto al = align(original, inferred, window);
    AccuracySeries out;
    out.times = al.times;
    fill_mde(original, inferred, reference_mask(original.n_nodes(), references), al, out);
    return out;
}

AccuracySeries evaluate_mobility(const MobilityTrace& original, const MobilityTrace& inferred,
                                 std::span<const NodeId> references, TimeWindow window) {
    const auto al = align(original, inferred, window);
    const auto mask = reference_mask(original.n_nodes(), references);
    AccuracySeries out;
    out.times = al.times;
    fill_correlation(original, inferred, mask, al, out);
    fill_mde(original, inferred, mask, al, out);
    return out;
}

ContactDiffSeries contact_diff(const ContactTrace& original, const MobilityTrace& inferred, double range,
                               TimeWindow window) {
    if (original.n_nodes != inferred.n_nodes()) throw std::invalid_argument("trace and mobility node counts differ");
    const LinkTimeline timeline(original);
    const SpaceSpec& space = inferred.space();
    const std::size_t n = inferred.n_nodes();

    ContactDiffSeries out;
    std::vector<std::size_t> samples;
    for (std::size_t k = 0; k < inferred.n_samples(); ++k) {
        const double t = inferred.time(k);
        if (window.contains(t) && t < original.duration) samples.push_back(k);
    }
    const std::size_t T = samples.size();
    out.times.resize(T);
    out.connected.assign(T, 0);
    out.added.assign(T, 0);
    out.missed.assign(T, 0);
    out.added_pct.assign(T, std::nullopt);
    out.missed_pct.assign(T, std::nullopt);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(T); ++kk) {
        const auto u = static_cast<std::size_t>(kk);
        const double t = inferred.time(samples[u]);
        const auto pos = inferred.sample(samples[u]);
        std::size_t connected = 0, added = 0, missed = 0;
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = i + 1; j < n; ++j) {
                const bool up = timeline.connected(i, j, t);
                const bool near = space.distance(pos[i], pos[j]) <= range;
                connected += up ? 1 : 0;
                missed += (up && !near) ? 1 : 0;
                added += (!up && near) ? 1 : 0;
            }
        out.times[u] = t;
        out.connected[u] = connected;
        out.added[u] = added;
        out.missed[u] = missed;
        if (connected > 0) {
            out.added_pct[u] = 100.0 * static_cast<double>(added) / static_cast<double>(connected);
            out.missed_pct[u] = 100.0 * static_cast<double>(missed) / static_cast<double>(connected);
        }
    }

    double sum_added = 0, sum_missed = 0;
    std::size_t defined = 0;
    for (std::size_t k = 0; k < T; ++k) {
        if (!out.added_pct[k]) continue;
        sum_added += *out.added_pct[k];
        sum_missed += *out.missed_pct[k];
        ++defined;
    }
    if (defined > 0) {
        out.mean_added_pct = sum_added / static_cast<double>(defined);
        out.mean_missed_pct = sum_missed / static_cast<double>(defined);
    }
    return out;
}

IctDistribution ict_distribution(const ContactTrace& trace) {
    const LinkTimeline timeline(trace);
    IctDistribution out;
    for (NodeId i = 0; i + 1 < trace.n_nodes; ++i)
        for (NodeId j = i + 1; j < trace.n_nodes; ++j) {
            const auto iv = timeline.intervals(i, j);
            for (std::size_t k = 1; k < iv.size(); ++k) out.samples.push_back({iv[k - 1].down, iv[k].up - iv[k - 1].down});
        }
    std::stable_sort(out.samples.begin(), out.samples.end(),
                     [](const IctSample& a, const IctSample& b) { return a.time < b.time; });
    std::vector<double> d;
    d.reserve(out.samples.size());
    for (const auto& s : out.samples) d.push_back(s.duration);
    std::sort(d.begin(), d.end());
    const auto n = static_cast<double>(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (k + 1 < d.size() && d[k + 1] == d[k]) continue;  // one point per distinct value
        out.cdf.emplace_back(d[k], static_cast<double>(k + 1) / n);
    }
    return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS statistic needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double sup = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return sup;
}

std::size_t ConstraintReport::count(ViolationKind k) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; }));
}

ConstraintReport check_constraints(const MobilityTrace& mobility, const ContactTrace& trace, double range,
                                   double v_max, double slack) {
    if (mobility.n_nodes() != trace.n_nodes) throw std::invalid_argument("trace and mobility node counts differ");
    ConstraintReport report;
    report.slack = slack;
    const SpaceSpec& space = mobility.space();
    const LinkTimeline timeline(trace);
    const std::size_t n = mobility.n_nodes();
    const double dt = mobility.timestep();

    for (std::size_t k = 0; k < mobility.n_samples(); ++k) {
        const double t = mobility.time(k);
        const auto pos = mobility.sample(k);
        if (k > 0) {
            const auto prev = mobility.sample(k - 1);
            for (NodeId i = 0; i < n; ++i) {
                const double excess = space.distance(prev[i], pos[i]) - v_max * dt;
                if (excess > slack) report.violations.push_back({ViolationKind::Speed, i, i, t, excess});
            }
        }
        if (t < 0.0 || t >= trace.duration) continue;
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = i + 1; j < n; ++j) {
                const double d = space.distance(pos[i], pos[j]);
                const LinkState s = timeline.observed(timeline.query(i, j, t));
                if (s.connected) {
                    const double lower = range - 2.0 * v_max * repulsion_gap(s, t);
                    if (d > range + slack) report.violations.push_back({ViolationKind::InContact, i, j, t, d - range});
                    else if (d < lower - slack)
                        report.violations.push_back({ViolationKind::InContact, i, j, t, lower - d});
                } else {
                    const double upper = range + 2.0 * v_max * attraction_gap(s, t);
                    if (d < range - slack) report.violations.push_back({ViolationKind::NotInContact, i, j, t, range - d});
                    else if (d > upper + slack)
                        report.violations.push_back({ViolationKind::NotInContact, i, j, t, d - upper});
                }
            }
    }
    return report;
}

MeanInterval mean_ci90(std::span<const double> values) {
    MeanInterval out;
    out.n = values.size();
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    const boost::math::students_t dist(static_cast<double>(values.size() - 1));
    out.half_width = boost::math::quantile(dist, 0.95) * sd / std::sqrt(static_cast<double>(values.size()));
    return out;
}

}  // namespace plausible
