#include "envopt/metrics.hpp"

#include <algorithm>

#include "envopt/grid_path.hpp"

namespace envopt {

double spl(std::span<const uint8_t> success, std::span<const double> shortest_lengths,
           std::span<const double> traveled_lengths) {
    size_t n = success.size();
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (!success[i]) continue;
        double l = shortest_lengths[i];
        double p = traveled_lengths[i];
        sum += l > 0.0 || p > 0.0 ? l / std::max(p, l) : 1.0;
    }
    return sum / double(n);
}

std::vector<double> pct_speed(const EpisodeTrace& trace, double max_speed) {
    size_t n = trace.success.size();
    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        int active_until = trace.navigation_time[i] >= 0 ? trace.navigation_time[i]
                                                         : int(trace.steps.size());
        double sum = 0.0;
        int count = 0;
        for (const auto& step : trace.steps) {
            if (step.t >= active_until) break;
            sum += step.agent_velocities[i].norm() / max_speed;
            ++count;
        }
        out[i] = count > 0 ? sum / count : 0.0;
    }
    return out;
}

std::vector<double> distance_ratio(const EpisodeTrace& trace, const Scenario& s,
                                   std::span<const double> shortest_lengths) {
    size_t n = trace.success.size();
    std::vector<double> out(n, 0.0);
    double cap = double(s.max_steps) * s.max_speed;
    for (size_t i = 0; i < n; ++i) {
        double traveled = std::min(traveled_length(trace, s, int(i)), cap);
        if (traveled <= 0.0) {
            out[i] = shortest_lengths[i] <= 0.0 ? 1.0 : 0.0;
        } else {
            out[i] = std::min(1.0, shortest_lengths[i] / traveled);
        }
    }
    return out;
}

std::vector<double> reference_lengths(const Scenario& reference) {
    std::vector<double> out;
    for (const auto& a : reference.agents) {
        auto p = shortest_path(reference, a.start, a.goal);
        out.push_back(p ? p->length : distance(a.start, a.goal));
    }
    return out;
}

Metrics compute_metrics(const EpisodeTrace& trace, const Scenario& s, const Scenario& reference) {
    Metrics m;
    auto shortest = reference_lengths(reference);
    std::vector<double> traveled;
    for (size_t i = 0; i < s.agents.size(); ++i)
        traveled.push_back(traveled_length(trace, s, int(i)));

    m.success = trace.success;
    m.navigation_time = trace.navigation_time;
    int succ = 0;
    for (auto v : m.success) succ += v ? 1 : 0;
    m.success_rate = m.success.empty() ? 0.0 : double(succ) / double(m.success.size());

    m.spl = spl(m.success, shortest, traveled);
    m.pct_speed = pct_speed(trace, s.max_speed);
    m.distance_ratio = distance_ratio(trace, s, shortest);
    for (double v : m.pct_speed) m.pct_speed_mean += v;
    for (double v : m.distance_ratio) m.distance_ratio_mean += v;
    if (!m.pct_speed.empty()) {
        m.pct_speed_mean /= double(m.pct_speed.size());
        m.distance_ratio_mean /= double(m.distance_ratio.size());
    }
    return m;
}

} // namespace envopt
