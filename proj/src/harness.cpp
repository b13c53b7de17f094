#include "orules/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace orules::harness {

std::string TrajectoryRecord::trace_text() const {
    std::string out;
    char buf[64];
    auto emit = [&](double t, const char* kind, const std::string& label, double w) {
        std::snprintf(buf, sizeof buf, "%.9f,", t);
        out += buf;
        out += kind;
        out += ',';
        out += label;
        std::snprintf(buf, sizeof buf, ",%.12g\n", w);
        out += buf;
    };
    for (const auto& e : events) emit(e.time, engine::to_string(e.kind), e.label, e.weight);
    for (const auto& [label, w] : terminal_components)
        emit(end_time, engine::to_string(engine::SimEventKind::Terminal), label, w);
    return out;
}

TrajectoryRecord run_trajectory(const scenario::Scenario& sc, std::uint64_t seed,
                                const RunOptions& opts) {
    engine::SimRun run(sc, seed, opts);
    run.run();

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.events = run.log();
    rec.hit_times = run.hit_times();
    rec.reductions = run.reductions();
    rec.max_norm_drift = run.max_norm_drift();
    rec.cumulative_vertical = run.cumulative_vertical();
    rec.end_time = run.time();
    for (const Component* c : run.kept_components())
        rec.terminal_components.emplace_back(c->label(), c->weight);
    std::sort(rec.terminal_components.begin(), rec.terminal_components.end());
    for (const auto& [label, w] : rec.terminal_components) {
        if (!rec.terminal_label.empty()) rec.terminal_label += " + ";
        rec.terminal_label += label;
        rec.terminal_weight += w;
    }
    return rec;
}

std::string EnsembleStats::stats_text() const {
    nlohmann::json doc;
    doc["n_runs"] = n_runs;
    doc["outcomes"] = nlohmann::json::object();
    for (const auto& [label, count] : outcomes) doc["outcomes"][label] = count;
    if (ks)
        doc["ks"] = *ks;
    else
        doc["ks"] = nullptr;
    return doc.dump(2) + "\n";
}

unsigned default_workers() {
    if (const char* env = std::getenv("ORULES_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

EnsembleStats run_ensemble(const scenario::Scenario& sc, std::size_t n, std::uint64_t base_seed,
                           const RunOptions& opts, std::optional<unsigned> workers) {
    if (n < 1) throw Error("ensemble needs at least one run");

    struct PerRun {
        std::string label;
        std::vector<double> hits;
    };
    std::vector<PerRun> results(n);

    unsigned nw = workers.value_or(default_workers());
    nw = static_cast<unsigned>(std::min<std::size_t>(nw, n));
    if (nw < 1) nw = 1;

    std::exception_ptr failure;
    std::string failed_seed;
    std::mutex failure_mu;

    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                TrajectoryRecord rec = run_trajectory(sc, base_seed + i, opts);
                results[i] = {rec.terminal_label, rec.hit_times};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) {
                    failure = std::current_exception();
                    failed_seed = std::to_string(base_seed + i);
                }
                return;
            }
        }
    };

    if (nw == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (n + nw - 1) / nw;
        for (unsigned w = 0; w < nw; ++w) {
            std::size_t lo = w * chunk;
            std::size_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(work, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const Error& e) {
            throw Error("seed " + failed_seed + ": " + e.what());
        }
    }

    EnsembleStats stats;
    stats.n_runs = n;
    for (const auto& r : results) {
        ++stats.outcomes[r.label];
        stats.hit_times.insert(stats.hit_times.end(), r.hits.begin(), r.hits.end());
    }
    if (!stats.hit_times.empty())
        stats.ks = compare_hit_cdf(stats.hit_times, sc.params.half_life);
    return stats;
}

double compare_hit_cdf(std::vector<double> samples, double half_life) {
    if (samples.empty()) throw EmptySampleError("no hit-time samples");
    std::sort(samples.begin(), samples.end());
    auto ref = [half_life](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= half_life) return 1.0;
        return (1.0 - std::exp2(-t / half_life)) / 0.5;
    };
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = ref(samples[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

}  // namespace orules::harness
