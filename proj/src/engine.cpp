#include "ordermc/engine.hpp"

#include "ordermc/errors.hpp"
#include "ordermc/orderstat.hpp"
#include "ordermc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>
#include <utility>

namespace ordermc::engine {

namespace {

struct Eval {
    bool hit = false;
    double value = 0.0;
    std::vector<double> parameters;
};

void evaluate_span(const ConstrainedProblem& problem, std::uint64_t seed, std::int64_t first,
                   std::int64_t count, Eval* out) {
    for (std::int64_t i = 0; i < count; ++i) {
        std::vector<double> q = problem.space.draw(seed, static_cast<std::uint64_t>(first + i));
        Eval& e = out[i];
        e.hit = problem.constraint(q);
        if (e.hit) {
            e.value = problem.index(q);
            e.parameters = std::move(q);
        }
    }
}

// Evaluate draws [first, first+count) of the (seed)-stream. Each draw is a
// pure function of its index, so splitting across threads cannot change
// results; callers commit the outputs in draw order.
std::vector<Eval> evaluate_block(const ConstrainedProblem& problem, std::uint64_t seed,
                                 std::int64_t first, std::int64_t count, const ExecPolicy& exec) {
    std::vector<Eval> out(static_cast<std::size_t>(count));
    const int threads = std::max(1, exec.worker_threads);
    if (threads == 1 || count < 2 * threads) {
        evaluate_span(problem, seed, first, count, out.data());
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    const std::int64_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t begin = t * chunk;
        const std::int64_t len = std::min<std::int64_t>(chunk, count - begin);
        if (len <= 0) break;
        pool.emplace_back([&, t, begin, len] {
            try {
                evaluate_span(problem, seed, first + begin, len, out.data() + begin);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
    return out;
}

void track_extremes(OrderStatisticsBatch& batch, const Eval& e, std::int64_t draw_index) {
    if (!batch.min_sample || e.value < batch.min_sample->value) {
        batch.min_sample = ExtremeSample{e.value, e.parameters, draw_index};
    }
    if (!batch.max_sample || e.value > batch.max_sample->value) {
        batch.max_sample = ExtremeSample{e.value, e.parameters, draw_index};
    }
}

} // namespace

ParameterSpace::ParameterSpace(std::vector<Interval> bounds, std::vector<CoordinateLaw> laws)
    : bounds_(std::move(bounds)), laws_(std::move(laws)) {
    if (bounds_.empty()) throw std::domain_error("ParameterSpace: dimension must be >= 1");
    if (laws_.size() != bounds_.size())
        throw std::domain_error("ParameterSpace: one sampling law per coordinate required");
    for (const auto& b : bounds_) {
        if (!(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo <= b.hi))
            throw std::domain_error("ParameterSpace: bounds must be finite with lo <= hi");
    }
    for (const auto& law : laws_) {
        if (const auto* tn = std::get_if<TruncatedNormal>(&law)) {
            if (!(tn->stddev > 0.0))
                throw std::domain_error("ParameterSpace: truncated normal needs stddev > 0");
        }
    }
}

ParameterSpace::ParameterSpace(std::vector<Interval> bounds)
    : ParameterSpace(bounds, std::vector<CoordinateLaw>(bounds.size())) {}

std::vector<double> ParameterSpace::draw(std::uint64_t seed, std::uint64_t counter) const {
    CounterRng rng(seed, counter);
    std::vector<double> q(bounds_.size());
    for (std::size_t d = 0; d < bounds_.size(); ++d) {
        const Interval& b = bounds_[d];
        if (std::holds_alternative<Uniform>(laws_[d])) {
            q[d] = b.lo + (b.hi - b.lo) * rng.next_unit();
        } else {
            const auto& tn = std::get<TruncatedNormal>(laws_[d]);
            bool placed = false;
            for (int attempt = 0; attempt < 100000; ++attempt) {
                const double x = tn.mean + tn.stddev * rng.next_normal();
                if (x >= b.lo && x <= b.hi) {
                    q[d] = x;
                    placed = true;
                    break;
                }
            }
            if (!placed)
                throw numeric_error("ParameterSpace: truncated normal rejection failed; "
                                    "bounds carry negligible mass under the chosen law");
        }
    }
    return q;
}

OrderStatisticsBatch sample_indirect(const ConstrainedProblem& problem, std::int64_t n_c,
                                     std::uint64_t seed, std::int64_t draw_cap,
                                     const ExecPolicy& exec) {
    if (n_c < 1) throw std::domain_error("sample_indirect: n_c must be >= 1");
    if (draw_cap < n_c) throw std::domain_error("sample_indirect: draw_cap must be >= n_c");

    OrderStatisticsBatch batch;
    batch.mode = SampleMode::indirect;
    batch.sorted_values.reserve(static_cast<std::size_t>(n_c));

    std::int64_t draws = 0;
    std::int64_t hits = 0;
    while (hits < n_c) {
        const std::int64_t room = draw_cap - draws;
        if (room <= 0)
            throw sampling_error("sample_indirect: raw-draw cap " + std::to_string(draw_cap) +
                                 " reached with only " + std::to_string(hits) + " of " +
                                 std::to_string(n_c) + " constrained hits");
        const std::int64_t block = std::min<std::int64_t>(std::max(1, exec.block_size), room);
        const auto evals = evaluate_block(problem, seed, draws, block, exec);
        for (const auto& e : evals) {
            const std::int64_t draw_index = draws++;
            if (!e.hit) continue;
            batch.sorted_values.push_back(e.value);
            track_extremes(batch, e, draw_index);
            if (++hits == n_c) break;
        }
    }
    batch.raw_draws_consumed = draws;
    batch.constrained_hits = hits;
    std::sort(batch.sorted_values.begin(), batch.sorted_values.end());
    return batch;
}

OrderStatisticsBatch sample_direct(const ConstrainedProblem& problem, std::int64_t n,
                                   std::uint64_t seed, const ExecPolicy& exec) {
    if (n < 1) throw std::domain_error("sample_direct: n must be >= 1");

    OrderStatisticsBatch batch;
    batch.mode = SampleMode::direct;

    std::int64_t draws = 0;
    while (draws < n) {
        const std::int64_t block = std::min<std::int64_t>(std::max(1, exec.block_size), n - draws);
        const auto evals = evaluate_block(problem, seed, draws, block, exec);
        for (const auto& e : evals) {
            const std::int64_t draw_index = draws++;
            if (!e.hit) continue;
            batch.sorted_values.push_back(e.value);
            track_extremes(batch, e, draw_index);
        }
    }
    batch.raw_draws_consumed = n;
    batch.constrained_hits = static_cast<std::int64_t>(batch.sorted_values.size());
    batch.inconclusive = batch.constrained_hits < 2;
    std::sort(batch.sorted_values.begin(), batch.sorted_values.end());
    return batch;
}

EstimateReport estimate_extrema(const ConstrainedProblem& problem, const planner::ReliabilitySpec& spec,
                                SampleMode mode, std::optional<planner::VolumeRatio> rho_hint,
                                std::uint64_t seed, const EstimateOptions& options) {
    if (mode == SampleMode::direct && !rho_hint)
        throw config_error("estimate_extrema: direct mode requires a volume-ratio hint "
                           "(pass one or probe it with estimate_rho)");

    std::int64_t planned = 0;
    if (options.size_override) {
        if (*options.size_override < 1) throw config_error("estimate_extrema: size override must be >= 1");
        planned = *options.size_override;
    } else if (mode == SampleMode::indirect) {
        planned = options.two_sided ? planner::constrained_size_two_sided(spec)
                                    : planner::constrained_size_one_sided(spec);
    } else {
        planned = options.two_sided ? planner::global_size_two_sided(spec, *rho_hint)
                                    : planner::global_size_one_sided(spec, *rho_hint);
    }

    OrderStatisticsBatch batch;
    if (mode == SampleMode::indirect) {
        const std::int64_t cap = planned > INT64_MAX / options.draw_cap_factor
                                     ? INT64_MAX
                                     : planned * options.draw_cap_factor;
        batch = sample_indirect(problem, planned, seed, cap, options.exec);
    } else {
        batch = sample_direct(problem, planned, seed, options.exec);
    }

    EstimateReport report{.spec = spec};
    report.mode = mode;
    report.planned_size = planned;
    report.raw_draws = batch.raw_draws_consumed;
    report.constrained_hits = batch.constrained_hits;
    report.inconclusive = batch.inconclusive;
    report.seed = seed;
    if (rho_hint) report.rho_used = rho_hint->rho;
    if (batch.raw_draws_consumed > 0)
        report.empirical_rho = static_cast<double>(batch.constrained_hits) /
                               static_cast<double>(batch.raw_draws_consumed);
    if (batch.min_sample) {
        report.u_min_hat = batch.min_sample->value;
        report.argmin_sample = batch.min_sample->parameters;
    }
    if (batch.max_sample) {
        report.u_max_hat = batch.max_sample->value;
        report.argmax_sample = batch.max_sample->parameters;
    }

    const double eff_eps = mode == SampleMode::direct ? spec.epsilon * rho_hint->rho : spec.epsilon;
    report.one_sided_confidence =
        1.0 - std::exp(static_cast<double>(planned) * std::log1p(-eff_eps));
    report.two_sided_confidence = planned >= 1 ? 1.0 - orderstat::mu(planned, eff_eps) : 0.0;
    return report;
}

RhoEstimate estimate_rho(const ConstrainedProblem& problem, std::int64_t n_probe, std::uint64_t seed,
                         const ExecPolicy& exec) {
    if (n_probe < 100) throw std::domain_error("estimate_rho: n_probe must be >= 100");
    std::int64_t hits = 0;
    std::int64_t draws = 0;
    while (draws < n_probe) {
        const std::int64_t block = std::min<std::int64_t>(std::max(1, exec.block_size), n_probe - draws);
        // Constraint only; skip index evaluation entirely.
        for (std::int64_t i = 0; i < block; ++i) {
            const auto q = problem.space.draw(seed, static_cast<std::uint64_t>(draws + i));
            if (problem.constraint(q)) ++hits;
        }
        draws += block;
    }
    RhoEstimate est;
    est.probes = n_probe;
    est.rho = static_cast<double>(hits) / static_cast<double>(n_probe);
    est.standard_error = std::sqrt(est.rho * (1.0 - est.rho) / static_cast<double>(n_probe));
    return est;
}

} // namespace ordermc::engine
