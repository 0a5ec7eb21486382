#include "otc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "otc/error.hpp"

namespace otc {

namespace {

// Uniform in [0, 1) from the top 53 bits; together with the inverse
// transforms below this pins the sampling algorithm, not just the generator.
double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Largest-remainder apportionment of `total` units across targets.
std::vector<std::size_t> largest_remainder(const std::vector<double>& targets,
                                           std::size_t total) {
  const std::size_t n = targets.size();
  std::vector<std::size_t> counts(n, 0);
  std::vector<std::pair<double, std::size_t>> remainders(n);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::max(0.0, targets[i]);
    const double fl = std::floor(t);
    counts[i] = static_cast<std::size_t>(fl);
    assigned += counts[i];
    remainders[i] = {t - fl, i};
  }
  if (assigned > total)
    fail(ErrorCode::InfeasibleInitial, "rounding targets exceed the population");
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::size_t leftover = total - assigned;
  for (std::size_t j = 0; leftover > 0; j = (j + 1) % n, --leftover)
    ++counts[remainders[j].second];
  return counts;
}

std::size_t clamp_count(double target, std::size_t limit) {
  const long long r = std::llround(target);
  if (r < 0) return 0;
  const std::size_t v = static_cast<std::size_t>(r);
  return std::min(v, limit);
}

Population from_counts(ModelClass mc, const std::vector<std::size_t>& counts) {
  Population pop;
  pop.model_class = mc;
  pop.counts = counts;
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  pop.states.reserve(n);
  for (std::size_t s = 0; s < counts.size(); ++s)
    pop.states.insert(pop.states.end(), counts[s], static_cast<std::uint8_t>(s));
  return pop;
}

void require_population(const Population& pop, std::size_t want_states) {
  if (pop.n() < 2) fail(ErrorCode::InfeasibleInitial, "need at least 2 investors");
  if (pop.counts.size() != want_states)
    fail(ErrorCode::InfeasibleInitial, "population counts have the wrong dimension");
  std::vector<std::size_t> tally(want_states, 0);
  for (std::uint8_t s : pop.states) {
    if (s >= want_states)
      fail(ErrorCode::InfeasibleInitial, "investor state index out of range");
    ++tally[s];
  }
  if (tally != pop.counts)
    fail(ErrorCode::InfeasibleInitial, "counts do not match investor states");
}

// One transition channel: either an autonomous per-investor switch or an
// unordered-pair trade at rate `rate` per pair (lambda_i / N).
struct EventSpec {
  bool is_pair = false;
  std::size_t from_a = 0, to_a = 0;
  std::size_t from_b = 0, to_b = 0;
  double rate = 0.0;
};

std::vector<EventSpec> events_for(const NonSegmentedParams& p, std::size_t n) {
  const std::size_t k = p.assets();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<EventSpec> ev;
  ev.push_back({false, nonseg::idx_ln, nonseg::idx_hn, 0, 0, p.gamma_u});
  ev.push_back({false, nonseg::idx_hn, nonseg::idx_ln, 0, 0, p.gamma_d});
  for (std::size_t i = 0; i < k; ++i) {
    ev.push_back({false, nonseg::idx_lo(i), nonseg::idx_ho(i), 0, 0, p.gamma_ui[i]});
    ev.push_back({false, nonseg::idx_ho(i), nonseg::idx_lo(i), 0, 0, p.gamma_di[i]});
    ev.push_back({true, nonseg::idx_hn, nonseg::idx_ho(i), nonseg::idx_lo(i),
                  nonseg::idx_ln, p.lambda[i] * inv_n});
  }
  return ev;
}

std::vector<EventSpec> events_for(const PartiallySegmentedParams& p, std::size_t n) {
  const std::size_t k = p.assets();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<EventSpec> ev;
  for (std::size_t i = 0; i < k; ++i) {
    ev.push_back(
        {false, partseg::idx_ln(k), partseg::idx_hn(i), 0, 0, p.gamma_tilde_ui[i]});
    ev.push_back(
        {false, partseg::idx_hn(i), partseg::idx_ln(k), 0, 0, p.gamma_tilde_di[i]});
    ev.push_back({false, partseg::idx_lo(k, i), partseg::idx_ho(k, i), 0, 0,
                  p.gamma_ui[i]});
    ev.push_back({false, partseg::idx_ho(k, i), partseg::idx_lo(k, i), 0, 0,
                  p.gamma_di[i]});
    ev.push_back({true, partseg::idx_hn(i), partseg::idx_ho(k, i),
                  partseg::idx_lo(k, i), partseg::idx_ln(k), p.lambda[i] * inv_n});
  }
  return ev;
}

std::vector<EventSpec> events_for(const HeterogeneousParams& p, std::size_t n) {
  const double pair_rate = p.lambda / static_cast<double>(n);
  std::vector<EventSpec> ev;
  const std::size_t high[3] = {het::idx_h0, het::idx_h1, het::idx_h2};
  const std::size_t low[3] = {het::idx_l0, het::idx_l1, het::idx_l2};
  for (int i = 0; i < 3; ++i) {
    ev.push_back({false, high[i], low[i], 0, 0, p.c[i]});
    ev.push_back({false, low[i], high[i], 0, 0, p.d[i]});
  }
  // (h,0)+(l,1) -> (h,1)+(l,0)
  ev.push_back({true, het::idx_h0, het::idx_h1, het::idx_l1, het::idx_l0, pair_rate});
  // (h,1)+(l,1) -> (h,2)+(l,0)
  ev.push_back({true, het::idx_h1, het::idx_h2, het::idx_l1, het::idx_l0, pair_rate});
  // (h,1)+(l,2) -> (h,2)+(l,1)
  ev.push_back({true, het::idx_h1, het::idx_h2, het::idx_l2, het::idx_l1, pair_rate});
  // (h,0)+(l,2) one-tick and two-tick branches
  ev.push_back(
      {true, het::idx_h0, het::idx_h1, het::idx_l2, het::idx_l1, pair_rate * p.a});
  ev.push_back(
      {true, het::idx_h0, het::idx_h2, het::idx_l2, het::idx_l0, pair_rate * p.b});
  return ev;
}

class JumpProcess {
 public:
  JumpProcess(Population pop, std::vector<EventSpec> events, std::uint64_t seed)
      : pop_(std::move(pop)), events_(std::move(events)), rng_(seed) {
    const std::size_t n_states = pop_.counts.size();
    buckets_.resize(n_states);
    position_.resize(pop_.n());
    for (std::size_t inv = 0; inv < pop_.n(); ++inv) {
      const std::size_t s = pop_.states[inv];
      position_[inv] = buckets_[s].size();
      buckets_[s].push_back(static_cast<std::uint32_t>(inv));
    }
    rates_.resize(events_.size());
  }

  SimulationResult run(double t_end, double sample_every, std::uint64_t seed) {
    SimulationResult result;
    result.seed = seed;

    std::vector<double> grid;
    grid.push_back(0.0);
    for (std::size_t k = 1;; ++k) {
      const double t = static_cast<double>(k) * sample_every;
      if (t > t_end + 1e-9) break;
      grid.push_back(std::min(t, t_end));
    }
    if (t_end - grid.back() > 1e-9) grid.push_back(t_end);

    std::size_t next_sample = 0;
    double t = 0.0;
    while (true) {
      const double total_rate = refresh_rates();
      double t_next;
      if (total_rate <= 0.0) {
        t_next = t_end + 1.0;  // frozen configuration, only samples remain
      } else {
        const double wait = -std::log1p(-uniform53(rng_)) / total_rate;
        t_next = t + wait;
      }
      while (next_sample < grid.size() && grid[next_sample] < t_next) {
        result.sample_times.push_back(grid[next_sample]);
        result.empirical.push_back(empirical_distribution(pop_));
        ++next_sample;
      }
      if (t_next > t_end) break;
      apply_event(pick_event(total_rate));
      ++result.event_count;
      t = t_next;
    }
    return result;
  }

  Population take_population() { return std::move(pop_); }

 private:
  double refresh_rates() {
    double total = 0.0;
    for (std::size_t e = 0; e < events_.size(); ++e) {
      const EventSpec& ev = events_[e];
      const double pairs_or_count =
          ev.is_pair ? static_cast<double>(pop_.counts[ev.from_a]) *
                           static_cast<double>(pop_.counts[ev.from_b])
                     : static_cast<double>(pop_.counts[ev.from_a]);
      rates_[e] = ev.rate * pairs_or_count;
      total += rates_[e];
    }
    return total;
  }

  std::size_t pick_event(double total_rate) {
    const double target = uniform53(rng_) * total_rate;
    double acc = 0.0;
    for (std::size_t e = 0; e < events_.size(); ++e) {
      acc += rates_[e];
      if (target < acc) return e;
    }
    for (std::size_t e = events_.size(); e-- > 0;)
      if (rates_[e] > 0.0) return e;
    fail(ErrorCode::InvalidArgument, "event selection from an empty rate table");
  }

  std::uint32_t pick_member(std::size_t state) {
    const std::size_t count = buckets_[state].size();
    std::size_t idx = static_cast<std::size_t>(uniform53(rng_) *
                                               static_cast<double>(count));
    if (idx >= count) idx = count - 1;
    return buckets_[state][idx];
  }

  void move_investor(std::uint32_t inv, std::size_t to) {
    const std::size_t from = pop_.states[inv];
    std::vector<std::uint32_t>& bucket = buckets_[from];
    const std::size_t at = position_[inv];
    bucket[at] = bucket.back();
    position_[bucket[at]] = at;
    bucket.pop_back();
    position_[inv] = buckets_[to].size();
    buckets_[to].push_back(inv);
    pop_.states[inv] = static_cast<std::uint8_t>(to);
    --pop_.counts[from];
    ++pop_.counts[to];
  }

  void apply_event(std::size_t e) {
    const EventSpec& ev = events_[e];
    if (ev.is_pair) {
      const std::uint32_t a = pick_member(ev.from_a);
      const std::uint32_t b = pick_member(ev.from_b);
      move_investor(a, ev.to_a);
      move_investor(b, ev.to_b);
    } else {
      move_investor(pick_member(ev.from_a), ev.to_a);
    }
  }

  Population pop_;
  std::vector<EventSpec> events_;
  std::mt19937_64 rng_;
  std::vector<double> rates_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::vector<std::size_t> position_;
};

void check_run_args(double t_end, double sample_every) {
  if (!(t_end >= 0.0)) fail(ErrorCode::InvalidArgument, "t_end must be >= 0");
  if (!(sample_every > 0.0))
    fail(ErrorCode::InvalidArgument, "sample_every must be > 0");
}

}  // namespace

Population round_to_population(const NonSegmentedParams& p,
                               const StateDistribution& mu, std::size_t N) {
  if (N < 2) fail(ErrorCode::InfeasibleInitial, "need at least 2 investors");
  try {
    check_distribution(p, mu, 1e-9);
  } catch (const Error& e) {
    fail(ErrorCode::InfeasibleInitial, e.what());
  }
  const std::size_t k = p.assets();
  const double n = static_cast<double>(N);

  // Round class totals first (non-owners, then one owner class per asset);
  // the low-type state of each class absorbs the within-class surplus.
  std::vector<double> class_targets;
  class_targets.push_back(n * (mu[nonseg::idx_hn] + mu[nonseg::idx_ln]));
  for (std::size_t i = 0; i < k; ++i)
    class_targets.push_back(n * (mu[nonseg::idx_ho(i)] + mu[nonseg::idx_lo(i)]));
  const std::vector<std::size_t> classes = largest_remainder(class_targets, N);

  std::vector<std::size_t> counts(nonseg::dim(k), 0);
  counts[nonseg::idx_hn] = clamp_count(n * mu[nonseg::idx_hn], classes[0]);
  counts[nonseg::idx_ln] = classes[0] - counts[nonseg::idx_hn];
  for (std::size_t i = 0; i < k; ++i) {
    counts[nonseg::idx_ho(i)] = clamp_count(n * mu[nonseg::idx_ho(i)], classes[1 + i]);
    counts[nonseg::idx_lo(i)] = classes[1 + i] - counts[nonseg::idx_ho(i)];
  }
  return from_counts(ModelClass::NonSegmented, counts);
}

Population round_to_population(const PartiallySegmentedParams& p,
                               const StateDistribution& mu, std::size_t N) {
  if (N < 2) fail(ErrorCode::InfeasibleInitial, "need at least 2 investors");
  try {
    check_distribution(p, mu, 1e-9);
  } catch (const Error& e) {
    fail(ErrorCode::InfeasibleInitial, e.what());
  }
  const std::size_t k = p.assets();
  const double n = static_cast<double>(N);

  std::vector<double> class_targets;
  double non_owner = mu[partseg::idx_ln(k)];
  for (std::size_t i = 0; i < k; ++i) non_owner += mu[partseg::idx_hn(i)];
  class_targets.push_back(n * non_owner);
  for (std::size_t i = 0; i < k; ++i)
    class_targets.push_back(n * (mu[partseg::idx_ho(k, i)] + mu[partseg::idx_lo(k, i)]));
  const std::vector<std::size_t> classes = largest_remainder(class_targets, N);

  // The non-owner class spreads over K+1 states; (l,n) takes the surplus slot
  // by being listed last.
  std::vector<double> non_owner_targets;
  for (std::size_t i = 0; i < k; ++i)
    non_owner_targets.push_back(n * mu[partseg::idx_hn(i)]);
  non_owner_targets.push_back(n * mu[partseg::idx_ln(k)]);
  const std::vector<std::size_t> non_owner_counts =
      largest_remainder(non_owner_targets, classes[0]);

  std::vector<std::size_t> counts(partseg::dim(k), 0);
  for (std::size_t i = 0; i < k; ++i) counts[partseg::idx_hn(i)] = non_owner_counts[i];
  counts[partseg::idx_ln(k)] = non_owner_counts[k];
  for (std::size_t i = 0; i < k; ++i) {
    counts[partseg::idx_ho(k, i)] =
        clamp_count(n * mu[partseg::idx_ho(k, i)], classes[1 + i]);
    counts[partseg::idx_lo(k, i)] = classes[1 + i] - counts[partseg::idx_ho(k, i)];
  }
  return from_counts(ModelClass::PartiallySegmented, counts);
}

Population round_to_population(const HeterogeneousParams& p,
                               const StateDistribution& mu, std::size_t N) {
  if (N < 2) fail(ErrorCode::InfeasibleInitial, "need at least 2 investors");
  try {
    check_distribution(p, mu, 1e-9);
  } catch (const Error& e) {
    fail(ErrorCode::InfeasibleInitial, e.what());
  }
  const double n = static_cast<double>(N);

  std::vector<double> class_targets = {
      n * (mu[het::idx_h0] + mu[het::idx_l0]),
      n * (mu[het::idx_h1] + mu[het::idx_l1]),
      n * (mu[het::idx_h2] + mu[het::idx_l2]),
  };
  std::vector<std::size_t> classes = largest_remainder(class_targets, N);

  // Repair the integer supply by shifting investors between adjacent
  // position classes; each move changes total holdings by one tick.
  const double supply_state = mu[het::idx_h1] + mu[het::idx_l1] +
                              2.0 * (mu[het::idx_h2] + mu[het::idx_l2]);
  const long long target = std::llround(n * supply_state);
  auto holdings = [&classes]() {
    return static_cast<long long>(classes[1]) + 2 * static_cast<long long>(classes[2]);
  };
  while (holdings() < target) {
    if (classes[0] > 0) {
      --classes[0];
      ++classes[1];
    } else if (classes[1] > 0) {
      --classes[1];
      ++classes[2];
    } else {
      fail(ErrorCode::InfeasibleInitial, "cannot reach the integer supply target");
    }
  }
  while (holdings() > target) {
    if (classes[1] > 0) {
      --classes[1];
      ++classes[0];
    } else if (classes[2] > 0) {
      --classes[2];
      ++classes[1];
    } else {
      fail(ErrorCode::InfeasibleInitial, "cannot reach the integer supply target");
    }
  }

  std::vector<std::size_t> counts(het::dim, 0);
  const std::size_t hs[3] = {het::idx_h0, het::idx_h1, het::idx_h2};
  const std::size_t ls[3] = {het::idx_l0, het::idx_l1, het::idx_l2};
  for (int j = 0; j < 3; ++j) {
    counts[hs[j]] = clamp_count(n * mu[hs[j]], classes[j]);
    counts[ls[j]] = classes[j] - counts[hs[j]];
  }
  return from_counts(ModelClass::Heterogeneous, counts);
}

StateDistribution empirical_distribution(const Population& pop) {
  StateDistribution mu;
  mu.model_class = pop.model_class;
  mu.values.resize(pop.counts.size());
  const double n = static_cast<double>(pop.n());
  for (std::size_t s = 0; s < pop.counts.size(); ++s)
    mu.values[s] = static_cast<double>(pop.counts[s]) / n;
  return mu;
}

SimulationResult simulate(const NonSegmentedParams& p, const Population& initial,
                          double t_end, double sample_every, std::uint64_t seed) {
  check_run_args(t_end, sample_every);
  require_population(initial, nonseg::dim(p.assets()));
  JumpProcess process(initial, events_for(p, initial.n()), seed);
  return process.run(t_end, sample_every, seed);
}

SimulationResult simulate(const PartiallySegmentedParams& p, const Population& initial,
                          double t_end, double sample_every, std::uint64_t seed) {
  check_run_args(t_end, sample_every);
  require_population(initial, partseg::dim(p.assets()));
  JumpProcess process(initial, events_for(p, initial.n()), seed);
  return process.run(t_end, sample_every, seed);
}

SimulationResult simulate(const HeterogeneousParams& p, const Population& initial,
                          double t_end, double sample_every, std::uint64_t seed) {
  check_run_args(t_end, sample_every);
  require_population(initial, het::dim);
  JumpProcess process(initial, events_for(p, initial.n()), seed);
  return process.run(t_end, sample_every, seed);
}

SimulationResult simulate(const NonSegmentedParams& p, const StateDistribution& initial,
                          std::size_t N, double t_end, double sample_every,
                          std::uint64_t seed) {
  return simulate(p, round_to_population(p, initial, N), t_end, sample_every, seed);
}

SimulationResult simulate(const PartiallySegmentedParams& p,
                          const StateDistribution& initial, std::size_t N, double t_end,
                          double sample_every, std::uint64_t seed) {
  return simulate(p, round_to_population(p, initial, N), t_end, sample_every, seed);
}

SimulationResult simulate(const HeterogeneousParams& p, const StateDistribution& initial,
                          std::size_t N, double t_end, double sample_every,
                          std::uint64_t seed) {
  return simulate(p, round_to_population(p, initial, N), t_end, sample_every, seed);
}

MeanFieldComparison compare_to_meanfield(const SimulationResult& sim,
                                         const Trajectory& ode) {
  if (sim.sample_times.size() != ode.times.size())
    fail(ErrorCode::GridMismatch,
         "simulation has " + std::to_string(sim.sample_times.size()) +
             " samples, trajectory has " + std::to_string(ode.times.size()));
  if (sim.empirical.empty()) fail(ErrorCode::GridMismatch, "empty sampling grids");

  const std::size_t dim = sim.empirical.front().size();
  MeanFieldComparison cmp;
  cmp.times = sim.sample_times;
  cmp.per_time.resize(sim.sample_times.size(), 0.0);
  cmp.component_sup.resize(dim, 0.0);

  for (std::size_t t = 0; t < sim.sample_times.size(); ++t) {
    if (std::abs(sim.sample_times[t] - ode.times[t]) > 1e-9)
      fail(ErrorCode::GridMismatch, "sampling grids differ at index " + std::to_string(t));
    const StateDistribution& emp = sim.empirical[t];
    const StateDistribution& ref = ode.states[t];
    if (emp.size() != dim || ref.size() != dim)
      fail(ErrorCode::GridMismatch, "state dimensions differ");
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = std::abs(emp[c] - ref[c]);
      cmp.per_time[t] = std::max(cmp.per_time[t], d);
      cmp.component_sup[c] = std::max(cmp.component_sup[c], d);
      cmp.sup = std::max(cmp.sup, d);
    }
  }
  return cmp;
}

}  // namespace otc
