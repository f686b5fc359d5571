#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "levyspec/ensemble.hpp"
#include "levyspec/levy.hpp"
#include "levyspec/rng.hpp"

namespace levyspec {

// One entry draw for a given matrix size.
using EntrySampler = std::function<double(rng::Stream&)>;
using EntrySamplerFactory = std::function<EntrySampler(int n)>;

// Factory wrapping build_entry_law with the mass <= n/10 cutoff default.
EntrySamplerFactory entry_law_sampler(const LevyCharacteristics& chars);

struct DgRow {
  int criterion = 0;  // 1: tail intensity, 2: truncated second moment, 3: truncated mean
  int n = 0;
  double threshold = 0;  // tail threshold for criterion 1, h otherwise
  double estimate = 0;
  double se = 0;
  double target = 0;
  bool pass = false;
  bool inconclusive = false;
};

struct DgReport {
  std::vector<DgRow> rows;
  bool all_pass = false;       // every conclusive row passes, none inconclusive
  bool any_inconclusive = false;
};

// Monte Carlo check that an entry law scales toward its triple:
//   1. n P(|C| > t)        vs  Pi{|x| > t} for tail thresholds t,
//   2. n E[C^2 1_{|C|<=h}] vs  sigma^2 + small-jump second moment at h,
//   3. n E[C  1_{|C|<=h}]  vs  the (zero, by symmetry) compensator drift.
// Pass band per row: |estimate - target| <= 3 se + 5% |target| + 0.02.
// A row whose standard error is too large to discriminate is marked
// inconclusive instead of pass/fail.
DgReport dg_check(const EntrySamplerFactory& sampler, const std::vector<int>& n_schedule,
                  const LevyCharacteristics& chars, double h, long reps, std::uint64_t seed);

}  // namespace levyspec
