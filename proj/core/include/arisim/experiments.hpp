#pragma once

#include <functional>

#include "arisim/config.hpp"
#include "arisim/csv.hpp"

// Seeded Monte Carlo experiment drivers. Every experiment is deterministic
// given (config, seed): trial i always consumes substream(i) and results are
// reduced in trial order, independent of execution schedule.
namespace arisim::experiments {

// Runs fn(0..trials-1) across a small thread pool (serial on single-core
// hosts). fn must only write trial-indexed slots. The first exception thrown
// by any trial is rethrown after all threads join.
void parallel_trials(long trials, const std::function<void(long)>& fn);

// Dispatch on cfg.id. Sweep points that fail inside a solver are emitted as
// NaN cells and recorded in the table metadata instead of aborting the run.
csv::ResultTable run_experiment(const config::ExperimentConfig& cfg);

}  // namespace arisim::experiments
