#pragma once

#include <functional>

namespace sls {

// Worker count used by parallel loops: SLS_WORKERS env var if set, otherwise
// hardware concurrency.  A value of 1 forces serial execution.
int worker_count();
void set_worker_count(int workers);

// Runs fn(i) for i in [0, count).  Each index writes only its own output
// slot, so results are identical to a serial loop regardless of scheduling.
void parallel_for(int count, const std::function<void(int)>& fn,
                  int workers = 0);

}  // namespace sls
