#pragma once

namespace nearfield {

/// Worker count used by parallel loops. Honors NEARFIELD_THREADS when set
/// to a positive integer, otherwise the OpenMP default (1 without OpenMP).
int worker_count();

/// Overrides the worker count for the current process; n <= 0 restores the default.
void set_worker_count(int n);

}  // namespace nearfield
