#pragma once

namespace dynafit {

/// Worker threads used for Gram construction and batched inference.
/// Reads DYNAFIT_THREADS (0 or unset = all hardware threads).
int worker_count();

}  // namespace dynafit
