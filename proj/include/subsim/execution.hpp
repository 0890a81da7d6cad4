#pragma once

namespace subsim {

// Loop execution policy for the parallel kernels. Both policies produce
// bit-identical results; `serial` is the reference path.
enum class Execution { serial, parallel };

/// Worker threads available to Execution::parallel (1 without OpenMP).
[[nodiscard]] int max_threads() noexcept;

}  // namespace subsim
