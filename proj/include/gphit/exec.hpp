#pragma once

namespace gphit {

// Data-parallel kernels come in two flavors: a plain serial loop kept as the
// reference, and an OpenMP version. Both must produce bit-identical results.
enum class Exec { Serial, OpenMP };

} // namespace gphit
