#pragma once

namespace coopfarm {

// Kernels that have an OpenMP path also keep a plain serial loop. Both
// produce identical results; the serial one is the reference in tests.
enum class Execution { serial, parallel };

}  // namespace coopfarm
