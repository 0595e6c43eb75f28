#pragma once
// Umbrella header.

#include "errors.hpp"    // IWYU pragma: export
#include "eval.hpp"      // IWYU pragma: export
#include "fusion.hpp"    // IWYU pragma: export
#include "gcn.hpp"       // IWYU pragma: export
#include "kg.hpp"        // IWYU pragma: export
#include "matching.hpp"  // IWYU pragma: export
#include "matrix.hpp"    // IWYU pragma: export
#include "pipeline.hpp"  // IWYU pragma: export
#include "rng.hpp"       // IWYU pragma: export
#include "run.hpp"       // IWYU pragma: export
#include "semantic.hpp"  // IWYU pragma: export
#include "strsim.hpp"    // IWYU pragma: export
#include "synthetic.hpp" // IWYU pragma: export
