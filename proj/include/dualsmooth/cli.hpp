#pragma once

namespace dualsmooth::cli {

// Batch entry point: simulate | fit-density | estimate | dual-estimate |
// verify | conjugate-plot. Returns 0 on success, 1 on solver
// non-convergence or failed verification, 2 on input errors.
int run(int argc, const char* const* argv);

}  // namespace dualsmooth::cli
