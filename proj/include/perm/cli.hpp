#pragma once

namespace perm {

/// Subcommands: exact, bound, preprocess, estimate, gg, gen, bench.
/// Machine-readable JSON goes to stdout (one object), the human summary to
/// stderr. Returns 0 on success, 2 on usage/input errors, 3 on
/// numeric/timeout failures.
int cli_main(int argc, const char* const* argv);

} // namespace perm
