#pragma once

namespace lmlab {

// Full CLI entry point; returns the process exit code (0 ok, 1 runtime
// error, 2 config error, 3 verification failure).
int cli_main(int argc, const char* const* argv);

}  // namespace lmlab
