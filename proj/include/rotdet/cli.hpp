#pragma once

namespace rotdet {

// Entry point behind the `rotdet` binary. Exit codes: 0 success, 1 data
// error (unreadable/malformed input), 2 usage error.
int cli_main(int argc, const char* const* argv);

}  // namespace rotdet
