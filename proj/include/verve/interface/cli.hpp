#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace verve::interface {

// Subcommands: preprocess, train, rewrite, score, evaluate, serve.
// Exit codes: 0 success, 1 runtime error (one JSON line on `err`), 2 usage.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

// Stops a running `serve` command (also wired to SIGINT/SIGTERM).
void request_shutdown();

}  // namespace verve::interface
