#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>

#include "paraeval/chat_client.hpp"
#include "paraeval/cli/config.hpp"
#include "paraeval/metrics_semantic.hpp"

namespace paraeval::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kIo = 2, kUpstream = 3 };

/// Command-line overrides shared by every subcommand.
struct CommonOptions {
  std::optional<std::size_t> limit;
  std::optional<std::filesystem::path> out;
};

// Each command writes its artifacts, prints a summary to `out` and returns
// the exit status. Library errors propagate to the caller.
int cmd_generate(const RunConfig& config, const CommonOptions& opts, ChatClient& client, std::ostream& out);
int cmd_score(const RunConfig& config, const CommonOptions& opts, EmbeddingProvider& provider, std::ostream& out);
int cmd_eval(const RunConfig& config, const CommonOptions& opts, std::ostream& out);
int cmd_correlate(const RunConfig& config, const CommonOptions& opts, std::ostream& out);
int cmd_build_trainset(const RunConfig& config, const CommonOptions& opts, std::ostream& out);

/// Parses arguments, loads the configuration, builds clients and providers,
/// runs the subcommand and maps exceptions to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace paraeval::cli
