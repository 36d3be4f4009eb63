#include "paraeval/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "paraeval/errors.hpp"

namespace paraeval::cli {
namespace {

using Inputs = std::vector<std::string>;
using Setter = std::function<void(const Inputs&)>;

class KeyError : public std::exception {};

std::string scalar(const Inputs& in) {
  if (in.empty()) return {};
  if (in.size() > 1) throw KeyError();
  return in.front();
}

template <typename T>
T number(const Inputs& in) {
  const std::string s = scalar(in);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw KeyError();
  return value;
}

double real(const Inputs& in) { return number<double>(in); }
std::size_t count(const Inputs& in) { return number<std::size_t>(in); }

class Parser {
 public:
  explicit Parser(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

  void bind(const std::string& section, const std::string& key, Setter setter) {
    table_[section][key] = std::move(setter);
  }

  void bind_path(const std::string& section, const std::string& key, std::filesystem::path& target) {
    bind(section, key, [this, &target](const Inputs& in) {
      const std::filesystem::path p = scalar(in);
      target = p.empty() || p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p;
    });
  }

  void bind_string(const std::string& section, const std::string& key, std::string& target) {
    bind(section, key, [&target](const Inputs& in) { target = scalar(in); });
  }

  void apply(const CLI::ConfigItem& item) {
    if (item.name == "++" || item.name == "--") return;
    if (item.parents.size() != 1) {
      throw ConfigError("config key '" + item.fullname() + "' must appear inside a [section]");
    }
    const auto section = table_.find(item.parents.front());
    if (section == table_.end()) throw ConfigError("unknown config section [" + item.parents.front() + "]");
    const auto key = section->second.find(item.name);
    if (key == section->second.end()) throw ConfigError("unknown config key '" + item.fullname() + "'");
    try {
      key->second(item.inputs);
    } catch (const KeyError&) {
      throw ConfigError("invalid value for '" + item.fullname() + "' (quote strings that contain spaces)");
    } catch (const ConfigError& e) {
      throw ConfigError("invalid value for '" + item.fullname() + "': " + e.what());
    } catch (const DataError& e) {
      throw ConfigError("invalid value for '" + item.fullname() + "': " + e.what());
    }
  }

 private:
  std::filesystem::path base_dir_;
  std::map<std::string, std::map<std::string, Setter>> table_;
};

void bind_all(Parser& p, RunConfig& c) {
  p.bind("global", "seed", [&](const Inputs& in) { c.global.seed = number<std::uint64_t>(in); });
  p.bind_string("global", "log_level", c.global.log_level);

  p.bind_path("io", "corpus", c.io.corpus);
  p.bind("io", "corpus_format", [&](const Inputs& in) { c.io.corpus_format = parse_corpus_format(scalar(in)); });

  auto& g = c.generate.generation;
  p.bind("generation", "k", [&](const Inputs& in) { g.k = count(in); });
  p.bind("generation", "temperature", [&](const Inputs& in) { g.temperature = real(in); });
  p.bind("generation", "top_p", [&](const Inputs& in) { g.top_p = real(in); });
  p.bind("generation", "strategy", [&](const Inputs& in) { g.strategy = parse_strategy(scalar(in)); });
  p.bind("generation", "context_size", [&](const Inputs& in) { g.context_size = count(in); });
  p.bind_string("generation", "model", g.model);
  p.bind_string("generation", "endpoint", g.endpoint);
  p.bind("generation", "max_retries", [&](const Inputs& in) { g.max_retries = count(in); });
  p.bind("generation", "timeout_ms",
         [&](const Inputs& in) { g.request_timeout = std::chrono::milliseconds(count(in)); });
  p.bind("generation", "max_in_flight", [&](const Inputs& in) { g.max_in_flight = count(in); });
  p.bind("generation", "max_consecutive_failures",
         [&](const Inputs& in) { g.max_consecutive_failures = count(in); });
  p.bind("generation", "seed", [&](const Inputs& in) { g.seed = number<std::uint64_t>(in); });
  p.bind("generation", "transport_retries", [&](const Inputs& in) { c.generate.transport_retries = count(in); });
  p.bind_string("generation", "api_key", c.generate.api_key);
  p.bind_string("generation", "api_key_env", c.generate.api_key_env);
  p.bind_path("generation", "output", c.generate.output);
  p.bind_path("generation", "failure_log", c.generate.failure_log);

  p.bind("parascore", "gamma", [&](const Inputs& in) { c.parascore.gamma = real(in); });
  p.bind("parascore", "omega", [&](const Inputs& in) { c.parascore.omega = real(in); });
  p.bind("parascore", "threshold", [&](const Inputs& in) { c.parascore.threshold = real(in); });

  p.bind("provider", "kind", [&](const Inputs& in) {
    const std::string kind = scalar(in);
    if (kind == "file") {
      c.provider.kind = ProviderKind::file;
    } else if (kind == "service") {
      c.provider.kind = ProviderKind::service;
    } else {
      throw ConfigError("expected file or service, got '" + kind + "'");
    }
  });
  p.bind_path("provider", "store", c.provider.store);
  p.bind_string("provider", "url", c.provider.url);
  p.bind("provider", "timeout_ms", [&](const Inputs& in) { c.provider.timeout = std::chrono::milliseconds(count(in)); });
  p.bind("provider", "max_in_flight", [&](const Inputs& in) { c.provider.max_in_flight = count(in); });
  p.bind_string("provider", "model", c.provider.model);
  p.bind("provider", "cache_size", [&](const Inputs& in) { c.provider.cache_size = count(in); });

  p.bind_path("score", "input", c.score.input);
  p.bind_path("score", "output", c.score.output);
  p.bind_path("score", "summary_dir", c.score.summary_dir);
  p.bind("score", "bin_width", [&](const Inputs& in) { c.score.bin_width = real(in); });
  p.bind("score", "threads", [&](const Inputs& in) { c.score.threads = count(in); });

  p.bind_path("eval", "instances", c.eval.instances);
  p.bind("eval", "mode", [&](const Inputs& in) { c.eval.mode = parse_para_mode(scalar(in)); });
  p.bind_path("eval", "output", c.eval.output);
  p.bind_path("eval", "selections", c.eval.selections);
  p.bind_path("eval", "instance_scores", c.eval.instance_scores);

  p.bind_path("correlate", "ratings", c.correlate.ratings);
  p.bind_path("correlate", "scores", c.correlate.scores);
  p.bind("correlate", "metrics", [&](const Inputs& in) {
    if (in.empty()) throw ConfigError("metric list is empty");
    c.correlate.metrics = in;
  });
  p.bind("correlate", "extremes_low", [&](const Inputs& in) { c.correlate.extremes_low = real(in); });
  p.bind("correlate", "extremes_high", [&](const Inputs& in) { c.correlate.extremes_high = real(in); });
  p.bind_path("correlate", "output", c.correlate.output);

  p.bind_path("trainset", "input", c.trainset.input);
  p.bind("trainset", "threshold", [&](const Inputs& in) { c.trainset.threshold = real(in); });
  p.bind_path("trainset", "output", c.trainset.output);
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  RunConfig config;
  Parser parser(base_dir);
  bind_all(parser, config);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& item : items) parser.apply(item);
  config.parascore.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.parent_path());
}

void apply_environment(RunConfig& config) {
  if (const char* endpoint = std::getenv("PARAEVAL_ENDPOINT"); endpoint && *endpoint) {
    config.generate.generation.endpoint = endpoint;
  }
  if (!config.generate.api_key_env.empty()) {
    if (const char* key = std::getenv(config.generate.api_key_env.c_str()); key && *key) {
      config.generate.api_key = key;
    }
  }
}

}  // namespace paraeval::cli
