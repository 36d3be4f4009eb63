#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "paraeval/chat_client.hpp"
#include "paraeval/metrics_semantic.hpp"

namespace paraeval::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(PARAEVAL_FIXTURE_DIR) / name;
}

inline std::vector<nlohmann::json> fixture_lines(const std::string& name) {
  std::ifstream in(fixture(name));
  std::vector<nlohmann::json> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

inline nlohmann::json fixture_json(const std::string& name) {
  std::ifstream in(fixture(name));
  return nlohmann::json::parse(in);
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("paraeval-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// The sentence a generation prompt asks to rephrase.
inline std::string prompt_sentence(const std::string& user_text) {
  const auto start = user_text.rfind("Sentence: ");
  const auto end = user_text.rfind(" Paraphrase");
  if (start == std::string::npos || end == std::string::npos || end < start) return {};
  return user_text.substr(start + 10, end - start - 10);
}

/// Deterministic numbered rewrites of `sentence`, each at least four words.
inline std::vector<std::string> canned_paraphrases(const std::string& sentence, std::size_t k) {
  static const std::vector<std::string> prefixes = {"In other words,", "Put differently,", "That is to say,",
                                                    "Simply put,", "To rephrase it,", "Said another way,"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(prefixes[i % prefixes.size()] + " " + sentence);
  return out;
}

/// Scripted chat client; `respond` maps a request to the reply text and may throw.
class MockChatClient final : public ChatClient {
 public:
  using Responder = std::function<std::string(const ChatRequest&, std::size_t call)>;
  explicit MockChatClient(Responder respond) : respond_(std::move(respond)) {}

  std::string complete(const ChatRequest& request) override {
    std::size_t call;
    {
      std::lock_guard lock(mutex_);
      call = requests_.size();
      requests_.push_back(request);
    }
    return respond_(request, call);
  }

  std::size_t calls() const {
    std::lock_guard lock(mutex_);
    return requests_.size();
  }
  std::vector<ChatRequest> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

 private:
  Responder respond_;
  mutable std::mutex mutex_;
  std::vector<ChatRequest> requests_;
};

/// Replies with k numbered canned paraphrases of the prompted sentence.
inline MockChatClient::Responder numbered_responder(std::size_t k) {
  return [k](const ChatRequest& req, std::size_t) {
    std::string reply = "Here are the paraphrases:\n";
    const auto lines = canned_paraphrases(prompt_sentence(req.user), k);
    for (std::size_t i = 0; i < lines.size(); ++i) reply += std::to_string(i + 1) + ". " + lines[i] + "\n";
    return reply;
  };
}

/// httplib server on an ephemeral loopback port, stopped on destruction.
class LoopbackServer {
 public:
  LoopbackServer() = default;
  ~LoopbackServer() { stop(); }
  LoopbackServer(const LoopbackServer&) = delete;
  LoopbackServer& operator=(const LoopbackServer&) = delete;

  httplib::Server& server() { return server_; }

  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

/// Deterministic pseudo-embedding: one row per lowercase word, seeded by the word.
inline EmbeddingMatrix word_hash_embedding(const std::string& text, std::size_t dim = 8) {
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  for (std::string word; in >> word;) {
    std::string key;
    for (char c : word) {
      if (std::isalnum(static_cast<unsigned char>(c))) key.push_back(static_cast<char>(std::tolower(c)));
    }
    if (key.empty()) key = word;
    std::mt19937_64 rng(std::hash<std::string>{}(key));
    std::normal_distribution<double> dist;
    std::vector<double> row(dim);
    for (auto& v : row) v = dist(rng);
    tokens.push_back(key);
    rows.push_back(std::move(row));
  }
  return EmbeddingMatrix(std::move(tokens), std::move(rows));
}

}  // namespace paraeval::testing
