#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "namegame/common.hpp"

namespace namegame::scoring {

enum class PromptStyle { BaseLlamaMistral, BasePhi, Instruct };

std::string_view style_key(PromptStyle style);
PromptStyle style_from_key(std::string_view key);

// True/False answer strings per style. Phi-2 answers with a leading space;
// Llama2/Mistral answer bare tokens.
struct AnswerTokens {
  std::string true_token;
  std::string false_token;
};
AnswerTokens answer_tokens_for(PromptStyle style);

struct ScoreRequest {
  std::string prompt;
  std::vector<std::string> continuations;  // distinct, non-empty
  void validate() const;                   // throws ContractError
};

struct ScoreResponse {
  std::vector<double> scores;  // order-aligned with the request
  // raw scores are log-probabilities under the model's full next-token
  // distribution (enables valid-mass diagnostics)
  bool normalized = false;
};

struct CompletionDistribution {
  struct Entry {
    std::string continuation;
    double logprob_raw = 0.0;
    double probability = 0.0;
  };
  std::vector<Entry> entries;
};

// probability_i = exp(s_i - logsumexp(s)); log-space, shift-invariant.
std::vector<double> softmax(std::span<const double> raw_scores);
CompletionDistribution renormalize(const std::vector<std::string>& continuations,
                                   const std::vector<double>& raw_scores);

double expected_value(const CompletionDistribution& dist,
                      const std::map<std::string, double>& value_of);

// value map {"lo".."hi"} -> numeric value
std::map<std::string, double> integer_value_map(int lo, int hi);
std::vector<std::string> integer_continuations(int lo, int hi);

struct BackendConfig {
  std::string endpoint;  // http(s)://host[:port][/path] or mock:<fixture-path>
  PromptStyle prompt_style = PromptStyle::BasePhi;
  std::chrono::milliseconds timeout{30000};
  int max_parallel = 4;
  std::optional<std::filesystem::path> cache_dir;
  std::uint64_t mock_seed = 0;
  int retry_attempts = 3;
  std::chrono::milliseconds retry_backoff{100};
  void validate() const;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual ScoreResponse score(const ScoreRequest& request) = 0;
  // stable identity string, part of every cache key
  virtual std::string identity() const = 0;
};

// Fixture-driven backend. A fixture entry matches on the exact prompt or on
// a prompt substring, plus the exact continuation; its score is either given
// directly or as per-token log-probabilities that are summed. Unmatched
// (prompt, continuation) pairs get a deterministic hash-derived score in
// [-5, 0) controlled by fallback_seed.
class MockBackend final : public Backend {
 public:
  MockBackend(const std::filesystem::path& fixture_file,
              std::uint64_t fallback_seed);

  ScoreResponse score(const ScoreRequest& request) override;
  std::string identity() const override { return identity_; }

 private:
  struct Rule {
    std::optional<std::string> prompt_exact;
    std::optional<std::string> prompt_contains;
    std::string continuation;
    double score = 0.0;
  };
  std::vector<Rule> rules_;
  bool normalized_ = false;
  std::uint64_t seed_ = 0;
  std::string identity_;
};

// JSON-over-HTTP client for the scoring endpoint. POST {prompt,
// continuations[]} -> {scores[], normalized?}. Transport failures retry with
// exponential backoff; protocol violations are permanent.
class HttpBackend final : public Backend {
 public:
  HttpBackend(std::string endpoint, std::chrono::milliseconds timeout,
              int retry_attempts, std::chrono::milliseconds retry_backoff);

  ScoreResponse score(const ScoreRequest& request) override;
  std::string identity() const override { return endpoint_; }

 private:
  std::string endpoint_;
  std::string host_base_;  // scheme://host:port
  std::string path_;
  std::chrono::milliseconds timeout_;
  int retry_attempts_;
  std::chrono::milliseconds retry_backoff_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// Thread-safe scoring front end: per-(prompt, continuation) disk cache plus
// call counters. Cached and uncached scoring of the same request agree.
class ScoringClient {
 public:
  ScoringClient(std::shared_ptr<Backend> backend, BackendConfig config);

  ScoreResponse score(const ScoreRequest& request);
  CompletionDistribution score_distribution(const ScoreRequest& request);

  std::uint64_t backend_calls() const { return backend_calls_; }
  std::uint64_t cache_hits() const { return cache_hits_; }
  const BackendConfig& config() const { return config_; }
  Backend& backend() { return *backend_; }

 private:
  struct CacheEntry {
    double score = 0.0;
    bool normalized = false;
  };
  std::string cache_key(const std::string& prompt,
                        const std::string& continuation) const;
  std::optional<CacheEntry> cache_load(const std::string& key);
  void cache_store(const std::string& key, const std::string& prompt,
                   const std::string& continuation, const CacheEntry& entry);

  std::shared_ptr<Backend> backend_;
  BackendConfig config_;
  std::mutex mutex_;
  std::unordered_map<std::string, CacheEntry> memory_cache_;
  std::atomic<std::uint64_t> backend_calls_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
};

// Runs fn(i) for i in [0, n) on up to max_parallel threads. Exceptions are
// collected and the first one rethrown after all workers join.
void parallel_for(std::size_t n, int max_parallel,
                  const std::function<void(std::size_t)>& fn);

std::uint64_t fnv1a64(std::string_view data);
// deterministic fallback score in [-5, 0)
double fallback_score(std::string_view prompt, std::string_view continuation,
                      std::uint64_t seed);
std::string sha256_hex(std::string_view data);

}  // namespace namegame::scoring
