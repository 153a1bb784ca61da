#include "namegame/scoring.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "namegame/mathx.hpp"

namespace namegame::scoring {

using nlohmann::json;

std::string_view style_key(PromptStyle style) {
  switch (style) {
    case PromptStyle::BaseLlamaMistral: return "base-llama-mistral";
    case PromptStyle::BasePhi: return "base-phi";
    case PromptStyle::Instruct: return "instruct";
  }
  return "?";
}

PromptStyle style_from_key(std::string_view key) {
  if (key == "base-llama-mistral") return PromptStyle::BaseLlamaMistral;
  if (key == "base-phi") return PromptStyle::BasePhi;
  if (key == "instruct") return PromptStyle::Instruct;
  throw ConfigError("unknown prompt style: '" + std::string(key) + "'");
}

AnswerTokens answer_tokens_for(PromptStyle style) {
  switch (style) {
    case PromptStyle::BasePhi: return {" True", " False"};
    case PromptStyle::BaseLlamaMistral: return {"True", "False"};
    case PromptStyle::Instruct:
      throw ConfigError("race probes are not defined for instruct style");
  }
  throw ConfigError("unknown prompt style");
}

void ScoreRequest::validate() const {
  if (prompt.empty()) throw ContractError("score request: empty prompt");
  if (continuations.empty())
    throw ContractError("score request: no continuations");
  std::set<std::string_view> seen;
  for (const auto& c : continuations) {
    if (!seen.insert(c).second)
      throw ContractError("score request: duplicate continuation '" + c + "'");
  }
}

void BackendConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("backend endpoint not set");
  if (max_parallel < 1) throw ConfigError("max_parallel must be >= 1");
  if (retry_attempts < 1) throw ConfigError("retry_attempts must be >= 1");
}

std::vector<double> softmax(std::span<const double> raw_scores) {
  for (double s : raw_scores) {
    if (!std::isfinite(s))
      throw NumericError("softmax: non-finite score " + format_full(s));
  }
  const double lse = mathx::log_sum_exp(raw_scores);
  std::vector<double> probs(raw_scores.size());
  for (std::size_t i = 0; i < raw_scores.size(); ++i)
    probs[i] = std::exp(raw_scores[i] - lse);
  return probs;
}

CompletionDistribution renormalize(const std::vector<std::string>& continuations,
                                   const std::vector<double>& raw_scores) {
  if (continuations.size() != raw_scores.size())
    throw ContractError("renormalize: continuation/score count mismatch");
  if (continuations.empty()) throw ContractError("renormalize: empty input");
  const auto probs = softmax(raw_scores);
  CompletionDistribution dist;
  dist.entries.reserve(continuations.size());
  for (std::size_t i = 0; i < continuations.size(); ++i)
    dist.entries.push_back({continuations[i], raw_scores[i], probs[i]});
  return dist;
}

double expected_value(const CompletionDistribution& dist,
                      const std::map<std::string, double>& value_of) {
  double ev = 0.0;
  for (const auto& e : dist.entries) {
    const auto it = value_of.find(e.continuation);
    if (it == value_of.end())
      throw ContractError("expected_value: no value for continuation '" +
                          e.continuation + "'");
    ev += e.probability * it->second;
  }
  return ev;
}

std::map<std::string, double> integer_value_map(int lo, int hi) {
  std::map<std::string, double> values;
  for (int v = lo; v <= hi; ++v) values[std::to_string(v)] = v;
  return values;
}

std::vector<std::string> integer_continuations(int lo, int hi) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

double fallback_score(std::string_view prompt, std::string_view continuation,
                      std::uint64_t seed) {
  std::string key;
  key.reserve(prompt.size() + continuation.size() + 24);
  key.append(prompt);
  key.push_back('\x1f');
  key.append(continuation);
  key.push_back('\x1f');
  key.append(std::to_string(seed));
  const std::uint64_t h = fnv1a64(key);
  const double unit =
      static_cast<double>(h >> 11) / static_cast<double>(1ull << 53);
  return -5.0 + 5.0 * unit;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
    throw Error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MockBackend

MockBackend::MockBackend(const std::filesystem::path& fixture_file,
                         std::uint64_t fallback_seed)
    : seed_(fallback_seed) {
  std::ifstream in(fixture_file);
  if (!in)
    throw ConfigError("cannot open fixture file: " + fixture_file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed fixture file " + fixture_file.string() + ": " +
                      e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
    throw ConfigError("fixture file " + fixture_file.string() +
                      " must be an object with an 'entries' array");
  normalized_ = doc.value("normalized", false);

  std::string fixture_text;
  for (const auto& e : doc["entries"]) {
    Rule rule;
    if (e.contains("prompt")) rule.prompt_exact = e["prompt"].get<std::string>();
    if (e.contains("prompt_contains"))
      rule.prompt_contains = e["prompt_contains"].get<std::string>();
    if (!rule.prompt_exact && !rule.prompt_contains)
      throw ConfigError("fixture entry needs 'prompt' or 'prompt_contains'");
    if (!e.contains("continuation"))
      throw ConfigError("fixture entry missing 'continuation'");
    rule.continuation = e["continuation"].get<std::string>();
    if (e.contains("token_logprobs")) {
      double sum = 0.0;
      for (const auto& t : e["token_logprobs"]) sum += t.get<double>();
      rule.score = sum;
    } else if (e.contains("score")) {
      rule.score = e["score"].get<double>();
    } else {
      throw ConfigError("fixture entry missing 'score' or 'token_logprobs'");
    }
    rules_.push_back(std::move(rule));
  }
  identity_ = "mock:" + sha256_hex(doc.dump()) + ":" + std::to_string(seed_);
}

ScoreResponse MockBackend::score(const ScoreRequest& request) {
  request.validate();
  ScoreResponse resp;
  resp.normalized = normalized_;
  resp.scores.reserve(request.continuations.size());
  for (const auto& continuation : request.continuations) {
    double score = 0.0;
    bool matched = false;
    for (const auto& rule : rules_) {
      if (rule.continuation != continuation) continue;
      if (rule.prompt_exact && *rule.prompt_exact != request.prompt) continue;
      if (rule.prompt_contains &&
          request.prompt.find(*rule.prompt_contains) == std::string::npos)
        continue;
      score = rule.score;
      matched = true;
      break;
    }
    if (!matched) score = fallback_score(request.prompt, continuation, seed_);
    resp.scores.push_back(score);
  }
  return resp;
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(std::string endpoint,
                         std::chrono::milliseconds timeout, int retry_attempts,
                         std::chrono::milliseconds retry_backoff)
    : endpoint_(std::move(endpoint)),
      timeout_(timeout),
      retry_attempts_(retry_attempts),
      retry_backoff_(retry_backoff) {
  // split scheme://host[:port] from the request path
  const auto scheme_end = endpoint_.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint must start with http:// or https://: " +
                      endpoint_);
  const auto path_start = endpoint_.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    host_base_ = endpoint_;
    path_ = "/score";
  } else {
    host_base_ = endpoint_.substr(0, path_start);
    path_ = endpoint_.substr(path_start);
  }
}

ScoreResponse HttpBackend::score(const ScoreRequest& request) {
  request.validate();
  const json body = {{"prompt", request.prompt},
                     {"continuations", request.continuations}};
  const std::string payload = body.dump();

  std::string last_transport_error;
  for (int attempt = 0; attempt < retry_attempts_; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(retry_backoff_ * (1 << (attempt - 1)));

    httplib::Client client(host_base_);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_).count(),
                                  (timeout_.count() % 1000) * 1000);
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_).count(),
                            (timeout_.count() % 1000) * 1000);

    auto res = client.Post(path_, payload, "application/json");
    if (!res) {
      last_transport_error = httplib::to_string(res.error());
      continue;  // connection-level failure: retry
    }
    if (res->status >= 500) {
      last_transport_error = "server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw ProtocolError("backend rejected request with status " +
                          std::to_string(res->status) + ": " + res->body);

    json doc;
    try {
      doc = json::parse(res->body);
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("backend returned invalid JSON: ") +
                          e.what());
    }
    if (!doc.contains("scores") || !doc["scores"].is_array())
      throw ProtocolError("backend response missing 'scores' array");

    ScoreResponse resp;
    resp.normalized = doc.value("normalized", false);
    for (const auto& s : doc["scores"]) {
      if (!s.is_number())
        throw ProtocolError("backend returned a non-numeric score");
      resp.scores.push_back(s.get<double>());
    }
    if (resp.scores.size() != request.continuations.size())
      throw ProtocolError(
          "backend returned " + std::to_string(resp.scores.size()) +
          " scores for " + std::to_string(request.continuations.size()) +
          " continuations");
    return resp;
  }
  throw TransportError("backend unreachable after " +
                       std::to_string(retry_attempts_) +
                       " attempts: " + last_transport_error);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  config.validate();
  if (config.endpoint.rfind("mock:", 0) == 0) {
    return std::make_unique<MockBackend>(config.endpoint.substr(5),
                                         config.mock_seed);
  }
  if (config.endpoint.rfind("http://", 0) == 0 ||
      config.endpoint.rfind("https://", 0) == 0) {
    return std::make_unique<HttpBackend>(config.endpoint, config.timeout,
                                         config.retry_attempts,
                                         config.retry_backoff);
  }
  throw ConfigError("unsupported endpoint scheme: " + config.endpoint);
}

// ---------------------------------------------------------------------------
// ScoringClient

ScoringClient::ScoringClient(std::shared_ptr<Backend> backend,
                             BackendConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
  if (!backend_) throw ContractError("ScoringClient requires a backend");
  if (config_.cache_dir)
    std::filesystem::create_directories(*config_.cache_dir);
}

std::string ScoringClient::cache_key(const std::string& prompt,
                                     const std::string& continuation) const {
  std::string material;
  material.reserve(prompt.size() + continuation.size() + 64);
  material.append(backend_->identity());
  material.push_back('\x1f');
  material.append(prompt);
  material.push_back('\x1f');
  material.append(continuation);
  return sha256_hex(material);
}

std::optional<ScoringClient::CacheEntry> ScoringClient::cache_load(
    const std::string& key) {
  {
    std::lock_guard lock(mutex_);
    const auto it = memory_cache_.find(key);
    if (it != memory_cache_.end()) return it->second;
  }
  if (!config_.cache_dir) return std::nullopt;
  const auto path = *config_.cache_dir / key.substr(0, 2) / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json doc;
    in >> doc;
    CacheEntry entry{doc.at("score").get<double>(),
                     doc.value("normalized", false)};
    std::lock_guard lock(mutex_);
    memory_cache_[key] = entry;
    return entry;
  } catch (const json::exception&) {
    return std::nullopt;  // unreadable entry: treat as a miss
  }
}

void ScoringClient::cache_store(const std::string& key,
                                const std::string& prompt,
                                const std::string& continuation,
                                const CacheEntry& entry) {
  {
    std::lock_guard lock(mutex_);
    memory_cache_[key] = entry;
  }
  if (!config_.cache_dir) return;
  const auto dir = *config_.cache_dir / key.substr(0, 2);
  std::filesystem::create_directories(dir);
  const auto path = dir / (key + ".json");
  const auto tmp = dir / (key + ".tmp." +
                          std::to_string(fnv1a64(prompt) ^
                                         std::hash<std::thread::id>{}(
                                             std::this_thread::get_id())));
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write cache entry " + tmp.string());
    const json doc = {{"prompt", prompt},
                      {"continuation", continuation},
                      {"score", entry.score},
                      {"normalized", entry.normalized}};
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);  // atomic publish
}

ScoreResponse ScoringClient::score(const ScoreRequest& request) {
  request.validate();
  const std::size_t n = request.continuations.size();
  std::vector<std::optional<CacheEntry>> found(n);
  std::vector<std::string> keys(n);
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = cache_key(request.prompt, request.continuations[i]);
    found[i] = cache_load(keys[i]);
    if (found[i]) ++cache_hits_;
    else missing.push_back(i);
  }

  if (!missing.empty()) {
    ScoreRequest sub;
    sub.prompt = request.prompt;
    for (std::size_t i : missing) sub.continuations.push_back(request.continuations[i]);
    ++backend_calls_;
    const ScoreResponse fresh = backend_->score(sub);
    if (fresh.scores.size() != missing.size())
      throw ProtocolError("backend response length mismatch");
    for (std::size_t k = 0; k < missing.size(); ++k) {
      const std::size_t i = missing[k];
      const CacheEntry entry{fresh.scores[k], fresh.normalized};
      cache_store(keys[i], request.prompt, request.continuations[i], entry);
      found[i] = entry;
    }
  }

  ScoreResponse resp;
  resp.scores.reserve(n);
  resp.normalized = true;
  for (std::size_t i = 0; i < n; ++i) {
    resp.scores.push_back(found[i]->score);
    resp.normalized = resp.normalized && found[i]->normalized;
  }
  return resp;
}

CompletionDistribution ScoringClient::score_distribution(
    const ScoreRequest& request) {
  const ScoreResponse resp = score(request);
  return renormalize(request.continuations, resp.scores);
}

void parallel_for(std::size_t n, int max_parallel,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const int workers =
      static_cast<int>(std::min<std::size_t>(n, std::max(1, max_parallel)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace namegame::scoring
