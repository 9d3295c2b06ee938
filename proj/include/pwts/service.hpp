#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "httplib.h"

#include "pwts/data_model.hpp"
#include "pwts/errors.hpp"
#include "pwts/grid_search.hpp"
#include "pwts/json_io.hpp"
#include "pwts/rng.hpp"
#include "pwts/synthetic.hpp"

namespace pwts {

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// "host:port", ":port" or "port".
inline ListenAddress parse_listen(const std::string& text) {
  ListenAddress a;
  const auto colon = text.rfind(':');
  std::string port = text;
  if (colon != std::string::npos) {
    if (colon > 0) a.host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const int p = std::stoi(port, &used);
    if (used != port.size() || p < 0 || p > 65535) throw std::out_of_range("port");
    a.port = p;
  } catch (const std::exception&) {
    throw ConfigError("bad listen address '" + text + "', expected host:port");
  }
  return a;
}

/// Flag beats environment beats the built-in default.
inline ListenAddress resolve_listen(const std::optional<std::string>& flag, const char* env_name = "PWTS_LISTEN") {
  if (flag) return parse_listen(*flag);
  if (const char* env = std::getenv(env_name); env && *env) return parse_listen(env);
  return ListenAddress{};
}

struct ServiceOptions {
  /// Directory of the built UI bundle; empty disables static serving.
  std::string static_dir;
  /// Queued or running jobs allowed per X-Client-Token value; 0 means unlimited.
  std::size_t max_active_per_token = 1;
  /// Grid workers used by the job runner.
  std::size_t threads = 0;
};

enum class JobState { Queued, Running, Done, Failed };

inline const char* to_string(JobState s) {
  switch (s) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "failed";
}

/// In-memory jobs served over HTTP. Jobs run one at a time in submission order on a
/// single runner thread; the grid inside a job uses the configured worker count.
class Service {
 public:
  explicit Service(ServiceOptions options = {}) : options_(std::move(options)) {
    nonce_ = splitmix64(static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()));
    routes();
    runner_ = std::jthread([this](std::stop_token st) { run_jobs(st); });
  }

  ~Service() { stop(); }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  int start(const ListenAddress& addr) {
    int port = addr.port;
    if (port == 0) {
      port = server_.bind_to_any_port(addr.host);
    } else if (!server_.bind_to_port(addr.host, port)) {
      port = -1;
    }
    if (port < 0) throw Error("cannot listen on " + addr.host + ":" + std::to_string(addr.port));
    listener_ = std::jthread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port;
  }

  /// Blocks until stop() is called from elsewhere.
  void wait() {
    if (listener_.joinable()) listener_.join();
  }

  void stop() {
    server_.stop();
    if (listener_.joinable()) listener_.join();
    runner_.request_stop();
    { std::lock_guard lock(queue_mutex_); }
    queue_cv_.notify_all();
    if (runner_.joinable()) runner_.join();
  }

  httplib::Server& server() noexcept { return server_; }

 private:
  struct Job {
    std::string id;
    std::string token;
    JobState state = JobState::Queued;
    std::size_t cells_done = 0;
    std::size_t cells_total = 0;
    std::string error;
    json submitted;
    DataTable table;
    GridConfig config;
    std::shared_ptr<const AnalysisResult> result;
    std::string result_json;
  };

  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    send_json(res, status, extra);
  }

  std::string next_id() {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(splitmix64(nonce_ + ++counter_)));
    return buf;
  }

  std::shared_ptr<Job> find_job(const std::string& id) {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(id);
    return it == jobs_.end() ? nullptr : it->second;
  }

  void routes() {
    server_.Post("/api/analyze", [this](const httplib::Request& req, httplib::Response& res) { post_analyze(req, res); });
    server_.Get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      get_job(req.matches[1], res);
    });
    server_.Get(R"(/api/jobs/([^/]+)/affinity)", [this](const httplib::Request& req, httplib::Response& res) {
      get_affinity(req, req.matches[1], res);
    });
    server_.Get("/api/datasets", [](const httplib::Request&, httplib::Response& res) {
      json list = json::array();
      for (const auto& info : dataset_catalog()) {
        const auto table = generate_synthetic(SyntheticSpec{info.kind, info.default_seed});
        list.push_back(json{{"kind", std::string(info.name)},
                            {"description", std::string(info.description)},
                            {"defaultSeed", info.default_seed},
                            {"randomized", info.randomized},
                            {"points", table.points()},
                            {"explanatory", table.explanatory()}});
      }
      send_json(res, 200, list);
    });
    server_.Get(R"(/api/datasets/([^/]+))", [](const httplib::Request& req, httplib::Response& res) {
      SyntheticKind kind;
      try {
        kind = parse_kind(req.matches[1].str());
      } catch (const UnknownKind& e) {
        return send_error(res, 404, e.what());
      }
      SyntheticSpec spec{kind, dataset_info(kind).default_seed};
      if (req.has_param("seed")) {
        const std::string s = req.get_param_value("seed");
        char* end = nullptr;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (s.empty() || *end != '\0' || s.front() == '-') return send_error(res, 400, "seed must be a non-negative integer");
        spec.seed = v;
      }
      res.status = 200;
      res.set_content(serialize_table(generate_synthetic(spec)), "text/tab-separated-values; charset=utf-8");
    });
    if (!options_.static_dir.empty() && !server_.set_mount_point("/", options_.static_dir))
      throw ConfigError("static directory '" + options_.static_dir + "' does not exist");
  }

  void post_analyze(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, std::string("request body is not valid JSON: ") + e.what(),
                        json{{"kind", "InvalidJson"}, {"offset", e.byte}});
    }
    if (!body.is_object() || !body.contains("table") || !body["table"].is_string())
      return send_error(res, 400, "body must be an object with a string field \"table\"", json{{"kind", "InvalidRequest"}});

    auto job = std::make_shared<Job>();
    try {
      job->table = parse_table(body["table"].get<std::string>());
      GridConfig cfg;
      cfg.threads = options_.threads;
      if (body.contains("config")) cfg = config_from_json(body["config"], cfg);
      cfg.threads = options_.threads;
      job->config = resolve_config(cfg, job->table.points(), job->table.explanatory());
    } catch (const ParseError& e) {
      return send_error(res, 400, e.what(), json{{"kind", to_string(e.kind())}, {"line", e.line()}, {"column", e.column()}});
    } catch (const ConfigError& e) {
      return send_error(res, 400, e.what(), json{{"kind", "InvalidConfig"}});
    }
    job->submitted = body.contains("config") ? body["config"] : json::object();
    job->token = req.get_header_value("X-Client-Token");

    {
      std::lock_guard lock(jobs_mutex_);
      if (options_.max_active_per_token > 0 && !job->token.empty()) {
        std::size_t active = 0;
        for (const auto& [id, j] : jobs_)
          if (j->token == job->token && (j->state == JobState::Queued || j->state == JobState::Running)) ++active;
        if (active >= options_.max_active_per_token)
          return send_error(res, 429, "this client already has a job in progress", json{{"kind", "TooManyJobs"}});
      }
      job->id = next_id();
      jobs_.emplace(job->id, job);
    }
    {
      std::lock_guard lock(queue_mutex_);
      queue_.push_back(job);
    }
    queue_cv_.notify_one();
    send_json(res, 202, json{{"jobId", job->id}, {"state", "queued"}});
  }

  std::string affinity_ref(const std::string& id, const HyperParams& p) const {
    return "/api/jobs/" + id + "/affinity?axis=" + std::to_string(p.axis) + "&scale=" + json(p.scale).dump() +
           "&precision=" + std::to_string(p.precision) + "&parsimony=" + json(p.parsimony).dump();
  }

  void get_job(const std::string& id, httplib::Response& res) {
    const auto job = find_job(id);
    if (!job) return send_error(res, 404, "unknown job '" + id + "'");
    std::lock_guard lock(jobs_mutex_);
    json body{{"jobId", job->id},
              {"state", to_string(job->state)},
              {"progress", {{"cellsDone", job->cells_done}, {"cellsTotal", job->cells_total}}},
              {"config", job->submitted}};
    if (job->state == JobState::Failed) body["error"] = job->error;
    if (job->state == JobState::Done) {
      // the result document is built once, then spliced in as raw text
      std::string text = body.dump();
      text.pop_back();
      text += ",\"result\":" + job->result_json + "}";
      res.status = 200;
      res.set_content(text, "application/json");
      return;
    }
    send_json(res, 200, body);
  }

  void get_affinity(const httplib::Request& req, const std::string& id, httplib::Response& res) {
    const auto job = find_job(id);
    if (!job) return send_error(res, 404, "unknown job '" + id + "'");
    std::shared_ptr<const AnalysisResult> result;
    {
      std::lock_guard lock(jobs_mutex_);
      if (job->state != JobState::Done)
        return send_error(res, 409, std::string("job is ") + to_string(job->state));
      result = job->result;
    }
    HyperParams p;
    try {
      for (const char* key : {"axis", "scale", "precision", "parsimony"})
        if (!req.has_param(key)) throw ConfigError(std::string("missing query parameter '") + key + "'");
      p.axis = std::stoul(req.get_param_value("axis"));
      p.scale = std::stod(req.get_param_value("scale"));
      p.precision = std::stoul(req.get_param_value("precision"));
      p.parsimony = std::stod(req.get_param_value("parsimony"));
    } catch (const ConfigError& e) {
      return send_error(res, 400, e.what());
    } catch (const std::exception&) {
      return send_error(res, 400, "query parameters must be numbers");
    }
    const CellResult* cell = result->find(p);
    if (!cell) return send_error(res, 404, "no such cell in this job's grid");
    if (!cell->affinity) return send_error(res, 404, "cell is infeasible and has no affinity matrix");
    send_json(res, 200,
              json{{"params", params_to_json(p)},
                   {"labels", cell->clustering.labels},
                   {"displayOrder", cell->clustering.display_order},
                   {"matrix", affinity_to_json(*cell->affinity)}});
  }

  void run_jobs(std::stop_token st) {
    for (;;) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(queue_mutex_);
        queue_cv_.wait(lock, [&] { return st.stop_requested() || !queue_.empty(); });
        if (st.stop_requested()) return;
        job = queue_.front();
        queue_.pop_front();
      }
      {
        std::lock_guard lock(jobs_mutex_);
        job->state = JobState::Running;
      }
      try {
        auto result = std::make_shared<AnalysisResult>(run_grid(job->table, job->config, [&](std::size_t done, std::size_t total) {
          std::lock_guard lock(jobs_mutex_);
          job->cells_done = done;
          job->cells_total = total;
        }));
        json doc = result_to_json(*result);
        for (auto& cell : doc["cells"]) {
          const HyperParams p{cell["axis"].get<std::size_t>(), cell["scale"].get<double>(),
                              cell["precision"].get<std::size_t>(), cell["parsimony"].get<double>()};
          cell["affinityRef"] = cell["feasible"].get<bool>() ? json(affinity_ref(job->id, p)) : json(nullptr);
        }
        std::string text = doc.dump();
        std::lock_guard lock(jobs_mutex_);
        job->result = std::move(result);
        job->result_json = std::move(text);
        job->state = JobState::Done;
      } catch (const std::exception& e) {
        std::lock_guard lock(jobs_mutex_);
        job->error = e.what();
        job->state = JobState::Failed;
      }
    }
  }

  ServiceOptions options_;
  httplib::Server server_;
  std::jthread listener_;
  std::jthread runner_;

  std::mutex jobs_mutex_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::uint64_t nonce_ = 0;
  std::uint64_t counter_ = 0;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<std::shared_ptr<Job>> queue_;
};

}  // namespace pwts
