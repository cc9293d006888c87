#include "edgesim/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "edgesim/errors.hpp"

namespace edgesim {

namespace {

using nlohmann::json;

Tick parse_hhmm(const std::string& s) {
  int h = 0, m = 0;
  if (std::sscanf(s.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 24 || m < 0 || m > 59 ||
      (h == 24 && m != 0)) {
    throw InvalidFleetConfig("malformed time of day: " + s);
  }
  return static_cast<Tick>(h) * 60 + m;
}

const json& require(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key)) {
    throw InvalidConfig(std::string(ctx) + " is missing required field '" + key + "'");
  }
  return j.at(key);
}

AvailabilitySchedule parse_schedule(const json& j) {
  AvailabilitySchedule s;
  if (j.contains("windows")) {
    for (const auto& w : j.at("windows")) s.on_windows.push_back(parse_window(w.get<std::string>()));
  }
  s.flip_noise_p = j.value("flip_noise_p", 0.0);
  if (j.contains("outages")) {
    for (const auto& o : j.at("outages")) {
      if (!o.is_array() || o.size() != 2) {
        throw InvalidFleetConfig("outages must be [start_tick, duration_ticks] pairs");
      }
      s.outages.push_back(Outage{o[0].get<Tick>(), o[1].get<Tick>()});
    }
  }
  return s;
}

FleetConfig parse_fleet(const json& j) {
  FleetConfig fleet;
  if (j.contains("nodes")) {
    for (const auto& nj : j.at("nodes")) {
      NodeSpec n;
      n.node_id = require(nj, "id", "fleet node").get<std::string>();
      n.cpu_millicores = require(nj, "cpu_millicores", "fleet node").get<std::int64_t>();
      n.mem_mib = require(nj, "mem_mib", "fleet node").get<std::int64_t>();
      n.schedule = parse_schedule(nj);
      fleet.nodes.push_back(std::move(n));
    }
  }
  if (j.contains("generate")) {
    const json& g = j.at("generate");
    FleetGenSpec gen;
    gen.count = require(g, "count", "fleet generator").get<int>();
    if (g.contains("cpu_millicores")) {
      gen.cpu_min = g.at("cpu_millicores").at(0).get<std::int64_t>();
      gen.cpu_max = g.at("cpu_millicores").at(1).get<std::int64_t>();
    }
    if (g.contains("mem_mib")) {
      gen.mem_min = g.at("mem_mib").at(0).get<std::int64_t>();
      gen.mem_max = g.at("mem_mib").at(1).get<std::int64_t>();
    }
    if (g.contains("window_len_range")) {
      gen.window_len_min = g.at("window_len_range").at(0).get<Tick>();
      gen.window_len_max = g.at("window_len_range").at(1).get<Tick>();
    }
    gen.windows_per_day = g.value("windows_per_day", 1);
    gen.flip_noise_p = g.value("flip_noise_p", 0.0);
    fleet.generate = gen;
  }
  return fleet;
}

}  // namespace

const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kReactive: return "reactive";
    case PolicyKind::kProactiveOracle: return "proactive_oracle";
    case PolicyKind::kProactiveLstm: return "proactive_lstm";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "reactive") return PolicyKind::kReactive;
  if (s == "proactive_oracle") return PolicyKind::kProactiveOracle;
  if (s == "proactive_lstm") return PolicyKind::kProactiveLstm;
  throw InvalidConfig("unknown policy: " + s);
}

AvailabilityWindow parse_window(const std::string& text) {
  const auto dash = text.find('-');
  if (dash == std::string::npos) {
    throw InvalidFleetConfig("window must look like HH:MM-HH:MM: " + text);
  }
  AvailabilityWindow w;
  w.start = parse_hhmm(text.substr(0, dash));
  w.end = parse_hhmm(text.substr(dash + 1));
  if (w.start >= w.end) {
    throw InvalidFleetConfig("window start must precede end (no midnight wrap): " + text);
  }
  return w;
}

void validate(const ScenarioConfig& config) {
  if (config.duration_ticks < 1) throw InvalidConfig("duration_ticks must be >= 1");
  if (config.report_interval < 1) throw InvalidConfig("report_interval must be >= 1");
  if (config.prediction_interval < 1) throw InvalidConfig("prediction_interval must be >= 1");
  if (config.training_days < 0) throw InvalidConfig("training_days must be >= 0");
  if (config.policy.migration_ticks < 1) throw InvalidConfig("migration_ticks must be >= 1");
  if (config.policy.hysteresis < 0.0) throw InvalidConfig("hysteresis must be >= 0");
  if (config.policy.weights.w_cpu < 0.0 || config.policy.weights.w_mem < 0.0) {
    throw InvalidConfig("score weights must be >= 0");
  }

  const Tick warmup = config.predictor.seq_len + config.predictor.horizon;
  if (config.duration_ticks <= warmup) {
    throw InvalidConfig("duration_ticks must exceed seq_len + horizon");
  }
  if (config.predictor.hidden < 1 || config.predictor.seq_len < 1 ||
      config.predictor.horizon < 1 || config.predictor.lr <= 0.0 ||
      config.predictor.epochs < 0 || config.predictor.batch_size < 1) {
    throw InvalidHyper("invalid predictor hyperparameters");
  }
  if (config.policy.kind == PolicyKind::kProactiveLstm) {
    if (config.training_days < 1) {
      throw InvalidConfig("proactive_lstm requires training_days >= 1");
    }
    if (config.train_ticks() - 1 < warmup) {
      throw InvalidConfig("training window is shorter than seq_len + horizon");
    }
  }
  if (config.train_ticks() >= config.duration_ticks) {
    throw InvalidConfig("training phase must end before duration_ticks");
  }

  if (config.fleet.nodes.empty() && !config.fleet.generate) {
    throw InvalidFleetConfig("fleet must define nodes or a generator");
  }
  // A throwaway stream: generation must not consume the real one here.
  RngStream probe(0, "fleet-validate");
  (void)build_fleet(config.fleet, probe);

  std::set<std::string> service_ids;
  for (const ServiceSpec& s : config.services) {
    if (s.service_id.empty()) throw InvalidConfig("service id must be non-empty");
    if (s.cpu_millicores <= 0 || s.mem_mib <= 0) {
      throw InvalidConfig("service requests must be positive: " + s.service_id);
    }
    if (!service_ids.insert(s.service_id).second) {
      throw InvalidConfig("duplicate service id: " + s.service_id);
    }
  }
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw InvalidConfig("scenario file is not a JSON object");
  }

  ScenarioConfig c;
  c.root_seed = j.value("root_seed", std::uint64_t{1});
  c.duration_ticks = require(j, "duration_ticks", "scenario").get<Tick>();
  c.training_days = j.value("training_days", 0);
  c.report_interval = j.value("report_interval", Tick{1});
  c.prediction_interval = j.value("prediction_interval", Tick{15});
  c.fleet = parse_fleet(require(j, "fleet", "scenario"));

  if (j.contains("services")) {
    for (const auto& sj : j.at("services")) {
      ServiceSpec s;
      s.service_id = require(sj, "id", "service").get<std::string>();
      s.cpu_millicores = require(sj, "cpu_millicores", "service").get<std::int64_t>();
      s.mem_mib = require(sj, "mem_mib", "service").get<std::int64_t>();
      c.services.push_back(std::move(s));
    }
  }

  if (j.contains("policy")) {
    const json& p = j.at("policy");
    c.policy.kind = policy_kind_from_string(p.value("policy", std::string("reactive")));
    c.policy.weights.w_cpu = p.value("w_cpu", 0.5);
    c.policy.weights.w_mem = p.value("w_mem", 0.5);
    c.policy.hysteresis = p.value("hysteresis", 0.2);
    c.policy.migration_ticks = p.value("migration_ticks", Tick{2});
  }

  if (j.contains("predictor")) {
    const json& p = j.at("predictor");
    c.predictor.hidden = p.value("hidden", Eigen::Index{32});
    c.predictor.seq_len = p.value("seq_len", Tick{24});
    c.predictor.horizon = p.value("horizon", Tick{15});
    c.predictor.lr = p.value("lr", 0.05);
    c.predictor.epochs = p.value("epochs", 30);
    c.predictor.batch_size = p.value("batch_size", 32);
    c.predictor.seed = p.value("seed", c.root_seed);
  } else {
    c.predictor.seed = c.root_seed;
  }

  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace edgesim
