#include "mub/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mub/adv_agent.hpp"
#include "mub/errors.hpp"
#include "mub/exp3p.hpp"

namespace mub {

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};
using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw ConfigError(os.str());
}

std::map<std::string, Section> parse_ini(const std::string& text,
                                         const std::string& origin) {
  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string line, cur;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      cur = trim(line.substr(1, line.size() - 2));
      if (cur.empty()) fail(origin, lineno, "empty section name");
      sections[cur];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    if (cur.empty()) fail(origin, lineno, "key outside any [section]");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (sections[cur].count(key)) fail(origin, lineno, "duplicate key '" + key + "'");
    sections[cur][key] = {value, lineno, false};
  }
  return sections;
}

class SectionView {
 public:
  SectionView(std::map<std::string, Section>& all, std::string name, std::string origin)
      : origin_(std::move(origin)), name_(std::move(name)) {
    auto it = all.find(name_);
    sec_ = it == all.end() ? nullptr : &it->second;
  }

  bool present() const { return sec_ != nullptr; }
  bool has(const std::string& key) const { return sec_ && sec_->count(key); }

  std::string str(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    auto& e = (*sec_)[key];
    e.used = true;
    return e.value;
  }
  std::string require(const std::string& key) {
    if (!has(key))
      throw ConfigError(origin_ + ": missing key '" + key + "' in [" + name_ + "]");
    auto& e = (*sec_)[key];
    e.used = true;
    return e.value;
  }
  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    return to_long(key);
  }
  double real(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return to_double(key);
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    auto& e = (*sec_)[key];
    e.used = true;
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    fail(origin_, e.line, "expected true/false for '" + key + "'");
  }
  long to_long(const std::string& key) {
    auto& e = (*sec_)[key];
    e.used = true;
    try {
      size_t pos;
      long v = std::stol(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(origin_, e.line, "expected integer for '" + key + "', got '" + e.value + "'");
    }
  }
  double to_double(const std::string& key) {
    auto& e = (*sec_)[key];
    e.used = true;
    try {
      size_t pos;
      double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(origin_, e.line, "expected number for '" + key + "', got '" + e.value + "'");
    }
  }
  int line_of(const std::string& key) const { return sec_->at(key).line; }

  void check_all_used() const {
    if (!sec_) return;
    for (const auto& [key, e] : *sec_)
      if (!e.used) fail(origin_, e.line, "unknown key '" + key + "' in [" + name_ + "]");
  }

 private:
  std::string origin_, name_;
  Section* sec_ = nullptr;
};

std::vector<std::vector<double>> parse_matrix(const std::string& text,
                                              const std::string& origin, int line) {
  std::vector<std::vector<double>> rows;
  std::istringstream rs(text);
  std::string row_text;
  while (std::getline(rs, row_text, ';')) {
    std::istringstream vs(row_text);
    std::vector<double> row;
    double v;
    while (vs >> v) row.push_back(v);
    std::string left;
    if (vs.clear(), vs >> left, !left.empty())
      fail(origin, line, "bad matrix literal near '" + left + "'");
    if (!row.empty()) rows.push_back(row);
  }
  if (rows.empty()) fail(origin, line, "empty matrix literal");
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) fail(origin, line, "ragged matrix literal");
  return rows;
}

}  // namespace

LoadedExperiment parse_experiment(const std::string& text, const std::string& origin) {
  auto sections = parse_ini(text, origin);
  for (const auto& [name, _] : sections)
    if (name != "environment" && name != "algorithm" && name != "run" && name != "schedule")
      throw ConfigError(origin + ": unknown section [" + name + "]");

  SectionView env(sections, "environment", origin);
  SectionView alg(sections, "algorithm", origin);
  SectionView run(sections, "run", origin);
  SectionView sched(sections, "schedule", origin);
  if (!env.present()) throw ConfigError(origin + ": missing [environment] section");
  if (!run.present()) throw ConfigError(origin + ": missing [run] section");

  LoadedExperiment out;
  out.config_text = text;
  Experiment& exp = out.experiment;

  std::string kind = env.require("kind");
  bool dynamic = sched.present();

  if (kind == "stochastic") {
    exp.scenario = dynamic ? Scenario::DynamicStochastic : Scenario::Stochastic;
    exp.table.channels = static_cast<int>(env.integer("channels", 0));
    exp.table.beta = static_cast<int>(env.integer("beta", 1));
    exp.table.variance = env.real("variance", 0.0);
    std::string dist = env.str("dist", "uniform");
    if (dist == "uniform")
      exp.table.dist = DistKind::Uniform;
    else if (dist == "truncated-gaussian")
      exp.table.dist = DistKind::TruncatedGaussian;
    else
      throw ConfigError(origin + ": dist must be uniform or truncated-gaussian");
    auto rows = parse_matrix(env.require("means"), origin, env.line_of("means"));
    if (static_cast<int>(rows.size()) != exp.table.channels ||
        static_cast<int>(rows[0].size()) != exp.table.beta + 1)
      throw ConfigError(origin + ": means must be channels rows x (beta+1) columns");
    for (const auto& r : rows)
      exp.table.means.insert(exp.table.means.end(), r.begin(), r.end());
    exp.users = static_cast<int>(env.integer("users", 0));
    exp.channels = exp.table.channels;

    exp.stoch.channels = exp.table.channels;
    exp.stoch.beta = exp.table.beta;
    exp.stoch.t0 = alg.integer("t0", 1000);
    exp.stoch.tc = alg.integer("tc", -1);
    exp.stoch.tx = alg.integer("tx", 1000);
    exp.stoch.n0 = static_cast<int>(alg.integer("n0", 2));
    exp.stoch.tf_bound = alg.integer("tf_bound", 0);
    exp.stoch.delta = alg.real("delta", 0.05);
    exp.stoch.epsilon = alg.real("epsilon", 0.5);
    std::string est = alg.str("estimator", "weighted");
    if (est == "weighted")
      exp.stoch.estimator = MeanEstimator::WeightedSlices;
    else if (est == "cluster")
      exp.stoch.estimator = MeanEstimator::Cluster;
    else
      throw ConfigError(origin + ": estimator must be weighted or cluster");
    exp.stoch.cluster_restarts = static_cast<int>(alg.integer("cluster_restarts", 10));
    exp.stoch.cluster_max_iters = static_cast<int>(alg.integer("cluster_max_iters", 100));
    exp.tau = alg.integer("tau", 0);
  } else if (kind == "adversarial") {
    exp.channels = static_cast<int>(env.integer("channels", 0));
    exp.users = static_cast<int>(env.integer("users", 0));
    std::string adv = env.str("adversary", "iid-uniform-floor");
    if (adv == "iid-uniform-floor") {
      exp.adversary = AdversaryModel::iid_uniform_floor(env.real("floor_min", 0.2),
                                                        env.real("floor_max", 1.0));
    } else if (adv == "scripted") {
      // the tensor's user dimension is the full id space: for dynamic runs,
      // set users to the total number of ids the schedule touches
      std::string csv = env.require("tensor_csv");
      long horizon = run.integer("horizon", 0);
      exp.adversary = load_scripted_csv(csv, horizon, exp.users, exp.channels);
    } else {
      throw ConfigError(origin + ": adversary must be iid-uniform-floor or scripted");
    }
    std::string mode = alg.str("mode", "known-horizon");
    if (mode == "known-horizon")
      exp.scenario = Scenario::Adversarial;
    else if (mode == "doubling")
      exp.scenario = Scenario::AdversarialDoubling;
    else
      throw ConfigError(origin + ": mode must be known-horizon or doubling");
    if (dynamic) exp.scenario = Scenario::DynamicAdversarial;
    exp.adv_y = alg.real("y", 0.5);
    exp.tau = alg.integer("tau", 0);
  } else {
    throw ConfigError(origin + ": kind must be stochastic or adversarial");
  }

  exp.horizon = run.integer("horizon", 0);
  exp.checkpoints = static_cast<int>(run.integer("checkpoints", 1000));
  exp.record_rounds = run.boolean("emit_trace", false);
  exp.name = run.str("name", kind);
  out.run.trials = run.integer("trials", 1);
  out.run.seed = static_cast<uint64_t>(run.integer("seed", 1));
  out.run.parallelism = static_cast<int>(run.integer("parallel", 1));
  out.run.emit_trace = exp.record_rounds;

  if (dynamic) {
    exp.schedule.initial_users = static_cast<int>(sched.integer("initial", 0));
    exp.schedule.horizon = exp.horizon;
    double zeta = sched.real("growth_zeta", 0.0);
    if (zeta > 0.0) {
      exp.schedule = growth_schedule(exp.schedule.initial_users, exp.horizon, zeta,
                                     sched.real("growth_coeff", 1.0));
    } else {
      sched.real("growth_coeff", 1.0);  // consume if present
      std::string events = sched.str("events", "");
      std::istringstream es(events);
      std::string one;
      while (std::getline(es, one, ';')) {
        one = trim(one);
        if (one.empty()) continue;
        std::istringstream ev(one);
        std::string op;
        long t;
        int user;
        if (!(ev >> op >> t >> user) || (op != "join" && op != "leave"))
          throw ConfigError(origin + ": schedule events must be 'join|leave <t> <user>'");
        exp.schedule.events.push_back({t, op == "join", user});
      }
    }
  }

  env.check_all_used();
  alg.check_all_used();
  run.check_all_used();
  sched.check_all_used();
  exp.validate();
  return out;
}

LoadedExperiment load_experiment_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str(), path);
}

AdversaryModel load_scripted_csv(const std::string& path, long horizon, int users,
                                 int channels) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scripted tensor: " + path);
  std::vector<double> tensor(static_cast<size_t>(horizon) * users * channels, -1.0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (lineno == 1 && line.find("reward") != std::string::npos) continue;  // header
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    long t;
    int k, m;
    double g;
    if (!(ls >> t >> k >> m >> g)) {
      std::ostringstream os;
      os << path << ":" << lineno << ": expected t,k,m,reward";
      throw ConfigError(os.str());
    }
    if (t < 0 || t >= horizon || k < 0 || k >= users || m < 0 || m >= channels) {
      std::ostringstream os;
      os << path << ":" << lineno << ": index outside horizon/users/channels";
      throw ConfigError(os.str());
    }
    tensor[(static_cast<size_t>(t) * users + k) * channels + m] = g;
  }
  for (size_t i = 0; i < tensor.size(); ++i)
    if (tensor[i] < 0.0)
      throw ConfigError(path + ": scripted tensor leaves entries unset");
  return AdversaryModel::scripted(horizon, users, channels, std::move(tensor));
}

ValidationReport validate_experiment(const LoadedExperiment& loaded) {
  ValidationReport rep;
  const Experiment& exp = loaded.experiment;
  try {
    exp.validate();
    rep.config_ok = true;
  } catch (const ConfigError& e) {
    rep.errors.push_back(e.what());
    return rep;
  }

  if (exp.scenario == Scenario::Stochastic || exp.scenario == Scenario::DynamicStochastic) {
    for (auto& w : exp.table.warnings()) rep.warnings.push_back(w);
    int users = exp.scenario == Scenario::Stochastic ? exp.users
                                                     : exp.schedule.initial_users;
    rep.separability = check_separability(exp.table, users, 16.0, 0.01);
    rep.has_separability = true;
    if (!rep.separability.satisfied) {
      std::ostringstream os;
      os << "separability violated: worst gap " << rep.separability.worst_gap
         << " on channel " << rep.separability.worst_channel << " (occupancies "
         << rep.separability.worst_r << " vs " << rep.separability.worst_s
         << ") below threshold " << rep.separability.threshold;
      rep.warnings.push_back(os.str());
    }
  } else {
    long horizon = exp.scenario == Scenario::Adversarial ? exp.horizon : exp.tau;
    EpochGrid grid = EpochGrid::make(horizon, exp.adv_y);
    long min_epochs = exp3p_min_epochs(exp.channels);
    if (grid.epoch_count < min_epochs) {
      std::ostringstream os;
      os << "epoch count " << grid.epoch_count << " below " << min_epochs
         << "; the mixing weight gamma is clamped to 1 and the regret bound "
            "does not apply";
      rep.warnings.push_back(os.str());
    }
  }
  return rep;
}

std::string ValidationReport::text() const {
  std::ostringstream os;
  for (const auto& e : errors) os << "error: " << e << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  if (has_separability) {
    os << "separability: " << (separability.satisfied ? "satisfied" : "violated")
       << " (worst gap " << separability.worst_gap << " vs threshold "
       << separability.threshold << ", c=" << separability.c
       << ", eps2=" << separability.epsilon2 << ")\n";
  }
  os << (config_ok ? "config ok\n" : "config invalid\n");
  return os.str();
}

std::string manifest_json(const LoadedExperiment& loaded, const std::string& config_path,
                          long trials, uint64_t seed, int parallelism,
                          const std::vector<std::string>& artifacts) {
  nlohmann::json j;
  j["version"] = "1.0";
  j["config_path"] = config_path;
  j["config_fnv1a64"] = fnv1a64(loaded.config_text);
  j["config_text"] = loaded.config_text;
  j["trials"] = trials;
  j["seed"] = seed;
  j["parallelism"] = parallelism;
  j["artifacts"] = artifacts;
  return j.dump(2) + "\n";
}

ManifestRun load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("manifest parse error: ") + e.what());
  }
  ManifestRun run;
  run.config_text = j.at("config_text").get<std::string>();
  if (j.at("config_fnv1a64").get<uint64_t>() != fnv1a64(run.config_text))
    throw ConfigError("manifest: config hash mismatch");
  run.trials = j.at("trials").get<long>();
  run.seed = j.at("seed").get<uint64_t>();
  run.parallelism = j.at("parallelism").get<int>();
  return run;
}

std::string regret_svg(const Batch& batch, const std::string& title) {
  const int W = 760, H = 420, ml = 70, mb = 40, mt = 30, mr = 20;
  double tmax = 1, rmax = 1;
  for (size_t i = 0; i < batch.cp_t.size(); ++i) {
    tmax = std::max(tmax, double(batch.cp_t[i]));
    rmax = std::max(rmax, batch.mean_cum_regret[i]);
  }
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
     << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='18' text-anchor='middle' font-size='14'>" << title
     << "</text>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='"
     << H - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
     << "' stroke='black'/>\n";
  os << "<text x='" << W / 2 << "' y='" << H - 8 << "' text-anchor='middle' font-size='12'>t</text>\n";
  os << "<text x='14' y='" << H / 2
     << "' font-size='12' transform='rotate(-90 14 " << H / 2
     << ")' text-anchor='middle'>mean cumulative regret</text>\n";
  os << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
  for (size_t i = 0; i < batch.cp_t.size(); ++i) {
    double x = ml + (W - ml - mr) * (batch.cp_t[i] / tmax);
    double y = (H - mb) - (H - mb - mt) * (batch.mean_cum_regret[i] / rmax);
    os << x << ',' << y << ' ';
  }
  os << "'/>\n";
  char buf[64];
  snprintf(buf, sizeof buf, "%.6g", rmax);
  os << "<text x='" << ml - 6 << "' y='" << mt + 4
     << "' text-anchor='end' font-size='11'>" << buf << "</text>\n";
  snprintf(buf, sizeof buf, "%.6g", tmax);
  os << "<text x='" << W - mr << "' y='" << H - mb + 16
     << "' text-anchor='end' font-size='11'>" << buf << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace mub
