#include "avrank/monitor.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "avrank/detail/binary_io.hpp"
#include "avrank/errors.hpp"
#include "avrank/gaussian.hpp"
#include "avrank/plugin.hpp"

namespace avrank {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr char kCheckpointMagic[4] = {'A', 'V', 'C', 'K'};

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string StatisticSpec::canonical() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::gaussian:
      out << "gaussian:effect=" << format_double(effect) << ",draws=" << draws;
      break;
    case Kind::plugin:
      out << "plugin";
      if (gaussian_init) {
        out << ":init=gaussian,effect=" << format_double(effect)
            << ",draws=" << draws;
      }
      break;
    case Kind::mixture:
      out << "mixture:effect=" << format_double(effect) << ",multipliers=";
      for (std::size_t i = 0; i < multipliers.size(); ++i) {
        if (i) out << '|';
        out << format_double(multipliers[i]);
      }
      out << ",mode=" << (mode == MixtureMode::adaptive ? "adaptive" : "average")
          << ",draws=" << draws;
      break;
  }
  return out.str();
}

StatisticSpec parse_statistic_spec(const std::string& text) {
  StatisticSpec spec;
  std::string name = text;
  std::string args;
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    name = text.substr(0, colon);
    args = text.substr(colon + 1);
  }

  if (name == "gaussian") {
    spec.kind = StatisticSpec::Kind::gaussian;
  } else if (name == "plugin") {
    spec.kind = StatisticSpec::Kind::plugin;
  } else if (name == "mixture") {
    spec.kind = StatisticSpec::Kind::mixture;
  } else {
    throw ConfigError("unknown statistic: " + name);
  }

  bool have_effect = false;
  std::istringstream list(args);
  std::string item;
  while (std::getline(list, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("statistic option needs key=value: " + item);
    }
    std::string key = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    try {
      if (key == "effect") {
        spec.effect = std::stod(value);
        have_effect = true;
      } else if (key == "draws") {
        spec.draws = std::stoi(value);
      } else if (key == "init" && spec.kind == StatisticSpec::Kind::plugin) {
        if (value != "gaussian") throw ConfigError("unknown plugin init: " + value);
        spec.gaussian_init = true;
      } else if (key == "mode" && spec.kind == StatisticSpec::Kind::mixture) {
        if (value == "adaptive") spec.mode = MixtureMode::adaptive;
        else if (value == "average") spec.mode = MixtureMode::average;
        else throw ConfigError("unknown mixture mode: " + value);
      } else if (key == "multipliers" &&
                 spec.kind == StatisticSpec::Kind::mixture) {
        spec.multipliers.clear();
        std::istringstream multi(value);
        std::string num;
        while (std::getline(multi, num, '|')) {
          spec.multipliers.push_back(std::stod(num));
        }
        if (spec.multipliers.empty()) {
          throw ConfigError("mixture needs at least one multiplier");
        }
      } else {
        throw ConfigError("unknown statistic option: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad statistic option value: " + item);
    } catch (const std::out_of_range&) {
      throw ConfigError("bad statistic option value: " + item);
    }
  }

  bool needs_effect = spec.kind == StatisticSpec::Kind::gaussian ||
                      spec.kind == StatisticSpec::Kind::mixture ||
                      (spec.kind == StatisticSpec::Kind::plugin && spec.gaussian_init);
  if (needs_effect && !have_effect) {
    throw ConfigError("statistic '" + name + "' requires effect=<value>");
  }
  if (spec.draws < 1) throw ConfigError("draws must be >= 1");
  return spec;
}

std::uint64_t MonitorConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::string canon = statistic.canonical();
  h = fnv1a(h, canon.data(), canon.size());
  h = fnv1a(h, &alpha, sizeof(alpha));
  h = fnv1a(h, &seed, sizeof(seed));
  for (double v : pre) h = fnv1a(h, &v, sizeof(v));
  return h;
}

Monitor::Monitor(MonitorConfig cfg) : cfg_(std::move(cfg)), eprocess_(cfg_.alpha) {
  if (cfg_.pre.empty()) throw ConfigError("monitor needs pre-treatment estimates");
  history_ = std::make_unique<RankHistory>(cfg_.pre, mix_seed(cfg_.seed, 1));
  build_statistics();
}

void Monitor::build_statistics() {
  const int t0 = history_->t0();
  const StatisticSpec& spec = cfg_.statistic;
  switch (spec.kind) {
    case StatisticSpec::Kind::gaussian: {
      GaussianAltConfig alt;
      alt.effect_size = spec.effect;
      alt.mc_draws = spec.draws;
      alt.seed = mix_seed(cfg_.seed, 2);
      statistics_.push_back(std::make_unique<GaussianReducedStatistic>(alt, t0));
      break;
    }
    case StatisticSpec::Kind::plugin: {
      PluginOptions opts;
      if (spec.gaussian_init) {
        GaussianAltConfig alt;
        alt.effect_size = spec.effect;
        alt.mc_draws = spec.draws;
        alt.seed = mix_seed(cfg_.seed, 3);
        opts.init_statistic = gaussian_reduced_statistic(
            alt, t0, std::vector<int>(t0 + 1, 0));
      }
      statistics_.push_back(
          std::make_unique<PluginReducedStatistic>(mix_seed(cfg_.seed, 2), opts));
      break;
    }
    case StatisticSpec::Kind::mixture: {
      for (std::size_t j = 0; j < spec.multipliers.size(); ++j) {
        GaussianAltConfig alt;
        alt.effect_size = spec.effect * spec.multipliers[j];
        alt.mc_draws = spec.draws;
        alt.seed = mix_seed(cfg_.seed, 10 + j);
        statistics_.push_back(std::make_unique<GaussianReducedStatistic>(alt, t0));
      }
      mixture_ = std::make_unique<MixtureState>(
          static_cast<int>(spec.multipliers.size()), spec.mode);
      break;
    }
  }
}

StepRecord Monitor::process(double estimate) {
  if (!std::isfinite(estimate)) throw DataError("non-finite estimate");
  NullCategorical q = history_->null_category_probs(history_->time() + 1);

  std::vector<std::vector<double>> stats;
  stats.reserve(statistics_.size());
  for (auto& statistic : statistics_) stats.push_back(statistic->next(q));

  RankPair ranks = history_->push_observation(estimate);

  double e;
  if (mixture_) {
    std::vector<double> e_values(stats.size());
    for (std::size_t j = 0; j < stats.size(); ++j) {
      e_values[j] = e_value_reduced(stats[j], ranks.red_rank, q);
    }
    e = mixture_->step(e_values);
  } else {
    e = e_value_reduced(stats[0], ranks.red_rank, q);
  }
  for (auto& statistic : statistics_) statistic->update(ranks, q.t);
  eprocess_.absorb(e);
  ++steps_;

  StepRecord rec;
  rec.t = q.t;
  rec.seq_rank = ranks.seq_rank;
  rec.red_rank = ranks.red_rank;
  rec.e_value = e;
  rec.log_wealth = eprocess_.log_wealth;
  rec.anytime_p = eprocess_.anytime_p();
  rec.rejected = eprocess_.rejected;
  return rec;
}

std::string Monitor::csv_header() {
  return "t,seq_rank,red_rank,e_value,wealth,anytime_p,rejected";
}

std::string Monitor::csv_line(const StepRecord& rec) {
  std::ostringstream out;
  out << rec.t << ',' << rec.seq_rank << ',' << rec.red_rank << ','
      << format_double(rec.e_value) << ','
      << format_double(std::exp(rec.log_wealth)) << ','
      << format_double(rec.anytime_p) << ',' << (rec.rejected ? 1 : 0);
  return out.str();
}

void Monitor::save_checkpoint(std::ostream& out) const {
  out.write(kCheckpointMagic, 4);
  detail::write_u64(out, kCheckpointVersion);
  detail::write_u64(out, cfg_.hash());
  detail::write_i64(out, steps_);
  history_->save(out);
  eprocess_.save(out);
  detail::write_u64(out, statistics_.size());
  for (const auto& statistic : statistics_) statistic->save(out);
  detail::write_u64(out, mixture_ ? 1 : 0);
  if (mixture_) mixture_->save(out);
  if (!out) throw DataError("failed to write checkpoint");
}

Monitor Monitor::load_checkpoint(std::istream& in, MonitorConfig cfg) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != std::string(kCheckpointMagic, 4)) {
    throw DataError("not an avrank checkpoint");
  }
  std::uint64_t version = detail::read_u64(in);
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint version mismatch");
  }
  std::uint64_t stored_hash = detail::read_u64(in);
  if (stored_hash != cfg.hash()) {
    throw DataError("checkpoint was produced under a different configuration");
  }

  Monitor monitor(cfg);
  monitor.steps_ = static_cast<int>(detail::read_i64(in));
  *monitor.history_ = RankHistory::load(in);
  monitor.eprocess_ = EProcess::load(in);
  std::uint64_t n_stats = detail::read_u64(in);
  if (n_stats != monitor.statistics_.size()) {
    throw DataError("checkpoint statistic count mismatch");
  }
  for (std::size_t j = 0; j < n_stats; ++j) {
    switch (cfg.statistic.kind) {
      case StatisticSpec::Kind::gaussian:
      case StatisticSpec::Kind::mixture:
        monitor.statistics_[j] = GaussianReducedStatistic::load(in);
        break;
      case StatisticSpec::Kind::plugin:
        monitor.statistics_[j] = PluginReducedStatistic::load(in);
        break;
    }
  }
  if (detail::read_u64(in) != 0) {
    monitor.mixture_ = std::make_unique<MixtureState>(MixtureState::load(in));
  }
  return monitor;
}

void Monitor::save_checkpoint_file(const std::string& path) const {
  // Write-then-rename so an interrupted save never clobbers a good file.
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open checkpoint for writing: " + tmp);
    save_checkpoint(out);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw DataError("cannot move checkpoint into place: " + path);
  }
}

Monitor Monitor::load_checkpoint_file(const std::string& path,
                                      MonitorConfig cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  return load_checkpoint(in, std::move(cfg));
}

}  // namespace avrank
