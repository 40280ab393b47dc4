#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "avrank/mixture.hpp"
#include "avrank/pipeline.hpp"

namespace avrank {

// Statistic selector for the streaming monitor, parsed from a compact spec
// string:
//   gaussian:effect=1.0[,draws=10000]
//   plugin[:init=gaussian,effect=1.0][,draws=10000]
//   mixture:effect=1.0[,multipliers=0.25|0.5|1|2|4][,mode=adaptive][,draws=N]
struct StatisticSpec {
  enum class Kind { gaussian, plugin, mixture };
  Kind kind = Kind::plugin;
  double effect = 0.0;
  int draws = 10000;
  bool gaussian_init = false;  // plugin only
  std::vector<double> multipliers = {0.25, 0.5, 1.0, 2.0, 4.0};
  MixtureMode mode = MixtureMode::adaptive;

  std::string canonical() const;
};

StatisticSpec parse_statistic_spec(const std::string& text);

struct MonitorConfig {
  std::vector<double> pre;  // blank-period estimates
  StatisticSpec statistic;
  double alpha = 0.05;
  std::uint64_t seed = 0;

  std::uint64_t hash() const;
};

// Streaming anytime-valid test over externally supplied estimates. One
// estimate in, one report out; the whole state can be checkpointed after
// any step and resumed bit-identically.
class Monitor {
 public:
  explicit Monitor(MonitorConfig cfg);

  StepRecord process(double estimate);

  int steps() const { return steps_; }
  const EProcess& process_state() const { return eprocess_; }

  static std::string csv_header();
  static std::string csv_line(const StepRecord& rec);

  // Versioned binary checkpoint; the stored config hash must match on load.
  void save_checkpoint(std::ostream& out) const;
  static Monitor load_checkpoint(std::istream& in, MonitorConfig cfg);

  void save_checkpoint_file(const std::string& path) const;
  static Monitor load_checkpoint_file(const std::string& path,
                                      MonitorConfig cfg);

 private:
  void build_statistics();

  MonitorConfig cfg_;
  std::unique_ptr<RankHistory> history_;
  std::vector<std::unique_ptr<ReducedStatistic>> statistics_;  // 1 or k
  std::unique_ptr<MixtureState> mixture_;  // mixture kind only
  EProcess eprocess_;
  int steps_ = 0;
};

}  // namespace avrank
