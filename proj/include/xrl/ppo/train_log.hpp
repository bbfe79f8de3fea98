#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "xrl/ppo/ppo.hpp"

namespace xrl::ppo {

// Append-only CSV training log. The header is written on open.
class TrainLog {
 public:
  TrainLog(const std::filesystem::path& path, std::vector<std::string> columns);

  void append(const std::vector<double>& row);
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::filesystem::path path_;
  std::vector<std::string> columns_;
  std::ofstream out_;
};

// iter, mean_return, surrogate, value_loss, entropy, clip_fraction, lr_factor
std::vector<std::string> ppo_log_columns();
std::vector<double> ppo_log_row(std::size_t iter, double mean_return,
                                const UpdateStats& stats);

// Same fields twice, prefixed pro_ and adv_.
std::vector<std::string> adversarial_log_columns();
std::vector<double> adversarial_log_row(std::size_t iter, double pro_return,
                                        const UpdateStats& pro,
                                        double adv_return,
                                        const UpdateStats& adv);

std::string format_double(double v);

}  // namespace xrl::ppo
