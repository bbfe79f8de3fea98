#include "xrl/ppo/train_log.hpp"

#include <cstdio>

#include "xrl/error.hpp"

namespace xrl::ppo {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TrainLog::TrainLog(const std::filesystem::path& path, std::vector<std::string> columns)
    : path_(path), columns_(std::move(columns)), out_(path, std::ios::trunc) {
  if (!out_) throw IoError(path.string(), "cannot open training log");
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out_ << (i ? "," : "") << columns_[i];
  }
  out_ << '\n';
  out_.flush();
}

void TrainLog::append(const std::vector<double>& row) {
  if (row.size() != columns_.size()) throw UsageError("log row width mismatch");
  for (std::size_t i = 0; i < row.size(); ++i) {
    out_ << (i ? "," : "") << format_double(row[i]);
  }
  out_ << '\n';
  out_.flush();
  if (!out_) throw IoError(path_.string(), "write failed");
}

std::vector<std::string> ppo_log_columns() {
  return {"iter", "mean_return", "surrogate", "value_loss",
          "entropy", "clip_fraction", "lr_factor"};
}

std::vector<double> ppo_log_row(std::size_t iter, double mean_return,
                                const UpdateStats& s) {
  return {static_cast<double>(iter), mean_return, s.surrogate, s.value_loss,
          s.entropy, s.clip_fraction, s.lr_factor};
}

std::vector<std::string> adversarial_log_columns() {
  std::vector<std::string> cols = {"iter"};
  for (const char* prefix : {"pro_", "adv_"}) {
    for (const char* field : {"mean_return", "surrogate", "value_loss", "entropy",
                              "clip_fraction", "lr_factor"}) {
      cols.push_back(std::string(prefix) + field);
    }
  }
  return cols;
}

std::vector<double> adversarial_log_row(std::size_t iter, double pro_return,
                                        const UpdateStats& pro, double adv_return,
                                        const UpdateStats& adv) {
  return {static_cast<double>(iter), pro_return, pro.surrogate, pro.value_loss,
          pro.entropy, pro.clip_fraction, pro.lr_factor, adv_return, adv.surrogate,
          adv.value_loss, adv.entropy, adv.clip_fraction, adv.lr_factor};
}

}  // namespace xrl::ppo
