#include "sccl/config.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sccl/errors.hpp"

namespace sccl {

Overlap Overlap::ratio(double r) { return Overlap(true, r, 0); }

Overlap Overlap::channels(std::int64_t count) { return Overlap(false, 0.0, count); }

Overlap Overlap::parse(const std::string& text) {
  if (text.empty()) throw ArgumentError("empty overlap value");
  try {
    std::size_t used = 0;
    if (text.back() == '%') {
      const double pct = std::stod(text.substr(0, text.size() - 1), &used);
      if (used != text.size() - 1) throw ArgumentError("bad overlap '" + text + "'");
      return ratio(pct / 100.0);
    }
    if (text.find_first_of(".eE") != std::string::npos) {
      const double r = std::stod(text, &used);
      if (used != text.size()) throw ArgumentError("bad overlap '" + text + "'");
      return ratio(r);
    }
    const long long count = std::stoll(text, &used);
    if (used != text.size()) throw ArgumentError("bad overlap '" + text + "'");
    return channels(count);
  } catch (const std::invalid_argument&) {
    throw ArgumentError("bad overlap '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ArgumentError("overlap '" + text + "' out of numeric range");
  }
}

std::int64_t Overlap::resolve(std::int64_t group_width) const {
  if (is_ratio_) {
    if (ratio_ < 0.0 || ratio_ > 1.0) {
      throw ConfigError("overlap fraction " + std::to_string(ratio_) +
                        " outside [0, 1]");
    }
    return std::llround(ratio_ * static_cast<double>(group_width));
  }
  if (count_ < 0 || count_ > group_width) {
    throw ConfigError("overlap of " + std::to_string(count_) +
                      " channels outside [0, " + std::to_string(group_width) +
                      "] for window width " + std::to_string(group_width));
  }
  return count_;
}

std::string Overlap::str() const {
  if (!is_ratio_) return std::to_string(count_);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g%%", ratio_ * 100.0);
  return buf;
}

SccConfig scc_config_new(std::int64_t c_in, std::int64_t c_out, std::int64_t cg,
                         const Overlap& co, bool has_bias) {
  if (c_in < 1) throw ConfigError("c_in must be >= 1, got " + std::to_string(c_in));
  if (c_out < 1) throw ConfigError("c_out must be >= 1, got " + std::to_string(c_out));
  if (cg < 1 || cg > c_in) {
    throw ConfigError("cg must be in [1, c_in=" + std::to_string(c_in) + "], got " +
                      std::to_string(cg));
  }
  if (c_in % cg != 0) {
    throw ConfigError("cg=" + std::to_string(cg) + " does not divide c_in=" +
                      std::to_string(c_in));
  }
  SccConfig cfg;
  cfg.c_in = c_in;
  cfg.c_out = c_out;
  cfg.cg = cg;
  cfg.group_width = c_in / cg;
  cfg.overlap_channels = co.resolve(cfg.group_width);
  cfg.shift = cfg.group_width - cfg.overlap_channels;
  cfg.has_bias = has_bias;
  return cfg;
}

}  // namespace sccl
