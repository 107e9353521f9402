#pragma once

#include <cstdint>
#include <string>

namespace sccl {

/// Window overlap between adjacent filters, accepted either as a fraction of
/// the window width ("50%" or 0.5) or as an absolute channel count (3).
/// Fractions resolve to channels by round-to-nearest so that e.g. a third of
/// a 3-channel window is 1 channel even when given as the decimal 0.33.
class Overlap {
 public:
  static Overlap ratio(double r);
  static Overlap channels(std::int64_t count);

  /// Parses "50%" (percent), "0.5" (fraction), or "3" (channel count).
  /// Throws ArgumentError on unparseable text.
  static Overlap parse(const std::string& text);

  bool is_ratio() const { return is_ratio_; }

  /// Converts to a channel count for the given window width. Throws
  /// ConfigError when the value is out of range (fraction outside [0, 1] or
  /// count outside [0, group_width]).
  std::int64_t resolve(std::int64_t group_width) const;

  /// Canonical text form: fractions as a percentage ("50%"), counts as a
  /// bare integer ("3").
  std::string str() const;

 private:
  Overlap(bool is_ratio, double ratio, std::int64_t count)
      : is_ratio_(is_ratio), ratio_(ratio), count_(count) {}
  bool is_ratio_;
  double ratio_;
  std::int64_t count_;
};

/// Sliding-channel convolution hyperparameters with derived window geometry.
/// Each of the c_out filters reads a contiguous cyclic window of group_width
/// input channels; adjacent filters' windows are offset by shift channels.
struct SccConfig {
  std::int64_t c_in = 0;
  std::int64_t c_out = 0;
  std::int64_t cg = 0;                // channel-group count; group_width = c_in/cg
  std::int64_t overlap_channels = 0;  // channels shared by adjacent windows
  std::int64_t group_width = 0;       // window width = c_in / cg
  std::int64_t shift = 0;             // group_width - overlap_channels
  bool has_bias = true;

  /// True when cg > 1 yet every filter reads the same window (shift 0); a
  /// legal but degenerate setting callers may want to warn about.
  bool fully_overlapped() const { return shift == 0 && cg > 1; }
};

/// Validates and derives a config. Throws ConfigError when cg does not
/// divide c_in, counts are out of range, or the overlap does not fit the
/// window.
SccConfig scc_config_new(std::int64_t c_in, std::int64_t c_out, std::int64_t cg,
                         const Overlap& co, bool has_bias);

}  // namespace sccl
