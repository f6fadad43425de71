// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fheprof {

/// Sampling frequency used when recording stacks.
inline constexpr int kDefaultSampleFrequencyHz = 99;

struct StackSample {
  /// Outermost frame first.
  std::vector<std::string> frames;
  std::uint64_t weight = 1;
};

/// Replaces the fold separator and line breaks with '_'.
std::string sanitize_frame(std::string_view frame);

struct FoldedProfile {
  /// ';'-joined frame path to total weight.
  std::map<std::string, std::uint64_t> lines;
  std::uint64_t total_weight = 0;

  bool empty() const { return lines.empty(); }
};

/// Streaming fold: samples are merged as they arrive.
class FoldedProfileBuilder {
 public:
  /// Throws ArgumentError for an empty frame list or zero weight.
  void add(const StackSample& sample);
  void add_folded(std::string path, std::uint64_t weight);
  bool empty() const { return profile_.lines.empty(); }
  /// Throws EmptyProfileError when nothing was added.
  FoldedProfile finish() const;

 private:
  FoldedProfile profile_;
};

FoldedProfile ingest(std::span<const StackSample> samples);
FoldedProfile merge_profiles(const FoldedProfile& a, const FoldedProfile& b);

/// Parses the sampler's script dump (header line, indented frames innermost
/// first, blank separator). The command name becomes the root frame; symbol
/// offsets and object paths are dropped.
std::vector<StackSample> parse_perf_script(std::istream& in);

/// One "path weight" line per entry, sorted by path, newline-terminated.
std::string to_folded_text(const FoldedProfile& profile);
/// Inverse of to_folded_text; throws ParseError on malformed lines.
FoldedProfile parse_folded_text(std::string_view text);

struct FunctionShare {
  std::string function;
  /// Share of samples whose path contains the function.
  double fraction = 0.0;
};

/// Highest inclusive shares first; throws ArgumentError when k < 1.
std::vector<FunctionShare> top_functions(const FoldedProfile& profile, int k);

struct SvgOptions {
  std::string title = "Flame Graph";
  double width = 1200.0;
  double frame_height = 16.0;
  std::uint64_t palette_seed = 0;
};

/// Standalone SVG; each rect carries data-depth and data-path attributes.
std::string render_svg(const FoldedProfile& profile, const SvgOptions& options = {});

}  // namespace fheprof
