// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/flamegraph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "fheprof/errors.hpp"

namespace fheprof {

namespace {

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = path.find(';', start);
    out.push_back(path.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// "7f12 foo+0x1c (/usr/lib/libx.so)" -> "foo"
std::string frame_symbol(std::string_view line) {
  line = trim(line);
  const auto space = line.find_first_of(" \t");
  std::string_view sym = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
  if (sym.empty()) return "[unknown]";
  if (sym.back() == ')') {
    const auto open = sym.rfind(" (");
    if (open != std::string_view::npos) sym = trim(sym.substr(0, open));
  }
  const auto offset = sym.rfind("+0x");
  if (offset != std::string_view::npos && offset > 0) sym = sym.substr(0, offset);
  return sym.empty() ? std::string("[unknown]") : std::string(sym);
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ seed;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string frame_color(std::string_view name, std::uint64_t seed) {
  const auto h = fnv1a(name, seed);
  const int r = 205 + static_cast<int>(h % 51);
  const int g = static_cast<int>((h >> 8) % 231);
  const int b = static_cast<int>((h >> 16) % 56);
  return "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," + std::to_string(b) + ")";
}

struct Node {
  std::uint64_t weight = 0;
  std::map<std::string, std::unique_ptr<Node>> children;
};

}  // namespace

std::string sanitize_frame(std::string_view frame) {
  std::string out(frame);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == ';' || c == '\n' || c == '\r'; },
                  '_');
  return out;
}

void FoldedProfileBuilder::add(const StackSample& sample) {
  if (sample.frames.empty()) throw ArgumentError("stack sample has no frames");
  if (sample.weight == 0) throw ArgumentError("stack sample weight must be >= 1");
  std::string path;
  for (const auto& frame : sample.frames) {
    if (!path.empty()) path += ';';
    path += sanitize_frame(frame);
  }
  profile_.lines[path] += sample.weight;
  profile_.total_weight += sample.weight;
}

void FoldedProfileBuilder::add_folded(std::string path, std::uint64_t weight) {
  if (path.empty()) throw ArgumentError("folded path is empty");
  if (weight == 0) throw ArgumentError("folded weight must be >= 1");
  profile_.lines[std::move(path)] += weight;
  profile_.total_weight += weight;
}

FoldedProfile FoldedProfileBuilder::finish() const {
  if (profile_.lines.empty()) throw EmptyProfileError();
  return profile_;
}

FoldedProfile ingest(std::span<const StackSample> samples) {
  FoldedProfileBuilder builder;
  for (const auto& s : samples) builder.add(s);
  return builder.finish();
}

FoldedProfile merge_profiles(const FoldedProfile& a, const FoldedProfile& b) {
  FoldedProfile out = a;
  for (const auto& [path, weight] : b.lines) out.lines[path] += weight;
  out.total_weight += b.total_weight;
  return out;
}

std::vector<StackSample> parse_perf_script(std::istream& in) {
  static const std::regex header(R"(^(\S.*?)\s+\d+(/\d+)?\s)");
  std::vector<StackSample> samples;
  std::optional<std::string> comm;
  std::vector<std::string> frames;  // innermost first, as dumped
  auto flush = [&] {
    if (comm) {
      StackSample sample;
      sample.frames.push_back(*comm);
      for (auto it = frames.rbegin(); it != frames.rend(); ++it) sample.frames.push_back(*it);
      samples.push_back(std::move(sample));
    }
    comm.reset();
    frames.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    if (line.front() == ' ' || line.front() == '\t') {
      if (comm) frames.push_back(frame_symbol(line));
      continue;
    }
    flush();
    std::smatch m;
    if (std::regex_search(line, m, header)) comm = m[1].str();
  }
  flush();
  return samples;
}

std::string to_folded_text(const FoldedProfile& profile) {
  std::string out;
  for (const auto& [path, weight] : profile.lines) {
    out += path;
    out += ' ';
    out += std::to_string(weight);
    out += '\n';
  }
  return out;
}

FoldedProfile parse_folded_text(std::string_view text) {
  FoldedProfileBuilder builder;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    if (!line.empty()) {
      const auto space = line.rfind(' ');
      if (space == std::string_view::npos || space == 0) {
        throw ParseError("folded line lacks a weight", pos);
      }
      std::uint64_t weight = 0;
      const auto digits = line.substr(space + 1);
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), weight);
      if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || weight == 0) {
        throw ParseError("invalid folded weight '" + std::string(digits) + "'",
                         static_cast<std::size_t>(digits.data() - text.data()));
      }
      builder.add_folded(std::string(trim(line.substr(0, space))), weight);
    }
    pos = end + 1;
  }
  return builder.finish();
}

std::vector<FunctionShare> top_functions(const FoldedProfile& profile, int k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (profile.empty() || profile.total_weight == 0) throw EmptyProfileError();
  std::map<std::string, std::uint64_t, std::less<>> inclusive;
  for (const auto& [path, weight] : profile.lines) {
    std::set<std::string_view> seen;
    for (const auto frame : split_path(path)) {
      if (seen.insert(frame).second) inclusive[std::string(frame)] += weight;
    }
  }
  std::vector<FunctionShare> out;
  for (const auto& [name, weight] : inclusive) {
    out.push_back({name, static_cast<double>(weight) / static_cast<double>(profile.total_weight)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FunctionShare& a, const FunctionShare& b) { return a.fraction > b.fraction; });
  if (out.size() > static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k));
  return out;
}

std::string render_svg(const FoldedProfile& profile, const SvgOptions& options) {
  if (profile.empty() || profile.total_weight == 0) throw EmptyProfileError();
  if (options.width <= 0 || options.frame_height <= 0) throw ArgumentError("SVG size must be > 0");

  Node root;
  std::size_t max_depth = 0;
  for (const auto& [path, weight] : profile.lines) {
    const auto frames = split_path(path);
    max_depth = std::max(max_depth, frames.size() - 1);
    Node* node = &root;
    for (const auto frame : frames) {
      auto& child = node->children[std::string(frame)];
      if (!child) child = std::make_unique<Node>();
      child->weight += weight;
      node = child.get();
    }
  }

  const double top = 36.0;
  const double bottom = 8.0;
  const double height = top + static_cast<double>(max_depth + 1) * options.frame_height + bottom;
  const double scale = options.width / static_cast<double>(profile.total_weight);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" standalone=\"no\"?>\n"
      << "<svg version=\"1.1\" xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << format_number(options.width) << "\" height=\"" << format_number(height)
      << "\" viewBox=\"0 0 " << format_number(options.width) << ' ' << format_number(height)
      << "\" data-total-weight=\"" << profile.total_weight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#f8f8f8\"/>\n"
      << "<text x=\"" << format_number(options.width / 2)
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"Verdana\" font-size=\"17\">"
      << xml_escape(options.title) << "</text>\n";

  struct Frame {
    const Node* node;
    std::string name;
    std::string path;
    std::size_t depth;
    std::uint64_t offset;  // in weight units from the left edge
  };
  std::vector<Frame> stack;
  for (auto it = root.children.rbegin(); it != root.children.rend(); ++it) {
    stack.push_back({it->second.get(), it->first, it->first, 0, 0});
  }
  // Siblings sit side by side in name order.
  std::uint64_t acc = 0;
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
    it->offset = acc;
    acc += it->node->weight;
  }

  while (!stack.empty()) {
    const Frame f = std::move(stack.back());
    stack.pop_back();
    const double x = static_cast<double>(f.offset) * scale;
    const double w = static_cast<double>(f.node->weight) * scale;
    const double y = top + static_cast<double>(max_depth - f.depth) * options.frame_height;
    const double pct = 100.0 * static_cast<double>(f.node->weight) /
                       static_cast<double>(profile.total_weight);
    char pct_buf[32];
    std::snprintf(pct_buf, sizeof(pct_buf), "%.2f", pct);
    svg << "<g><title>" << xml_escape(f.name) << " (" << f.node->weight << " samples, " << pct_buf
        << "%)</title><rect x=\"" << format_number(x) << "\" y=\"" << format_number(y)
        << "\" width=\"" << format_number(w) << "\" height=\""
        << format_number(options.frame_height - 1) << "\" fill=\""
        << frame_color(f.name, options.palette_seed) << "\" data-depth=\"" << f.depth
        << "\" data-path=\"" << xml_escape(f.path) << "\" data-weight=\"" << f.node->weight
        << "\"/>";
    const auto chars = static_cast<std::size_t>(w / 7.0);
    if (chars >= 3) {
      std::string label = f.name;
      if (label.size() > chars) label = label.substr(0, chars - 2) + "..";
      svg << "<text x=\"" << format_number(x + 3) << "\" y=\""
          << format_number(y + options.frame_height - 4)
          << "\" font-family=\"Verdana\" font-size=\"12\">" << xml_escape(label) << "</text>";
    }
    svg << "</g>\n";

    std::uint64_t child_offset = f.offset;
    std::vector<Frame> children;
    for (const auto& [name, child] : f.node->children) {
      children.push_back({child.get(), name, f.path + ";" + name, f.depth + 1, child_offset});
      child_offset += child->weight;
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fheprof
