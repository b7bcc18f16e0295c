#include "homwit/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace homwit::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string pattern_label(const std::array<int, 3>& modes) {
  std::string s;
  for (int i = 0; i < 3; ++i) {
    if (i) s += '-';
    s += std::to_string(modes[i] + 1);
  }
  return s;
}

std::string distribution_csv(const interference::OutputDistribution& dist) {
  std::string out = "pattern,probability,pair_tag,bunched_flag\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto& p = dist.patterns()[i];
    out += pattern_label(p.modes);
    out += ',';
    out += format_double(dist.prob(i));
    out += ',';
    out += interference::to_string(p.tag);
    out += ',';
    out += p.bunched ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string distribution_json(const interference::OutputDistribution& dist,
                              const nlohmann::ordered_json& metadata) {
  nlohmann::ordered_json j;
  j["metadata"] = metadata;
  auto& rows = j["patterns"];
  rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto& p = dist.patterns()[i];
    rows.push_back({{"pattern", pattern_label(p.modes)},
                    {"probability", dist.prob(i)},
                    {"pair_tag", interference::to_string(p.tag)},
                    {"bunched_flag", p.bunched}});
  }
  return j.dump(2) + "\n";
}

std::string counts_csv(const estimation::EventCounts& counts,
                       std::span<const interference::PatternInfo> patterns) {
  if (counts.counts.size() != patterns.size()) {
    throw std::invalid_argument("counts_csv: counts/pattern size mismatch");
  }
  std::string out = "pattern,count\n";
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    out += pattern_label(patterns[i].modes);
    out += ',';
    out += std::to_string(counts.counts[i]);
    out += '\n';
  }
  return out;
}

std::string estimate_json(const estimation::EstimatedTriple& est,
                          const nlohmann::ordered_json& metadata) {
  nlohmann::ordered_json j;
  j["metadata"] = metadata;
  j["overlaps"] = {{"ab", est.point.ab}, {"bc", est.point.bc}, {"ac", est.point.ac}};
  j["sigma"] = {{"ab", est.sigma[0]}, {"bc", est.sigma[1]}, {"ac", est.sigma[2]}};
  j["clamped"] = {{"ab", est.clamped[0]}, {"bc", est.clamped[1]}, {"ac", est.clamped[2]}};
  j["bootstrap_resamples"] = est.bootstrap_resamples;
  return j.dump(2) + "\n";
}

std::string surface_csv(const statemodel::SurfaceGrid& grid, const std::string& row_axis,
                        const std::string& col_axis) {
  std::string out = row_axis + "\\" + col_axis;
  for (double c : grid.cols) {
    out += ',';
    out += format_double(c);
  }
  out += '\n';
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    out += format_double(grid.rows[i]);
    for (std::size_t j = 0; j < grid.cols.size(); ++j) {
      out += ',';
      out += format_double(grid.at(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string surface_sidecar_json(const nlohmann::ordered_json& metadata) {
  return metadata.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace homwit::io
