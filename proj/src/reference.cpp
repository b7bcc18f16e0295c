#include "homwit/reference.hpp"

#include "homwit/errors.hpp"
#include "homwit/estimation.hpp"
#include "homwit/interference.hpp"
#include "homwit/statemodel.hpp"

#include "reference_data.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>

namespace homwit::reference {

namespace {

using nlohmann::json;

std::array<double, 3> parse_pair_map(const json& obj) {
  return {obj.at("ab").get<double>(), obj.at("bc").get<double>(), obj.at("ac").get<double>()};
}

OverlapTriple parse_triple(const json& obj) {
  const auto v = parse_pair_map(obj);
  return OverlapTriple(v[0], v[1], v[2]);
}

ReferenceData parse_bundle(std::string_view text) {
  const json root = json::parse(text);
  ReferenceData data;
  data.wc_tolerance = root.at("wc_tolerance").get<double>();
  data.wd_tolerance = root.at("wd_tolerance").get<double>();
  data.dip_fit_rel_tolerance = root.at("dip_fit_rel_tolerance").get<double>();
  for (const auto& row : root.at("overlap_sets")) {
    OverlapSet set{
        .label = row.at("label").get<std::string>(),
        .source = row.at("source").get<std::string>(),
        .overlaps = parse_triple(row.at("overlaps")),
        .sigma = parse_pair_map(row.at("sigma")),
        .wc = row.at("wc").get<double>(),
        .wc_sigma = row.at("wc_sigma").get<double>(),
    };
    data.overlap_sets.push_back(std::move(set));
  }
  const auto& d = root.at("delayed_set");
  data.delayed = DelayedSet{
      .label = d.at("label").get<std::string>(),
      .source = d.at("source").get<std::string>(),
      .overlaps = parse_triple(d.at("overlaps")),
      .sigma = parse_pair_map(d.at("sigma")),
      .wd = d.at("wd").get<double>(),
      .wd_sigma = d.at("wd_sigma").get<double>(),
  };
  for (const auto& row : root.at("dip_calibrations")) {
    DipCalibration dip{
        .pair = row.at("pair").get<std::string>(),
        .source = row.at("source").get<std::string>(),
        .v = row.at("v").get<double>(),
        .v_sigma = row.at("v_sigma").get<double>(),
        .sigma = row.at("sigma").get<double>(),
        .sigma_sigma = row.at("sigma_sigma").get<double>(),
    };
    data.dips.push_back(std::move(dip));
  }
  return data;
}

}  // namespace

const ReferenceData& bundled() {
  static const ReferenceData data = parse_bundle(detail::kReferenceJson);
  return data;
}

std::vector<ComparisonRow> reproduce_coherence_rows() {
  const auto& data = bundled();
  std::vector<ComparisonRow> rows;
  rows.reserve(data.overlap_sets.size());
  for (const auto& set : data.overlap_sets) {
    const double computed = geometry::coherence_witness(set.overlaps);
    rows.push_back(ComparisonRow{
        .label = set.label,
        .quantity = "coherence witness",
        .expected = set.wc,
        .computed = computed,
        .tolerance = data.wc_tolerance,
        .pass = std::abs(computed - set.wc) <= data.wc_tolerance,
    });
  }
  return rows;
}

std::vector<ComparisonRow> reproduce_dimension_row(const geometry::ProjectionOptions& opts) {
  const auto& data = bundled();
  const double computed = geometry::dimension_witness(data.delayed.overlaps, opts);
  return {ComparisonRow{
      .label = data.delayed.label,
      .quantity = "dimension witness",
      .expected = data.delayed.wd,
      .computed = computed,
      .tolerance = data.wd_tolerance,
      .pass = std::abs(computed - data.delayed.wd) <= data.wd_tolerance,
  }};
}

std::vector<ComparisonRow> reproduce_dip_roundtrip() {
  const auto& data = bundled();
  std::vector<ComparisonRow> rows;
  constexpr double kAmplitude = 1000.0;
  for (const auto& dip : data.dips) {
    std::vector<estimation::DipPoint> samples;
    // 41 positions spanning dip core and flat baseline on both sides.
    for (int i = 0; i <= 40; ++i) {
      const double dx = -400.0 + 20.0 * i;
      samples.push_back(
          {dx, interference::dip_curve(dx, kAmplitude, dip.v, dip.sigma)});
    }
    const auto fit = estimation::fit_dip(samples);
    const auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
    rows.push_back(ComparisonRow{
        .label = dip.pair,
        .quantity = "dip visibility round-trip",
        .expected = dip.v,
        .computed = fit.v,
        .tolerance = data.dip_fit_rel_tolerance,
        .pass = rel(fit.v, dip.v) <= data.dip_fit_rel_tolerance,
    });
    rows.push_back(ComparisonRow{
        .label = dip.pair,
        .quantity = "dip width round-trip",
        .expected = dip.sigma,
        .computed = fit.sigma,
        .tolerance = data.dip_fit_rel_tolerance,
        .pass = rel(fit.sigma, dip.sigma) <= data.dip_fit_rel_tolerance,
    });
  }
  return rows;
}

}  // namespace homwit::reference
