#pragma once

// Bundled published measurement values and the comparisons the `reproduce`
// command runs against them.  The values live in data/reference_values.json,
// embedded into the binary at configure time so the tool has no runtime data
// dependency.

#include "homwit/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace homwit::reference {

struct OverlapSet {
  std::string label;            // e.g. "S1"
  std::string source;           // where the numbers were reported
  OverlapTriple overlaps{0.0, 0.0, 0.0};
  std::array<double, 3> sigma;  // 1-sigma uncertainties, (ab, bc, ac) order
  double wc = 0.0;              // reported coherence-witness value
  double wc_sigma = 0.0;
};

struct DelayedSet {
  std::string label;
  std::string source;
  OverlapTriple overlaps{0.0, 0.0, 0.0};
  std::array<double, 3> sigma;
  double wd = 0.0;              // reported dimension-witness value
  double wd_sigma = 0.0;
};

struct DipCalibration {
  std::string pair;             // "AB", "BC", "AC"
  std::string source;
  double v = 0.0;               // dip visibility
  double v_sigma = 0.0;
  double sigma = 0.0;           // Gaussian width parameter, per um^2
  double sigma_sigma = 0.0;
};

struct ReferenceData {
  std::vector<OverlapSet> overlap_sets;
  double wc_tolerance = 0.0;
  DelayedSet delayed;
  double wd_tolerance = 0.0;
  std::vector<DipCalibration> dips;
  double dip_fit_rel_tolerance = 0.0;
};

// Parsed once from the embedded JSON; throws only if the bundle itself is
// malformed, which would be a build error.
const ReferenceData& bundled();

struct ComparisonRow {
  std::string label;      // which reference row
  std::string quantity;   // what was recomputed
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// t1: recompute the coherence witness from each measured overlap row.
std::vector<ComparisonRow> reproduce_coherence_rows();

// t2: recompute the dimension witness for the time-delayed row.
std::vector<ComparisonRow> reproduce_dimension_row(const geometry::ProjectionOptions& opts = {});

// t3: round-trip each dip calibration through synthetic data and the fitter;
// rows compare fitted parameters to the generating ones at relative tolerance.
std::vector<ComparisonRow> reproduce_dip_roundtrip();

}  // namespace homwit::reference
