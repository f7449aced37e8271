#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "biphasic/oracle.hpp"

namespace biphasic {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Column of `elements` Tet10 layers (1 x 1 x H box) under a step load,
/// compared with the series at 20, 50 and 80 % average consolidation.
struct TerzaghiComparison {
  int elements = 0;
  std::array<double, 3> degree{0.2, 0.5, 0.8};
  std::array<double, 3> time{};
  std::array<double, 3> rel_l2_error{};
  double max_error() const;
};

struct TerzaghiSetup {
  double H = 8.0;
  double sigma0 = 1e-3;
  NeoHookeParams material{0.2, 0.5};
  double k = 1e-3;
  int steps = 200;  // time steps to each target instant
};

TerzaghiComparison terzaghi_comparison(int elements, const TerzaghiSetup& setup = {});

struct VerifyOptions {
  int terzaghi_refine = 1;  // levels; the finest has 16 elements, each coarser halves
  TangentFunction tangent = spatial_tangent;
};

std::vector<CheckResult> run_verification(const VerifyOptions& options);
void print_checks(const std::vector<CheckResult>& checks, std::ostream& out);

}  // namespace biphasic
