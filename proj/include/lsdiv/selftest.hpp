#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lsdiv {

struct SelftestRow {
  int criterion = 0;
  std::string id;
  bool pass = false;
  std::string detail;
};

struct SelftestOptions {
  std::uint64_t seed = 20240901;
};

// The full reproduction table. Groups:
//   1  closed-form / quadrature reference values and projections
//   2  group-invariance and canonical-reduction suite
//   3  scale invariance
//   4  projection g-independence and the orbit law
//   5  Monte Carlo estimator suite
//   6  Fisher-Rao geometry
//   7  group algebra laws
//   8  diffeomorphism invariance (log-normal, mutual information)
std::vector<SelftestRow> run_selftest_criterion(int criterion,
                                                const SelftestOptions& opt = {});
std::vector<SelftestRow> run_selftest(const SelftestOptions& opt = {});

std::string format_row(const SelftestRow& row);

// Numerical geodesic-length oracle for the scaled upper-plane metric
// (b^2/y^2) I: integrates the length element along the known circle-arc or
// vertical-line geodesic with a composite Simpson rule. Independent of the
// arccosh distance formula it is used to check.
double geodesic_length_oracle(double b, double x1, double y1, double x2, double y2,
                              int steps = 10000);

}  // namespace lsdiv
