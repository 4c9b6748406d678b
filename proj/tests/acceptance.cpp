#include <chrono>
#include <cstdio>
#include <iostream>

#include "instanton/suite.hpp"

using namespace instanton;

namespace {
std::string detail_of(const CriterionResult& r) {
  if (const Check* f = r.first_failure())
    return "first failure: " + f->name + " = " + detail::value_text(f->value) + " (tol " +
           detail::format_double(f->tol) + ")";
  return std::to_string(r.checks.size()) + " checks";
}
}  // namespace

int main() {
  SuiteConfig cfg;
  std::vector<CriterionResult> results;
  auto t0 = std::chrono::steady_clock::now();
  Report report = suite_report(cfg, &results);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  int failed = 0;
  for (const auto& r : results) {
    failed += !r.pass();
    std::cout << "criterion " << r.id << " (" << r.title << "): " << (r.pass() ? "PASS" : "FAIL") << "  "
              << detail_of(r) << '\n';
  }
  std::cout << "suite wall time (two full runs): " << secs << " s\n";
  std::cout << (report.pass() ? "ALL PASS" : "FAILED: " + std::to_string(failed) + " criteria") << '\n';
  return report.pass() ? 0 : 1;
}
