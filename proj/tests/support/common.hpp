#pragma once
// Shared test helpers: golden file access and small builders.

#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ncmart/ncmart.hpp"

namespace testing_support {

using ncmart::io::json;

inline json golden(const std::string& name) {
  std::ifstream in(std::string(NCMART_GOLDEN_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing golden file " + name);
  return json::parse(in);
}

inline ncmart::Matrix matrix_of(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  ncmart::Matrix m(n, static_cast<Eigen::Index>(j[0].size()));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = {j[i][k][0].get<double>(), j[i][k][1].get<double>()};
  return m;
}

inline std::vector<ncmart::cplx> cvec_of(const json& j) {
  std::vector<ncmart::cplx> v;
  for (const auto& e : j) v.emplace_back(e[0].get<double>(), e[1].get<double>());
  return v;
}

inline double max_diff(const ncmart::Matrix& a, const ncmart::Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Diagonal entries of an operator over dim-1 blocks.
inline std::vector<ncmart::cplx> diag_of(const ncmart::Operator& x) {
  std::vector<ncmart::cplx> v;
  for (const auto& b : x.blocks()) v.push_back(b(0, 0));
  return v;
}

inline ncmart::Instance make(std::uint64_t seed, int dim, int levels, ncmart::Mode mode) {
  ncmart::InstanceSpec s;
  s.seed = seed;
  s.dim = dim;
  s.levels = levels;
  s.mode = mode;
  return ncmart::generate(s);
}

inline ncmart::StepFunction steps_of(const json& j) { return ncmart::io::step_from_json(j); }

}  // namespace testing_support
