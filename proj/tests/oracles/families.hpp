#pragma once

// Generator test matrix shared by the spectral tests and the acceptance run.

#include <utility>
#include <vector>

#include "consensus_lab/graph.hpp"

namespace oracle {

inline std::vector<consensus_lab::Graph> family_matrix() {
  using namespace consensus_lab;
  std::vector<Graph> out;
  for (int n : {3, 4, 5, 6, 9, 12}) out.push_back(gen_ring(n));
  for (auto [n, k] : {std::pair{8, 2}, {10, 3}, {12, 4}, {16, 5}}) out.push_back(gen_khop(n, k));
  out.push_back(gen_grid(3, 3, true));
  out.push_back(gen_grid(3, 4, false));
  out.push_back(gen_grid(4, 4, true));
  out.push_back(gen_grid(2, 5, false));
  for (std::uint64_t seed = 0; seed < 8; ++seed) out.push_back(gen_er(10, 0.35, seed));
  out.push_back(gen_path(6));
  out.push_back(gen_star(5));
  out.push_back(gen_complete(5));
  return out;
}

}  // namespace oracle
