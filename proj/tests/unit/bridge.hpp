#pragma once

#include <vector>

#include "core/channels.hpp"
#include "naive.hpp"

namespace testing_bridge {

inline naive::M to_naive(const coherence::Mat2& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

inline std::vector<naive::M> to_naive(const coherence::KrausSet& ch) {
  std::vector<naive::M> out;
  for (const auto& k : ch.operators()) out.push_back(to_naive(k));
  return out;
}

inline coherence::Mat2 mat(naive::C a, naive::C b, naive::C c, naive::C d) {
  coherence::Mat2 m;
  m << a, b, c, d;
  return m;
}

}  // namespace testing_bridge
