#pragma once

#include <functional>
#include <string>
#include <vector>

#include <doctest.h>

#include "fourway/dataio.hpp"
#include "fourway/rng.hpp"

namespace fw_test {

// Runs f and returns the exception message, or "<no throw>".
template <typename E>
std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return "<no throw>";
}

inline bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

inline fourway::SubjectRecord record(std::string id, int k, fourway::EventCode ev, fourway::Arm arm,
                                     std::vector<double> cov = {}) {
  fourway::SubjectRecord r;
  r.id = std::move(id);
  r.time_index = k;
  r.event = ev;
  r.treatment = arm;
  r.covariates = std::move(cov);
  return r;
}

inline std::vector<double> unit_grid(int K) {
  std::vector<double> g;
  for (int i = 0; i <= K; ++i) g.push_back(i);
  return g;
}

// K hazards uniform on (lo, hi).
inline std::vector<double> random_hazards(fourway::SplitMix64& rng, int K, double lo = 0.001, double hi = 0.999) {
  std::vector<double> h(static_cast<std::size_t>(K));
  for (double& x : h) x = lo + (hi - lo) * rng.uniform();
  return h;
}

}  // namespace fw_test
