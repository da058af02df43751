#pragma once

#include <string>
#include <vector>

#include "sortition/model.hpp"

namespace sortition {

struct Fixture {
  std::string name;
  std::vector<City> cities;
  long long letters = 0;
  int default_budget = 0;
};

/// Embedded rosters: "example1" (8 cities, l=60); "greedy-gap" (26 cities,
/// l=100, the greedy solver needs budget 5 while 3 suffices); "bucket-gap"
/// (8 cities, l=129, buckets fail through budget 3 while 2 suffices);
/// "partition" (a 4-city gadget whose only fair outcome is an even mixture
/// of two complementary halves, l=3, t=2).
Fixture fixture(const std::string& name);
std::vector<std::string> fixture_names();

} // namespace sortition
