#include "sortition/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace sortition {

namespace {

City make_city(int index, double population, double cap) {
  City c;
  char id[16];
  std::snprintf(id, sizeof id, "c%02d", index);
  c.id = id;
  c.name = c.id;
  c.population = population;
  c.cap = cap;
  c.state = "X";
  return c;
}

Fixture example1() {
  Fixture f;
  f.name = "example1";
  const double pops[] = {10, 10, 40, 40, 40, 50, 70, 100};
  int k = 1;
  for (double p : pops) f.cities.push_back(make_city(k++, p, p / 2.0)); // caps at half the raw size
  f.letters = 60;
  f.default_budget = 4;
  return f;
}

Fixture greedy_gap() {
  Fixture f;
  f.name = "greedy-gap";
  std::vector<double> pops{2};
  for (int i = 0; i < 9; ++i) pops.push_back(30);
  for (int i = 0; i < 10; ++i) pops.push_back(33);
  for (int i = 0; i < 5; ++i) pops.push_back(34);
  pops.push_back(228);
  int k = 1;
  for (double p : pops) f.cities.push_back(make_city(k++, p, p)); // caps equal raw sizes
  f.letters = 100;
  f.default_budget = 4;
  return f;
}

Fixture bucket_gap() {
  Fixture f;
  f.name = "bucket-gap";
  const double pops[] = {1, 4, 16, 64, 65, 113, 125, 128};
  int k = 1;
  for (double p : pops) f.cities.push_back(make_city(k++, p, p)); // caps equal raw sizes
  f.letters = 129;
  f.default_budget = 3;
  return f;
}

Fixture partition_gadget() {
  Fixture f;
  f.name = "partition";
  const double x[] = {1, 1, 2, 2};
  int k = 1;
  for (double p : x) f.cities.push_back(make_city(k++, p, p));
  f.letters = 3;
  f.default_budget = 2;
  return f;
}

// Deterministic 42-group roster shaped like the federal stratification:
// 16 states, three size classes, city-state theory states only large. Caps
// follow the ingestion rule (50% under 500, 10% over 2500, 250 between).
Fixture synthetic42() {
  Fixture f;
  f.name = "synthetic42";
  struct StateSpec {
    const char* name;
    bool small_medium; // city-states carry only the large class
  };
  const StateSpec states[] = {
      {"BW", true},  {"BY", true},  {"BE", false}, {"BB", true},
      {"HB", false}, {"HH", false}, {"HE", true},  {"MV", true},
      {"NI", true},  {"NW", true},  {"RP", true},  {"SL", true},
      {"SN", true},  {"ST", true},  {"SH", true},  {"TH", true},
  };
  std::mt19937 rng(424242);
  auto cap_for = [](double pop) {
    if (pop < 500.0) return 0.5 * pop;
    if (pop > 2500.0) return 0.1 * pop;
    return 250.0;
  };
  int serial = 0;
  auto add_cities = [&](const char* state, double lo, double hi, int count) {
    std::uniform_real_distribution<double> pd(std::log(lo), std::log(hi));
    for (int k = 0; k < count; ++k) {
      double pop = std::floor(std::exp(pd(rng)));
      City c;
      c.id = std::string(state) + "-" + std::to_string(++serial);
      c.name = c.id;
      c.state = state;
      c.population = pop;
      c.cap = cap_for(pop);
      f.cities.push_back(std::move(c));
    }
  };
  int g = 0;
  for (const auto& s : states) {
    add_cities(s.name, 100000.0, 1200000.0, 2 + (g++ % 3)); // large
    if (!s.small_medium) continue;
    add_cities(s.name, 20000.0, 99000.0, 3 + (g++ % 4));  // medium
    add_cities(s.name, 120.0, 19000.0, 5 + (g++ % 6));    // small
  }
  f.letters = 20000;
  f.default_budget = 80;
  return f;
}

} // namespace

Fixture fixture(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "greedy-gap") return greedy_gap();
  if (name == "bucket-gap") return bucket_gap();
  if (name == "partition") return partition_gadget();
  if (name == "synthetic42") return synthetic42();
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

std::vector<std::string> fixture_names() {
  return {"example1", "greedy-gap", "bucket-gap", "partition", "synthetic42"};
}

} // namespace sortition
