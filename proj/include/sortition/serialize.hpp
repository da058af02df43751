#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortition/apportion.hpp"
#include "sortition/buckets.hpp"
#include "sortition/colgen.hpp"
#include "sortition/greedy_equal.hpp"
#include "sortition/layout.hpp"
#include "sortition/model.hpp"

namespace sortition {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  int line_number;
};
class DigestMismatch : public std::runtime_error {
public:
  explicit DigestMismatch(const std::string& what) : std::runtime_error(what) {}
};

std::string digest_hex(std::uint64_t digest);

// CSV roster: header `id,name,state,population`, UTF-8, decimal point. Caps
// are assigned afterwards by the cap rule.
std::vector<City> parse_roster_csv(std::istream& in);
std::vector<City> load_roster_csv(const std::string& path);

struct CapRule {
  double small_threshold = 500.0;
  double large_threshold = 2500.0;
  double small_frac = 0.5;
  double large_frac = 0.1;
  double mid_cap = 250.0;
};
double apply_cap_rule(double population, const CapRule& rule);

// JSON artifacts. Digests embedded everywhere; loaders verify on request.
std::string distribution_to_json(const LetterDistribution& dist);
LetterDistribution distribution_from_json(const std::string& text);
std::string layout_to_json(const Layout& layout);
Layout layout_from_json(const std::string& text);
std::string instance_to_json(const ProblemInstance& inst);
std::string trace_to_json(const GreedyTrace& trace, GreedyStatus status,
                          std::uint64_t instance_digest);

// CSV artifacts.
std::string plan_to_csv(const GroupPlan& plan);
std::string buckets_to_csv(const BucketsResult& result, const ProblemInstance& inst);
std::string run_log_to_csv(const std::vector<IterationLog>& log);
std::string group_report_to_csv(const std::vector<GroupReportRow>& rows);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace sortition
