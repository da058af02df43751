#include "sortition/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sortition {

using nlohmann::json;

std::string digest_hex(std::uint64_t digest) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

double apply_cap_rule(double population, const CapRule& rule) {
  if (population < rule.small_threshold) return rule.small_frac * population;
  if (population > rule.large_threshold) return rule.large_frac * population;
  return rule.mid_cap;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

} // namespace

std::vector<City> parse_roster_csv(std::istream& in) {
  std::vector<City> cities;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++line_no;
  auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "name" || header[2] != "state" ||
      header[3] != "population")
    throw ParseError("expected header id,name,state,population", 1);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() < 4) throw ParseError("expected 4 fields", line_no);
    City c;
    c.id = f[0];
    c.name = f[1];
    c.state = f[2];
    try {
      c.population = std::stod(f[3]);
    } catch (const std::exception&) {
      throw ParseError("bad population '" + f[3] + "'", line_no);
    }
    cities.push_back(std::move(c));
  }
  return cities;
}

std::vector<City> load_roster_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_roster_csv(in);
}

std::string distribution_to_json(const LetterDistribution& dist) {
  json doc;
  doc["mode"] = dist.mode == DistributionMode::Integral ? "integral" : "fractional";
  doc["instance_digest"] = digest_hex(dist.instance_digest);
  json entries = json::array();
  for (const auto& e : dist.entries) {
    json entry;
    entry["p"] = e.probability;
    entry["letters"] = e.allocation.letters_per_city;
    entries.push_back(std::move(entry));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

LetterDistribution distribution_from_json(const std::string& text) {
  json doc = json::parse(text);
  LetterDistribution dist;
  dist.mode = doc.at("mode").get<std::string>() == "integral" ? DistributionMode::Integral
                                                              : DistributionMode::Fractional;
  dist.instance_digest = std::stoull(doc.at("instance_digest").get<std::string>(), nullptr, 16);
  for (const auto& entry : doc.at("entries")) {
    LetterDistribution::Entry e;
    e.probability = entry.at("p").get<double>();
    e.allocation.letters_per_city = entry.at("letters").get<std::vector<double>>();
    dist.entries.push_back(std::move(e));
  }
  return dist;
}

std::string layout_to_json(const Layout& layout) {
  json doc;
  doc["columns"] = layout.columns;
  doc["letters"] = layout.letters;
  doc["instance_digest"] = digest_hex(layout.instance_digest);
  json segs = json::array();
  for (const Segment& s : layout.segments)
    segs.push_back({{"city", s.city}, {"start", s.start}, {"end", s.end}, {"height", s.height}});
  doc["segments"] = std::move(segs);
  return doc.dump(2) + "\n";
}

Layout layout_from_json(const std::string& text) {
  json doc = json::parse(text);
  Layout layout;
  layout.columns = doc.at("columns").get<int>();
  layout.letters = doc.at("letters").get<long long>();
  layout.instance_digest = std::stoull(doc.at("instance_digest").get<std::string>(), nullptr, 16);
  for (const auto& s : doc.at("segments"))
    layout.segments.push_back({s.at("city").get<int>(), s.at("start").get<double>(),
                               s.at("end").get<double>(), s.at("height").get<double>()});
  return layout;
}

std::string instance_to_json(const ProblemInstance& inst) {
  json doc;
  doc["letters"] = inst.letters;
  doc["budget"] = inst.budget;
  doc["digest"] = digest_hex(inst.digest);
  json cities = json::array();
  for (int i = 0; i < inst.n(); ++i) {
    const City& c = inst.cities[static_cast<size_t>(i)];
    cities.push_back({{"id", c.id},
                      {"name", c.name},
                      {"state", c.state},
                      {"population", c.population},
                      {"cap", c.cap},
                      {"share", inst.pi[static_cast<size_t>(i)]}});
  }
  doc["cities"] = std::move(cities);
  json warn = json::array();
  for (const auto& w : inst.warnings) warn.push_back(w);
  doc["warnings"] = std::move(warn);
  return doc.dump(2) + "\n";
}

std::string trace_to_json(const GreedyTrace& trace, GreedyStatus status,
                          std::uint64_t instance_digest) {
  json doc;
  doc["instance_digest"] = digest_hex(instance_digest);
  const char* s = "success";
  if (status == GreedyStatus::BudgetExceeded) s = "budget_exceeded";
  if (status == GreedyStatus::BelowWidthBound) s = "below_width_bound";
  if (status == GreedyStatus::AssumptionViolated) s = "assumption_violated";
  doc["status"] = s;
  doc["final_x"] = trace.final_x;
  if (trace.failure_point) doc["failure_point"] = *trace.failure_point;
  json pl = json::array();
  for (const auto& p : trace.placements)
    pl.push_back({{"city", p.city},
                  {"start", p.start},
                  {"end", p.end},
                  {"height", p.height},
                  {"selects_average", p.selects_average}});
  doc["placements"] = std::move(pl);
  return doc.dump(2) + "\n";
}

std::string plan_to_csv(const GroupPlan& plan) {
  std::ostringstream os;
  os << "group,population,share,n_G,l_G,t_min,t_G,forced_point,kappa\n";
  for (const auto& e : plan.entries) {
    double population = 0.0;
    for (const City& c : e.local.cities) population += c.population;
    os << e.group.key() << "," << population << "," << e.group.share << "," << e.budget.n_G << ","
       << e.letters << "," << e.budget.t_min << "," << e.budget.t_G << ","
       << (e.forced_point ? 1 : 0) << "," << e.local_targets.kappa << "\n";
  }
  return os.str();
}

std::string buckets_to_csv(const BucketsResult& result, const ProblemInstance& inst) {
  std::ostringstream os;
  os << "bucket,city_id,height,width\n";
  int b = 0;
  for (const Bucket& bucket : result.buckets) {
    for (int i = bucket.first; i <= bucket.last; ++i)
      os << b << "," << inst.cities[static_cast<size_t>(i)].id << "," << bucket.height << ","
         << inst.fair_share(i) / bucket.height << "\n";
    ++b;
  }
  return os.str();
}

std::string run_log_to_csv(const std::vector<IterationLog>& log) {
  std::ostringstream os;
  os << "iteration,master_objective,reduced_value,columns,nodes\n";
  for (const auto& e : log)
    os << e.iteration << "," << e.master_objective << "," << e.reduced_value << "," << e.columns
       << "," << e.nodes << "\n";
  return os.str();
}

std::string group_report_to_csv(const std::vector<GroupReportRow>& rows) {
  std::ostringstream os;
  os << "group,t_G,forced_point,max_ratio\n";
  for (const auto& r : rows)
    os << r.group_key << "," << r.t_G << "," << (r.forced_point ? 1 : 0) << "," << r.max_ratio
       << "\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace sortition
