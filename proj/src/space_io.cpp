#include "lmx/space_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lmx {

namespace {

using Members = std::vector<std::pair<std::size_t, BigInt>>;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string big_to_string(const BigInt& n) { return n.str(); }

BigInt big_from_json(const Json& j) {
  try {
    if (j.is_string()) return BigInt(j.get<std::string>());
    if (j.is_number_integer()) return BigInt(j.get<long long>());
  } catch (const std::exception&) {
  }
  parse_error("expected a decimal count, got " + j.dump());
  return 0;
}

Json bigs_to_json(const std::vector<BigInt>& v) {
  Json a = Json::array();
  for (const auto& n : v) a.push_back(big_to_string(n));
  return a;
}

std::vector<BigInt> bigs_from_json(const Json& j) {
  std::vector<BigInt> v;
  if (!j.is_array()) parse_error("expected an array of counts");
  for (const auto& e : j) v.push_back(big_from_json(e));
  return v;
}

Json exact_to_json(const ExtReal& x) { return Json::array({x.mantissa(), x.exponent()}); }

ExtReal exact_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) parse_error("exact weight must be [mantissa, exponent]");
  return ExtReal(j[0].get<double>()).scaled_pow2(j[1].get<std::int64_t>());
}

// A positive weight: log2 for readers, exact pair for round trips.
void put_weight(Json& obj, const ExtReal& w) {
  obj["log2_weight"] = static_cast<double>(w.log2());
  obj["weight"] = exact_to_json(w);
}

ExtReal get_weight(const Json& obj) {
  if (obj.contains("weight")) return exact_from_json(obj.at("weight"));
  return ext_from_json(field(obj, "log2_weight"));
}

Json weights_to_json(const std::vector<ExtReal>& v) {
  Json a = Json::array();
  for (const auto& w : v) a.push_back(exact_to_json(w));
  return a;
}

std::vector<ExtReal> weights_from_json(const Json& j) {
  std::vector<ExtReal> v;
  for (const auto& e : j) v.push_back(exact_from_json(e));
  return v;
}

std::string_view split_name(SplitRule s) {
  switch (s) {
    case SplitRule::None: return "none";
    case SplitRule::Interchangeable: return "interchangeable";
    case SplitRule::Positional: return "positional";
  }
  return "none";
}

SplitRule split_from_name(const std::string& s) {
  if (s == "none") return SplitRule::None;
  if (s == "interchangeable") return SplitRule::Interchangeable;
  if (s == "positional") return SplitRule::Positional;
  parse_error("unknown split rule '" + s + "'");
  return SplitRule::None;
}

Status status_from_name(const std::string& s) {
  for (auto st : {Status::Holds, Status::Fails, Status::Fragile}) {
    if (to_string(st) == s) return st;
  }
  parse_error("unknown status '" + s + "'");
  return Status::Fails;
}

std::vector<std::string> tags_from_json(const Json& obj) {
  std::vector<std::string> tags;
  if (obj.contains("tags")) {
    for (const auto& t : obj.at("tags")) tags.push_back(t.get<std::string>());
  }
  return tags;
}

Json positional_to_json(const PositionalModel& m) {
  Json j;
  j["lower_counts"] = bigs_to_json(m.lower_counts);
  j["upper_counts"] = bigs_to_json(m.upper_counts);
  j["lower_weights"] = weights_to_json(m.lower_weights);
  j["upper_weights"] = weights_to_json(m.upper_weights);
  j["radius_scale"] = m.radius_scale;
  if (m.split) {
    j["split"] = Json::array({m.split->first, big_to_string(m.split->second)});
  } else {
    j["split"] = nullptr;
  }
  return j;
}

PositionalModel positional_from_json(const Json& j) {
  PositionalModel m;
  m.lower_counts = bigs_from_json(field(j, "lower_counts"));
  m.upper_counts = bigs_from_json(field(j, "upper_counts"));
  m.lower_weights = weights_from_json(field(j, "lower_weights"));
  m.upper_weights = weights_from_json(field(j, "upper_weights"));
  m.radius_scale = field(j, "radius_scale").get<double>();
  const Json& s = field(j, "split");
  if (!s.is_null()) m.split = std::make_pair(s.at(0).get<std::size_t>(), big_from_json(s.at(1)));
  return m;
}

FiniteSpace attach_metadata(FiniteSpace space, const Json& j) {
  if (j.contains("generator")) {
    space = space.with_generator(generator_kind_from_string(j.at("generator").get<std::string>()));
  }
  if (j.contains("positional")) {
    space = space.with_positional(std::make_shared<PositionalModel>(positional_from_json(j.at("positional"))));
  }
  if (j.contains("combined")) {
    const Json& c = j.at("combined");
    auto info = std::make_shared<CombinedInfo>();
    for (const auto& comp : field(c, "components")) info->components.push_back(space_from_json(comp));
    info->metric_scale = field(c, "metric_scale").get<std::vector<double>>();
    info->measure_scale = weights_from_json(field(c, "measure_scale"));
    info->first_cell = field(c, "first_cell").get<std::vector<std::size_t>>();
    space = space.with_combined(std::move(info));
  }
  return space;
}

}  // namespace

Json exponent_to_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

double exponent_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    parse_error("bad exponent '" + s + "'");
  }
  if (!j.is_number()) parse_error("bad exponent " + j.dump());
  return j.get<double>();
}

Json ext_to_json(const ExtReal& x) {
  if (x.is_zero()) return "-inf";
  return static_cast<double>(x.log2());
}

ExtReal ext_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "-inf") return ExtReal::zero();
    parse_error("bad log2 value " + j.dump());
  }
  if (!j.is_number()) parse_error("bad log2 value " + j.dump());
  return ExtReal::from_log2(j.get<double>());
}

Json space_to_json(const FiniteSpace& space) {
  Json j;
  j["kind"] = space.is_dense() ? "dense" : "cellular";
  j["generator"] = std::string(to_string(space.generator()));
  const auto& cells = space.cells();
  if (space.is_dense()) {
    Json points = Json::array();
    for (const auto& c : cells) {
      Json p;
      p["id"] = c.id;
      put_weight(p, c.weight);
      p["tags"] = c.tags;
      points.push_back(std::move(p));
    }
    j["points"] = std::move(points);
    Json matrix = Json::array();
    for (std::size_t a = 0; a < cells.size(); ++a) {
      Json row = Json::array();
      for (std::size_t b = 0; b < cells.size(); ++b) row.push_back(space.distance(a, b));
      matrix.push_back(std::move(row));
    }
    j["matrix"] = std::move(matrix);
  } else {
    Json arr = Json::array();
    for (const auto& c : cells) {
      Json o;
      o["id"] = c.id;
      o["count"] = big_to_string(c.count);
      put_weight(o, c.weight);
      o["tags"] = c.tags;
      arr.push_back(std::move(o));
    }
    j["cells"] = std::move(arr);
    Json profiles = Json::array();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      Json balls = Json::array();
      for (const auto& b : space.profile(c).balls) {
        Json members = Json::object();
        for (const auto& m : b.members) members[cells[m.cell].id] = big_to_string(m.count);
        balls.push_back({{"radius", b.radius}, {"members", std::move(members)}});
      }
      profiles.push_back({{"cell", cells[c].id}, {"balls", std::move(balls)}});
    }
    j["profiles"] = std::move(profiles);
  }
  Json splits = Json::array();
  for (const auto& c : cells) {
    if (c.split != SplitRule::None) splits.push_back({{"cell", c.id}, {"rule", std::string(split_name(c.split))}});
  }
  j["splits"] = std::move(splits);
  if (space.positional()) j["positional"] = positional_to_json(*space.positional());
  if (space.combined()) {
    const auto& info = *space.combined();
    Json comps = Json::array();
    for (const auto& comp : info.components) comps.push_back(space_to_json(comp));
    j["combined"] = {{"components", std::move(comps)},
                     {"metric_scale", info.metric_scale},
                     {"measure_scale", weights_to_json(info.measure_scale)},
                     {"first_cell", info.first_cell}};
  }
  return j;
}

FiniteSpace space_from_json(const Json& j) {
  try {
    const std::string kind = field(j, "kind").get<std::string>();
    std::map<std::string, SplitRule> splits;
    if (j.contains("splits")) {
      for (const auto& s : j.at("splits")) {
        splits[field(s, "cell").get<std::string>()] = split_from_name(field(s, "rule").get<std::string>());
      }
    }
    FiniteSpace space;
    if (kind == "dense") {
      std::vector<std::string> ids;
      std::vector<ExtReal> weights;
      for (const auto& p : field(j, "points")) {
        ids.push_back(field(p, "id").get<std::string>());
        weights.push_back(get_weight(p));
      }
      const Json& matrix = field(j, "matrix");
      if (matrix.size() != ids.size()) parse_error("matrix has wrong number of rows");
      std::vector<double> dist;
      for (const auto& row : matrix) {
        if (row.size() != ids.size()) parse_error("matrix row has wrong length");
        for (const auto& d : row) dist.push_back(d.get<double>());
      }
      space = FiniteSpace::dense(std::move(ids), std::move(weights), std::move(dist));
    } else if (kind == "cellular") {
      std::vector<Cell> cells;
      std::map<std::string, std::size_t> index;
      for (const auto& o : field(j, "cells")) {
        Cell c;
        c.id = field(o, "id").get<std::string>();
        c.count = big_from_json(field(o, "count"));
        c.weight = get_weight(o);
        c.tags = tags_from_json(o);
        if (auto it = splits.find(c.id); it != splits.end()) c.split = it->second;
        if (!index.emplace(c.id, cells.size()).second) parse_error("duplicate cell id '" + c.id + "'");
        cells.push_back(std::move(c));
      }
      auto lookup = [&](const std::string& id) {
        auto it = index.find(id);
        if (it == index.end()) throw Error(ErrorCode::MissingCell, "unknown cell '" + id + "'");
        return it->second;
      };
      std::vector<std::vector<std::pair<double, Members>>> raw(cells.size());
      std::vector<bool> seen(cells.size(), false);
      for (const auto& pr : field(j, "profiles")) {
        const std::size_t c = lookup(field(pr, "cell").get<std::string>());
        if (seen[c]) parse_error("duplicate profile for '" + cells[c].id + "'");
        seen[c] = true;
        for (const auto& b : field(pr, "balls")) {
          Members ms;
          for (const auto& [id, cnt] : field(b, "members").items()) ms.emplace_back(lookup(id), big_from_json(cnt));
          raw[c].emplace_back(field(b, "radius").get<double>(), std::move(ms));
        }
      }
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!seen[c]) parse_error("no profile for '" + cells[c].id + "'");
      }
      space = FiniteSpace::cellular(std::move(cells), std::move(raw));
    } else {
      parse_error("unknown space kind '" + kind + "'");
    }
    if (space.is_dense() && !splits.empty()) parse_error("dense spaces carry no split rules");
    return attach_metadata(std::move(space), j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

Json function_to_json(const FiniteSpace& space, const CellFunction& f) {
  Json values = Json::object();
  for (std::size_t c = 0; c < space.cell_count(); ++c) values[space.cell(c).id] = ext_to_json(f.values.at(c));
  return {{"values", std::move(values)}};
}

CellFunction function_from_json(const FiniteSpace& space, const Json& j) {
  std::map<std::string, ExtReal> values;
  for (const auto& [id, v] : field(j, "values").items()) values[id] = ext_from_json(v);
  return CellFunction::from_map(space, values);
}

Json plan_to_json(const SequencePlan& plan) {
  Json j;
  j["kind"] = std::string(to_string(plan.kind));
  j["l"] = plan.l;
  j["p"] = exponent_to_json(plan.p);
  j["q"] = exponent_to_json(plan.q);
  j["r"] = exponent_to_json(plan.r);
  j["m"] = bigs_to_json(plan.m);
  j["h"] = bigs_to_json(plan.h);
  j["alpha"] = bigs_to_json(plan.alpha);
  j["beta"] = bigs_to_json(plan.beta);
  j["alpha_scalar"] = big_to_string(plan.alpha_scalar);
  Json cert = Json::array();
  for (const auto& c : plan.certificate) {
    cert.push_back({{"id", c.id}, {"status", std::string(to_string(c.status))}, {"witness", c.witness}});
  }
  j["certificate"] = std::move(cert);
  return j;
}

SequencePlan plan_from_json(const Json& j) {
  try {
    SequencePlan plan;
    plan.kind = plan_kind_from_string(field(j, "kind").get<std::string>());
    plan.l = field(j, "l").get<std::size_t>();
    plan.p = exponent_from_json(field(j, "p"));
    plan.q = exponent_from_json(field(j, "q"));
    plan.r = exponent_from_json(field(j, "r"));
    plan.m = bigs_from_json(field(j, "m"));
    plan.h = bigs_from_json(field(j, "h"));
    plan.alpha = bigs_from_json(field(j, "alpha"));
    plan.beta = bigs_from_json(field(j, "beta"));
    plan.alpha_scalar = big_from_json(field(j, "alpha_scalar"));
    if (j.contains("certificate")) {
      for (const auto& c : j.at("certificate")) {
        plan.certificate.push_back({field(c, "id").get<std::string>(),
                                    status_from_name(field(c, "status").get<std::string>()),
                                    c.value("witness", std::string())});
      }
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace lmx
