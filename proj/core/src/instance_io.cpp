#include "mg/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mg {

namespace {

using nlohmann::json;

std::string number(double v) { return json(v).dump(); }

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError("missing field '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError("expected number in " + where);
  return v.get<double>();
}

StateId state_ref(const MarkovSystem& s, const json& v, const std::string& where) {
  if (v.is_string()) {
    const StateId id = s.find(v.get<std::string>());
    if (id < 0) throw ParseError("unknown state '" + v.get<std::string>() + "' in " + where);
    return id;
  }
  if (v.is_number_integer()) return v.get<int>();
  throw ParseError("expected state label in " + where);
}

MarkovSystem parse_chain(const json& c, const std::string& where) {
  MarkovSystem s;
  const auto& states = field(c, "states", where);
  if (!states.is_array() || states.empty()) throw ParseError("'states' must be a non-empty array in " + where);
  for (const auto& st : states) {
    if (!st.is_string()) throw ParseError("state labels must be strings in " + where);
    s.labels.push_back(st.get<std::string>());
  }
  const int n = s.size();
  const auto& rows = field(c, "transition", where);
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw ParseError("'transition' must have one row per state in " + where);
  s.transition.resize(n, n);
  for (int u = 0; u < n; ++u) {
    const auto& row = rows[static_cast<std::size_t>(u)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ParseError("transition row " + std::to_string(u) + " has wrong length in " + where);
    for (int v = 0; v < n; ++v) s.transition(u, v) = as_double(row[static_cast<std::size_t>(v)], where);
  }
  const auto& cost = field(c, "move_cost", where);
  if (!cost.is_array() || static_cast<int>(cost.size()) != n)
    throw ParseError("'move_cost' must have one entry per state in " + where);
  s.move_cost.resize(n);
  for (int u = 0; u < n; ++u) s.move_cost(u) = as_double(cost[static_cast<std::size_t>(u)], where);
  s.start = state_ref(s, field(c, "start", where), where);
  s.target = state_ref(s, field(c, "target", where), where);
  return s;
}

void append_matrix(std::ostringstream& os, const Eigen::MatrixXd& m, const char* indent) {
  os << "[\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << indent << "  [";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ", ";
      os << number(m(r, c));
    }
    os << "]" << (r + 1 < m.rows() ? ",\n" : "\n");
  }
  os << indent << "]";
}

}  // namespace

MetricInstance parse_instance_unchecked(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be a JSON object");

  MetricInstance m;
  const auto& chains = field(doc, "chains", "instance");
  if (!chains.is_array()) throw ParseError("'chains' must be an array");
  for (std::size_t i = 0; i < chains.size(); ++i)
    m.chains.push_back(parse_chain(chains[i], "chain " + std::to_string(i)));

  const auto& dist = field(doc, "distances", "instance");
  const int n = m.chain_count() + 1;
  if (!dist.is_array() || static_cast<int>(dist.size()) != n)
    throw ParseError("'distances' must be a square matrix over root plus chains");
  m.distances.resize(n, n);
  for (int a = 0; a < n; ++a) {
    const auto& row = dist[static_cast<std::size_t>(a)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ParseError("distance row " + std::to_string(a) + " has wrong length");
    for (int b = 0; b < n; ++b) m.distances(a, b) = as_double(row[static_cast<std::size_t>(b)], "distances");
  }

  const auto& k = field(doc, "reward_target", "instance");
  if (!k.is_number_integer()) throw ParseError("'reward_target' must be an integer");
  m.reward_target = k.get<int>();

  if (doc.contains("chain_positions")) {
    const auto& pos = doc.at("chain_positions");
    if (!pos.is_array() || static_cast<int>(pos.size()) != m.chain_count())
      throw ParseError("'chain_positions' must have one entry per chain");
    for (int i = 0; i < m.chain_count(); ++i)
      m.chain_positions.push_back(state_ref(m.chains[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(i)],
                                            "chain_positions"));
  }
  if (doc.contains("available")) {
    const auto& av = doc.at("available");
    if (!av.is_array() || static_cast<int>(av.size()) != m.chain_count())
      throw ParseError("'available' must have one entry per chain");
    for (const auto& a : av) {
      if (!a.is_boolean()) throw ParseError("'available' entries must be booleans");
      m.available.push_back(a.get<bool>());
    }
  }
  m.reset_positions();
  return m;
}

MetricInstance parse_instance_text(std::string_view text) {
  MetricInstance m = parse_instance_unchecked(text);
  ValidationReport report = validate_instance(m);
  if (!report.ok()) throw InstanceValidationError(std::move(report));
  return m;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

MetricInstance parse_instance(const std::filesystem::path& path) {
  return parse_instance_text(read_text_file(path));
}

std::string serialize_instance(const MetricInstance& m) {
  std::ostringstream os;
  os << "{\n  \"chains\": [";
  for (int i = 0; i < m.chain_count(); ++i) {
    const auto& s = m.chains[static_cast<std::size_t>(i)];
    os << (i ? ",\n" : "\n") << "    {\n      \"states\": [";
    for (int u = 0; u < s.size(); ++u) os << (u ? ", " : "") << json(s.label(u)).dump();
    os << "],\n      \"transition\": ";
    append_matrix(os, s.transition, "      ");
    os << ",\n      \"move_cost\": [";
    for (int u = 0; u < s.size(); ++u) os << (u ? ", " : "") << number(s.move_cost(u));
    os << "],\n      \"start\": " << json(s.label(s.start)).dump() << ",\n      \"target\": "
       << json(s.label(s.target)).dump() << "\n    }";
  }
  os << (m.chain_count() ? "\n  ],\n" : "],\n");
  os << "  \"distances\": ";
  append_matrix(os, m.distances, "  ");
  os << ",\n  \"reward_target\": " << m.reward_target;

  bool default_positions = true;
  for (int i = 0; i < static_cast<int>(m.chain_positions.size()); ++i)
    if (m.chain_positions[static_cast<std::size_t>(i)] != m.chains[static_cast<std::size_t>(i)].start)
      default_positions = false;
  if (!default_positions) {
    os << ",\n  \"chain_positions\": [";
    for (int i = 0; i < m.chain_count(); ++i) {
      const auto& s = m.chains[static_cast<std::size_t>(i)];
      os << (i ? ", " : "") << json(s.label(m.chain_positions[static_cast<std::size_t>(i)])).dump();
    }
    os << "]";
  }
  bool all_available = true;
  for (bool a : m.available) all_available = all_available && a;
  if (!all_available) {
    os << ",\n  \"available\": [";
    for (std::size_t i = 0; i < m.available.size(); ++i) os << (i ? ", " : "") << (m.available[i] ? "true" : "false");
    os << "]";
  }
  os << "\n}\n";
  return os.str();
}

void write_instance(const MetricInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_instance(instance);
}

}  // namespace mg
