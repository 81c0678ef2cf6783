#include <charconv>
#include <sstream>

#include "dyadic/mesh.hpp"
#include "json.hpp"

namespace dyadic {

namespace {

using nlohmann::json;

json domain_json(const Domain& d) {
  json j;
  j["kind"] = d.is_torus() ? "torus" : "line";
  j["L"] = d.finest;
  if (!d.is_torus()) j["M"] = d.coarsest;
  return j;
}

Domain domain_from(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int level = j.at("L").get<int>();
  if (kind == "torus") return Domain::torus(level);
  if (kind == "line") return Domain::line(j.at("M").get<int>(), level);
  throw DomainError("unknown domain kind: " + kind);
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed JSON: ") + e.what());
  }
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_json(const MeshFunction1D& f) {
  json j;
  j["domain"] = domain_json(f.domain);
  j["values"] = f.values;
  return j.dump();
}

std::string to_json(const MeshFunction2D& f) {
  json j;
  j["domains"] = json::array({domain_json(f.first), domain_json(f.second)});
  json rows = json::array();
  for (std::size_t i = 0; i < f.n1(); ++i) {
    rows.push_back(std::vector<double>(f.values.begin() + static_cast<long>(i * f.n2()),
                                       f.values.begin() + static_cast<long>((i + 1) * f.n2())));
  }
  j["values"] = rows;
  return j.dump();
}

MeshFunction1D function_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    return MeshFunction1D::make(domain_from(j.at("domain")), j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad mesh function: ") + e.what());
  }
}

MeshFunction2D function2d_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    const json& ds = j.at("domains");
    if (ds.size() != 2) throw DomainError("expected two domains");
    const Domain a = domain_from(ds[0]);
    const Domain b = domain_from(ds[1]);
    std::vector<double> values;
    for (const json& row : j.at("values")) {
      const auto r = row.get<std::vector<double>>();
      if (r.size() != b.cells()) throw DomainError("2D row has the wrong length");
      values.insert(values.end(), r.begin(), r.end());
    }
    return MeshFunction2D::make(a, b, std::move(values));
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad 2D mesh function: ") + e.what());
  }
}

std::string to_csv(const MeshFunction1D& f) {
  std::ostringstream os;
  os << "# dyadic mesh function kind=" << (f.domain.is_torus() ? "torus" : "line") << " L=" << f.domain.finest;
  if (!f.domain.is_torus()) os << " M=" << f.domain.coarsest;
  os << "\nvalue\n";
  for (double v : f.values) os << shortest(v) << '\n';
  return os.str();
}

MeshFunction1D function_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("# dyadic mesh function", 0) != 0) {
    throw DomainError("CSV must start with the '# dyadic mesh function' header comment");
  }
  std::string kind;
  int level = -1;
  int window = -1;
  std::istringstream hs(line.substr(22));
  std::string tok;
  while (hs >> tok) {
    if (tok.rfind("kind=", 0) == 0) kind = tok.substr(5);
    if (tok.rfind("L=", 0) == 0) level = std::stoi(tok.substr(2));
    if (tok.rfind("M=", 0) == 0) window = std::stoi(tok.substr(2));
  }
  Domain dom;
  if (kind == "torus") {
    dom = Domain::torus(level);
  } else if (kind == "line") {
    dom = Domain::line(window, level);
  } else {
    throw DomainError("CSV header lacks a valid kind");
  }
  if (!std::getline(is, line) || line != "value") throw DomainError("CSV column header must be 'value'");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc() || res.ptr != line.data() + line.size()) throw DomainError("bad CSV value: " + line);
    values.push_back(v);
  }
  return MeshFunction1D::make(dom, std::move(values));
}

}  // namespace dyadic
