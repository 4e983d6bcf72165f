#include "menuprune/io/instance_json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace menuprune::io {

using nlohmann::json;

namespace {

json pair(const Eigen::Vector2d& v) { return json::array({v(0), v(1)}); }

Eigen::Vector2d to_pair(const json& a, const char* what) {
  if (!a.is_array() || a.size() != 2) throw std::invalid_argument(std::string("instance: '") + what + "' needs 2 numbers");
  return {a[0].get<double>(), a[1].get<double>()};
}

Eigen::Vector2d read_pair(const json& j, const char* key) { return to_pair(j.at(key), key); }

}  // namespace

elasticity::MarketParams InstanceSpec::market() const {
  elasticity::MarketParams m;
  m.eta = eta;
  m.z_ref = price_scale * z_check;
  m.p_ref = p_check;
  m.z_min = price_scale * z_lower;
  m.z_max = price_scale * z_upper;
  m.poset = poset;
  return m;
}

model::Instance InstanceSpec::build() const {
  if (!(price_scale > 0)) throw std::invalid_argument("instance: price_scale must be positive");
  auto inst = elasticity::build_instance(market(), rho_rect, p_bounds(0), p_bounds(1), price_scale * c2);
  if (reservation) {
    inst.reservation = *reservation;
    model::validate(inst);
  }
  return inst;
}

InstanceSpec table1() { return {}; }

json to_json(const InstanceSpec& s) {
  json poset = json::array();
  for (const auto& e : s.poset) poset.push_back({{"lower", e.lower}, {"upper", e.upper}, {"kappa", e.kappa}});
  json j = {
      {"eta", s.eta},
      {"p_check", s.p_check},
      {"z_check", pair(s.z_check)},
      {"c2", s.c2},
      {"p_bounds", pair(s.p_bounds)},
      {"z_bounds", json::array({pair({s.z_lower(0), s.z_upper(0)}), pair({s.z_lower(1), s.z_upper(1)})})},
      {"poset", poset},
      {"rho_rect", json::array({pair({s.rho_rect.min()(0), s.rho_rect.max()(0)}),
                                pair({s.rho_rect.min()(1), s.rho_rect.max()(1)})})},
      {"price_scale", s.price_scale},
  };
  if (s.reservation)
    j["reservation"] = {{"slope", pair(s.reservation->gradient)}, {"intercept", s.reservation->intercept}};
  else
    j["reservation"] = nullptr;
  return j;
}

InstanceSpec instance_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("instance: expected a JSON object");
  InstanceSpec s;
  s.eta = j.value("eta", s.eta);
  s.p_check = j.value("p_check", s.p_check);
  if (j.contains("z_check")) s.z_check = read_pair(j, "z_check");
  s.c2 = j.value("c2", s.c2);
  if (j.contains("p_bounds")) s.p_bounds = read_pair(j, "p_bounds");
  if (j.contains("z_bounds")) {
    const auto& zb = j.at("z_bounds");
    if (!zb.is_array() || zb.size() != 2) throw std::invalid_argument("instance: 'z_bounds' needs one pair per period");
    for (int k = 0; k < 2; ++k) {
      const auto b = to_pair(zb[static_cast<std::size_t>(k)], "z_bounds");
      s.z_lower(k) = b(0);
      s.z_upper(k) = b(1);
    }
  }
  if (j.contains("poset")) {
    for (const auto& e : j.at("poset"))
      s.poset.push_back({e.at("lower").get<int>(), e.at("upper").get<int>(), e.at("kappa").get<double>()});
  }
  if (j.contains("rho_rect")) {
    const auto& r = j.at("rho_rect");
    if (!r.is_array() || r.size() != 2) throw std::invalid_argument("instance: 'rho_rect' needs two intervals");
    const auto a = to_pair(r[0], "rho_rect");
    const auto b = to_pair(r[1], "rho_rect");
    s.rho_rect = Eigen::AlignedBox2d(Eigen::Vector2d(a(0), b(0)), Eigen::Vector2d(a(1), b(1)));
  }
  if (j.contains("reservation") && !j.at("reservation").is_null()) {
    geometry::Affine r;
    r.gradient = read_pair(j.at("reservation"), "slope");
    r.intercept = j.at("reservation").at("intercept").get<double>();
    s.reservation = r;
  }
  s.price_scale = j.value("price_scale", s.price_scale);
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot open", path, std::make_error_code(std::errc::no_such_file_or_directory));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

InstanceSpec load_instance(const std::filesystem::path& path) {
  return instance_from_json(json::parse(read_file(path)));
}

void save_instance(const std::filesystem::path& path, const InstanceSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(spec).dump(2) << '\n';
}

}  // namespace menuprune::io
