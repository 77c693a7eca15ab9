#include "mdlab/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <type_traits>

#include "mdlab/errors.hpp"

namespace mdlab {

namespace {

std::string format_double(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

struct Key {
  const char* name;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

template <class T>
Key field(const char* name, T Config::*member) {
  Key k;
  k.name = name;
  k.set = [name, member](Config& c, const std::string& value) {
    T v{};
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) {
      throw ValidationError("bad value '" + value + "' for setting " + name);
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!(v > 0.0)) throw ValidationError(std::string("setting ") + name + " must be positive");
    }
    c.*member = v;
  };
  k.get = [member](const Config& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_double(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  return k;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      field("tol", &Config::tol),
      field("seed", &Config::seed),
      field("d", &Config::d),
      field("radius", &Config::radius),
      field("window_radius", &Config::window_radius),
      field("max_ball_size", &Config::max_ball_size),
      field("length_horizon", &Config::length_horizon),
      field("schur_max_iterations", &Config::schur_max_iterations),
      field("exhaustive_cap", &Config::exhaustive_cap),
      field("samples", &Config::samples),
      field("cert_tol", &Config::cert_tol),
      field("fourier_nodes", &Config::fourier_nodes),
      field("family_radius", &Config::family_radius),
      field("family_rank", &Config::family_rank),
      field("cr_step", &Config::cr_step),
  };
  return k;
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  for (const auto& k : keys()) {
    if (key == k.name) return k.set(*this, value);
  }
  throw ValidationError("unknown setting '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(k.name, k.get(*this));
  return out;
}

void Config::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (v.is_string()) {
      set(key, v.get<std::string>());
    } else if (v.is_number_integer() || v.is_number_unsigned()) {
      set(key, v.dump());
    } else if (v.is_number_float()) {
      set(key, format_double(v.get<double>()));
    } else {
      throw ValidationError("config value for " + key + " must be a number");
    }
  }
}

void Config::apply_env() {
  for (const auto& k : keys()) {
    std::string env = "MDLAB_";
    for (const char* c = k.name; *c; ++c) env.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(*c))));
    if (const char* v = std::getenv(env.c_str())) set(k.name, v);
  }
}

std::string Config::header() const {
  std::string s;
  for (const auto& [k, v] : entries()) s += "# " + k + " = " + v + "\n";
  return s;
}

GroupLimits Config::limits() const {
  GroupLimits l;
  l.max_ball_size = max_ball_size;
  l.length_horizon = length_horizon;
  return l;
}

BracketOptions Config::bracket_options() const {
  BracketOptions o;
  o.radius = radius;
  o.schur.tol = tol;
  o.schur.seed = seed;
  o.schur.max_iterations = static_cast<int>(schur_max_iterations);
  o.verify.exhaustive_cap = exhaustive_cap;
  o.verify.samples = samples;
  o.verify.seed = seed;
  o.tol = tol;
  o.cert_tol = cert_tol;
  o.fourier_nodes = fourier_nodes;
  return o;
}

}  // namespace mdlab
