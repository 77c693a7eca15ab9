#include "mdlab/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "mdlab/errors.hpp"
#include "mdlab/family.hpp"

namespace mdlab {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ValidationError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ValidationError("cannot rename into " + path + ": " + ec.message());
  }
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string format_complex(cd z) {
  std::string s = format_number(z.real());
  if (z.imag() == 0.0) return s;
  if (!(z.imag() < 0) && !std::signbit(z.imag())) s += '+';
  return s + format_number(z.imag()) + "i";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

// --------------------------------------------------------------- matrices

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_real(const std::string& s, const std::string& whole) {
  double v = 0.0;
  const char* b = s.data();
  if (!s.empty() && s[0] == '+') ++b;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || b == s.data() + s.size()) {
    throw ValidationError("bad matrix entry '" + whole + "'");
  }
  return v;
}

cd parse_entry(const std::string& raw) {
  std::string s;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.empty()) throw ValidationError("empty matrix entry");
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, raw), 0.0};
  s.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  auto imag_of = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t, raw);
  };
  if (cut == std::string::npos) return {0.0, imag_of(s)};
  return {parse_real(s.substr(0, cut), raw), imag_of(s.substr(cut))};
}

}  // namespace

Eigen::MatrixXcd parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<cd>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<cd> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = t.find(',', start);
      row.push_back(parse_entry(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ValidationError("matrix rows have different lengths");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("matrix file holds no rows");
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

namespace {

constexpr char kMagic[] = "SCHR1";
constexpr std::size_t kMagicLen = 5;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32(std::string& s, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xFFU));
}

double read_f64(const unsigned char* p) {
  std::uint64_t u = 0;
  for (int k = 7; k >= 0; --k) u = (u << 8) | p[k];
  return std::bit_cast<double>(u);
}

void put_f64(std::string& s, double x) {
  const auto u = std::bit_cast<std::uint64_t>(x);
  for (int k = 0; k < 8; ++k) s.push_back(static_cast<char>((u >> (8 * k)) & 0xFFU));
}

}  // namespace

Eigen::MatrixXcd parse_matrix_binary(const std::string& bytes) {
  if (bytes.size() < kMagicLen + 8 || bytes.compare(0, kMagicLen, kMagic) != 0) {
    throw ValidationError("binary matrix lacks the SCHR1 header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + kMagicLen;
  const std::uint32_t rows = read_u32(p);
  const std::uint32_t cols = read_u32(p + 4);
  const std::uint64_t need = kMagicLen + 8 + 16ULL * rows * cols;
  if (rows == 0 || cols == 0 || bytes.size() != need) {
    throw ValidationError("binary matrix size does not match its header");
  }
  Eigen::MatrixXcd m(rows, cols);
  const unsigned char* q = p + 8;
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j, q += 16) m(i, j) = cd(read_f64(q), read_f64(q + 8));
  }
  return m;
}

Eigen::MatrixXcd read_matrix(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.compare(0, kMagicLen, kMagic) == 0) return parse_matrix_binary(bytes);
  return parse_matrix_csv(bytes);
}

std::string matrix_csv(const Eigen::MatrixXcd& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) s += ',';
      s += format_complex(m(i, j));
    }
    s += '\n';
  }
  return s;
}

std::string matrix_binary(const Eigen::MatrixXcd& m) {
  std::string s(kMagic, kMagicLen);
  put_u32(s, static_cast<std::uint32_t>(m.rows()));
  put_u32(s, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_f64(s, m(i, j).real());
      put_f64(s, m(i, j).imag());
    }
  }
  return s;
}

// --------------------------------------------------------------- groups

namespace {

std::size_t positive(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<std::int64_t>() < 1) {
    throw ValidationError(std::string("group JSON needs a positive integer \"") + key + "\"");
  }
  return j[key].get<std::size_t>();
}

cd complex_from_json(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ValidationError("complex value must be a number or [re, im]");
}

}  // namespace

GroupPtr group_from_json(const json& j, GroupLimits limits) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ValidationError("group JSON needs a \"kind\" string");
  }
  const std::string kind = j["kind"];
  if (kind == "free") return make_free_group(positive(j, "rank"), limits);
  if (kind == "zn") return make_zn(positive(j, "n"), limits);
  if (kind == "finite") {
    if (j.contains("table")) {
      if (!j["table"].is_array()) throw ValidationError("finite group table must be an array");
      std::vector<std::vector<std::size_t>> table;
      for (const auto& row : j["table"]) {
        if (!row.is_array()) throw ValidationError("finite group table rows must be arrays");
        std::vector<std::size_t> r;
        for (const auto& x : row) {
          if (!x.is_number_integer() || x.get<std::int64_t>() < 0) {
            throw ValidationError("finite group table entries must be nonnegative integers");
          }
          r.push_back(x.get<std::size_t>());
        }
        table.push_back(std::move(r));
      }
      return make_finite_group(std::move(table), std::nullopt, limits);
    }
    return make_cyclic_group(positive(j, "n"), limits);
  }
  if (kind == "sl2z") return make_sl2z(limits);
  if (kind == "sl2z_semidirect") return make_sl2z_semidirect(limits);
  throw ValidationError("unknown group kind '" + kind + "'");
}

json group_to_json(const Group& g) {
  switch (g.kind()) {
    case GroupKind::Free:
      return {{"kind", "free"}, {"rank", g.generators().size() / 2}};
    case GroupKind::Zn:
      return {{"kind", "zn"}, {"n", g.identity().data.size()}};
    case GroupKind::Finite: {
      const std::size_t n = *g.order();
      json table = json::array();
      for (std::size_t a = 0; a < n; ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < n; ++b) {
          row.push_back(g.multiply(Element{GroupKind::Finite, {static_cast<std::int64_t>(a)}},
                                   Element{GroupKind::Finite, {static_cast<std::int64_t>(b)}})
                            .data[0]);
        }
        table.push_back(std::move(row));
      }
      return {{"kind", "finite"}, {"table", std::move(table)}};
    }
    case GroupKind::SL2Z:
      return {{"kind", "sl2z"}};
    case GroupKind::SL2ZSemidirect:
      return {{"kind", "sl2z_semidirect"}};
  }
  throw ValidationError("unknown group kind");
}

Element element_from_json(const json& j, const Group& g) {
  if (j.is_string()) return g.parse(j.get<std::string>());
  if (j.is_array()) {
    Element e{g.kind(), {}};
    for (const auto& x : j) {
      if (!x.is_number_integer()) throw ValidationError("element arrays hold integers");
      e.data.push_back(x.get<std::int64_t>());
    }
    if (g.kind() == GroupKind::Free) {
      Element r = g.identity();
      for (auto x : e.data) {
        const Element letter{GroupKind::Free, {x}};
        g.validate(letter);
        r = g.multiply(r, letter);
      }
      return r;
    }
    g.validate(e);
    return e;
  }
  throw ValidationError("element must be a string or an integer array");
}

// --------------------------------------------------------------- multipliers

Multiplier multiplier_from_json(const json& j, const GroupPtr& g) {
  if (!j.is_object()) throw ValidationError("multiplier JSON must be an object");
  const std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "";
  auto name = [&](const std::string& fallback) { return id.empty() ? fallback : id; };
  if (j.contains("support")) {
    if (!j["support"].is_array()) throw ValidationError("\"support\" must be an array");
    std::vector<std::pair<Element, cd>> values;
    for (const auto& entry : j["support"]) {
      if (!entry.is_array() || entry.size() != 3 || !entry[1].is_number() || !entry[2].is_number()) {
        throw ValidationError("support entries are [elem, re, im]");
      }
      values.emplace_back(element_from_json(entry[0], *g), cd(entry[1].get<double>(), entry[2].get<double>()));
    }
    return Multiplier::finite(g, std::move(values), name("finite"));
  }
  if (j.contains("radial")) {
    const json& r = j["radial"];
    if (!r.is_object() || !r.contains("coeffs_by_length") || !r["coeffs_by_length"].is_array()) {
      throw ValidationError("\"radial\" needs a \"coeffs_by_length\" array");
    }
    std::vector<cd> coeffs;
    for (const auto& c : r["coeffs_by_length"]) coeffs.push_back(complex_from_json(c));
    return Multiplier::radial(g, std::move(coeffs), name("radial"));
  }
  if (j.contains("constant")) return Multiplier::constant(g, complex_from_json(j["constant"]), name("constant"));
  if (j.contains("fejer")) {
    const json& f = j["fejer"];
    if (!f.is_object() || !f.contains("N") || !f.contains("r") || !f["N"].is_number_integer() ||
        !f["r"].is_number() || f["N"].get<std::int64_t>() < 0) {
      throw ValidationError("\"fejer\" needs integer N >= 0 and number r");
    }
    FejerParams p;
    p.N = f["N"].get<std::size_t>();
    p.r = f["r"].get<double>();
    const Multiplier m = fejer_multiplier(p, g);
    return id.empty() ? m : m.with_id(id);
  }
  if (j.contains("folner")) {
    const json& f = j["folner"];
    if (!f.is_object() || !f.contains("k") || !f["k"].is_number_integer() || f["k"].get<std::int64_t>() < 0) {
      throw ValidationError("\"folner\" needs an integer k >= 0");
    }
    const Multiplier m = folner_approximant(g, f["k"].get<std::size_t>());
    return id.empty() ? m : m.with_id(id);
  }
  throw ValidationError("multiplier JSON needs one of support, radial, constant, fejer, folner");
}

json multiplier_to_json(const Multiplier& phi) {
  json j;
  j["id"] = phi.id();
  if (auto c = phi.constant_value()) {
    j["constant"] = {c->real(), c->imag()};
  } else if (const auto* coeffs = phi.radial_coefficients()) {
    json arr = json::array();
    for (cd c : *coeffs) arr.push_back({c.real(), c.imag()});
    j["radial"] = {{"coeffs_by_length", std::move(arr)}};
  } else if (phi.support_kind() == SupportKind::Finite) {
    json arr = json::array();
    for (const auto& [t, c] : phi.support()) arr.push_back({phi.group()->to_string(t), c.real(), c.imag()});
    j["support"] = std::move(arr);
  } else {
    throw ValidationError("multiplier " + phi.id() + " has no finite description");
  }
  return j;
}

// --------------------------------------------------------------- reports

std::string ball_csv(const Ball& b) {
  std::string s = "index,element,length\n";
  for (std::size_t i = 0; i < b.size(); ++i) {
    s += std::to_string(i) + "," + csv_field(b.group->to_string(b.elements[i])) + "," +
         std::to_string(b.lengths[i]) + "\n";
  }
  return s;
}

std::string bracket_csv(const std::vector<NormBracket>& rows) {
  std::string s = "phi_id,d,F_radius,lower,upper,lower_provenance,upper_provenance,flags\n";
  for (const auto& b : rows) {
    std::string flags = b.flag_string();
    if (b.empirical_upper) {
      flags += (flags.empty() ? "" : "|") + std::string("empirical_upper=") + format_number(*b.empirical_upper);
    }
    s += csv_field(b.phi_id) + "," + std::to_string(b.d) + "," + std::to_string(b.radius) + "," +
         format_number(b.lower) + "," + format_number(b.upper) + "," + csv_field(b.lower_provenance) + "," +
         csv_field(b.upper_provenance) + "," + csv_field(flags) + "\n";
  }
  return s;
}

std::string convergence_header(const ConvergenceReport& rep) {
  return "# C = " + format_number(rep.C) + "\n# limit_estimate = " + format_number(rep.limit_estimate) +
         "\n# monotone = " + (rep.monotone ? "true" : "false") + "\n# bounded = " +
         (rep.bounded ? "true" : "false") + "\n# verdict = " + (rep.success ? "SUCCESS" : "NO_SUCCESS") + "\n";
}

std::string convergence_csv(const ConvergenceReport& rep) {
  std::string s = "n,N,r,pointwise_residual,lower,upper,empirical_upper,flags\n";
  for (const auto& row : rep.rows) {
    const auto& b = row.bracket;
    s += std::to_string(row.n) + "," + std::to_string(row.N) + "," + format_number(row.r) + "," +
         format_number(row.residual) + "," + format_number(b.lower) + "," + format_number(b.upper) + "," +
         (b.empirical_upper ? format_number(*b.empirical_upper) : std::string("")) + "," +
         csv_field(b.flag_string()) + "\n";
  }
  return s;
}

json family_json(const FamilyRecord& r) {
  json j;
  j["z"] = {r.z.real(), r.z.imag()};
  j["R"] = r.radius;
  j["unitarity_residual"] = r.unitarity_residual;
  j["coefficient_residual"] = r.coefficient_residual;
  j["cr_residual"] = r.cr_residual;
  j["empirical_bound"] = r.empirical_bound;
  j["bound_kind"] = "empirical";
  return j;
}

}  // namespace mdlab
