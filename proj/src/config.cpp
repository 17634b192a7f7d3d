#include "tcq/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"

namespace tcq {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"circuit",
       {"ic_A", "ic_uA", "c_F", "c_fF", "area_um2", "capacitance_fF_per_um2", "c_extra_F", "z0_ohm", "l0_H_per_m",
        "c0_F_per_m", "velocity_m_per_s", "renormalization", "renormalization_Hz"}},
      {"solver",
       {"backend", "charge_cutoff", "grid_points", "levels", "tolerance", "max_iterations", "max_subspace",
        "dense_threshold", "force_iterative", "seed", "memory_budget_bytes", "sampling_points", "f_eps_lo",
        "f_eps_hi"}},
      {"noise",
       {"a_eps", "a_beta", "t_line_K", "t_tl_K", "m_eps_H", "m_beta_H", "z_line_ohm", "x_qp", "delta_al_J",
        "delta_al_ueV", "f_ir_Hz", "f_uv_Hz", "gamma10_residual_Hz", "johnson"}},
      {"reflections", {"z_q_m", "parity_phase"}},
      {"io", {"output_dir", "cache_dir"}},
  };
  return s;
}

class reader {
 public:
  reader(const pt::ptree& tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

  const std::string* raw(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(section);
    if (!sec) return nullptr;
    auto v = sec->get_child_optional(pt::ptree::path_type(key, '\0'));
    return v ? &v->data() : nullptr;
  }
  bool has(const std::string& section, const std::string& key) const { return raw(section, key) != nullptr; }

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const {
    throw config_error(origin_ + ": [" + section + "] " + key + ": " + what);
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) const {
    std::string s = *raw(section, key);
    for (char& c : s)
      if (c == ',') c = ' ';
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) {
      double v = 0;
      auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || end != tok.data() + tok.size() || !std::isfinite(v))
        fail(section, key, "not a finite number: '" + tok + "'");
      out.push_back(v);
    }
    return out;
  }

  template <class T>
  void get(const std::string& section, const std::string& key, T& target, double scale = 1.0) const {
    if (!has(section, key)) return;
    auto v = numbers(section, key);
    if (v.size() != 1) fail(section, key, "expected one value");
    if constexpr (std::is_integral_v<T>) {
      if (v[0] != std::floor(v[0])) fail(section, key, "expected an integer");
      target = static_cast<T>(v[0]);
    } else {
      target = v[0] * scale;
    }
  }

  template <std::size_t N>
  bool get_array(const std::string& section, const std::string& key, std::array<double, N>& target,
                 double scale = 1.0) const {
    if (!has(section, key)) return false;
    auto v = numbers(section, key);
    if (v.size() != N) fail(section, key, "expected " + std::to_string(N) + " values");
    for (std::size_t i = 0; i < N; ++i) target[i] = v[i] * scale;
    return true;
  }

  bool get_bool(const std::string& section, const std::string& key, bool& target) const {
    if (!has(section, key)) return false;
    const std::string& v = *raw(section, key);
    if (v == "true" || v == "1" || v == "yes") {
      target = true;
    } else if (v == "false" || v == "0" || v == "no") {
      target = false;
    } else {
      fail(section, key, "expected true or false");
    }
    return true;
  }

  bool get_string(const std::string& section, const std::string& key, std::string& target) const {
    if (!has(section, key)) return false;
    target = *raw(section, key);
    return true;
  }

 private:
  const pt::ptree& tree_;
  std::string origin_;
};

void check_schema(std::string_view text, const pt::ptree& tree, const std::string& origin) {
  std::vector<std::string> bad;
  // the INI reader drops empty sections, so headers are checked on the raw text
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] != '[') continue;
    const auto e = line.find(']', b);
    const std::string name = line.substr(b + 1, e == std::string::npos ? std::string::npos : e - b - 1);
    if (!schema().count(name) && !tree.count(name)) bad.push_back("[" + name + "]");
  }
  for (const auto& [name, sec] : tree) {
    auto it = schema().find(name);
    if (it == schema().end()) {
      bad.push_back(sec.empty() ? name : "[" + name + "]");
      continue;
    }
    for (const auto& [key, _] : sec)
      if (!it->second.count(key)) bad.push_back("[" + name + "] " + key);
  }
  if (!bad.empty()) {
    std::string msg = origin + ": unknown keys:";
    for (const auto& b : bad) msg += " " + b;
    throw config_error(msg);
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class It>
std::string join(It first, It last) {
  std::string s;
  for (It i = first; i != last; ++i) s += (s.empty() ? "" : " ") + fmt(*i);
  return s;
}

}  // namespace

line_params run_config::line() const {
  line_params l;
  l.z0 = circuit.z0;
  l.l0 = circuit.l0;
  l.c0 = circuit.c0;
  return l;
}

void run_config::validate() const {
  circuit.validate();
  noise.validate();
  if (solver.levels < 2) throw config_error("solver levels must be at least 2");
  for (int n : solver.charge_cutoff)
    if (n < 1) throw config_error("charge cutoff must be at least 1");
  if (solver.grid_points < 8 || (solver.grid_points & (solver.grid_points - 1)))
    throw config_error("grid_points must be a power of two, at least 8");
  if (!(f_eps_lo < f_eps_hi)) throw config_error("f_eps_lo must be below f_eps_hi");
  if (!(t_tl >= 0)) throw config_error("t_tl must be non-negative");
  if (!(z_q > 0)) throw config_error("z_q must be positive");
}

run_config parse_config(std::string_view text, const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream is{std::string(text)};
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw config_error(origin + ": " + e.message() + " at line " + std::to_string(e.line()));
  }
  check_schema(text, tree, origin);
  reader r(tree, origin);
  run_config c;

  // circuit
  const char* cs = "circuit";
  if (r.has(cs, "ic_A") && r.has(cs, "ic_uA")) r.fail(cs, "ic_uA", "give either ic_A or ic_uA");
  r.get_array(cs, "ic_A", c.circuit.ic);
  r.get_array(cs, "ic_uA", c.circuit.ic, 1e-6);
  const int cap_forms = r.has(cs, "c_F") + r.has(cs, "c_fF") + r.has(cs, "area_um2");
  if (cap_forms > 1) r.fail(cs, "c_F", "give exactly one of c_F, c_fF, area_um2");
  if (r.has(cs, "capacitance_fF_per_um2") && !r.has(cs, "area_um2"))
    r.fail(cs, "capacitance_fF_per_um2", "only meaningful with area_um2");
  r.get_array(cs, "c_F", c.circuit.c_branch);
  r.get_array(cs, "c_fF", c.circuit.c_branch, 1e-15);
  std::array<double, 6> areas{};
  if (r.get_array(cs, "area_um2", areas)) {
    double specific = default_specific_capacitance;
    r.get(cs, "capacitance_fF_per_um2", specific, 1e-3);
    for (int i = 0; i < 6; ++i) c.circuit.c_branch[i] = specific * areas[i] * 1e-12;
  }
  std::array<double, 16> extra{};
  if (r.get_array(cs, "c_extra_F", extra))
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) c.circuit.c_extra(i, j) = extra[4 * i + j];
  const bool explicit_lc = r.has(cs, "l0_H_per_m") || r.has(cs, "c0_F_per_m");
  if (explicit_lc && r.has(cs, "velocity_m_per_s"))
    r.fail(cs, "velocity_m_per_s", "give either velocity or l0 and c0");
  const double v_old = c.circuit.phase_velocity();
  r.get(cs, "z0_ohm", c.circuit.z0);
  if (explicit_lc) {
    if (!r.has(cs, "l0_H_per_m") || !r.has(cs, "c0_F_per_m")) r.fail(cs, "l0_H_per_m", "l0 and c0 go together");
    r.get(cs, "l0_H_per_m", c.circuit.l0);
    r.get(cs, "c0_F_per_m", c.circuit.c0);
  } else {
    double v = v_old;
    r.get(cs, "velocity_m_per_s", v);
    c.circuit.l0 = c.circuit.z0 / v;
    c.circuit.c0 = 1.0 / (c.circuit.z0 * v);
  }
  r.get_bool(cs, "renormalization", c.circuit.renormalization);
  r.get(cs, "renormalization_Hz", c.circuit.renormalization_omega, 2.0 * constants::pi);

  // solver
  const char* ss = "solver";
  std::string kind;
  if (r.get_string(ss, "backend", kind)) {
    if (kind == "charge") {
      c.solver.kind = backend::charge;
    } else if (kind == "grid") {
      c.solver.kind = backend::phase_grid;
    } else {
      r.fail(ss, "backend", "expected charge or grid");
    }
  }
  if (r.has(ss, "charge_cutoff")) {
    auto v = r.numbers(ss, "charge_cutoff");
    if (v.size() != 1 && v.size() != 4) r.fail(ss, "charge_cutoff", "expected one or four integers");
    for (int i = 0; i < 4; ++i) {
      const double n = v[v.size() == 1 ? 0 : i];
      if (n != std::floor(n)) r.fail(ss, "charge_cutoff", "expected integers");
      c.solver.charge_cutoff[i] = static_cast<int>(n);
    }
  }
  r.get(ss, "grid_points", c.solver.grid_points);
  r.get(ss, "levels", c.solver.levels);
  r.get(ss, "tolerance", c.solver.eig.tolerance);
  r.get(ss, "max_iterations", c.solver.eig.max_iterations);
  r.get(ss, "max_subspace", c.solver.eig.max_subspace);
  r.get(ss, "dense_threshold", c.solver.eig.dense_threshold);
  r.get_bool(ss, "force_iterative", c.solver.eig.force_iterative);
  r.get(ss, "seed", c.solver.eig.seed);
  r.get(ss, "memory_budget_bytes", c.solver.memory_budget_bytes);
  r.get(ss, "sampling_points", c.solver.sampling_points);
  r.get(ss, "f_eps_lo", c.f_eps_lo);
  r.get(ss, "f_eps_hi", c.f_eps_hi);

  // noise
  const char* ns = "noise";
  if (r.has(ns, "delta_al_J") && r.has(ns, "delta_al_ueV")) r.fail(ns, "delta_al_ueV", "give one of delta_al_J, delta_al_ueV");
  r.get(ns, "a_eps", c.noise.a_eps);
  r.get(ns, "a_beta", c.noise.a_beta);
  r.get(ns, "t_line_K", c.noise.t_line);
  r.get(ns, "t_tl_K", c.t_tl);
  r.get(ns, "m_eps_H", c.noise.m_eps);
  r.get(ns, "m_beta_H", c.noise.m_beta);
  r.get(ns, "z_line_ohm", c.noise.z_line);
  r.get(ns, "x_qp", c.noise.x_qp);
  r.get(ns, "delta_al_J", c.noise.delta_al);
  r.get(ns, "delta_al_ueV", c.noise.delta_al, 1e-6 * constants::e);
  r.get(ns, "f_ir_Hz", c.noise.f_ir);
  r.get(ns, "f_uv_Hz", c.noise.f_uv);
  r.get(ns, "gamma10_residual_Hz", c.noise.gamma10_residual, 2.0 * constants::pi);
  std::string j;
  if (r.get_string(ns, "johnson", j)) {
    if (j == "quantum") {
      c.noise.johnson = johnson_convention::quantum;
    } else if (j == "classical") {
      c.noise.johnson = johnson_convention::classical;
    } else {
      r.fail(ns, "johnson", "expected quantum or classical");
    }
  }

  r.get("reflections", "z_q_m", c.z_q);
  r.get("reflections", "parity_phase", c.parity_phase);

  r.get_string("io", "output_dir", c.output_dir);
  r.get_string("io", "cache_dir", c.cache_dir);
  if (const char* e = std::getenv("TCQ_OUTPUT_DIR")) c.output_dir = e;
  if (const char* e = std::getenv("TCQ_CACHE_DIR")) c.cache_dir = e;

  c.validate();
  return c;
}

run_config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string write_config(const run_config& c) {
  std::ostringstream o;
  const auto& p = c.circuit;
  o << "[circuit]\n";
  o << "ic_A = " << join(p.ic.begin(), p.ic.end()) << "\n";
  o << "c_F = " << join(p.c_branch.begin(), p.c_branch.end()) << "\n";
  if (!p.c_extra.isZero(0.0)) {
    std::array<double, 16> e{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) e[4 * i + j] = p.c_extra(i, j);
    o << "c_extra_F = " << join(e.begin(), e.end()) << "\n";
  }
  o << "z0_ohm = " << fmt(p.z0) << "\n";
  o << "l0_H_per_m = " << fmt(p.l0) << "\n";
  o << "c0_F_per_m = " << fmt(p.c0) << "\n";
  o << "renormalization = " << (p.renormalization ? "true" : "false") << "\n";
  o << "renormalization_Hz = " << fmt(p.renormalization_omega / (2.0 * constants::pi)) << "\n";

  const auto& s = c.solver;
  o << "\n[solver]\n";
  o << "backend = " << (s.kind == backend::charge ? "charge" : "grid") << "\n";
  o << "charge_cutoff = " << s.charge_cutoff[0] << " " << s.charge_cutoff[1] << " " << s.charge_cutoff[2] << " "
    << s.charge_cutoff[3] << "\n";
  o << "grid_points = " << s.grid_points << "\n";
  o << "levels = " << s.levels << "\n";
  o << "tolerance = " << fmt(s.eig.tolerance) << "\n";
  o << "max_iterations = " << s.eig.max_iterations << "\n";
  o << "max_subspace = " << s.eig.max_subspace << "\n";
  o << "dense_threshold = " << s.eig.dense_threshold << "\n";
  o << "force_iterative = " << (s.eig.force_iterative ? "true" : "false") << "\n";
  o << "seed = " << s.eig.seed << "\n";
  o << "memory_budget_bytes = " << fmt(s.memory_budget_bytes) << "\n";
  o << "sampling_points = " << s.sampling_points << "\n";
  o << "f_eps_lo = " << fmt(c.f_eps_lo) << "\n";
  o << "f_eps_hi = " << fmt(c.f_eps_hi) << "\n";

  const auto& n = c.noise;
  o << "\n[noise]\n";
  o << "a_eps = " << fmt(n.a_eps) << "\n";
  o << "a_beta = " << fmt(n.a_beta) << "\n";
  o << "t_line_K = " << fmt(n.t_line) << "\n";
  o << "t_tl_K = " << fmt(c.t_tl) << "\n";
  o << "m_eps_H = " << fmt(n.m_eps) << "\n";
  o << "m_beta_H = " << fmt(n.m_beta) << "\n";
  o << "z_line_ohm = " << fmt(n.z_line) << "\n";
  o << "x_qp = " << fmt(n.x_qp) << "\n";
  o << "delta_al_J = " << fmt(n.delta_al) << "\n";
  o << "f_ir_Hz = " << fmt(n.f_ir) << "\n";
  o << "f_uv_Hz = " << fmt(n.f_uv) << "\n";
  o << "gamma10_residual_Hz = " << fmt(n.gamma10_residual / (2.0 * constants::pi)) << "\n";
  o << "johnson = " << (n.johnson == johnson_convention::quantum ? "quantum" : "classical") << "\n";

  o << "\n[reflections]\n";
  o << "z_q_m = " << fmt(c.z_q) << "\n";
  o << "parity_phase = " << fmt(c.parity_phase) << "\n";

  o << "\n[io]\n";
  o << "output_dir = " << c.output_dir << "\n";
  o << "cache_dir = " << c.cache_dir << "\n";
  return o.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw error("SHA-256 digest failed");
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return o.str();
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string config_hash(const run_config& c) {
  // paths do not change results
  run_config k = c;
  k.output_dir.clear();
  k.cache_dir.clear();
  return sha256_hex(write_config(k));
}

}  // namespace tcq
