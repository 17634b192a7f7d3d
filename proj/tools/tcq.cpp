#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "tcq/calibration.hpp"
#include "tcq/config.hpp"
#include "tcq/constants.hpp"
#include "tcq/coupling.hpp"
#include "tcq/decoherence.hpp"
#include "tcq/errors.hpp"
#include "tcq/estimation.hpp"
#include "tcq/io.hpp"
#include "tcq/matrix_elements.hpp"
#include "tcq/reflections.hpp"
#include "tcq/spectrum.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tcq;

namespace {

constexpr double two_pi = 2.0 * constants::pi;

struct global_opts {
  std::string config_path;
  std::string out;
  int jobs = 1;
  bool no_cache = false;
};

struct context {
  run_config cfg;
  std::string hash;
  global_opts g;
};

context make_context(const global_opts& g) {
  context c;
  c.g = g;
  c.cfg = g.config_path.empty() ? run_config{} : load_config(g.config_path);
  if (g.config_path.empty()) {
    if (const char* e = std::getenv("TCQ_OUTPUT_DIR")) c.cfg.output_dir = e;
    if (const char* e = std::getenv("TCQ_CACHE_DIR")) c.cfg.cache_dir = e;
  }
  c.hash = config_hash(c.cfg);
  return c;
}

json provenance(const context& c, const std::string& command, const std::string& input = {}) {
  json p;
  p["command"] = command;
  p["version"] = toolkit_version;
  p["config_sha256"] = c.hash;
  if (!input.empty()) p["input_sha256"] = file_sha256(input);
  return p;
}

void emit(const context& c, const std::string& text) {
  if (c.g.out.empty() || c.g.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  fs::path p(c.g.out);
  if (p.is_relative() && c.cfg.output_dir != ".") p = fs::path(c.cfg.output_dir) / p;
  write_atomic(p, text);
}

std::vector<double> f_beta_range(double lo, double hi, double step) {
  if (!(step > 0)) throw config_error("f_beta step must be positive");
  if (hi - lo > 1.0) throw config_error("f_beta range must lie within one period");
  std::vector<double> out;
  if (hi < lo) return out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12);
  return out;
}

template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
  };
  if (workers == 1) {
    run();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
}

// per-point results keyed by (config hash, kind, f_beta)
class point_cache {
 public:
  point_cache(const context& c, std::string kind)
      : enabled_(!c.g.no_cache), dir_(fs::path(c.cfg.cache_dir) / c.hash), kind_(std::move(kind)) {}

  template <class F>
  json get(double f_beta, F&& compute) {
    const fs::path file = dir_ / (kind_ + "_" + format_number(f_beta) + ".json");
    if (enabled_ && fs::exists(file)) {
      try {
        json j = json::parse(read_file(file));
        ++hits_;
        return j;
      } catch (const std::exception&) {
        // unreadable entries are recomputed
      }
    }
    json j = compute();
    ++computed_;
    if (enabled_) write_atomic(file, j.dump());
    return j;
  }

  int hits() const { return hits_; }
  int computed() const { return computed_; }

 private:
  bool enabled_;
  fs::path dir_;
  std::string kind_;
  std::atomic<int> hits_{0}, computed_{0};
};

std::mutex diag_mutex;

void diagnostic(const json& j) {
  std::lock_guard<std::mutex> lock(diag_mutex);
  std::cerr << j.dump() << "\n";
}

// evaluates every point, drops failures with a diagnostic
std::vector<json> sweep_points(const context& c, const std::string& kind, const std::vector<double>& fbs,
                               const std::function<json(double)>& compute) {
  point_cache cache(c, kind);
  std::vector<std::optional<json>> rows(fbs.size());
  parallel_for(fbs.size(), c.g.jobs, [&](std::size_t i) {
    try {
      rows[i] = cache.get(fbs[i], [&] { return compute(fbs[i]); });
    } catch (const error& e) {
      diagnostic({{"warning", "point failed"}, {"f_beta", fbs[i]}, {"message", e.what()}});
    }
  });
  diagnostic({{"cache_hits", cache.hits()}, {"computed", cache.computed()}});
  std::vector<json> out;
  for (auto& r : rows)
    if (r) out.push_back(std::move(*r));
  return out;
}

csv_table table_from(const std::vector<std::string>& header, const std::vector<json>& rows) {
  csv_table t;
  t.header = header;
  for (const auto& r : rows) {
    std::vector<double> v;
    for (const auto& h : header) v.push_back(r.at(h).get<double>());
    t.rows.push_back(std::move(v));
  }
  return t;
}

json symmetry_record(const run_config& cfg, double fb) {
  const auto sp = symmetry_point(cfg.circuit, fb, cfg.solver, cfg.f_eps_lo, cfg.f_eps_hi);
  matrix_element_options mo;
  mo.sin_half = false;
  mo.dh_df = false;
  mo.sampling_points = cfg.solver.sampling_points;
  const auto me = matrix_elements(cfg.circuit, sp.state, mo);
  const auto cr = coupling(me.gamma5_01, me.gamma5_diag_diff, sp.delta, cfg.line());
  json j;
  j["f_beta"] = fb;
  j["f_eps_sym"] = sp.f_eps;
  j["delta_Hz"] = sp.delta / two_pi;
  j["gamma1_Hz"] = cr.gamma1 / two_pi;
  j["alpha"] = cr.alpha;
  j["gamma5_01_abs"] = std::abs(me.gamma5_01);
  return j;
}

// ---- spectrum

int cmd_spectrum(const context& c, double fb, std::optional<double> fe, const std::string& format) {
  const auto& p = c.cfg.circuit;
  spectrum s;
  double f_eps = 0;
  if (fe) {
    f_eps = *fe;
    s = solve_spectrum(p, {fb, f_eps}, c.cfg.solver);
  } else {
    auto sp = symmetry_point(p, fb, c.cfg.solver, c.cfg.f_eps_lo, c.cfg.f_eps_hi);
    f_eps = sp.f_eps;
    s = std::move(sp.state);
  }
  matrix_element_options mo;
  mo.sampling_points = c.cfg.solver.sampling_points;
  const auto me = matrix_elements(p, s, mo);
  const double w10 = s.omega(1, 0);
  const auto cr = coupling(me.gamma5_01, me.gamma5_diag_diff, w10, c.cfg.line());

  std::vector<std::pair<std::string, double>> v;
  v.emplace_back("f_beta", fb);
  v.emplace_back("f_eps", f_eps);
  v.emplace_back("dim", static_cast<double>(s.basis.dim));
  for (Eigen::Index i = 1; i < s.energies.size(); ++i)
    v.emplace_back("level" + std::to_string(i) + "_Hz", s.omega(static_cast<int>(i), 0) / two_pi);
  v.emplace_back("delta_Hz", w10 / two_pi);
  v.emplace_back("gamma5_01_re", me.gamma5_01.real());
  v.emplace_back("gamma5_01_im", me.gamma5_01.imag());
  v.emplace_back("gamma5_01_abs", std::abs(me.gamma5_01));
  v.emplace_back("gamma5_diag_diff", me.gamma5_diag_diff);
  v.emplace_back("ratio_xz", cr.ratio_xz);
  for (int i = 0; i < 6; ++i) v.emplace_back("sin_half_01_abs_" + std::to_string(i + 1), std::abs(me.sin_half_01[i]));
  v.emplace_back("dh_dfeps_01_abs_J", std::abs(me.dh_dfeps_01));
  v.emplace_back("dh_dfbeta_01_abs_J", std::abs(me.dh_dfbeta_01));
  v.emplace_back("gamma1_Hz", cr.gamma1 / two_pi);
  v.emplace_back("alpha", cr.alpha);
  v.emplace_back("max_residual", s.residuals.maxCoeff());

  if (format == "csv") {
    csv_table t;
    t.rows.emplace_back();
    for (auto& [k, x] : v) {
      t.header.push_back(k);
      t.rows[0].push_back(x);
    }
    emit(c, format_csv(t));
    return 0;
  }
  json j;
  j["provenance"] = provenance(c, "spectrum");
  j["backend"] = s.basis.kind == backend::charge ? "charge" : "grid";
  for (auto& [k, x] : v) j[k] = x;
  emit(c, j.dump(2) + "\n");
  return 0;
}

// ---- sweep

int cmd_sweep(const context& c, double lo, double hi, double step) {
  const auto fbs = f_beta_range(lo, hi, step);
  const auto rows = sweep_points(c, "sym", fbs, [&](double fb) { return symmetry_record(c.cfg, fb); });
  emit(c, format_csv(table_from({"f_beta", "f_eps_sym", "delta_Hz", "gamma1_Hz", "alpha"}, rows)));
  return 0;
}

// ---- fits

std::vector<spectroscopy_sample> read_spectroscopy(const csv_table& t) {
  t.require({"f_beta", "f_eps", "freq_Hz"});
  const bool sig = std::find(t.header.begin(), t.header.end(), "sigma_Hz") != t.header.end();
  std::vector<spectroscopy_sample> out;
  for (const auto& r : t.rows) {
    spectroscopy_sample s;
    s.f_beta = r[t.column("f_beta")];
    s.f_eps = r[t.column("f_eps")];
    s.omega10 = two_pi * r[t.column("freq_Hz")];
    if (sig) s.uncertainty = two_pi * r[t.column("sigma_Hz")];
    if (!(s.omega10 > 0)) throw data_error("freq_Hz must be positive");
    out.push_back(s);
  }
  return out;
}

json ls_diagnostics(const ls_result& f) {
  json j;
  j["status"] = to_string(f.status);
  j["converged"] = f.converged();
  j["iterations"] = f.iterations;
  j["evaluations"] = f.evaluations;
  j["cost"] = f.cost;
  j["gradient_norm"] = f.gradient_norm;
  j["condition_number"] = f.condition_number;
  j["rank_deficient"] = f.rank_deficient;
  j["ill_conditioned"] = f.ill_conditioned;
  j["active_bounds"] = f.active;
  if (!f.message.empty()) j["message"] = f.message;
  return j;
}

int cmd_fit_spectroscopy(const context& c, const std::string& input, std::string model, const std::string& emit_cfg,
                         const std::vector<int>& fixed) {
  const auto samples = read_spectroscopy(read_csv(input));
  std::set<double> fbs;
  for (const auto& s : samples) fbs.insert(s.f_beta);
  if (model == "auto") model = fbs.size() == 1 ? "two-level" : "circuit";
  json j;
  j["provenance"] = provenance(c, "fit-spectroscopy", input);
  j["model"] = model;
  json res = json::array();
  if (model == "two-level") {
    if (!emit_cfg.empty()) throw config_error("--emit-config needs the circuit model");
    const auto f = fit_two_level(samples);
    j["parameters"] = {{"delta_Hz", f.delta / two_pi}, {"i_tls_A", f.i_tls}, {"f_eps_sym", f.f_sym}};
    j["uncertainties"] = {{"delta_Hz", f.delta_sigma / two_pi}, {"i_tls_A", f.i_tls_sigma}, {"f_eps_sym", f.f_sym_sigma}};
    j["rms_residual_Hz"] = f.rms_residual / two_pi;
    j["diagnostics"] = ls_diagnostics(f.fit);
    for (const auto& s : samples) {
      const double m = two_level_omega(f.delta, f.i_tls, f.f_sym, s.f_eps);
      res.push_back({{"f_beta", s.f_beta}, {"f_eps", s.f_eps}, {"freq_Hz", s.omega10 / two_pi},
                     {"model_Hz", m / two_pi}, {"residual_Hz", (s.omega10 - m) / two_pi}});
    }
  } else if (model == "circuit") {
    circuit_fit_options opt;
    opt.solver = c.cfg.solver;
    opt.solver.levels = std::max(opt.solver.levels, 2);
    for (int k : fixed) {
      if (k < 1 || k > 6) throw config_error("--fix takes junction numbers 1..6");
      opt.free[k - 1] = false;
    }
    const auto f = fit_circuit(c.cfg.circuit, samples, opt);
    json pars, sig;
    for (int i = 0; i < 6; ++i) {
      pars["ic" + std::to_string(i + 1) + "_A"] = f.params.ic[i];
      sig["ic" + std::to_string(i + 1) + "_A"] = f.ic_sigma[i];
    }
    j["parameters"] = pars;
    j["uncertainties"] = sig;
    j["rms_residual_Hz"] = f.rms_residual / two_pi;
    j["non_identifiable"] = f.non_identifiable;
    j["diagnostics"] = ls_diagnostics(f.fit);
    for (const auto& s : samples) {
      const double m = transition_frequency(f.params, {s.f_beta, s.f_eps}, opt.solver).omega10;
      res.push_back({{"f_beta", s.f_beta}, {"f_eps", s.f_eps}, {"freq_Hz", s.omega10 / two_pi},
                     {"model_Hz", m / two_pi}, {"residual_Hz", (s.omega10 - m) / two_pi}});
    }
    if (!emit_cfg.empty()) {
      run_config out = c.cfg;
      out.circuit = f.params;
      write_atomic(emit_cfg, write_config(out));
    }
  } else {
    throw config_error("--model must be auto, two-level or circuit");
  }
  j["residuals"] = res;
  emit(c, j.dump(2) + "\n");
  return 0;
}

int cmd_fit_transmission(const context& c, const std::string& input, bool amplitude_only, const std::string& curves) {
  const auto t = read_csv(input);
  t.require({"power_dbm", "freq_Hz", "re_t", "im_t"});
  const bool sig = std::find(t.header.begin(), t.header.end(), "sigma") != t.header.end();
  std::vector<transmission_sample> samples;
  for (const auto& r : t.rows) {
    transmission_sample s;
    s.power_dbm = r[t.column("power_dbm")];
    s.omega_p = two_pi * r[t.column("freq_Hz")];
    s.t = {r[t.column("re_t")], r[t.column("im_t")]};
    if (sig) s.uncertainty = r[t.column("sigma")];
    samples.push_back(s);
  }
  transmission_fit_options opt;
  opt.amplitude_only = amplitude_only;
  const auto f = fit_transmission(samples, opt);
  auto pack = [](const transmission_params& p) {
    return json{{"gamma1_Hz", p.gamma1 / two_pi},         {"gamma10_nr_Hz", p.gamma10_nr / two_pi},
                {"gamma_phi_Hz", p.gamma_phi / two_pi},   {"temperature_K", p.temperature},
                {"attenuation_dB", p.attenuation_db},     {"delta_Hz", p.delta / two_pi}};
  };
  json j;
  j["provenance"] = provenance(c, "fit-transmission", input);
  j["parameters"] = pack(f.params);
  j["uncertainties"] = pack(f.sigma);
  j["t_eff_K"] = f.t_eff;
  j["degenerate"] = f.degenerate;
  j["rms_residual"] = f.rms_residual;
  j["diagnostics"] = ls_diagnostics(f.fit);
  json res = json::array();
  csv_table model;
  model.header = t.header;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const auto m = transmission_curve(f.params, s.power_dbm, s.omega_p);
    res.push_back({{"power_dbm", s.power_dbm}, {"freq_Hz", s.omega_p / two_pi}, {"re_residual", s.t.real() - m.real()},
                   {"im_residual", s.t.imag() - m.imag()}});
    auto row = t.rows[i];
    row[t.column("re_t")] = m.real();
    row[t.column("im_t")] = m.imag();
    model.rows.push_back(std::move(row));
  }
  j["residuals"] = res;
  if (!curves.empty()) write_atomic(curves, format_csv(model));
  emit(c, j.dump(2) + "\n");
  return 0;
}

// ---- calibration

scan2d read_scan(const csv_table& t) {
  t.require({"i_beta_A", "i_eps_A", "s21_mag"});
  std::map<double, std::size_t> ib, ie;
  for (const auto& r : t.rows) {
    ib.emplace(r[t.column("i_beta_A")], 0);
    ie.emplace(r[t.column("i_eps_A")], 0);
  }
  scan2d s;
  for (auto& [x, k] : ib) {
    k = s.i_beta.size();
    s.i_beta.push_back(x);
  }
  for (auto& [x, k] : ie) {
    k = s.i_eps.size();
    s.i_eps.push_back(x);
  }
  if (t.rows.size() != ib.size() * ie.size())
    throw data_error("scan is not a complete rectangular grid: " + std::to_string(t.rows.size()) + " rows for " +
                     std::to_string(ib.size()) + " x " + std::to_string(ie.size()) + " currents");
  s.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(ib.size()), static_cast<Eigen::Index>(ie.size()),
                                       std::numeric_limits<double>::quiet_NaN());
  for (const auto& r : t.rows)
    s.values(static_cast<Eigen::Index>(ib[r[t.column("i_beta_A")]]),
             static_cast<Eigen::Index>(ie[r[t.column("i_eps_A")]])) = r[t.column("s21_mag")];
  if (!s.values.allFinite()) throw data_error("scan has duplicate current pairs");
  return s;
}

json matrix_json(const Eigen::Matrix2d& m) { return json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}); }

int cmd_synthesize(const context& c, const std::vector<double>& w, const std::vector<double>& i0, double span, int pixels,
                   double noise, std::uint64_t seed, double probe_hz) {
  crosstalk_map m;
  m.w << w[0], w[1], w[2], w[3];
  m.i0 << i0[0], i0[1];
  const auto ib = uniform_axis(-span, span, pixels), ie = uniform_axis(-span, span, pixels);
  synthesis_options so;
  so.noise = noise;
  so.seed = seed;
  const auto scan = synthesize_scan(surrogate_model(), m, two_pi * probe_hz, ib, ie, so);
  csv_table t;
  t.header = {"i_beta_A", "i_eps_A", "s21_mag"};
  for (std::size_t a = 0; a < ib.size(); ++a)
    for (std::size_t b = 0; b < ie.size(); ++b)
      t.rows.push_back({ib[a], ie[b], scan.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))});
  emit(c, format_csv(t));
  return 0;
}

int cmd_calibrate(const context& c, const std::string& input, const std::string& assignment) {
  const auto scan = read_scan(read_csv(input));
  lattice_options lo;
  if (assignment == "sensitivity") {
    lo.assignment = lattice_assignment::sensitivity;
  } else if (assignment == "axis") {
    lo.assignment = lattice_assignment::axis;
  } else {
    throw config_error("--assignment must be sensitivity or axis");
  }
  const auto lr = lattice_vectors(scan, lo);
  const auto off = offsets(scan, lr.w);
  json j;
  j["provenance"] = provenance(c, "calibrate", input);
  j["W"] = matrix_json(lr.w);
  j["I0"] = {off.i0(0), off.i0(1)};
  json d;
  d["det_W"] = lr.w.determinant();
  d["peak_strength"] = {lr.peak_strength(0), lr.peak_strength(1)};
  d["peaks_used"] = lr.peaks_used;
  d["sensitivity"] = {lr.sensitivity(0), lr.sensitivity(1)};
  d["inversion_centre"] = {off.inversion_centre(0), off.inversion_centre(1)};
  d["ambiguous_offset"] = off.ambiguous;
  json cand = json::array();
  for (const auto& k : off.candidates) cand.push_back({{"I0", {k.i0(0), k.i0(1)}}, {"score", k.score}});
  d["offset_candidates"] = cand;
  j["diagnostics"] = d;
  emit(c, j.dump(2) + "\n");
  return 0;
}

// ---- decoherence

int cmd_decoherence(const context& c, double lo, double hi, double step) {
  const auto fbs = f_beta_range(lo, hi, step);
  const auto& cfg = c.cfg;
  const auto rows = sweep_points(c, "budget", fbs, [&](double fb) {
    const auto sp = symmetry_point(cfg.circuit, fb, cfg.solver, cfg.f_eps_lo, cfg.f_eps_hi);
    const auto b = budget(cfg.circuit, sp.state, cfg.noise, cfg.line(), cfg.t_tl, cfg.solver);
    json j;
    j["f_beta"] = fb;
    j["delta_Hz"] = b.omega01 / two_pi;
    j["gamma1_Hz"] = b.gamma1 / two_pi;
    j["gamma_phi_tl_Hz"] = b.gamma_phi_tl / two_pi;
    j["gamma_phi_1f_Hz"] = b.gamma_phi_1f / two_pi;
    j["gamma10_bias_Hz"] = b.gamma10_bias / two_pi;
    j["gamma10_1f_Hz"] = b.gamma10_1f / two_pi;
    j["gamma10_qp_Hz"] = b.gamma10_qp / two_pi;
    j["t_eff_K"] = b.t_eff;
    return j;
  });
  emit(c, format_csv(table_from({"f_beta", "gamma_phi_tl_Hz", "gamma_phi_1f_Hz", "gamma10_bias_Hz", "gamma10_1f_Hz",
                                 "gamma10_qp_Hz", "t_eff_K"},
                                rows)));
  return 0;
}

// ---- reflections

int cmd_reflections(const context& c, std::vector<double> vswrs, std::optional<double> zq, double lo, double hi,
                    double step) {
  if (vswrs.empty()) vswrs = {1.0, 2.0, 4.0};
  const double z_q = zq ? *zq : c.cfg.z_q;
  const double v = c.cfg.circuit.phase_velocity();
  const auto fbs = f_beta_range(lo, hi, step);
  const auto rows = sweep_points(c, "sym", fbs, [&](double fb) { return symmetry_record(c.cfg, fb); });
  csv_table t;
  t.header = {"f_beta", "vswr", "delta_Hz", "gamma1_Hz"};
  for (double s : vswrs) {
    const auto r = vswr_parity_reflections(s, c.cfg.parity_phase);
    for (const auto& row : rows) {
      const double delta = two_pi * row.at("delta_Hz").get<double>();
      const double g5 = row.at("gamma5_01_abs").get<double>();
      const double g = relaxation_with_reflection(g5, delta, r[0], r[1], z_q, v, c.cfg.circuit.z0);
      t.rows.push_back({row.at("f_beta").get<double>(), s, delta / two_pi, g / two_pi});
    }
  }
  emit(c, format_csv(t));
  return 0;
}

// ---- convergence

int cmd_convergence(const context& c, double fb, std::optional<double> fe, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) throw config_error("need 1 <= n-min <= n-max");
  double f_eps = fe ? *fe : symmetry_point(c.cfg.circuit, fb, c.cfg.solver, c.cfg.f_eps_lo, c.cfg.f_eps_hi).f_eps;
  std::vector<std::array<int, 4>> cut;
  for (int n = n_min; n <= n_max; ++n) cut.push_back({n, n, n, n});
  const auto rows = convergence_sweep(c.cfg.circuit, {fb, f_eps}, cut, c.cfg.solver.levels, c.cfg.solver);
  csv_table t;
  t.header = {"n1", "n2", "n4", "n5", "dim"};
  for (int i = 1; i < c.cfg.solver.levels; ++i) t.header.push_back("level" + std::to_string(i) + "_Hz");
  t.header.push_back("max_rel_change");
  for (const auto& r : rows) {
    std::vector<double> v{double(r.cutoff[0]), double(r.cutoff[1]), double(r.cutoff[2]), double(r.cutoff[3]),
                          double(r.dim)};
    for (Eigen::Index i = 1; i < r.energies.size(); ++i)
      v.push_back((r.energies[i] - r.energies[0]) / constants::h);
    v.push_back(r.max_rel_change);
    t.rows.push_back(std::move(v));
  }
  emit(c, format_csv(t));
  return 0;
}

int fail(const char* type, const std::string& msg, int code) {
  std::cerr << json{{"error", {{"type", type}, {"message", msg}}}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-loop flux qubit coupled to a transmission line: spectra, fits, calibration, decoherence"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", toolkit_version);
  global_opts g;
  app.add_option("-c,--config", g.config_path, "INI config")->check(CLI::ExistingFile);
  app.add_option("-o,--out", g.out, "output file, written atomically (default stdout)");
  app.add_option("-j,--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--no-cache", g.no_cache, "ignore and do not write the per-point cache");

  double fb = 0.41;
  struct range { double lo = 0.36, hi = 0.44, step = 0.005; } sweep_r, dec_r{0.36, 0.44, 0.01}, refl_r;
  std::optional<double> fe, zq;
  std::string format = "json", input, model = "auto", emit_cfg, curves, assignment = "sensitivity";
  bool synthesize = false;
  std::vector<int> fixed;
  std::vector<double> vswrs;
  bool amp_only = false;
  int n_min = 3, n_max = 9;

  auto* spec = app.add_subcommand("spectrum", "levels, matrix elements, Gamma1 and alpha at one bias");
  spec->add_option("--f-beta", fb);
  spec->add_option("--f-eps", fe, "default: symmetry point");
  spec->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  auto add_range = [](CLI::App* a, range& r) {
    a->add_option("--f-beta-lo", r.lo, "")->capture_default_str();
    a->add_option("--f-beta-hi", r.hi, "")->capture_default_str();
    a->add_option("--step", r.step, "")->capture_default_str();
  };
  auto* sweep = app.add_subcommand("sweep", "symmetry-point sweep over f_beta");
  add_range(sweep, sweep_r);

  auto* fs_cmd = app.add_subcommand("fit-spectroscopy", "two-level or circuit fit of transition frequencies");
  fs_cmd->add_option("input", input, "CSV f_beta,f_eps,freq_Hz[,sigma_Hz]")->required()->check(CLI::ExistingFile);
  fs_cmd->add_option("--model", model)->check(CLI::IsMember({"auto", "two-level", "circuit"}));
  fs_cmd->add_option("--emit-config", emit_cfg, "write a config with the fitted currents");
  fs_cmd->add_option("--fix", fixed, "junctions held at the config value")->delimiter(',');

  auto* ft_cmd = app.add_subcommand("fit-transmission", "joint multi-power transmission fit");
  ft_cmd->add_option("input", input, "CSV f_beta,f_eps,power_dbm,freq_Hz,re_t,im_t[,sigma]")
      ->required()
      ->check(CLI::ExistingFile);
  ft_cmd->add_flag("--amplitude-only", amp_only);
  ft_cmd->add_option("--curves", curves, "write model curves in the input schema");

  std::vector<double> w_true{1.0e-3, 0.15e-3, 0.25e-3, 1.2e-3}, i0_true{0.3e-3, -0.2e-3};
  double span = 1.5e-3, noise = 0.0, probe = 5e9;
  int pixels = 128;
  std::uint64_t seed = 0;
  auto* cal = app.add_subcommand("calibrate", "crosstalk matrix and offsets from a two-current scan");
  cal->add_option("input", input, "CSV i_beta_A,i_eps_A,s21_mag")->check(CLI::ExistingFile);
  cal->add_option("--assignment", assignment)->check(CLI::IsMember({"sensitivity", "axis"}));
  cal->add_flag("--synthesize", synthesize, "write a synthetic scan instead of calibrating");
  cal->add_option("--w", w_true, "synthetic W, row-major, A per flux quantum")->expected(4)->delimiter(',');
  cal->add_option("--i0", i0_true, "synthetic offsets, A")->expected(2)->delimiter(',');
  cal->add_option("--span", span, "half-width of both current axes, A");
  cal->add_option("--pixels", pixels);
  cal->add_option("--noise", noise, "relative multiplicative noise");
  cal->add_option("--seed", seed);
  cal->add_option("--probe-Hz", probe);

  auto* dec = app.add_subcommand("decoherence", "per-channel rates at symmetry points");
  add_range(dec, dec_r);

  auto* refl = app.add_subcommand("reflections", "radiative rate with a reflecting component on the line");
  refl->add_option("--vswr", vswrs, "default 1,2,4")->delimiter(',');
  refl->add_option("--zq", zq, "m");
  add_range(refl, refl_r);

  auto* conv = app.add_subcommand("convergence", "eigenvalues against the charge cutoff");
  conv->add_option("--f-beta", fb);
  conv->add_option("--f-eps", fe, "default: symmetry point");
  conv->add_option("--n-min", n_min);
  conv->add_option("--n-max", n_max);

  CLI11_PARSE(app, argc, argv);

  try {
    const context c = make_context(g);
    if (*spec) return cmd_spectrum(c, fb, fe, format);
    if (*sweep) return cmd_sweep(c, sweep_r.lo, sweep_r.hi, sweep_r.step);
    if (*fs_cmd) return cmd_fit_spectroscopy(c, input, model, emit_cfg, fixed);
    if (*ft_cmd) return cmd_fit_transmission(c, input, amp_only, curves);
    if (*cal) {
      if (synthesize) return cmd_synthesize(c, w_true, i0_true, span, pixels, noise, seed, probe);
      if (input.empty()) throw config_error("calibrate needs a scan CSV");
      return cmd_calibrate(c, input, assignment);
    }
    if (*dec) return cmd_decoherence(c, dec_r.lo, dec_r.hi, dec_r.step);
    if (*refl) return cmd_reflections(c, vswrs, zq, refl_r.lo, refl_r.hi, refl_r.step);
    if (*conv) return cmd_convergence(c, fb, fe, n_min, n_max);
  } catch (const config_error& e) {
    return fail("config", e.what(), 2);
  } catch (const data_error& e) {
    return fail("data", e.what(), 3);
  } catch (const io_error& e) {
    return fail("io", e.what(), 4);
  } catch (const error& e) {
    return fail("solver", e.what(), 5);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 6);
  }
  return 0;
}
