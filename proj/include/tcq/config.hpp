#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tcq/circuit.hpp"
#include "tcq/coupling.hpp"
#include "tcq/decoherence.hpp"
#include "tcq/spectrum.hpp"

namespace tcq {

struct run_config {
  circuit_params circuit = default_circuit();
  solver_config solver;
  double f_eps_lo = 0.3;
  double f_eps_hi = 0.7;
  noise_model noise;
  double t_tl = 0.05;  // K, line temperature seen by the qubit
  double z_q = 0.2;    // m, qubit to the reflecting component
  double parity_phase = 0.0;
  std::string output_dir = ".";
  std::string cache_dir = ".tcq-cache";

  line_params line() const;
  void validate() const;
};

// sections [circuit] [solver] [noise] [reflections] [io]; unknown keys throw config_error
run_config parse_config(std::string_view text, const std::string& origin = "<config>");
run_config load_config(const std::filesystem::path& path);

// canonical form, SI units, every double at 17 significant digits
std::string write_config(const run_config& c);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);
// hash of the canonical form, so comments and key order do not matter
std::string config_hash(const run_config& c);

}  // namespace tcq
