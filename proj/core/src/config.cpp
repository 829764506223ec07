#include "safeslope/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace safeslope {

Fidelity parse_fidelity(std::string_view name) {
  if (name == "single") return Fidelity::Single;
  if (name == "multi") return Fidelity::Multi;
  throw std::invalid_argument("unknown fidelity '" + std::string(name) + "'");
}

std::string to_string(Fidelity fidelity) { return fidelity == Fidelity::Single ? "single" : "multi"; }

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string quoted(std::string_view key) { return "'" + std::string(key) + "'"; }

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw std::invalid_argument("config: " + quoted(key) + " expects a number, got '" + std::string(text) + "'");
  return value;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw std::invalid_argument("config: " + quoted(key) + " expects a non-negative integer, got '" +
                                std::string(text) + "'");
  return value;
}

std::vector<double> to_doubles(std::string_view key, std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(to_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

Eigen::MatrixXd to_matrix(std::string_view key, std::string_view text, Eigen::Index rows) {
  const std::vector<double> v = to_doubles(key, text);
  if (rows <= 0 || v.size() % static_cast<std::size_t>(rows) != 0)
    throw std::invalid_argument("config: " + quoted(key) + " has the wrong number of entries");
  const auto cols = static_cast<Eigen::Index>(v.size()) / rows;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
  return m;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

std::string join(const Eigen::MatrixXd& m) {
  std::vector<double> v;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
  return join(v);
}

bool apply_kernel(KernelSpec& spec, std::string_view field, std::string_view key, std::string_view value) {
  if (field == "family") spec.family = parse_kernel_family(trim(value));
  else if (field == "variance") spec.variance = to_double(key, value);
  else if (field == "lengthscales" || field == "lengthscale") spec.lengthscales = to_doubles(key, value);
  else return false;
  return true;
}

void write_kernel(std::ostringstream& out, std::string_view prefix, const KernelSpec& spec) {
  out << prefix << ".family = " << to_string(spec.family) << "\n";
  out << prefix << ".variance = " << format_double(spec.variance) << "\n";
  out << prefix << ".lengthscales = " << join(spec.lengthscales) << "\n";
}

}  // namespace

ExperimentConfig default_config() {
  const BenchmarkInstance bench = benchmark_instance();
  ExperimentConfig c;
  c.truth = bench.truth;
  c.approx = bench.approx;
  c.cost = bench.cost;
  c.h = bench.h;
  c.delta_f = bench.delta_f;
  c.delta_m = bench.delta_m;
  c.noise_variance = bench.noise_variance;
  c.low_noise_variance = bench.low_noise_variance;
  c.iterations = bench.iterations;
  c.trials = bench.trials;
  c.initial_set_size = bench.initial_set_size;
  c.grid_resolution = bench.grid.resolution();
  c.grid_lower = {bench.grid.lower(0), bench.grid.lower(1)};
  c.grid_upper = {bench.grid.upper(0), bench.grid.upper(1)};
  return c;
}

void ExperimentConfig::validate() const {
  kernel.validate();
  low_kernel.validate();
  error_kernel.validate();
  auto in_unit = [](double p) { return p > 0.0 && p < 1.0; };
  if (!in_unit(delta_f) || !in_unit(delta_m)) throw std::invalid_argument("config: deltas must lie in (0, 1)");
  if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (initial_set_size < 1) throw std::invalid_argument("config: initial_set_size must be >= 1");
  if (!(noise_variance >= 0.0) || !(low_noise_variance >= 0.0))
    throw std::invalid_argument("config: noise variances must be >= 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("config: analysis.epsilon must be positive");
  if (grid_lower.size() != grid_upper.size())
    throw std::invalid_argument("config: grid.lower and grid.upper differ in length");
  truth.validate();
  approx.validate();
  cost.validate();
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const auto dot = key.find('.');
  const std::string_view head = key.substr(0, dot);
  const std::string_view field = dot == std::string_view::npos ? std::string_view{} : key.substr(dot + 1);

  if (key == "algorithm") c.algorithm = parse_algorithm(value);
  else if (key == "fidelity") c.fidelity = parse_fidelity(value);
  else if (key == "mode") c.mode = parse_bound_mode(value);
  else if (head == "kernel" && apply_kernel(c.kernel, field, key, value)) {}
  else if (head == "low_kernel" && apply_kernel(c.low_kernel, field, key, value)) {}
  else if (head == "error_kernel" && apply_kernel(c.error_kernel, field, key, value)) {}
  else if (key == "rho") c.rho = to_double(key, value);
  else if (key == "noise_variance") c.noise_variance = to_double(key, value);
  else if (key == "low_noise_variance") c.low_noise_variance = to_double(key, value);
  else if (key == "h") c.h = to_double(key, value);
  else if (key == "delta_f") c.delta_f = to_double(key, value);
  else if (key == "delta_m") c.delta_m = to_double(key, value);
  else if (key == "iterations") c.iterations = to_unsigned(key, value);
  else if (key == "trials") c.trials = to_unsigned(key, value);
  else if (key == "seed") c.seed = to_unsigned(key, value);
  else if (key == "initial_set") {
    if (value == "random_safe") c.initial_policy = InitialSetPolicy::RandomSafe;
    else if (value == "argmin_low_fidelity") c.initial_policy = InitialSetPolicy::ArgminLowFidelity;
    else throw std::invalid_argument("config: unknown initial_set policy '" + std::string(value) + "'");
  }
  else if (key == "initial_set_size") c.initial_set_size = to_unsigned(key, value);
  else if (key == "grid.resolution") c.grid_resolution = to_unsigned(key, value);
  else if (key == "grid.lower") c.grid_lower = to_doubles(key, value);
  else if (key == "grid.upper") c.grid_upper = to_doubles(key, value);
  else if (key == "system.a") c.truth.a = to_matrix(key, value, c.truth.a.rows());
  else if (key == "system.b") c.truth.b = to_matrix(key, value, c.truth.b.rows());
  else if (key == "approx.a") c.approx.a = to_matrix(key, value, c.approx.a.rows());
  else if (key == "approx.b") c.approx.b = to_matrix(key, value, c.approx.b.rows());
  else if (key == "cost.z0") {
    const std::vector<double> z = to_doubles(key, value);
    c.cost.z0 = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
  }
  else if (key == "cost.horizon") c.cost.horizon = to_unsigned(key, value);
  else if (key == "analysis.epsilon") c.epsilon = to_double(key, value);
  else if (key == "analysis.max_time") c.max_convergence_time = to_unsigned(key, value);
  else throw std::invalid_argument("config: unknown key " + quoted(key));
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c = default_config();
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "algorithm = " << to_string(c.algorithm) << "\n";
  out << "fidelity = " << to_string(c.fidelity) << "\n";
  out << "mode = " << to_string(c.mode) << "\n";
  write_kernel(out, "kernel", c.kernel);
  write_kernel(out, "low_kernel", c.low_kernel);
  write_kernel(out, "error_kernel", c.error_kernel);
  out << "rho = " << format_double(c.rho) << "\n";
  out << "noise_variance = " << format_double(c.noise_variance) << "\n";
  out << "low_noise_variance = " << format_double(c.low_noise_variance) << "\n";
  out << "h = " << format_double(c.h) << "\n";
  out << "delta_f = " << format_double(c.delta_f) << "\n";
  out << "delta_m = " << format_double(c.delta_m) << "\n";
  out << "iterations = " << c.iterations << "\n";
  out << "trials = " << c.trials << "\n";
  out << "seed = " << c.seed << "\n";
  out << "initial_set = "
      << (c.initial_policy == InitialSetPolicy::RandomSafe ? "random_safe" : "argmin_low_fidelity") << "\n";
  out << "initial_set_size = " << c.initial_set_size << "\n";
  out << "grid.resolution = " << c.grid_resolution << "\n";
  out << "grid.lower = " << join(c.grid_lower) << "\n";
  out << "grid.upper = " << join(c.grid_upper) << "\n";
  out << "system.a = " << join(c.truth.a) << "\n";
  out << "system.b = " << join(c.truth.b) << "\n";
  out << "approx.a = " << join(c.approx.a) << "\n";
  out << "approx.b = " << join(c.approx.b) << "\n";
  out << "cost.z0 = " << join(Eigen::MatrixXd(c.cost.z0)) << "\n";
  out << "cost.horizon = " << c.cost.horizon << "\n";
  out << "analysis.epsilon = " << format_double(c.epsilon) << "\n";
  out << "analysis.max_time = " << c.max_convergence_time << "\n";
  return out.str();
}

}  // namespace safeslope
