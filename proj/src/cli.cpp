#include "twistbeam/cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "twistbeam/beam.hpp"
#include "twistbeam/errors.hpp"
#include "twistbeam/observables.hpp"
#include "twistbeam/specfun.hpp"
#include "twistbeam/units.hpp"
#include "twistbeam/version.hpp"

namespace twistbeam::cli {
namespace {

using cplx = std::complex<double>;
namespace obs = twistbeam::observables;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

std::string cell_to_string(const Cell& cell) {
  if (std::holds_alternative<long long>(cell)) {
    return std::to_string(std::get<long long>(cell));
  }
  if (std::holds_alternative<double>(cell)) {
    return format_number(std::get<double>(cell));
  }
  return std::get<std::string>(cell);
}

// ---------------------------------------------------------------------------
// shared option bundles

struct BeamCfg {
  double theta_k = 0.2;
  int Lambda = 1;
  std::vector<int> m_gamma;
  double omega = 0.0;          // wavenumber override (field/flux, omega=1 default)
  double wavelength_nm = 0.0;  // 0 = not given
  int n_f = 0;                 // 0 = not given
  double Z = 1.0;
};

struct QuadCfg {
  double abs_tol = 1e-30;
  double rel_tol = 1e-11;
  int max_subdivisions = 2000;
  double radial_cutoff = 0.0;
};

struct OutCfg {
  std::string path = "-";
  std::string format = "csv";
};

void add_out_options(CLI::App* cmd, OutCfg& out) {
  cmd->add_option("--out", out.path, "Output path ('-' = stdout)");
  cmd->add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_quad_options(CLI::App* cmd, QuadCfg& q) {
  cmd->add_option("--abs-tol", q.abs_tol, "Quadrature absolute tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rel-tol", q.rel_tol, "Quadrature relative tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-subdivisions", q.max_subdivisions,
                  "Adaptive subdivision limit")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--radial-cutoff", q.radial_cutoff,
                  "Radial integration cutoff in a0 (0 = auto)");
}

quadrature::QuadratureSpec to_spec(const QuadCfg& q) {
  quadrature::QuadratureSpec spec;
  spec.abs_tol = q.abs_tol;
  spec.rel_tol = q.rel_tol;
  spec.max_subdivisions = q.max_subdivisions;
  spec.radial_cutoff = q.radial_cutoff;
  return spec;
}

// Resolve the photon wavenumber for atomic scans: resonance with the excited
// level unless a wavelength is given; both together must agree within 1%.
double resolve_wavenumber(const BeamCfg& cfg) {
  if (cfg.n_f == 0 && cfg.wavelength_nm == 0.0) {
    throw CLI::ValidationError("beam", "need --n-f or --wavelength-nm");
  }
  if (cfg.wavelength_nm > 0.0 && cfg.n_f > 0) {
    const double resonant = units::wavelength_nm_from_wavenumber(
        units::resonance_wavenumber(cfg.n_f, cfg.Z));
    if (std::abs(cfg.wavelength_nm - resonant) > 0.01 * resonant) {
      throw CLI::ValidationError(
          "--wavelength-nm",
          "inconsistent with the n_f=" + std::to_string(cfg.n_f) +
              " resonance (" + format_number(resonant) + " nm) by more than 1%");
    }
  }
  if (cfg.wavelength_nm > 0.0) {
    return units::wavenumber_from_wavelength_nm(cfg.wavelength_nm);
  }
  return units::resonance_wavenumber(cfg.n_f, cfg.Z);
}

Eigen::ArrayXd linspace(double lo, double hi, int n) {
  if (n < 1) throw CLI::ValidationError("grid", "needs at least one point");
  if (n == 1) {
    Eigen::ArrayXd g(1);
    g[0] = lo;
    return g;
  }
  return Eigen::ArrayXd::LinSpaced(n, lo, hi);
}

std::string classification_name(obs::PointClass tag) {
  switch (tag) {
    case obs::PointClass::kRegular: return "";
    case obs::PointClass::kFiniteLimit: return "finite-limit";
    case obs::PointClass::kZero: return "zero";
    default: return "divergent";
  }
}

// ---------------------------------------------------------------------------
// field / flux

struct FieldCfg {
  BeamCfg beam;
  QuadCfg quad;
  OutCfg out;
  std::vector<double> rho;
  double rho_max = -1.0;
  int points = 100;
  double phi = 0.0;
  double z = 0.0;
};

beam::BeamParams field_beam(const BeamCfg& cfg) {
  double omega = cfg.omega;
  if (cfg.wavelength_nm > 0.0) {
    omega = units::wavenumber_from_wavelength_nm(cfg.wavelength_nm);
  } else if (cfg.n_f > 0) {
    omega = units::resonance_wavenumber(cfg.n_f, cfg.Z);
  }
  if (omega == 0.0) omega = 1.0;
  const int m = cfg.m_gamma.empty() ? 1 : cfg.m_gamma.front();
  return beam::make_beam(omega, cfg.theta_k, m, cfg.Lambda);
}

std::vector<double> resolve_rho_grid(const FieldCfg& cfg) {
  if (!cfg.rho.empty() && cfg.rho_max >= 0.0) {
    throw CLI::ValidationError("--rho", "give either --rho or --rho-max, not both");
  }
  if (!cfg.rho.empty()) return cfg.rho;
  if (cfg.rho_max >= 0.0) {
    const Eigen::ArrayXd g = linspace(0.0, cfg.rho_max, cfg.points);
    return {g.data(), g.data() + g.size()};
  }
  throw CLI::ValidationError("--rho", "no sample points given");
}

std::string beam_config_line(const std::string& cmd, const beam::BeamParams& b) {
  std::ostringstream os;
  os << "cmd=" << cmd << " omega=" << format_number(b.omega)
     << " theta_k=" << format_number(b.theta_k) << " m_gamma=" << b.m_gamma
     << " Lambda=" << b.Lambda;
  return os.str();
}

Table cmd_field(const FieldCfg& cfg) {
  const beam::BeamParams bp = field_beam(cfg.beam);
  const std::vector<double> grid = resolve_rho_grid(cfg);

  Table t;
  t.columns = {"rho",      "a_plus_re",  "a_plus_im",  "a_minus_re",
               "a_minus_im", "a_zero_re", "a_zero_im", "b_rho_re",
               "b_rho_im", "b_phi_re",   "b_phi_im",   "b_z_re",
               "b_z_im",   "e_rho_re",   "e_rho_im",   "e_phi_re",
               "e_phi_im", "e_z_re",     "e_z_im",     "flux"};
  std::ostringstream cfg_line;
  cfg_line << beam_config_line("field", bp) << " phi=" << format_number(cfg.phi)
           << " z=" << format_number(cfg.z) << " n_rho=" << grid.size();
  t.config_line = cfg_line.str();

  for (double rho : grid) {
    const beam::CylindricalPoint p{rho, cfg.phi, cfg.z, 0.0};
    const auto a = beam::vector_potential(bp, p);
    const auto b = beam::magnetic_field(bp, p);
    const auto e = beam::electric_field(bp, p);
    t.rows.push_back({rho, a.eta_plus.real(), a.eta_plus.imag(),
                      a.eta_minus.real(), a.eta_minus.imag(),
                      a.eta_zero.real(), a.eta_zero.imag(), b[0].real(),
                      b[0].imag(), b[1].real(), b[1].imag(), b[2].real(),
                      b[2].imag(), e[0].real(), e[0].imag(), e[1].real(),
                      e[1].imag(), e[2].real(), e[2].imag(),
                      beam::flux(bp, rho)});
  }
  return t;
}

Table cmd_flux(const FieldCfg& cfg) {
  const beam::BeamParams bp = field_beam(cfg.beam);
  const std::vector<double> grid = resolve_rho_grid(cfg);

  Table t;
  t.columns = {"rho", "flux"};
  t.config_line = beam_config_line("flux", bp) + " n_rho=" +
                  std::to_string(grid.size());
  for (double rho : grid) {
    t.rows.push_back({rho, beam::flux(bp, rho)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// amplitude

struct AmplitudeCfg {
  BeamCfg beam;
  QuadCfg quad;
  OutCfg out;
  int l_f = 1;
  double b_min_lambda = 0.0;
  double b_max_lambda = 2.0;
  int b_points = 50;
  double phi_b = 0.0;
};

Table cmd_amplitude(const AmplitudeCfg& cfg) {
  if (cfg.beam.n_f == 0) {
    throw CLI::ValidationError("--n-f", "amplitude requires the excited level");
  }
  const double omega = resolve_wavenumber(cfg.beam);
  const int m_gamma = cfg.beam.m_gamma.empty() ? 1 : cfg.beam.m_gamma.front();
  const beam::BeamParams bp =
      beam::make_beam(omega, cfg.beam.theta_k, m_gamma, cfg.beam.Lambda);
  const double lambda_au = 2.0 * std::acos(-1.0) / omega;
  const Eigen::ArrayXd b_grid =
      linspace(cfg.b_min_lambda, cfg.b_max_lambda, cfg.b_points) * lambda_au;

  const auto table = obs::make_brace_table(cfg.beam.n_f, cfg.l_f, bp,
                                           to_spec(cfg.quad), cfg.beam.Z);

  Table t;
  t.columns = {"n_f",  "l_f",       "m_gamma", "Lambda",
               "m_f",  "b_over_lambda", "b_nm", "amp_re",
               "amp_im", "amp_abs", "amp_abs_factorized"};
  std::ostringstream cfg_line;
  cfg_line << beam_config_line("amplitude", bp) << " n_f=" << cfg.beam.n_f
           << " l_f=" << cfg.l_f << " Z=" << format_number(cfg.beam.Z)
           << " b_min=" << format_number(cfg.b_min_lambda)
           << " b_max=" << format_number(cfg.b_max_lambda)
           << " b_points=" << cfg.b_points
           << " phi_b=" << format_number(cfg.phi_b);
  t.config_line = cfg_line.str();

  for (Eigen::Index i = 0; i < b_grid.size(); ++i) {
    for (int m_f = -cfg.l_f; m_f <= cfg.l_f; ++m_f) {
      const obs::TargetGeometry geom{b_grid[i], cfg.phi_b};
      const cplx amp = obs::amplitude_from_table(table, m_f, geom);
      const atomic::AtomicState fin{cfg.beam.n_f, cfg.l_f, m_f, cfg.beam.Z};
      const double fact =
          obs::amplitude_factorized(fin, bp, geom, table.pw_amplitude);
      t.rows.push_back({static_cast<long long>(cfg.beam.n_f),
                        static_cast<long long>(cfg.l_f),
                        static_cast<long long>(bp.m_gamma),
                        static_cast<long long>(bp.Lambda),
                        static_cast<long long>(m_f), b_grid[i] / lambda_au,
                        b_grid[i] * units::kBohrRadiusNm, amp.real(),
                        amp.imag(), std::abs(amp), fact});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// ratio

struct RatioCfg {
  BeamCfg beam;
  QuadCfg quad;
  OutCfg out;
  std::vector<int> l_f;
  std::string convention = "local";
  double aperture_lambda = 0.0;  // 0 = default aperture
  double b_min_lambda = 0.0;
  double b_max_lambda = 2.0;
  int b_points = 400;
  std::string figure;
};

void apply_figure_preset(RatioCfg& cfg) {
  if (cfg.figure.empty()) return;
  static const std::map<std::string, std::pair<int, std::string>> presets = {
      {"2", {1, "integrated"}},  {"3a", {2, "integrated"}},
      {"3b", {2, "local"}},      {"3c", {3, "integrated"}},
      {"3d", {3, "local"}},
  };
  const auto it = presets.find(cfg.figure);
  if (it == presets.end()) {
    throw CLI::ValidationError("--figure", "unknown preset '" + cfg.figure +
                                               "' (use 2, 3a, 3b, 3c, 3d)");
  }
  cfg.l_f = {it->second.first};
  cfg.convention = it->second.second;
  cfg.beam.n_f = 4;
  cfg.beam.theta_k = 0.2;
  cfg.beam.Lambda = 1;
  cfg.beam.m_gamma = {1, 2, 3, 4};
  cfg.beam.wavelength_nm = 0.0;
  cfg.b_min_lambda = 0.0;
  cfg.b_max_lambda = 2.0;
  cfg.b_points = 400;
}

Table cmd_ratio(RatioCfg cfg) {
  apply_figure_preset(cfg);
  if (cfg.beam.n_f == 0) cfg.beam.n_f = 4;
  if (cfg.beam.m_gamma.empty()) cfg.beam.m_gamma = {1, 2, 3, 4};
  if (cfg.l_f.empty()) cfg.l_f = {1};
  const double omega = resolve_wavenumber(cfg.beam);
  const double lambda_au = 2.0 * std::acos(-1.0) / omega;
  const Eigen::ArrayXd b_grid =
      linspace(cfg.b_min_lambda, cfg.b_max_lambda, cfg.b_points) * lambda_au;

  obs::FluxConvention convention;
  convention.kind = cfg.convention == "integrated"
                        ? obs::FluxKind::kIntegrated
                        : obs::FluxKind::kLocal;
  convention.aperture_radius = cfg.aperture_lambda * lambda_au;

  const int l_max = *std::max_element(cfg.l_f.begin(), cfg.l_f.end());

  Table t;
  t.columns = {"n_f",    "l_f",          "m_gamma",       "Lambda",
               "theta_k", "convention",  "b_over_lambda", "b_nm",
               "flux_local", "r_tw",     "classification", "rate_total"};
  for (int m = -l_max; m <= l_max; ++m) {
    t.columns.push_back("rate_mf_" + std::string(m < 0 ? "m" : "p") +
                        std::to_string(std::abs(m)));
  }
  std::ostringstream cfg_line;
  cfg_line << "cmd=ratio n_f=" << cfg.beam.n_f << " l_f=";
  for (std::size_t i = 0; i < cfg.l_f.size(); ++i) {
    cfg_line << (i ? "," : "") << cfg.l_f[i];
  }
  cfg_line << " m_gamma=";
  for (std::size_t i = 0; i < cfg.beam.m_gamma.size(); ++i) {
    cfg_line << (i ? "," : "") << cfg.beam.m_gamma[i];
  }
  cfg_line << " Lambda=" << cfg.beam.Lambda
           << " theta_k=" << format_number(cfg.beam.theta_k)
           << " Z=" << format_number(cfg.beam.Z)
           << " omega=" << format_number(omega)
           << " convention=" << cfg.convention
           << " aperture_lambda=" << format_number(cfg.aperture_lambda)
           << " b_min=" << format_number(cfg.b_min_lambda)
           << " b_max=" << format_number(cfg.b_max_lambda)
           << " b_points=" << cfg.b_points;
  t.config_line = cfg_line.str();

  for (int l_f : cfg.l_f) {
    for (int m_gamma : cfg.beam.m_gamma) {
      const beam::BeamParams bp =
          beam::make_beam(omega, cfg.beam.theta_k, m_gamma, cfg.beam.Lambda);
      try {
        const auto table = obs::make_brace_table(cfg.beam.n_f, l_f, bp,
                                                 to_spec(cfg.quad), cfg.beam.Z);
        double mean_flux = 0.0;
        if (convention.kind == obs::FluxKind::kIntegrated) {
          const double radius = convention.aperture_radius > 0.0
                                    ? convention.aperture_radius
                                    : 10.0 * 2.0 * std::acos(-1.0) / bp.kappa;
          mean_flux = obs::aperture_mean_flux(bp, radius);
        }

        std::vector<std::vector<Cell>> rows(
            static_cast<std::size_t>(b_grid.size()));
        obs::parallel_for_indices(
            static_cast<int>(b_grid.size()), [&](int i) {
              const obs::TargetGeometry geom{b_grid[i]};
              const auto pt =
                  obs::ratio_from_table(table, geom, convention, mean_flux);
              std::vector<Cell> row{
                  static_cast<long long>(cfg.beam.n_f),
                  static_cast<long long>(l_f),
                  static_cast<long long>(m_gamma),
                  static_cast<long long>(bp.Lambda),
                  bp.theta_k,
                  cfg.convention,
                  b_grid[i] / lambda_au,
                  b_grid[i] * units::kBohrRadiusNm,
                  beam::flux(bp, b_grid[i]),
                  pt.value,
                  classification_name(pt.tag),
                  obs::excitation_rate_from_table(table, geom)};
              for (int m_f = -l_max; m_f <= l_max; ++m_f) {
                if (std::abs(m_f) > l_f) {
                  row.emplace_back(std::string{});
                } else {
                  const cplx amp = obs::amplitude_from_table(table, m_f, geom);
                  row.emplace_back(std::norm(amp));
                }
              }
              rows[static_cast<std::size_t>(i)] = std::move(row);
            });
        for (auto& row : rows) t.rows.push_back(std::move(row));
      } catch (const NumericalError& err) {
        // Row-level failure: record the curve as failed and keep going.
        std::vector<Cell> row{static_cast<long long>(cfg.beam.n_f),
                              static_cast<long long>(l_f),
                              static_cast<long long>(m_gamma),
                              static_cast<long long>(bp.Lambda),
                              bp.theta_k,
                              cfg.convention,
                              std::string{},
                              std::string{},
                              std::string{},
                              std::string{},
                              std::string("numerical-error: ") + err.what(),
                              std::string{}};
        for (int m = -l_max; m <= l_max; ++m) row.emplace_back(std::string{});
        t.rows.push_back(std::move(row));
        t.numerical_failure = true;
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// scaling

struct ScalingCfg {
  BeamCfg beam;
  QuadCfg quad;
  OutCfg out;
  std::vector<int> l_f;
  std::vector<int> m_f;  // amplitude-slope projections; default {Lambda}
  double kappa_b_min = 1e-4;
  double kappa_b_max = 1e-2;
  int points = 9;
};

Table cmd_scaling(ScalingCfg cfg) {
  if (cfg.beam.n_f == 0) cfg.beam.n_f = 4;
  if (cfg.beam.m_gamma.empty()) cfg.beam.m_gamma = {1, 2, 3, 4};
  if (cfg.l_f.empty()) cfg.l_f = {1, 2, 3};
  if (cfg.m_f.empty()) cfg.m_f = {cfg.beam.Lambda};
  if (cfg.points < 5) {
    throw CLI::ValidationError("--points", "slope fits need at least 5 points");
  }
  const double omega = resolve_wavenumber(cfg.beam);

  Table t;
  t.columns = {"quantity", "n_f",      "l_f",      "m_gamma", "Lambda",
               "theta_k",  "m_f",      "predicted", "measured",
               "std_error", "n_points"};
  std::ostringstream cfg_line;
  cfg_line << "cmd=scaling n_f=" << cfg.beam.n_f
           << " Lambda=" << cfg.beam.Lambda
           << " theta_k=" << format_number(cfg.beam.theta_k)
           << " omega=" << format_number(omega)
           << " kappa_b_min=" << format_number(cfg.kappa_b_min)
           << " kappa_b_max=" << format_number(cfg.kappa_b_max)
           << " points=" << cfg.points;
  t.config_line = cfg_line.str();

  const Eigen::ArrayXd log_grid =
      Eigen::ArrayXd::LinSpaced(cfg.points, std::log(cfg.kappa_b_min),
                                std::log(cfg.kappa_b_max))
          .exp();

  // Synthetic sanity row: a pure injected power law must come back exactly.
  {
    const Eigen::ArrayXd synth = log_grid.square();
    const auto fit = obs::fit_scaling(log_grid, synth);
    t.rows.push_back({std::string("synthetic"), static_cast<long long>(0),
                      static_cast<long long>(0), static_cast<long long>(0),
                      static_cast<long long>(0), 0.0, std::string{},
                      2.0, fit.slope, fit.std_error,
                      static_cast<long long>(fit.n_points)});
  }

  for (int l_f : cfg.l_f) {
    // One brace table per level; the displacement factors below are the only
    // m_gamma-dependent pieces.
    for (int m_gamma : cfg.beam.m_gamma) {
      const beam::BeamParams bp =
          beam::make_beam(omega, cfg.beam.theta_k, m_gamma, cfg.beam.Lambda);
      const Eigen::ArrayXd b_grid = log_grid / bp.kappa;
      try {
        const auto table = obs::make_brace_table(cfg.beam.n_f, l_f, bp,
                                                 to_spec(cfg.quad), cfg.beam.Z);

        Eigen::ArrayXd ratios(b_grid.size());
        for (Eigen::Index i = 0; i < b_grid.size(); ++i) {
          ratios[i] = obs::ratio_from_table(table, {b_grid[i]},
                                            {obs::FluxKind::kLocal, 0.0})
                          .value;
        }
        const auto rfit = obs::fit_scaling(b_grid, ratios);
        t.rows.push_back({std::string("ratio_local"),
                          static_cast<long long>(cfg.beam.n_f),
                          static_cast<long long>(l_f),
                          static_cast<long long>(m_gamma),
                          static_cast<long long>(bp.Lambda), bp.theta_k,
                          std::string{},
                          static_cast<double>(obs::ratio_small_b_exponent(l_f, bp)),
                          rfit.exact_zero ? 0.0 : rfit.slope, rfit.std_error,
                          static_cast<long long>(rfit.n_points)});

        for (int m_f : cfg.m_f) {
          if (std::abs(m_f) > l_f) continue;
          Eigen::ArrayXd amps(b_grid.size());
          for (Eigen::Index i = 0; i < b_grid.size(); ++i) {
            amps[i] = std::abs(obs::amplitude_from_table(table, m_f,
                                                         {b_grid[i]}));
          }
          const auto afit = obs::fit_scaling(b_grid, amps);
          const auto pred =
              obs::predict_scaling(cfg.beam.n_f, l_f, m_f, bp);
          t.rows.push_back({std::string("amplitude"),
                            static_cast<long long>(cfg.beam.n_f),
                            static_cast<long long>(l_f),
                            static_cast<long long>(m_gamma),
                            static_cast<long long>(bp.Lambda), bp.theta_k,
                            std::to_string(m_f),
                            static_cast<double>(pred.amp_exponent_b),
                            afit.exact_zero ? 0.0 : afit.slope,
                            afit.std_error,
                            static_cast<long long>(afit.n_points)});
        }
      } catch (const NumericalError& err) {
        t.rows.push_back({std::string("error"),
                          static_cast<long long>(cfg.beam.n_f),
                          static_cast<long long>(l_f),
                          static_cast<long long>(m_gamma),
                          static_cast<long long>(cfg.beam.Lambda),
                          cfg.beam.theta_k, std::string{}, std::string{},
                          std::string{},
                          std::string("numerical-error: ") + err.what(),
                          static_cast<long long>(0)});
        t.numerical_failure = true;
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

void add_beam_options(CLI::App* cmd, BeamCfg& cfg, bool atomic_scan) {
  cmd->add_option("--theta-k", cfg.theta_k, "Pitch angle in radians")
      ->capture_default_str();
  cmd->add_option("--lambda-hel", cfg.Lambda, "Helicity (+1 or -1)")
      ->capture_default_str();
  cmd->add_option("--m-gamma", cfg.m_gamma,
                  "Total angular momentum projection(s)");
  cmd->add_option("--wavelength-nm", cfg.wavelength_nm, "Photon wavelength");
  cmd->add_option("--n-f", cfg.n_f, "Excited principal quantum number");
  if (atomic_scan) {
    cmd->add_option("--Z", cfg.Z, "Nuclear charge")->capture_default_str();
  } else {
    cmd->add_option("--omega", cfg.omega,
                    "Wavenumber in 1/a0 (default 1 when no wavelength given)");
  }
}

void emit(const Table& table, const OutCfg& out) {
  std::ostringstream buffer;
  if (out.format == "json") {
    write_json(table, buffer);
  } else {
    write_csv(table, buffer);
  }
  if (out.path == "-") {
    std::cout << buffer.str();
  } else {
    std::ofstream f(out.path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + out.path);
    f << buffer.str();
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const Table& table, std::ostream& os) {
  os << "# twistbeam v" << kVersion << ' ' << kReleaseDate << ' '
     << hash_hex(table.config_line) << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << cell_to_string(row[i]);
    }
    os << '\n';
  }
}

void write_json(const Table& table, std::ostream& os) {
  nlohmann::json doc;
  doc["tool"] = "twistbeam";
  doc["version"] = kVersion;
  doc["date"] = kReleaseDate;
  doc["schema"] = 1;
  doc["config"] = table.config_line;
  doc["config_hash"] = hash_hex(table.config_line);
  doc["pw_flux_normalization"] = "cos(theta_k)*omega^2";
  doc["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& cell : row) {
      if (std::holds_alternative<long long>(cell)) {
        jr.push_back(std::get<long long>(cell));
      } else if (std::holds_alternative<double>(cell)) {
        const double v = std::get<double>(cell);
        if (std::isinf(v)) {
          jr.push_back(v > 0 ? "inf" : "-inf");
        } else {
          jr.push_back(v);
        }
      } else {
        jr.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Twisted-photon Bessel modes and hydrogen-like photoexcitation"};
  app.set_version_flag("--version",
                       std::string("twistbeam v") + kVersion);
  app.set_config("--config", "", "Flat key=value config file (flags win)");
  app.require_subcommand(1);

  FieldCfg field_cfg;
  auto* field = app.add_subcommand("field", "Sample potential, fields, and flux");
  field->configurable();
  field->fallthrough();
  add_beam_options(field, field_cfg.beam, false);
  add_quad_options(field, field_cfg.quad);
  add_out_options(field, field_cfg.out);
  field->add_option("--rho", field_cfg.rho, "Radial sample point(s) in a0");
  field->add_option("--rho-max", field_cfg.rho_max, "Radial grid end in a0");
  field->add_option("--points", field_cfg.points, "Radial grid size")
      ->check(CLI::PositiveNumber);
  field->add_option("--phi", field_cfg.phi, "Azimuth in radians");
  field->add_option("--z", field_cfg.z, "Axial coordinate in a0");

  FieldCfg flux_cfg;
  auto* fluxcmd = app.add_subcommand("flux", "Sample the energy flux profile");
  fluxcmd->configurable();
  fluxcmd->fallthrough();
  add_beam_options(fluxcmd, flux_cfg.beam, false);
  add_out_options(fluxcmd, flux_cfg.out);
  fluxcmd->add_option("--rho", flux_cfg.rho, "Radial sample point(s) in a0");
  fluxcmd->add_option("--rho-max", flux_cfg.rho_max, "Radial grid end in a0");
  fluxcmd->add_option("--points", flux_cfg.points, "Radial grid size")
      ->check(CLI::PositiveNumber);

  AmplitudeCfg amp_cfg;
  auto* amp = app.add_subcommand("amplitude",
                                 "Transition amplitudes across the vortex");
  amp->configurable();
  amp->fallthrough();
  add_beam_options(amp, amp_cfg.beam, true);
  add_quad_options(amp, amp_cfg.quad);
  add_out_options(amp, amp_cfg.out);
  amp->add_option("--l-f", amp_cfg.l_f, "Final orbital angular momentum")
      ->capture_default_str();
  amp->add_option("--b-min-lambda", amp_cfg.b_min_lambda,
                  "Impact parameter start, units of wavelength")
      ->capture_default_str();
  amp->add_option("--b-max-lambda", amp_cfg.b_max_lambda,
                  "Impact parameter end, units of wavelength")
      ->capture_default_str();
  amp->add_option("--b-points", amp_cfg.b_points, "Grid size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  amp->add_option("--phi-b", amp_cfg.phi_b, "Target azimuth in radians");

  RatioCfg ratio_cfg;
  auto* ratio = app.add_subcommand(
      "ratio", "Twisted-to-plane-wave cross-section ratio r_tw(b)");
  ratio->configurable();
  ratio->fallthrough();
  add_beam_options(ratio, ratio_cfg.beam, true);
  add_quad_options(ratio, ratio_cfg.quad);
  add_out_options(ratio, ratio_cfg.out);
  ratio->add_option("--l-f", ratio_cfg.l_f,
                    "Final orbital angular momentum value(s)");
  ratio->add_option("--convention", ratio_cfg.convention,
                    "Flux normalization")
      ->check(CLI::IsMember({"local", "integrated"}))
      ->capture_default_str();
  ratio->add_option("--aperture-lambda", ratio_cfg.aperture_lambda,
                    "Aperture radius for the integrated flux, units of "
                    "wavelength (0 = ten transverse periods)");
  ratio->add_option("--b-min-lambda", ratio_cfg.b_min_lambda,
                    "Impact parameter start, units of wavelength")
      ->capture_default_str();
  ratio->add_option("--b-max-lambda", ratio_cfg.b_max_lambda,
                    "Impact parameter end, units of wavelength")
      ->capture_default_str();
  ratio->add_option("--b-points", ratio_cfg.b_points, "Grid size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ratio->add_option("--figure", ratio_cfg.figure,
                    "Reproduction preset: 2, 3a, 3b, 3c, or 3d");

  ScalingCfg scaling_cfg;
  auto* scaling = app.add_subcommand(
      "scaling", "Small-b power-law fits against predicted exponents");
  scaling->configurable();
  scaling->fallthrough();
  add_beam_options(scaling, scaling_cfg.beam, true);
  add_quad_options(scaling, scaling_cfg.quad);
  add_out_options(scaling, scaling_cfg.out);
  scaling->add_option("--l-f", scaling_cfg.l_f,
                      "Final orbital angular momentum value(s)");
  scaling->add_option("--m-f", scaling_cfg.m_f,
                      "Projection(s) for amplitude slopes (default: Lambda)");
  scaling->add_option("--kappa-b-min", scaling_cfg.kappa_b_min,
                      "Grid start in kappa*b")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scaling->add_option("--kappa-b-max", scaling_cfg.kappa_b_max,
                      "Grid end in kappa*b")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scaling->add_option("--points", scaling_cfg.points, "Grid size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    Table table;
    const OutCfg* out = nullptr;
    if (app.got_subcommand(field)) {
      table = cmd_field(field_cfg);
      out = &field_cfg.out;
    } else if (app.got_subcommand(fluxcmd)) {
      table = cmd_flux(flux_cfg);
      out = &flux_cfg.out;
    } else if (app.got_subcommand(amp)) {
      table = cmd_amplitude(amp_cfg);
      out = &amp_cfg.out;
    } else if (app.got_subcommand(ratio)) {
      table = cmd_ratio(ratio_cfg);
      out = &ratio_cfg.out;
    } else {
      table = cmd_scaling(scaling_cfg);
      out = &scaling_cfg.out;
    }
    emit(table, *out);
    return table.numerical_failure ? kExitNumerical : kExitSuccess;
  } catch (const CLI::Error& e) {
    std::cerr << "twistbeam: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "twistbeam: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "twistbeam: numerical failure: " << e.what()
              << " (residual " << format_number(e.residual()) << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "twistbeam: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace twistbeam::cli
