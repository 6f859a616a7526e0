// freecontract: command-line front end for the free contraction norm toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 domain or numerical error.
// All randomness derives from --seed via (seed, stream) splitting.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "freecontract/additivity.hpp"
#include "freecontract/error.hpp"
#include "freecontract/freepower.hpp"
#include "freecontract/io.hpp"
#include "freecontract/qchannel.hpp"
#include "freecontract/random.hpp"
#include "freecontract/rmt_oracle.hpp"
#include "freecontract/tnorm.hpp"
#include "svg_contour.hpp"

namespace {

using fc::io::json;
using fc::io::format_double;

struct RunConfig {
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::string format = "json";
  std::string output;
};

// Primary output is assembled in memory and written only on success.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw fc::DomainError("cannot write " + cfg.output);
  out << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fc::DomainError("cannot write " + path);
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Master seed (64-bit)");
  sub->add_option("--tol", cfg.tol, "Numerical tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("-o,--output", cfg.output, "Primary output path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free contraction norm laboratory"};
  app.require_subcommand(1);
  RunConfig cfg;

  // measure
  auto* measure = app.add_subcommand("measure", "Atomic measure transforms");
  measure->require_subcommand(1);
  std::string measure_path;
  auto* rho_cmd = measure->add_subcommand("rho", "Nevanlinna measure rho of F_mu");
  auto* moments_cmd = measure->add_subcommand("moments", "Mean and variance");
  for (auto* s : {rho_cmd, moments_cmd}) {
    s->add_option("--measure", measure_path, "Measure JSON")->required();
    add_common(s, cfg);
  }

  // power
  auto* power = app.add_subcommand("power", "Fractional free convolution power");
  double T = 1.0;
  int grid = 0;
  power->add_option("--measure", measure_path, "Measure JSON")->required();
  power->add_option("--T", T, "Power T >= 1")->required();
  power->add_option("--density-grid", grid, "Density table size")->check(CLI::NonNegativeNumber);
  add_common(power, cfg);

  // tnorm
  auto* tnorm = app.add_subcommand("tnorm", "(t)-norm and its bounds");
  std::string spec_path;
  double t = 0.0;
  bool all_bounds = false;
  tnorm->add_option("--spec", spec_path, "HermitianSpec JSON")->required();
  tnorm->add_option("--t", t, "Trace of the projection, in (0, 1]")->required();
  tnorm->add_flag("--all-bounds", all_bounds, "Include every estimate");
  add_common(tnorm, cfg);

  // rmt
  auto* rmt = app.add_subcommand("rmt", "Random-matrix compression oracle");
  int N = 2000;
  bool with_ks = false;
  rmt->add_option("--spec", spec_path, "HermitianSpec JSON")->required();
  rmt->add_option("--t", t, "Trace of the projection, in (0, 1]")->required();
  rmt->add_option("--N", N, "Matrix size")->check(CLI::PositiveNumber);
  rmt->add_flag("--ks", with_ks, "Report the KS distance to the exact power");
  add_common(rmt, cfg);

  // channel
  auto* channel = app.add_subcommand("channel", "Random quantum channels");
  channel->require_subcommand(1);
  int k = 2, n = 2, count = 1000, restarts = 8;
  auto* ch_sample = channel->add_subcommand("sample", "Output spectra of random pure inputs");
  auto* ch_bell = channel->add_subcommand("bell", "Bell-state output of Phi ⊗ conj Phi");
  auto* ch_conc = channel->add_subcommand("concentration", "L2 distance to I/k");
  auto* ch_hmin = channel->add_subcommand("hmin", "Minimum output entropy estimate");
  for (auto* s : {ch_sample, ch_bell, ch_conc, ch_hmin}) {
    s->add_option("--k", k, "Output dimension")->required()->check(CLI::PositiveNumber);
    s->add_option("--n", n, "Environment dimension")->required()->check(CLI::PositiveNumber);
    s->add_option("--t", t, "Input fraction d = floor(t k n)")->required();
    s->add_option("--count", count, "Number of sampled inputs")->check(CLI::PositiveNumber);
    s->add_option("--restarts", restarts, "Local-search restarts")->check(CLI::PositiveNumber);
    add_common(s, cfg);
  }

  // violation
  auto* violation = app.add_subcommand("violation", "Additivity violation gap g(k, r)");
  violation->require_subcommand(1);
  int vk = 0;
  double vr = 0.0;
  auto* v_eval = violation->add_subcommand("eval", "Evaluate g at one (k, r)");
  v_eval->add_option("--k", vk, "Dimension k >= 2")->required();
  v_eval->add_option("--r", vr, "Exponent r in [1, 2)")->required();
  add_common(v_eval, cfg);
  double kmin = 1e4, kmax = 1e5, rmin = 1.0, rmax = 2.0, rstep = 0.001;
  int kpoints = 200;
  std::string csv_path, svg_path;
  auto* v_scan = violation->add_subcommand("scan", "Grid scan and minimal violating k");
  v_scan->add_option("--kmin", kmin, "Smallest k");
  v_scan->add_option("--kmax", kmax, "Largest k");
  v_scan->add_option("--kpoints", kpoints, "Log-spaced k points")->check(CLI::PositiveNumber);
  v_scan->add_option("--rmin", rmin, "Smallest r");
  v_scan->add_option("--rmax", rmax, "Exclusive upper r");
  v_scan->add_option("--rstep", rstep, "r step");
  v_scan->add_option("--csv", csv_path, "Contour CSV path (k,r,t,g)");
  v_scan->add_option("--svg", svg_path, "Zero-contour SVG path");
  add_common(v_scan, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*measure) {
      const auto mu = fc::io::measure_from_json(fc::io::read_json_file(measure_path));
      const auto m = fc::moments(mu);
      json out = {{"mean", m.mean}, {"variance", m.variance}, {"seed", cfg.seed}};
      if (*rho_cmd) {
        const auto rho = fc::nevanlinna_rho(mu);
        out["rho"] = fc::io::to_json(rho)["atoms"];
        out["rho_mass"] = rho.total_mass();
      }
      emit(cfg, dump(out));
    } else if (*power) {
      const auto mu = fc::io::measure_from_json(fc::io::read_json_file(measure_path));
      const auto r = fc::free_power(mu, T);
      json out = fc::io::to_json(r, grid);
      out["seed"] = cfg.seed;
      if (T == 1.0) out["measure"] = fc::io::to_json(mu);
      emit(cfg, dump(out));
    } else if (*tnorm) {
      const auto spec = fc::io::spec_from_json(fc::io::read_json_file(spec_path));
      fc::TNormReport rep;
      if (all_bounds) {
        rep = fc::tnorm_report(spec, t);
      } else {
        rep.t = t;
        rep.exact = fc::tnorm_exact(spec, t);
        const auto ub = fc::upper_bound(spec, t);
        rep.upper_thm = ub.bound;
        rep.upper_thm_abs = ub.bound_abs;
        rep.atom_dominated = ub.atom_dominated;
        rep.asymptote = fc::superconvergence_asymptote(spec, t);
      }
      if (cfg.format == "csv") {
        emit(cfg, fc::io::tnorm_csv_header() + "\n" + fc::io::tnorm_csv_row(rep) + "\n");
      } else {
        json out = fc::io::to_json(rep);
        out["seed"] = cfg.seed;
        emit(cfg, dump(out));
      }
    } else if (*rmt) {
      const auto spec = fc::io::spec_from_json(fc::io::read_json_file(spec_path));
      const auto sample = fc::compressed_spectrum(spec, t, N, cfg.seed);
      std::ostringstream csv;
      csv << "N,t,seed,eigenvalue\n";
      for (double e : sample.eigenvalues) {
        csv << N << ',' << format_double(t) << ',' << cfg.seed << ',' << format_double(e)
            << '\n';
      }
      json meta = {{"generator", std::string(fc::rng::kGeneratorName)},
                   {"spec_hash", fc::io::spec_hash(spec)},
                   {"N", N},
                   {"t", t},
                   {"seed", cfg.seed},
                   {"count", sample.eigenvalues.size()},
                   {"top_times_t", sample.eigenvalues.back() * t}};
      if (with_ks) {
        meta["ks"] = fc::ks_distance(sample, fc::free_power(spec.measure(), 1.0 / t));
      }
      emit(cfg, csv.str());
      if (!cfg.output.empty()) {
        write_file(cfg.output + ".meta.json", dump(meta));
      } else {
        std::cerr << meta.dump() << "\n";
      }
    } else if (*channel) {
      const auto ch = fc::random_channel(k, n, t, cfg.seed);
      json base = {{"k", k}, {"n", n}, {"t", ch.t_effective()}, {"t_nominal", t},
                   {"d", ch.d()}, {"seed", cfg.seed}};
      if (*ch_sample) {
        const auto spectra = fc::sample_output_spectra(ch, count, cfg.seed);
        std::ostringstream csv;
        csv << "seed,index";
        for (int i = 0; i < k; ++i) csv << ",lambda" << (i + 1);
        csv << '\n';
        for (std::size_t s = 0; s < spectra.size(); ++s) {
          csv << cfg.seed << ',' << s;
          for (double v : spectra[s]) csv << ',' << format_double(v);
          csv << '\n';
        }
        emit(cfg, csv.str());
      } else if (*ch_bell) {
        const auto out_state = fc::bell_output(ch);
        const auto spectrum = out_state.spectrum();
        base["lambda_max"] = spectrum.front();
        base["entropy"] = fc::entropy(spectrum);
        base["product_bound"] = fc::product_bound(k, ch.t_effective());
        base["eigenvalues"] = spectrum;
        emit(cfg, dump(base));
      } else if (*ch_conc) {
        const auto cs = fc::concentration_stat(ch, count, cfg.seed);
        base["count"] = count;
        base["max_l2"] = cs.max_l2;
        base["bound"] = cs.bound;
        base["regime_ok"] = cs.regime_ok;
        if (!cs.regime_ok) std::cerr << "warning: t > 1 - 1/k, outside the bound's regime\n";
        emit(cfg, dump(base));
      } else {
        base["restarts"] = restarts;
        base["hmin_estimate"] = fc::hmin_estimate(ch, restarts, cfg.seed);
        emit(cfg, dump(base));
      }
    } else if (*v_eval) {
      const auto rep = fc::gap_g(vk, vr);
      if (cfg.format == "csv") {
        std::ostringstream csv;
        csv << "k,r,t,g\n" << rep.k << ',' << format_double(rep.r) << ','
            << format_double(rep.t) << ',' << format_double(rep.g) << '\n';
        emit(cfg, csv.str());
      } else {
        json out = fc::io::to_json(rep);
        out["seed"] = cfg.seed;
        emit(cfg, dump(out));
      }
    } else if (*v_scan) {
      const auto ks = fc::log_spaced_k(kmin, kmax, kpoints);
      const auto rs = fc::r_grid(rmin, rmax, rstep);
      const auto summary = fc::scan_violation(ks, rs);
      json out = {{"k_points", ks.size()}, {"r_points", rs.size()}, {"seed", cfg.seed}};
      if (summary.min_violating_k) {
        out["min_violating_k"] = *summary.min_violating_k;
        out["argmin_r"] = summary.argmin_r;
        out["g"] = summary.g_at_min;
        out["refined_min_k"] = *summary.refined_min_k;
        out["refined_r"] = summary.refined_r;
        out["refined_g"] = summary.refined_g;
      } else {
        out["min_violating_k"] = nullptr;
      }
      std::string csv_text, svg_text;
      if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "k,r,t,g\n";
        for (const auto& c : summary.cells) {
          csv << c.k << ',' << format_double(c.r) << ',' << format_double(c.t) << ','
              << (c.g ? format_double(*c.g) : "") << '\n';
        }
        csv_text = csv.str();
      }
      if (!svg_path.empty()) svg_text = fc::tools::zero_contour_svg(ks, rs, summary.cells);
      emit(cfg, dump(out));
      if (!csv_path.empty()) write_file(csv_path, csv_text);
      if (!svg_path.empty()) write_file(svg_path, svg_text);
    }
  } catch (const fc::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fc::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
