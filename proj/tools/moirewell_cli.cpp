// Command-line front end: reproducible band sweeps, well surveys, determinant
// contours, quasimode expansions, quantization tables, and the verification
// suite. Every output file embeds the resolved configuration and the build
// version; identical configurations produce byte-identical files.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "moirewell/bohr.hpp"
#include "moirewell/common.hpp"
#include "moirewell/models.hpp"
#include "moirewell/spectra.hpp"
#include "moirewell/svg.hpp"
#include "moirewell/symbols.hpp"
#include "moirewell/wkb.hpp"

using namespace moirewell;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* spec, ...) {
  char buf[512];
  va_list args;
  va_start(args, spec);
  std::vsnprintf(buf, sizeof buf, spec, args);
  va_end(args);
  return buf;
}

// "p/q" parses exactly; anything else goes through strtod.
struct Ratio {
  double value = 0.0;
  long num = 0, den = 0;  // den stays 0 for plain decimals
};

Ratio parse_ratio(const std::string& text) {
  Ratio r;
  const auto slash = text.find('/');
  char* end = nullptr;
  if (slash != std::string::npos) {
    r.num = std::strtol(text.c_str(), &end, 10);
    if (end != text.c_str() + slash)
      throw ConfigError("could not parse '" + text + "' as p/q");
    r.den = std::strtol(text.c_str() + slash + 1, &end, 10);
    if (*end != '\0' || r.den == 0)
      throw ConfigError("could not parse '" + text + "' as p/q");
    r.value = double(r.num) / double(r.den);
  } else {
    r.value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
      throw ConfigError("could not parse '" + text + "' as a number");
  }
  return r;
}

struct RunConfig {
  std::string model = "harper";
  std::string limit = "general";
  ModelKind kind = ModelKind::Harper;
  ModelParams params;
  bool w0_defaulted = true, w1_defaulted = true;
  bool has_h = false, has_L = false;
  double h = 0.0;
  std::string h_text;
  long flux_p = 0, flux_q = 0;
  int N = 0;  // 0 resolves to a per-command default
  int kgrid = 64;
  std::string outdir = "out";
};

// Raw option storage plus the CLI11 handles needed to tell a flag that was
// passed from one that kept its default (config-file values fill the gaps).
struct CommonCli {
  std::string model = "harper", limit = "general";
  double w0 = 0.0, w1 = 1.0, kperp = 0.0;
  std::string h_text, L_text, outdir, config_path;
  int N = 0, kgrid = 64;
  CLI::Option *o_model = nullptr, *o_limit = nullptr, *o_w0 = nullptr,
              *o_w1 = nullptr, *o_kperp = nullptr, *o_h = nullptr,
              *o_L = nullptr, *o_N = nullptr, *o_kgrid = nullptr,
              *o_outdir = nullptr, *o_config = nullptr;
};

void add_common(CLI::App* cmd, CommonCli& c) {
  cmd->set_help_flag("--help", "print this help and exit");  // frees -h/--h
  c.o_model = cmd->add_option("--model", c.model, "harper or lowenergy")
                  ->check(CLI::IsMember({"harper", "lowenergy"}));
  c.o_limit =
      cmd->add_option("--limit", c.limit, "chiral, antichiral, or general")
          ->check(CLI::IsMember({"chiral", "antichiral", "general"}));
  c.o_w0 = cmd->add_option("--w0", c.w0, "acoustic coupling");
  c.o_w1 = cmd->add_option("--w1", c.w1, "chiral coupling");
  c.o_kperp = cmd->add_option("--kperp", c.kperp, "transverse momentum");
  c.o_h = cmd->add_option("--h", c.h_text,
                          "semiclassical parameter, decimal or exact p/q");
  c.o_L = cmd->add_option("--L", c.L_text,
                          "flux denominator (integer L means flux 1/L, or p/q)");
  c.o_N = cmd->add_option("--N", c.N, "mode truncation (0 = per-command default)");
  c.o_kgrid = cmd->add_option("--kgrid", c.kgrid, "quasimomentum grid size");
  c.o_outdir = cmd->add_option("--outdir", c.outdir, "output directory");
  c.o_config = cmd->add_option("--config", c.config_path,
                               "JSON file with the same keys; flags override");
}

// Layered resolution: defaults, then the config file, then explicit flags,
// with MOIREWELL_OUTDIR between file and flag for the output directory.
RunConfig resolve(const CommonCli& c) {
  ojson file = ojson::object();
  if (c.o_config->count()) {
    std::ifstream in(c.config_path);
    if (!in) throw ConfigError("cannot open config file " + c.config_path);
    try {
      in >> file;
    } catch (const std::exception& e) {
      throw ConfigError("config file " + c.config_path + ": " + e.what());
    }
  }
  const auto file_text = [&](const char* key) -> std::optional<std::string> {
    if (!file.contains(key)) return std::nullopt;
    const auto& v = file.at(key);
    if (v.is_string()) return v.get<std::string>();
    return fmt("%.17g", v.get<double>());
  };

  RunConfig cfg;
  cfg.model = c.o_model->count() ? c.model : file.value("model", cfg.model);
  cfg.limit = c.o_limit->count() ? c.limit : file.value("limit", cfg.limit);
  cfg.kind = model_from_name(cfg.model);
  cfg.params.w0 = c.o_w0->count() ? c.w0 : file.value("w0", 0.0);
  cfg.params.w1 = c.o_w1->count() ? c.w1 : file.value("w1", 1.0);
  cfg.params.kperp = c.o_kperp->count() ? c.kperp : file.value("kperp", 0.0);
  cfg.w0_defaulted = !c.o_w0->count() && !file.contains("w0");
  cfg.w1_defaulted = !c.o_w1->count() && !file.contains("w1");
  cfg.N = c.o_N->count() ? c.N : file.value("N", 0);
  cfg.kgrid = c.o_kgrid->count() ? c.kgrid : file.value("kgrid", 64);

  std::string h_text = c.o_h->count() ? c.h_text : file_text("h").value_or("");
  std::string L_text = c.o_L->count() ? c.L_text : file_text("L").value_or("");
  if (!h_text.empty() && !L_text.empty())
    throw ConfigError("--h and --L are mutually exclusive");
  if (!h_text.empty()) {
    const Ratio r = parse_ratio(h_text);
    if (r.value <= 0.0) throw ConfigError("--h must be positive");
    cfg.has_h = true;
    cfg.h = r.value;
    cfg.h_text = h_text;
  }
  if (!L_text.empty()) {
    const Ratio r = parse_ratio(L_text);
    long p = 1, q = 0;
    if (r.den != 0) {
      p = r.num;
      q = r.den;
    } else {
      q = std::lround(r.value);
      if (double(q) != r.value)
        throw ConfigError("--L must be an integer or an exact p/q");
    }
    if (p < 1 || q < 1) throw ConfigError("--L needs positive p and q");
    const long g = std::gcd(p, q);
    cfg.has_L = true;
    cfg.flux_p = p / g;
    cfg.flux_q = q / g;
  }

  const char* env = std::getenv("MOIREWELL_OUTDIR");
  if (c.o_outdir->count())
    cfg.outdir = c.outdir;
  else if (env && *env)
    cfg.outdir = env;
  else
    cfg.outdir = file.value("outdir", std::string("out"));

  if (cfg.limit == "chiral") {
    if (!cfg.w0_defaulted && cfg.params.w0 != 0.0)
      throw ConfigError("limit 'chiral' forces w0 = 0; drop --w0 or pass 0");
    cfg.params.w0 = 0.0;
  } else if (cfg.limit == "antichiral") {
    if (!cfg.w1_defaulted && cfg.params.w1 != 0.0)
      throw ConfigError("limit 'antichiral' forces w1 = 0; drop --w1 or pass 0");
    cfg.params.w1 = 0.0;
  }
  return cfg;
}

ojson config_json(const RunConfig& cfg) {
  ojson j;
  j["model"] = cfg.model;
  j["limit"] = cfg.limit;
  j["w0"] = cfg.params.w0;
  j["w0_defaulted"] = cfg.w0_defaulted;
  j["w1"] = cfg.params.w1;
  j["w1_defaulted"] = cfg.w1_defaulted;
  j["kperp"] = cfg.params.kperp;
  if (cfg.has_h) {
    j["h"] = cfg.h;
    j["h_text"] = cfg.h_text;
  }
  if (cfg.has_L) j["flux"] = fmt("%ld/%ld", cfg.flux_p, cfg.flux_q);
  if (cfg.N > 0) j["N"] = cfg.N;
  j["kgrid"] = cfg.kgrid;
  j["outdir"] = cfg.outdir;
  return j;
}

ojson meta_head(const char* command, const RunConfig& cfg) {
  ojson j;
  j["version"] = version_string();
  j["command"] = command;
  j["config"] = config_json(cfg);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << body;
  std::printf("wrote %s\n", path.string().c_str());
}

std::filesystem::path out_path(const RunConfig& cfg, const char* name) {
  std::filesystem::create_directories(cfg.outdir);
  return std::filesystem::path(cfg.outdir) / name;
}

// ---------------------------------------------------------------------------
// bands
// ---------------------------------------------------------------------------
int cmd_bands(const RunConfig& cfg, bool want_svg) {
  if (cfg.kgrid < 2) throw ConfigError("the k-grid needs at least 2 points");
  ojson meta = meta_head("bands", cfg);
  ojson diag;
  BandStructure bs;
  std::string xlabel;

  if (cfg.kind == ModelKind::Harper) {
    if (!cfg.has_L)
      throw ConfigError("bands for the lattice model needs --L (flux p/q)");
    const int p = int(cfg.flux_p), q = int(cfg.flux_q);
    bs = band_sweep(
        [&](double kx) { return tight_binding_bloch(p, q, kx, cfg.params); },
        uniform_grid(0.0, 2.0 * kPi, cfg.kgrid));
    xlabel = "k_x";
    diag["dimension"] = 4 * q;
  } else {
    if (!cfg.has_h)
      throw ConfigError("bands for the continuum model needs --h");
    const int N = cfg.N > 0 ? cfg.N : 96;
    bs = band_sweep(
        [&](double kx) { return lowenergy_bloch(kx, cfg.h, N, cfg.params); },
        uniform_grid(0.0, 2.0 * kPi * cfg.h, cfg.kgrid));
    for (auto& kx : bs.kx) kx /= cfg.h;  // figure axis runs in k_x/h
    xlabel = "k_x/h";
    diag["modes"] = 2 * N + 1;
    diag["fiber_extent"] = 2.0 * kPi * cfg.h * N;
  }

  // Keep the bands that enter the window [-2, 2].
  const int nb = int(bs.levels.cols());
  int blo = nb, bhi = -1;
  for (int b = 0; b < nb; ++b) {
    if (bs.levels.col(b).maxCoeff() >= -2.0 &&
        bs.levels.col(b).minCoeff() <= 2.0) {
      blo = std::min(blo, b);
      bhi = std::max(bhi, b);
    }
  }
  diag["kx_units"] = xlabel;
  diag["spectral_range"] = {bs.levels.minCoeff(), bs.levels.maxCoeff()};
  diag["window"] = {-2.0, 2.0};
  diag["bands_in_window"] =
      blo <= bhi ? ojson{blo, bhi} : ojson{nullptr, nullptr};

  std::string csv = "kx,band_index,eigenvalue\n";
  for (int b = blo; b <= bhi; ++b)
    for (size_t i = 0; i < bs.kx.size(); ++i)
      csv += fmt("%.12g,%d,%.12g\n", bs.kx[i], b, bs.levels(long(i), b));
  write_file(out_path(cfg, "bands.csv"), csv);

  if (want_svg && blo <= bhi) {
    BandStructure windowed;
    windowed.kx = bs.kx;
    windowed.levels = bs.levels.middleCols(blo, bhi - blo + 1);
    SvgOptions opt;
    opt.title = fmt("%s bands, w0=%g, w1=%g", cfg.model.c_str(),
                    cfg.params.w0, cfg.params.w1);
    opt.xlabel = xlabel;
    opt.ylabel = "energy";
    opt.ymin = -2.0;
    opt.ymax = 2.0;
    write_file(out_path(cfg, "bands.svg"), band_diagram_svg(windowed, opt));
  }

  meta["diagnostics"] = diag;
  write_file(out_path(cfg, "bands.meta.json"), meta.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// wells
// ---------------------------------------------------------------------------
int cmd_wells(const RunConfig& cfg, int grid) {
  if (cfg.params.w0 != 0.0)
    throw ConfigError(
        "the well survey runs on the chiral branch; use --limit chiral");
  const ZeroSetSurvey survey = survey_zero_set(cfg.kind, cfg.params, grid);
  ojson j = meta_head("wells", cfg);
  j["grid"] = grid;
  j["wells"] = ojson::array();
  for (const auto& w : survey.wells) {
    ojson e;
    e["x0"] = w.x0;
    e["xi0"] = w.xi0;
    e["double_degenerate"] = w.double_degenerate;
    e["scale"] = w.scale;
    e["omega"] = w.omega;
    e["mu1"] = w.mu1;
    e["mu2"] = w.mu2;
    e["c"] = w.c;
    j["wells"].push_back(e);
  }
  j["isolated_zeros"] = ojson::array();
  for (const auto& z : survey.isolated_zeros)
    j["isolated_zeros"].push_back({z[0], z[1]});
  write_file(out_path(cfg, "wells.json"), j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// contour
// ---------------------------------------------------------------------------
int cmd_contour(const RunConfig& cfg, int grid) {
  if (cfg.params.w0 != 0.0)
    throw ConfigError(
        "the determinant contour runs on the chiral branch; use --limit chiral");
  if (grid < 8) throw ConfigError("--grid needs at least 8 cells");
  const PhaseSpaceSymbol D = chiral_offdiag(cfg.kind, cfg.params);
  const bool xi_periodic = (cfg.kind == ModelKind::Harper);
  const double ylo = xi_periodic ? 0.0 : -(2.0 * cfg.params.w1 + 0.5);
  const double yhi = xi_periodic ? 1.0 : (2.0 * cfg.params.w1 + 0.5);

  Eigen::MatrixXd values(grid, grid);
  std::string csv = "x,xi,log10_abs_det\n";
  for (int i = 0; i < grid; ++i) {
    const double xi = ylo + (i + 0.5) * (yhi - ylo) / grid;
    for (int jx = 0; jx < grid; ++jx) {
      const double x = (jx + 0.5) / grid;
      const double v =
          std::log10(std::max(std::abs(det_principal(D, x, xi)), 1e-300));
      values(i, jx) = v;
      csv += fmt("%.12g,%.12g,%.12g\n", x, xi, v);
    }
  }
  const auto curves = trace_zero_set(cfg.kind, cfg.params, grid);
  write_file(out_path(cfg, "contour.csv"), csv);

  SvgOptions opt;
  opt.title = fmt("log10 |det| of the %s chiral block, w1=%g",
                  cfg.model.c_str(), cfg.params.w1);
  opt.xlabel = "x";
  opt.ylabel = "xi";
  write_file(out_path(cfg, "contour.svg"),
             heatmap_svg(values, 0.0, 1.0, ylo, yhi, opt, curves));

  ojson meta = meta_head("contour", cfg);
  meta["diagnostics"] = {{"grid", grid}, {"zero_curves", curves.size()}};
  write_file(out_path(cfg, "contour.meta.json"), meta.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// wkb
// ---------------------------------------------------------------------------
int cmd_wkb(const RunConfig& cfg, const std::string& well_text, int n,
            int order, int branch) {
  if (cfg.params.w0 != 0.0)
    throw ConfigError(
        "quasimode expansions run on the chiral branch; use --limit chiral");
  const auto comma = well_text.find(',');
  if (comma == std::string::npos)
    throw ConfigError("--well expects 'x0,xi0' (each decimal or p/q)");
  const double wx = parse_ratio(well_text.substr(0, comma)).value;
  const double wxi = parse_ratio(well_text.substr(comma + 1)).value;
  if (n < 0) throw ConfigError("--n must be nonnegative");
  if (order < 0) throw ConfigError("--order must be nonnegative");
  if (branch < -1 || branch > 1)
    throw ConfigError("--branch must be 0 or 1 (omit for both)");

  const auto wells = find_wells(cfg.kind, cfg.params);
  const WellReport* hit = nullptr;
  const bool xi_periodic = (cfg.kind == ModelKind::Harper);
  for (const auto& w : wells) {
    double dx = std::abs(wx - w.x0);
    dx = std::min(dx, 1.0 - dx);
    double dxi = std::abs(wxi - w.xi0);
    if (xi_periodic) dxi = std::min(dxi, 1.0 - dxi);
    if (std::hypot(dx, dxi) < 1e-6) hit = &w;
  }
  if (!hit) {
    std::string found = "no well at the requested point; the survey found:";
    for (const auto& w : wells) found += fmt(" (%.6f, %.6f)", w.x0, w.xi0);
    throw ConfigError(found);
  }

  const PhaseSpaceSymbol T = well_normal_form(cfg.kind, cfg.params, *hit, order);
  const NormalFormData nf = extract_normal_form(T);
  std::vector<double> hs;
  for (int e = 6; e <= 12; ++e) hs.push_back(std::pow(2.0, -e));

  ojson j = meta_head("wkb", cfg);
  j["well"] = {{"x0", hit->x0},       {"xi0", hit->xi0},
               {"scale", hit->scale}, {"omega", nf.omega},
               {"mu1", nf.mu1},       {"mu2", nf.mu2},
               {"c", hit->c}};
  j["n"] = n;
  j["order"] = order;
  j["level_note"] =
      "operator levels are scale * h * (sum_k lambda_k h^(k/2))";
  j["branches"] = ojson::array();

  const WkbResult* sampled = nullptr;
  WkbResult keep;
  for (int b : (branch >= 0 ? std::vector<int>{branch}
                            : std::vector<int>{0, 1})) {
    ojson e;
    e["branch"] = b;
    e["ladder_value"] = (2 * n + 1) * nf.omega + (b == 0 ? nf.mu1 : nf.mu2);
    try {
      const WkbResult r = wkb_recurrence(T, n, b, order);
      const ResidualScan scan = residual_scan(T, r, hs);
      e["lambdas"] = r.lambda;
      e["residual_slope"] = scan.slope;
      e["fit_diagnostics"] = {{"h", scan.h}, {"residual", scan.residual}};
      if (!sampled) {
        keep = r;
        sampled = &keep;
      }
    } catch (const ResonantObstruction& ex) {
      e["obstructed"] = ex.what();
      e["obstructed_at_step"] = ex.step;
    }
    j["branches"].push_back(e);
  }

  if (cfg.has_h && sampled) {
    const GaussianAmplitude u = wkb_amplitude(*sampled, cfg.h);
    const PeriodizedMode m =
        periodize(u, cfg.h, hit->x0, hit->xi0, 2048, 0.25);
    std::string csv = "x,re0,im0,re1,im1\n";
    for (size_t i = 0; i < m.x.size(); ++i)
      csv += fmt("%.12g,%.12g,%.12g,%.12g,%.12g\n", m.x[i],
                 m.values[i][0].real(), m.values[i][0].imag(),
                 m.values[i][1].real(), m.values[i][1].imag());
    write_file(out_path(cfg, "wkb_mode.csv"), csv);
    j["mode_samples"] = {{"file", "wkb_mode.csv"},
                         {"h", cfg.h},
                         {"norm", m.norm},
                         {"mass_outside", m.mass_outside}};
  }
  write_file(out_path(cfg, "wkb.json"), j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// bs
// ---------------------------------------------------------------------------
int cmd_bs(const RunConfig& cfg, int branch, int levels, int count) {
  if (cfg.kind != ModelKind::Harper)
    throw ConfigError("quantization tables exist for the lattice model only");
  if (cfg.params.w1 != 0.0)
    throw ConfigError(
        "quantization tables run on the anti-chiral branch; use --limit "
        "antichiral");
  if (cfg.params.w0 <= 0.0) throw ConfigError("--w0 must be positive");
  if (!cfg.has_h && !cfg.has_L)
    throw ConfigError("pass --h or --L for the quantization tables");
  if (branch < 0 || branch > 4)
    throw ConfigError("--j must be 1..4 (0 for all branches)");
  if (levels < 1 || count < 8)
    throw ConfigError("--levels needs >= 1 and --count >= 8");
  const double h = cfg.has_h ? cfg.h
                             : double(cfg.flux_p) / (2.0 * kPi * cfg.flux_q);

  const int N =
      cfg.N > 0 ? cfg.N : std::max(128, int(std::ceil(2.4 / (2.0 * kPi * h))));
  const Eigen::VectorXd spectrum =
      hermitian_eigensolve(circle_quantize(harper_symbol(cfg.params), h, N));

  const auto wells = antichiral_wells(ModelKind::Harper, cfg.params);
  const PhaseSpaceSymbol diag = antichiral_diag(ModelKind::Harper, cfg.params);
  const double saddle = std::min(4.0, 4.0 * cfg.params.w0);

  ojson j = meta_head("bs", cfg);
  j["h"] = h;
  j["N"] = N;
  j["levels"] = ojson::array();

  for (int jj = (branch == 0 ? 1 : branch);
       jj <= (branch == 0 ? 4 : branch); ++jj) {
    const AntiChiralWell* w = nullptr;
    for (const auto& cand : wells)
      if (cand.branch == jj - 1) w = &cand;
    if (!w) throw ConfigError(fmt("no minimum found on branch %d", jj));

    ScalarSymbolSeries p;
    p.p0 = diag.at(0, jj - 1, jj - 1) - ScalarSymbol(cplx(w->bottom));
    p.x0 = w->x0;
    p.xi0 = w->xi0;
    // The top of the table stays 10% under the saddle: the coefficient
    // tabulation differences at 5% spacing, so orbits up to 1.05 * tau_hi
    // must still close.
    const FTable table = F_table(p, saddle * 1e-3, saddle * 0.90, count);

    std::string csv = "tau,F0,F1,F2\n";
    for (size_t i = 0; i < table.tau.size(); ++i)
      csv += fmt("%.12g,%.12g,%.12g,%.12g\n", table.tau[i], table.F0[i],
                 table.F1[i], table.F2[i]);
    write_file(out_path(cfg, fmt("bs_branch%d.csv", jj).c_str()), csv);

    for (int k = 1; k <= levels; ++k) {
      double tau;
      try {
        tau = invert_F(table, k, h);
      } catch (const OutOfRange&) {
        break;  // bound states above the saddle are not quantized here
      }
      const double prediction = w->bottom + tau;
      double matched = spectrum[0];
      for (int i = 0; i < spectrum.size(); ++i)
        if (std::abs(spectrum[i] - prediction) < std::abs(matched - prediction))
          matched = spectrum[i];
      j["levels"].push_back({{"j", jj},
                             {"k", k},
                             {"prediction", prediction},
                             {"matched_eigenvalue", matched},
                             {"gap", std::abs(matched - prediction)}});
    }
  }
  write_file(out_path(cfg, "bs_levels.json"), j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------
int run_acceptance(const std::vector<std::string>& args) {
  char self[4096];
  const ssize_t len = readlink("/proc/self/exe", self, sizeof self - 1);
  if (len <= 0) throw ConfigError("cannot locate this executable");
  self[len] = '\0';
  const std::filesystem::path binary =
      std::filesystem::path(self).parent_path() / "acceptance";
  if (!std::filesystem::exists(binary))
    throw ConfigError("the acceptance binary is expected next to this tool "
                      "(build it with the same tree): " +
                      binary.string());

  std::vector<std::string> argv_store = {binary.string()};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  argv.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    execv(argv[0], argv.data());
    _exit(127);
  }
  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) == 127)
    throw std::runtime_error("could not run " + binary.string());
  return WEXITSTATUS(status);
}

int cmd_verify(const std::string& suite) {
  static const std::map<std::string, int> named = {
      {"moyal", 1},      {"wells", 2},        {"lowenergy", 3},
      {"harper", 4},     {"flatbands", 5},    {"quasimodes", 6},
      {"galerkin", 7},   {"periodization", 8}, {"antichiral", 9},
      {"structure", 10}};
  if (suite == "all") return run_acceptance({});
  int id = 0;
  if (const auto it = named.find(suite); it != named.end()) {
    id = it->second;
  } else {
    char* end = nullptr;
    id = int(std::strtol(suite.c_str(), &end, 10));
    if (!end || *end != '\0' || id < 1 || id > 10) {
      std::string options = "all";
      for (const auto& [name, num] : named)
        options += fmt(", %s (%d)", name.c_str(), num);
      throw ConfigError("unknown suite '" + suite + "'; options: " + options);
    }
  }
  return run_acceptance({"--criterion", fmt("%d", id)});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral toolkit for one-dimensional moire models"};
  app.require_subcommand(1);

  CommonCli bands_cli, wells_cli, contour_cli, wkb_cli, bs_cli;
  bool bands_svg = true;
  int wells_grid = 256, contour_grid = 128;
  std::string wkb_well;
  int wkb_n = 0, wkb_order = 2, wkb_branch = -1;
  int bs_j = 0, bs_levels = 8, bs_count = 80;
  std::string verify_suite = "all";

  CLI::App* bands = app.add_subcommand("bands", "band diagram sweep");
  add_common(bands, bands_cli);
  bands->add_flag("--svg,!--no-svg", bands_svg, "emit the SVG figure");

  CLI::App* wells = app.add_subcommand("wells", "survey the chiral zero set");
  add_common(wells, wells_cli);
  wells->add_option("--grid", wells_grid, "survey grid resolution");

  CLI::App* contour =
      app.add_subcommand("contour", "determinant magnitude heat map");
  add_common(contour, contour_cli);
  contour->add_option("--grid", contour_grid, "heat map resolution");

  CLI::App* wkb =
      app.add_subcommand("wkb", "quasimode expansion at a degenerate well");
  add_common(wkb, wkb_cli);
  wkb->add_option("--well", wkb_well, "well location 'x0,xi0'")->required();
  wkb->add_option("--n", wkb_n, "oscillator mode");
  wkb->add_option("--order", wkb_order, "expansion order (half-powers of h)");
  wkb->add_option("--branch", wkb_branch, "component 0 or 1 (omit for both)");

  CLI::App* bs =
      app.add_subcommand("bs", "action quantization tables, anti-chiral wells");
  add_common(bs, bs_cli);
  bs->add_option("--j", bs_j, "branch 1..4 (0 = all)");
  bs->add_option("--levels", bs_levels, "levels per branch");
  bs->add_option("--count", bs_count, "energy grid size for the tables");

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--suite", verify_suite,
                     "all, a criterion number, or a named group");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    set_blas_threads(1);
    if (bands->parsed()) return cmd_bands(resolve(bands_cli), bands_svg);
    if (wells->parsed()) return cmd_wells(resolve(wells_cli), wells_grid);
    if (contour->parsed())
      return cmd_contour(resolve(contour_cli), contour_grid);
    if (wkb->parsed())
      return cmd_wkb(resolve(wkb_cli), wkb_well, wkb_n, wkb_order, wkb_branch);
    if (bs->parsed()) return cmd_bs(resolve(bs_cli), bs_j, bs_levels, bs_count);
    if (verify->parsed()) return cmd_verify(verify_suite);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
  return 0;
}
