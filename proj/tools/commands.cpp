#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "andersonlab/nls.hpp"
#include "andersonlab/propagator.hpp"
#include "andersonlab/strichartz.hpp"
#include "verify.hpp"

namespace andersonlab::cli {

namespace fs = std::filesystem;

const std::vector<std::string> kCommands = {"sample",    "enhance", "operator",   "spectrum",
                                            "propagate", "nls",     "strichartz", "verify"};

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ArtifactWriter::ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_ + ": " + ec.message());
}

void ArtifactWriter::write(const std::string& name, const std::string& bytes, const std::string& format) {
  fs::path target = fs::path(dir_) / name;
  fs::path tmp = fs::path(dir_) / ("." + name + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open " + tmp.string());
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw ConfigError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw ConfigError("cannot move " + tmp.string() + " to " + target.string() + ": " + ec.message());
  artifacts_.push_back({{"name", name}, {"format", format}, {"bytes", bytes.size()}, {"fnv1a", fnv1a_hex(bytes)}});
}

void ArtifactWriter::write_json(const std::string& name, const json& j, const std::string& format) {
  write(name, j.dump(2) + "\n", format);
}

namespace {

constexpr const char* kFieldFormat = "andersonlab.field/1";
constexpr const char* kCsvFormat = "csv/1";

std::string field_bytes(const TorusField& f) {
  std::ostringstream os(std::ios::binary);
  write_field(os, f);
  return os.str();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Keeps NaN out of JSON (nlohmann writes it as null anyway, this makes it explicit).
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Mollifier mollifier_of(const json& cfg) { return parse_mollifier(get_string(cfg, "mollifier"), get_double(cfg, "eps")); }

EnhancedNoise2d noise2(const json& cfg) {
  int M = get_int(cfg, "M");
  std::uint64_t seed = get_seed(cfg, "seed");
  auto s = sample_white_noise(2, M, seed);
  return enhance_2d(s.field, mollifier_of(cfg), get_double(cfg, "amplitude"), seed);
}

EnhancedNoise3d noise3(const json& cfg, bool lattice_c2) {
  int M = get_int(cfg, "M");
  std::uint64_t seed = get_seed(cfg, "seed");
  auto s = sample_white_noise(3, M, seed);
  return enhance_3d(s.field, mollifier_of(cfg), get_double(cfg, "amplitude"), seed, lattice_c2);
}

Band band_of(const json& cfg) {
  std::string b = get_string(cfg, "band");
  if (b == "ball") return Band::ball(get_double(cfg, "K"));
  if (b == "box") return Band::box();
  throw ConfigError("band must be ball or box");
}

std::shared_ptr<const AndersonOperator2d> operator2(const json& cfg) {
  return std::make_shared<const AndersonOperator2d>(noise2(cfg), band_of(cfg), get_int(cfg, "N"));
}

std::shared_ptr<const AndersonOperator3d> operator3(const json& cfg, bool pencil) {
  if (get_string(cfg, "band") != "ball") throw ConfigError("the 3d operator supports band = ball only");
  Anderson3dOptions opt;
  opt.cutoff = get_int(cfg, "N");
  opt.assemble_pencil = pencil;
  return std::make_shared<const AndersonOperator3d>(noise3(cfg, false), get_double(cfg, "K"), opt);
}

bool pencil_fits(const json& cfg) { return get_double(cfg, "K") < get_int(cfg, "M") / 4.0; }

PropagationMethod method_of(const json& cfg) {
  std::string m = get_string(cfg, "method");
  if (m == "dense") return PropagationMethod::Dense;
  if (m == "krylov") return PropagationMethod::Krylov;
  throw ConfigError("method must be dense or krylov");
}

json norms_json(const std::map<std::string, double>& norms) {
  json j = json::object();
  for (const auto& [k, v] : norms) j[k] = finite_or_null(v);
  return j;
}

void check(CommandResult& r, bool ok, const std::string& name) {
  if (!ok) r.failed.push_back(name);
}

CommandResult cmd_sample(const json& cfg, ArtifactWriter& w) {
  int dim = get_int(cfg, "dim"), M = get_int(cfg, "M");
  auto s = sample_white_noise(dim, M, get_seed(cfg, "seed"));
  const auto& lat = s.field.lattice();
  auto c = s.field.coeffs();
  double sum = 0.0, defect = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < lat.size; ++i) {
    defect = std::max(defect, std::abs(c[i] - std::conj(c[lat.neg[i]])));
    if (lat.has_nyquist(i) || lat.norm2[i] == 0) continue;
    sum += std::norm(c[i]);
    ++count;
  }
  w.write("noise.field", field_bytes(s.field), kFieldFormat);
  json j = {{"dim", dim},
            {"M", M},
            {"seed", s.seed},
            {"zero_mode_removed", s.zero_mode_removed},
            {"mean_abs2", sum / double(count)},
            {"hermitian_defect", defect}};
  w.write_json("sample.json", j, "andersonlab.sample/1");
  CommandResult r;
  check(r, defect == 0.0, "hermitian-symmetry");
  char buf[128];
  std::snprintf(buf, sizeof buf, "sample: dim %d M %d mean |xi(k)|^2 %.4f", dim, M, sum / double(count));
  r.summary = buf;
  return r;
}

CommandResult cmd_enhance(const json& cfg, ArtifactWriter& w) {
  int dim = get_int(cfg, "dim");
  CommandResult r;
  json j = {{"dim", dim},
            {"M", get_int(cfg, "M")},
            {"eps", get_double(cfg, "eps")},
            {"mollifier", get_string(cfg, "mollifier")},
            {"seed", get_seed(cfg, "seed")},
            {"amplitude", get_double(cfg, "amplitude")}};
  bool real = true;
  auto put = [&](const std::string& name, const TorusField& f) {
    real = real && f.is_real();
    w.write(name + ".field", field_bytes(f), kFieldFormat);
  };
  if (dim == 2) {
    auto e = noise2(cfg);
    put("xi", e.xi);
    put("X", e.X);
    put("xi2", e.xi2);
    j["c_eps"] = e.c_eps;
    j["kappa"] = e.kappa;
    j["norms"] = norms_json(e.norms);
    r.summary = "enhance: 2d, c_eps " + num(e.c_eps);
  } else {
    auto e = noise3(cfg, true);
    put("xi", e.xi);
    put("X", e.X);
    put("X1", e.X1);
    put("X2", e.X2);
    put("X3", e.X3);
    put("X4", e.X4);
    put("X5", e.X5);
    put("W", e.W);
    put("Z", e.Z);
    for (int a = 0; a < 3; ++a) put("Wt" + std::to_string(a), e.Wt[a]);
    j["c1"] = e.c1_eps;
    j["c2"] = finite_or_null(e.c2_eps);
    j["c1_subtracted"] = e.c1w;
    j["c2_subtracted"] = e.c2w;
    j["norms"] = norms_json(e.norms);
    r.summary = "enhance: 3d, c1 " + num(e.c1_eps);
  }
  w.write_json("noise.json", j, "andersonlab.noise/1");
  check(r, real, "real-valued-enhanced-noise");
  return r;
}

CommandResult cmd_operator(const json& cfg, ArtifactWriter& w) {
  CommandResult r;
  json j = {{"K", get_double(cfg, "K")},
            {"band", get_string(cfg, "band")},
            {"eps", get_double(cfg, "eps")},
            {"seed", get_seed(cfg, "seed")},
            {"amplitude", get_double(cfg, "amplitude")}};
  double contraction = 0.0;
  if (get_int(cfg, "dim") == 2) {
    auto op = operator2(cfg);
    contraction = op->contraction_factor(op->cutoff());
    const auto& eig = op->eigensystem();
    double lambda_min = -eig.values.back();
    j.update({{"N", op->cutoff()},
              {"shift", op->shift()},
              {"modes", op->index().size()},
              {"contraction_factor", contraction},
              {"lambda_min", lambda_min},
              {"lambda_max_unshifted", op->lambda_max_unshifted()},
              {"hermitian_defect", hermitian_defect(op->matrix())},
              {"c_eps", op->noise().c_eps},
              {"kappa", op->kappa()},
              {"norms", norms_json(op->noise().norms)}});
    check(r, lambda_min >= 0.0, "positivity-after-shift");
  } else {
    bool pencil = pencil_fits(cfg);
    auto op = operator3(cfg, pencil);
    contraction = op->contraction_factor(op->cutoff());
    j.update({{"N", op->cutoff()},
              {"shift", op->shift()},
              {"modes", op->index().size()},
              {"contraction_factor", contraction},
              {"c1", op->noise().c1_eps},
              {"c2", finite_or_null(op->noise().c2_eps)},
              {"c1_subtracted", op->noise().c1w},
              {"c2_subtracted", op->noise().c2w},
              {"tree_norms", norms_json(op->noise().norms)}});
    if (pencil) {
      double lambda_min = -op->eigensystem().values.back();
      j["lambda_min"] = lambda_min;
      check(r, lambda_min >= 0.0, "positivity-after-shift");
    } else {
      j["lambda_min"] = nullptr;
    }
  }
  check(r, contraction <= 0.5, "cutoff-contraction");
  w.write_json("operator.json", j, "andersonlab.operator/1");
  r.summary = "operator: N " + std::to_string(j["N"].get<int>()) + ", shift " + num(j["shift"].get<double>()) +
              ", contraction " + num(contraction);
  return r;
}

CommandResult cmd_spectrum(const json& cfg, ArtifactWriter& w) {
  CommandResult r;
  const EigenSystem* eig = nullptr;
  double shift = 0.0;
  std::shared_ptr<const AndersonOperator2d> op2;
  std::shared_ptr<const AndersonOperator3d> op3;
  if (get_int(cfg, "dim") == 2) {
    op2 = operator2(cfg);
    eig = &op2->eigensystem();
    shift = op2->shift();
  } else {
    if (!pencil_fits(cfg)) throw ConfigError("3d spectrum needs K < M/4");
    op3 = operator3(cfg, true);
    eig = &op3->eigensystem();
    shift = op3->shift();
  }
  // eigenvalues of -(H - shift), ascending, and of H
  std::ostringstream csv;
  csv << "index,minus_shifted,h\n";
  const auto& v = eig->values;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double lam = v[v.size() - 1 - i];
    csv << i << ',' << num(-lam) << ',' << num(lam + shift) << '\n';
  }
  w.write("spectrum.csv", csv.str(), kCsvFormat);
  double lambda_min = -v.back();
  json j = {{"modes", v.size()}, {"shift", shift}, {"lambda_min", lambda_min}, {"h_max", v.back() + shift},
            {"h_min", v.front() + shift}};
  w.write_json("spectrum.json", j, "andersonlab.spectrum/1");
  check(r, lambda_min >= 0.0, "positivity-after-shift");
  r.summary = "spectrum: " + std::to_string(v.size()) + " eigenvalues, lambda_min " + num(lambda_min);
  return r;
}

CommandResult cmd_propagate(const json& cfg, ArtifactWriter& w) {
  CommandResult r;
  std::unique_ptr<AndersonGroup> group;
  TorusField u0, us;  // data, and sharp data in H^2 for the Duhamel check
  std::uint64_t data_seed = get_seed(cfg, "data_seed");
  if (get_int(cfg, "dim") == 2) {
    auto op = operator2(cfg);
    group = std::make_unique<AndersonGroup>(op, method_of(cfg), get_int(cfg, "krylov_dim"));
    u0 = op->random_band_field(data_seed, 1.0);
    us = op->random_band_field(data_seed + 1, 2.0);
  } else {
    if (!pencil_fits(cfg)) throw ConfigError("3d propagation needs K < M/4");
    auto op = operator3(cfg, true);
    group = std::make_unique<AndersonGroup>(op);
    u0 = op->random_band_field(data_seed, 1.0);
    us = op->random_band_field(data_seed + 1, 2.0);
  }
  u0 *= 1.0 / std::sqrt(group->mass(u0));
  double T = get_double(cfg, "T");
  int steps = get_int(cfg, "steps");
  int stride = get_int(cfg, "snapshot_stride");
  if (steps < 1) throw ConfigError("steps must be positive");
  std::ostringstream csv;
  csv << "t,mass,energy,hs_0,hs_1,hs_2\n";
  double m0 = group->mass(u0), e0 = group->energy(u0);
  double mass_drift = 0.0, energy_drift = 0.0;
  for (int i = 0; i <= steps; ++i) {
    double t = T * i / steps;
    TorusField u = group->propagate(u0, t);
    double m = group->mass(u), e = group->energy(u);
    mass_drift = std::max(mass_drift, std::abs(m - m0) / m0);
    energy_drift = std::max(energy_drift, std::abs(e - e0) / std::abs(e0));
    csv << num(t) << ',' << num(m) << ',' << num(e) << ',' << num(sobolev_norm(u, 0)) << ','
        << num(sobolev_norm(u, 1)) << ',' << num(sobolev_norm(u, 2)) << '\n';
    if (stride > 0 && i % stride == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "snap_%05d.field", i);
      w.write(name, field_bytes(u), kFieldFormat);
    }
  }
  w.write("trajectory.csv", csv.str(), kCsvFormat);
  TorusField half = group->propagate(group->propagate(u0, T / 2), T / 2);
  TorusField full = group->propagate(u0, T);
  double group_law = l2_norm(half - full) / l2_norm(full);
  double per_time = std::max(T, 1.0);
  json j = {{"generator", group->dim() == 2 ? "anderson2d" : "anderson3d"},
            {"method", to_string(group->plan().method)},
            {"modes", group->index().size()},
            {"shift", group->shift()},
            {"N", group->cutoff()},
            {"mass_drift", mass_drift},
            {"energy_drift", energy_drift},
            {"group_law", group_law}};
  check(r, mass_drift <= 1e-10 * per_time, "mass-conservation");
  check(r, energy_drift <= 1e-8, "energy-conservation");
  check(r, group_law <= 1e-9, "group-law");
  double td = get_double(cfg, "duhamel_t");
  if (td > 0.0) {
    group->prepare_sharp_basis();
    std::ostringstream dcsv;
    dcsv << "quad_steps,residual,lhs_norm\n";
    json rows = json::array();
    std::vector<double> res;
    for (int q : {8, 16, 32, 64}) {
      auto d = duhamel_difference(*group, us, td, 0.0, q);
      res.push_back(d.residual);
      dcsv << q << ',' << num(d.residual) << ',' << num(l2_norm(d.lhs)) << '\n';
      rows.push_back({{"quad_steps", q}, {"residual", d.residual}});
    }
    w.write("duhamel.csv", dcsv.str(), kCsvFormat);
    j["duhamel"] = rows;
    check(r, res.back() <= 1e-6, "duhamel-residual");
    bool decreasing = true;
    for (std::size_t i = 1; i < res.size(); ++i) decreasing = decreasing && res[i] < res[i - 1];
    check(r, decreasing, "duhamel-refinement");
  }
  w.write_json("propagate.json", j, "andersonlab.propagate/1");
  r.summary = "propagate: mass drift " + num(mass_drift) + ", energy drift " + num(energy_drift);
  return r;
}

std::string ledger_csv(const std::vector<LedgerRow>& rows) {
  std::ostringstream csv;
  csv << "t,mass,energy,Hs,L4W_accum\n";
  for (const auto& row : rows)
    csv << num(row.t) << ',' << num(row.mass) << ',' << num(row.energy) << ',' << num(row.hs) << ','
        << num(row.l4w_accum) << '\n';
  return csv.str();
}

CommandResult cmd_nls(const json& cfg, ArtifactWriter& w) {
  if (get_int(cfg, "dim") != 2) throw ConfigError("nls runs in 2d only");
  if (get_string(cfg, "band") != "box") throw ConfigError("nls needs band = box");
  CommandResult r;
  auto op = operator2(cfg);
  NlsSolver solver(op);
  int M = get_int(cfg, "M");
  double T = get_double(cfg, "T"), dt = get_double(cfg, "dt"), amp = get_double(cfg, "data_amplitude");
  double s = get_double(cfg, "s"), sigma = get_double(cfg, "sigma");
  std::string scheme = get_string(cfg, "scheme"), experiment = get_string(cfg, "experiment");
  std::uint64_t data_seed = get_seed(cfg, "data_seed");
  json j = {{"scheme", scheme}, {"experiment", experiment}, {"N", op->cutoff()}, {"shift", op->shift()},
            {"T", T}, {"dt", dt}, {"s", s}, {"sigma", sigma}};
  if (experiment == "lwp") {
    auto rep = solver.lwp_experiment(s, seed_list(cfg), get_double(cfg, "delta"), T, dt, amp, sigma);
    std::ostringstream csv;
    csv << "seed,quotient,l4w\n";
    for (std::size_t i = 0; i < rep.seeds.size(); ++i)
      csv << rep.seeds[i] << ',' << num(rep.quotients[i]) << ',' << num(rep.l4w[i]) << '\n';
    w.write("lwp.csv", csv.str(), kCsvFormat);
    j["max_quotient"] = rep.max_quotient();
    j["delta"] = rep.delta;
    check(r, rep.max_quotient() <= 100.0, "lipschitz-quotient-bounded");
    r.summary = "nls lwp: max quotient " + num(rep.max_quotient());
  } else if (experiment == "gwp") {
    auto rep = solver.gwp_experiment(data_seed, T, dt, amp, get_int(cfg, "ledger_stride"));
    w.write("ledger.csv", ledger_csv(rep.ledger), kCsvFormat);
    j.update({{"initial_norm", rep.initial_norm},
              {"sup_ratio", rep.sup_ratio},
              {"mass_drift", rep.mass_drift},
              {"energy_drift", rep.energy_drift}});
    check(r, rep.sup_ratio <= 2.0, "energy-norm-bounded");
    r.summary = "nls gwp: sup ratio " + num(rep.sup_ratio);
  } else if (experiment == "run") {
    if (scheme == "strang") {
      TorusField u0 = smooth_random_field(2, M, data_seed, get_double(cfg, "data_width")) * amp;
      NlsSolver::RunOptions opt;
      opt.s = s;
      opt.sigma = sigma;
      opt.ledger_stride = get_int(cfg, "ledger_stride");
      auto c0 = solver.conserved(u0);
      auto st = solver.run_split(u0, T, dt, opt);
      auto c1 = solver.conserved(st.u);
      w.write("ledger.csv", ledger_csv(st.ledger), kCsvFormat);
      w.write("final.field", field_bytes(st.u), kFieldFormat);
      double mass_drift = std::abs(c1.mass - c0.mass) / c0.mass;
      double energy_drift = std::abs(c1.energy - c0.energy) / std::abs(c0.energy);
      j.update({{"mass", {c0.mass, c1.mass}}, {"energy", {c0.energy, c1.energy}}, {"mass_drift", mass_drift},
                {"energy_drift", energy_drift}});
      check(r, mass_drift <= 1e-8, "mass-conservation");
      r.summary = "nls strang: mass drift " + num(mass_drift) + ", energy drift " + num(energy_drift);
    } else if (scheme == "picard") {
      TorusField u0s = hs_random_field(2, M, data_seed, s, Band::box()) * amp;
      auto res = solver.picard(u0s, T, get_int(cfg, "picard_iter"), get_int(cfg, "panels"));
      w.write("final.field", field_bytes(res.state.u), kFieldFormat);
      j.update({{"differences", res.differences}, {"converged", res.converged}, {"contraction", res.contraction}});
      check(r, res.converged, "picard-convergence");
      check(r, res.contraction <= 0.5, "picard-contraction");
      r.summary = "nls picard: " + std::to_string(res.differences.size()) + " iterations, contraction " +
                  num(res.contraction);
    } else {
      throw ConfigError("scheme must be strang or picard");
    }
  } else {
    throw ConfigError("experiment must be run, lwp or gwp");
  }
  w.write_json("nls.json", j, "andersonlab.nls/1");
  return r;
}

CommandResult cmd_strichartz(const json& cfg, ArtifactWriter& w) {
  CommandResult r;
  ScalingReport rep = run_scaling(cfg);
  std::ostringstream csv;
  csv << "generator,d,p,sigma,N,seed,norm,data_norm\n";
  for (const auto& c : rep.cells)
    csv << rep.generator << ',' << rep.d << ',' << num(rep.p) << ',' << num(rep.sigma) << ',' << c.N << ','
        << c.seed << ',' << num(c.norm) << ',' << num(c.data_norm) << '\n';
  w.write("cells.csv", csv.str(), kCsvFormat);
  json j = {{"generator", rep.generator}, {"d", rep.d},
            {"p", rep.p},                 {"sigma", rep.sigma},
            {"data_s", rep.data_s},       {"interval", rep.interval},
            {"N_list", rep.N_list},       {"seeds", rep.seeds.size()},
            {"mean_norm", rep.mean_norm}, {"std_norm", rep.std_norm},
            {"slope", rep.fit.slope},     {"stderr", rep.fit.slope_stderr},
            {"theory_slope", rep.theory_slope}, {"tolerance", rep.tolerance},
            {"two_sided", rep.two_sided}, {"pass", rep.pass}};
  if (rep.has_alt) j["l2_normalized_slope"] = rep.alt_fit.slope;
  w.write_json("summary.json", j, "andersonlab.strichartz/1");
  check(r, rep.pass, "strichartz-slope");
  r.summary = "strichartz " + rep.generator + ": slope " + num(rep.fit.slope) + " theory " + num(rep.theory_slope) +
              (rep.pass ? " pass" : " FAIL");
  return r;
}

CommandResult cmd_verify(const json& cfg, ArtifactWriter& w) {
  VerifyReport rep = run_verify(get_string(cfg, "profile"), cfg);
  std::string text = rep.text();
  w.write("report.txt", text, "text/1");
  w.write_json("report.json", rep.to_json(), "andersonlab.verify/1");
  CommandResult r;
  r.failed = rep.failures();
  r.summary = text;
  return r;
}

}  // namespace

ScalingReport run_scaling(const json& cfg) {
  std::string gen = get_string(cfg, "generator");
  int dim = get_int(cfg, "dim");
  double p = get_double(cfg, "p"), sigma = get_double(cfg, "sigma");
  auto N_list = get_int_list(cfg, "N_list");
  auto seeds = seed_list(cfg);
  ScalingOptions opt;
  opt.M = get_int(cfg, "M");
  opt.n_t = get_int(cfg, "n_t");
  opt.tolerance = get_double(cfg, "tolerance");
  opt.two_sided = get_bool(cfg, "two_sided");
  if (gen == "laplacian") return laplacian_scaling(dim, p, N_list, seeds, opt);
  if (gen == "short-time") return short_time_scaling(dim, p, N_list, seeds, opt);
  if (gen == "anderson2d") {
    if (dim != 2) throw ConfigError("generator anderson2d needs dim = 2");
    AndersonGroup group(operator2(cfg));
    group.prepare_sharp_basis();
    return anderson_scaling_2d(p, N_list, seeds, group, opt, sigma);
  }
  if (gen == "anderson3d") {
    if (dim != 3) throw ConfigError("generator anderson3d needs dim = 3");
    if (!pencil_fits(cfg)) throw ConfigError("anderson3d scaling needs K < M/4");
    AndersonGroup group(operator3(cfg, true));
    group.prepare_sharp_basis();
    return anderson_scaling_3d(p, N_list, seeds, group, opt, sigma);
  }
  throw ConfigError("generator must be laplacian, short-time, anderson2d or anderson3d");
}

CommandResult run_command(const std::string& command, const json& cfg) {
  ArtifactWriter w(get_string(cfg, "out"));
  CommandResult r;
  if (command == "sample") r = cmd_sample(cfg, w);
  else if (command == "enhance") r = cmd_enhance(cfg, w);
  else if (command == "operator") r = cmd_operator(cfg, w);
  else if (command == "spectrum") r = cmd_spectrum(cfg, w);
  else if (command == "propagate") r = cmd_propagate(cfg, w);
  else if (command == "nls") r = cmd_nls(cfg, w);
  else if (command == "strichartz") r = cmd_strichartz(cfg, w);
  else if (command == "verify") r = cmd_verify(cfg, w);
  else throw ConfigError("unknown command " + command);
  json manifest = {{"schema", "andersonlab.manifest/1"}, {"config_schema", kSchema}, {"tool", "andersonlab"},
                   {"version", kVersion},        {"command", command},
                   {"config", cfg},              {"artifacts", w.artifacts()},
                   {"status", r.failed.empty() ? "ok" : "check-failed"},
                   {"failed_checks", r.failed}};
  w.write_json("manifest.json", manifest, "andersonlab.manifest/1");
  return r;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"andersonlab: paracontrolled Anderson Hamiltonian laboratory"};
  app.require_subcommand(1);
  struct Sub {
    CLI::App* app;
    std::string config, preset;
    std::map<std::string, std::string> values;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  const char* help[] = {"sample white noise",       "build the enhanced noise",
                        "assemble the operator",    "eigenvalues of the shifted operator",
                        "propagate random data",    "cubic NLS runs and experiments",
                        "Strichartz scaling study", "run an invariant suite"};
  for (std::size_t c = 0; c < kCommands.size(); ++c) {
    auto sub = std::make_unique<Sub>();
    sub->app = app.add_subcommand(kCommands[c], help[c]);
    sub->app->add_option("--config", sub->config, "JSON config file");
    sub->app->add_option("--preset", sub->preset, "named preset");
    for (const auto& e : default_table()) {
      std::string key = e.key;
      Sub* sp = sub.get();
      sub->app->add_option_function<std::string>(
          "--" + key, [sp, key](const std::string& v) { sp->values[key] = v; }, e.doc);
    }
    subs.push_back(std::move(sub));
  }
  auto* defaults = app.add_subcommand("defaults", "print the table of defaults");
  auto* presets = app.add_subcommand("presets", "list the presets");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }
  if (defaults->parsed()) {
    out << defaults_markdown();
    return kOk;
  }
  if (presets->parsed()) {
    for (const auto& p : preset_table()) out << p.name << " (" << p.command << "): " << p.doc << '\n';
    return kOk;
  }
  for (std::size_t c = 0; c < subs.size(); ++c) {
    if (!subs[c]->app->parsed()) continue;
    const std::string& command = kCommands[c];
    json cfg;
    try {
      cfg = resolve_config(command, subs[c]->config, subs[c]->preset, subs[c]->values);
    } catch (const ConfigError& e) {
      err << "usage error: " << e.what() << '\n';
      return kUsage;
    }
    try {
      CommandResult r = run_command(command, cfg);
      out << r.summary << (r.summary.empty() || r.summary.back() == '\n' ? "" : "\n");
      if (!r.failed.empty()) {
        for (const auto& f : r.failed) err << "check failed: " << f << '\n';
        return kCheckFailed;
      }
      return kOk;
    } catch (const ConfigError& e) {
      err << "usage error: " << e.what() << '\n';
      return kUsage;
    } catch (const ConvergenceError& e) {
      err << "check failed: convergence: " << e.what() << '\n';
      return kCheckFailed;
    } catch (const std::exception& e) {
      err << "check failed: " << e.what() << '\n';
      return kCheckFailed;
    }
  }
  return kUsage;
}

}  // namespace andersonlab::cli
